"""Experiment runner: every operation behind a reproducible subcommand.

Configuration is a single strict JSON document (unknown keys rejected,
round-trips exactly); reports are deterministic given (config, seed),
with wall time quarantined in a separate `timing` field so the rest of
the document is byte-stable.  Exit codes: 0 pass, 1 config error,
2 domain error, 3 precondition failure, 4 tolerance failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import (ConfigError, DiscSpecError, DomainError,
                     PreconditionError, ToleranceFailure)
from .moebius import (MoebiusTransform, build_canonical_hyperbolic,
                      build_disc_automorphism, build_parabolic_translation,
                      classify)
from .norms import DiscGrid, QuadratureRule
from .operators import (Space, WeightedCompositionOp, check_bounded,
                        check_invertible, taylor_truncation)
from .spectra import (Annulus, Circle, RootSetClosure, conjecture_probe,
                      elliptic_root_cloud, predict_spectrum,
                      spectral_radius_estimate, truncation_eigenvalues)
from .symbols import BlaschkeProduct, RationalSymbol
from .verification import run_verification

_MAP_KINDS = ("rotation", "moebius", "canonical_hyperbolic",
              "parabolic_cayley", "blaschke")


def _complex_pairs(values, where: str):
    out = []
    for item in values:
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not all(isinstance(x, (int, float)) for x in item)):
            raise ConfigError(f"{where}: expected [re, im] pairs")
        out.append(complex(float(item[0]), float(item[1])))
    return tuple(out)


def _pairs_from_complex(values):
    return [[z.real, z.imag] for z in values]


def _check_keys(doc: dict, allowed, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


@dataclass(frozen=True)
class MapSpec:
    kind: str
    params: dict

    @classmethod
    def from_dict(cls, doc: dict) -> "MapSpec":
        _check_keys(doc, {"kind", "params"}, "operator.selfmap")
        kind = doc.get("kind")
        if kind not in _MAP_KINDS:
            raise ConfigError(f"operator.selfmap.kind must be one of {_MAP_KINDS}")
        params = doc.get("params", {})
        allowed = {
            "rotation": {"theta"},
            "moebius": {"theta", "p"},
            "canonical_hyperbolic": {"mu"},
            "parabolic_cayley": {"translation"},
            "blaschke": {"zeros", "unimodular_factor"},
        }[kind]
        _check_keys(params, allowed, f"operator.selfmap.params({kind})")
        return cls(kind=kind, params=dict(params))

    def build(self):
        p = self.params
        if self.kind == "rotation":
            return build_disc_automorphism(float(p.get("theta", 0.0)), 0.0)
        if self.kind == "moebius":
            point = _complex_pairs([p.get("p", [0.0, 0.0])], "selfmap.p")[0]
            return build_disc_automorphism(float(p.get("theta", 0.0)), point)
        if self.kind == "canonical_hyperbolic":
            return build_canonical_hyperbolic(float(p.get("mu", 0.5)))
        if self.kind == "parabolic_cayley":
            return build_parabolic_translation(float(p.get("translation", 1.0)))
        zeros = _complex_pairs(p.get("zeros", []), "selfmap.zeros")
        eta = _complex_pairs([p.get("unimodular_factor", [1.0, 0.0])],
                             "selfmap.unimodular_factor")[0]
        return BlaschkeProduct(zeros, eta)


@dataclass(frozen=True)
class OperatorSpec:
    weight_numerator: tuple
    weight_denominator: tuple
    selfmap: MapSpec
    space: str

    @classmethod
    def from_dict(cls, doc: dict) -> "OperatorSpec":
        _check_keys(doc, {"weight_numerator", "weight_denominator",
                          "selfmap", "space"}, "operator")
        space = doc.get("space", "bloch")
        if space not in ("bloch", "dirichlet"):
            raise ConfigError("operator.space must be 'bloch' or 'dirichlet'")
        return cls(
            weight_numerator=_complex_pairs(
                doc.get("weight_numerator", [[1.0, 0.0]]),
                "operator.weight_numerator"),
            weight_denominator=_complex_pairs(
                doc.get("weight_denominator", [[1.0, 0.0]]),
                "operator.weight_denominator"),
            selfmap=MapSpec.from_dict(doc.get("selfmap", {})),
            space=space,
        )

    def build(self) -> WeightedCompositionOp:
        weight = RationalSymbol(np.array(self.weight_numerator),
                                np.array(self.weight_denominator))
        return WeightedCompositionOp(weight, self.selfmap.build(),
                                     Space(self.space))

    def to_dict(self) -> dict:
        return {
            "weight_numerator": _pairs_from_complex(self.weight_numerator),
            "weight_denominator": _pairs_from_complex(self.weight_denominator),
            "selfmap": {"kind": self.selfmap.kind,
                        "params": self.selfmap.params},
            "space": self.space,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    operator: OperatorSpec
    radial_levels: int = 12
    beta: float = 0.75
    boundary_layer: bool = True
    quadrature_radial_order: int = 32
    quadrature_angular_count: int = 128
    cocycle_lengths: tuple = (25, 50, 100)
    truncation_orders: tuple = (16, 32, 64)
    probe_points: int = 7
    tolerances: dict = field(default_factory=dict)
    checks: Optional[tuple] = None
    output_dir: str = "out"
    seed: int = 0
    schema_version: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        allowed = {"schema_version", "operator", "grid", "quadrature",
                   "schedules", "tolerances", "checks", "output_dir", "seed"}
        _check_keys(doc, allowed, "config")
        if doc.get("schema_version", 1) != 1:
            raise ConfigError("unsupported schema_version")
        grid = doc.get("grid", {})
        _check_keys(grid, {"radial_levels", "beta", "boundary_layer"},
                    "config.grid")
        quad = doc.get("quadrature", {})
        _check_keys(quad, {"radial_order", "angular_count"}, "config.quadrature")
        sched = doc.get("schedules", {})
        _check_keys(sched, {"cocycle_lengths", "truncation_orders",
                            "probe_points"}, "config.schedules")
        tolerances = doc.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise ConfigError("config.tolerances must be an object")
        checks = doc.get("checks")
        if checks is not None and not isinstance(checks, list):
            raise ConfigError("config.checks must be a list of check names")
        return cls(
            operator=OperatorSpec.from_dict(doc.get("operator", {})),
            radial_levels=int(grid.get("radial_levels", 12)),
            beta=float(grid.get("beta", 0.75)),
            boundary_layer=bool(grid.get("boundary_layer", True)),
            quadrature_radial_order=int(quad.get("radial_order", 32)),
            quadrature_angular_count=int(quad.get("angular_count", 128)),
            cocycle_lengths=tuple(int(n) for n in
                                  sched.get("cocycle_lengths", (25, 50, 100))),
            truncation_orders=tuple(int(n) for n in
                                    sched.get("truncation_orders", (16, 32, 64))),
            probe_points=int(sched.get("probe_points", 7)),
            tolerances={str(k): float(v) for k, v in tolerances.items()},
            checks=tuple(str(c) for c in checks) if checks is not None else None,
            output_dir=str(doc.get("output_dir", "out")),
            seed=int(doc.get("seed", 0)),
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "operator": self.operator.to_dict(),
            "grid": {"radial_levels": self.radial_levels, "beta": self.beta,
                     "boundary_layer": self.boundary_layer},
            "quadrature": {"radial_order": self.quadrature_radial_order,
                           "angular_count": self.quadrature_angular_count},
            "schedules": {"cocycle_lengths": list(self.cocycle_lengths),
                          "truncation_orders": list(self.truncation_orders),
                          "probe_points": self.probe_points},
            "tolerances": dict(self.tolerances),
            "checks": list(self.checks) if self.checks is not None else None,
            "output_dir": self.output_dir,
            "seed": self.seed,
        }

    def grid(self) -> DiscGrid:
        return DiscGrid(radial_levels=self.radial_levels, beta=self.beta,
                        include_boundary=self.boundary_layer)

    def quadrature(self) -> QuadratureRule:
        return QuadratureRule(self.quadrature_radial_order,
                              self.quadrature_angular_count)


def default_config() -> ExperimentConfig:
    return ExperimentConfig(operator=OperatorSpec(
        weight_numerator=(complex(2.0), complex(1.0)),
        weight_denominator=(complex(1.0),),
        selfmap=MapSpec("canonical_hyperbolic", {"mu": 0.5}),
        space="bloch",
    ))


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return default_config()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(doc)


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass
class Report:
    command: str
    config_hash: str
    tool_version: str
    seed: int
    records: list
    artifacts: list
    passed: bool
    timing: dict = field(default_factory=dict)

    def to_json(self, include_timing: bool = True) -> str:
        doc = asdict(self)
        if not include_timing:
            doc.pop("timing")
        return json.dumps(doc, sort_keys=True, indent=2, default=_jsonify)


def _jsonify(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def _write_cloud_csv(points: np.ndarray, path: Path) -> None:
    data = np.column_stack([points.real, points.imag])
    np.savetxt(path, data, delimiter=",", header="re,im", comments="",
               fmt="%.17g")


def _shape_to_dict(shape) -> dict:
    if isinstance(shape, Circle):
        return {"kind": "circle", "radius": shape.radius}
    if isinstance(shape, Annulus):
        return {"kind": "annulus", "r_min": shape.r_min, "r_max": shape.r_max,
                "exact": shape.exact}
    if isinstance(shape, RootSetClosure):
        return {"kind": "root_set_closure", "period": shape.period,
                "n_points": int(shape.points.size)}
    raise DomainError(f"unknown shape {type(shape).__name__}")


def _estimate_to_dict(estimate) -> dict:
    return {"value": estimate.value, "kind": estimate.kind,
            "grid": estimate.grid_descriptor,
            "refinement_delta": estimate.refinement_delta}


def _classification_record(phi) -> dict:
    if not isinstance(phi, MoebiusTransform):
        raise DomainError("classification needs a Moebius selfmap")
    info = classify(phi)
    return {
        "name": "classification",
        "tag": info.tag.value,
        "fixed_points": [{"location": loc, "derivative": der}
                         for loc, der in info.fixed_points],
        "attractive": info.attractive,
        "repulsive": info.repulsive,
        "multiplier": info.multiplier,
        "diagnostic": info.diagnostic,
    }


# --------------------------------------------------------------------------
# subcommand handlers: each returns (records, artifacts, passed)

def _cmd_classify(config, out_dir, rng):
    return [_classification_record(config.operator.selfmap.build())], [], True


def _cmd_predict(config, out_dir, rng):
    op = config.operator.build()
    prediction = predict_spectrum(op, config.grid())
    record = {
        "name": "spectrum-prediction",
        "shape": _shape_to_dict(prediction.shape),
        "provenance": prediction.provenance,
        "assumptions_checked": prediction.assumptions_checked,
    }
    artifacts = []
    if isinstance(prediction.shape, RootSetClosure):
        path = out_dir / "root_cloud.csv"
        _write_cloud_csv(prediction.shape.points, path)
        artifacts.append(str(path))
    return [record], artifacts, True


def _cmd_estimate_radius(config, out_dir, rng):
    op = config.operator.build()
    est = spectral_radius_estimate(op, config.cocycle_lengths, config.grid())
    record = {
        "name": "spectral-radius-estimate",
        "schedule": list(est.schedule),
        "sequence": list(est.sequence),
        "extrapolated": est.extrapolated,
        "predicted": est.predicted,
        "relative_gap": est.relative_gap,
    }
    return [record], [], True


def _cmd_check_bounded(config, out_dir, rng):
    op = config.operator.build()
    verdict = check_bounded(op, config.grid())
    record = {
        "name": "boundedness-verdict",
        "verdict": verdict.verdict.value,
        "witnesses": {k: _estimate_to_dict(v)
                      for k, v in verdict.witnesses.items()},
        "detail": verdict.detail,
    }
    return [record], [], True


def _cmd_check_invertible(config, out_dir, rng):
    op = config.operator.build()
    result = check_invertible(op, config.grid())
    record = {
        "name": "invertibility",
        "invertible": result.invertible,
        "weight_infimum": result.weight_infimum,
        "multiplier_verdict": result.multiplier_verdict.verdict.value,
        "is_automorphism": result.is_automorphism,
        "reason": result.reason,
    }
    return [record], [], True


def _cmd_root_cloud(config, out_dir, rng):
    op = config.operator.build()
    prediction = elliptic_root_cloud(op, config.grid())
    cloud = prediction.shape.points
    path = out_dir / "root_cloud.csv"
    _write_cloud_csv(cloud, path)
    # coverage diagnostic on a modest nested pair; reported, not certified
    from .spectra import cloud_refinement_distance
    coverage = cloud_refinement_distance(op, DiscGrid(6, 0.5, True))
    record = {
        "name": "elliptic-root-cloud",
        "period": prediction.shape.period,
        "n_points": int(cloud.size),
        "modulus_range": [float(np.min(np.abs(cloud))),
                          float(np.max(np.abs(cloud)))],
        "refinement_hausdorff": coverage,
        "provenance": prediction.provenance,
    }
    return [record], [str(path)], True


def _cmd_truncate_eigs(config, out_dir, rng):
    op = config.operator.build()
    records, artifacts = [], []
    for order in config.truncation_orders:
        eigs = truncation_eigenvalues(taylor_truncation(op, order))
        path = out_dir / f"eigs_N{order}.csv"
        _write_cloud_csv(eigs, path)
        artifacts.append(str(path))
        records.append({
            "name": f"truncation-eigenvalues-N{order}",
            "order": order,
            "max_modulus": float(np.max(np.abs(eigs))),
            "min_modulus": float(np.min(np.abs(eigs))),
            "exploratory": True,
        })
    return records, artifacts, True


def _cmd_probe_conjecture(config, out_dir, rng):
    op = config.operator.build()
    probe = conjecture_probe(op, config.probe_points, config.grid(),
                             orders=config.truncation_orders, rng=rng)
    records = [{
        "name": "conjecture-probe",
        "exploratory": True,
        "annulus": {"r_min": probe.annulus.r_min, "r_max": probe.annulus.r_max},
        "samples": [{
            "lambda": sample.point,
            "region": sample.region,
            "orders": list(sample.orders),
            "resolvent_norms": list(sample.resolvent_norms),
            "growth_ratio": sample.growth_ratio,
        } for sample in probe.samples],
    }]
    return records, [], True


def _cmd_verify(config, out_dir, rng):
    records = run_verification(grid=config.grid(), seed=config.seed,
                               tolerances=config.tolerances,
                               checks=config.checks)
    out = [{
        "name": r.name, "provenance": r.provenance,
        "predicted": r.predicted, "observed": r.observed,
        "tolerance": r.tolerance, "pass": r.passed, "detail": r.detail,
    } for r in records]
    return out, [], all(r.passed for r in records)


_COMMANDS = {
    "classify": _cmd_classify,
    "predict": _cmd_predict,
    "estimate-radius": _cmd_estimate_radius,
    "check-bounded": _cmd_check_bounded,
    "check-invertible": _cmd_check_invertible,
    "root-cloud": _cmd_root_cloud,
    "truncate-eigs": _cmd_truncate_eigs,
    "probe-conjecture": _cmd_probe_conjecture,
    "verify": _cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discspec",
        description="Spectral toolkit for weighted composition operators "
                    "on the Bloch and Dirichlet spaces of the unit disc.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", default=None,
                         help="JSON experiment configuration")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.add_argument("--grid-levels", type=int, default=None,
                         help="override the radial level count")
        cmd.add_argument("--json", action="store_true",
                         help="print the report to stdout")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.grid_levels is not None:
            overrides["radial_levels"] = args.grid_levels
        if args.out is not None:
            overrides["output_dir"] = args.out
        if overrides:
            config = dataclass_replace(config, **overrides)

        out_dir = Path(config.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        rng = np.random.default_rng(config.seed)

        start = time.perf_counter()
        records, artifacts, passed = _COMMANDS[args.command](config, out_dir, rng)
        elapsed = time.perf_counter() - start

        report = Report(
            command=args.command,
            config_hash=config_hash(config),
            tool_version=__version__,
            seed=config.seed,
            records=records,
            artifacts=artifacts,
            passed=passed,
            timing={"wall_time_s": elapsed},
        )
        report_path = out_dir / f"report_{args.command.replace('-', '_')}.json"
        report_path.write_text(report.to_json() + "\n")
        if args.json:
            print(report.to_json())
        else:
            for record in records:
                name = record.get("name", "record")
                if "pass" in record:
                    status = "PASS" if record["pass"] else "FAIL"
                    print(f"[{status}] {name}: observed={record['observed']:.6g}"
                          f" predicted={record['predicted']:.6g}"
                          f" tol={record['tolerance']:.3g}")
                else:
                    print(f"[done] {name}")
            print(f"report: {report_path}")
        return 0 if passed else 4
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return 3
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 4


def dataclass_replace(config: ExperimentConfig, **changes) -> ExperimentConfig:
    doc = {f.name: getattr(config, f.name) for f in fields(ExperimentConfig)}
    doc.update(changes)
    return ExperimentConfig(**doc)


if __name__ == "__main__":
    raise SystemExit(main())
