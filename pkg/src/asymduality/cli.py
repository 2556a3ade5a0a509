"""Command-line interface: pattern | duality | uqsd | montecarlo | sweep.

Configuration is read from an optional flat key-value file (--config) and then
overridden by per-key flags. Every file-writing command drops a manifest next
to its outputs with the resolved configuration, seed, tool version, and output
names, sufficient to re-run the command. Floats are serialized with 17
significant digits so CSV round-trips are bit exact.

Exit codes: 0 success, 1 validation/usage error, 2 internal consistency
failure (a duality identity flagged a violation).
"""

import argparse
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .duality import DualityReport, evaluate_duality
from .errors import ConsistencyError, ValidationError
from .fringes import measure_visibility
from .model import (
    CONFIG_KEYS,
    ExperimentConfig,
    config_from_mapping,
    load_config_file,
    canonical_theta,
)
from .montecarlo import group_statistics, sample_batch
from .optics import Conditioning, Mode, intensity
from .uqsd import basis_from_config, distinguishability
from .duality import QuantonDetectorState


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _config_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="flat key=value config file")
    for key in CONFIG_KEYS:
        parent.add_argument(f"--{key}", type=float, metavar="X", help=f"override {key}")
    return parent


def _resolve_config(args) -> ExperimentConfig:
    values: dict[str, float] = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        override = vars(args).get(key)
        if override is not None:
            values[key] = override
    return config_from_mapping(values)


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}")


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written next to every output file.

    The resolved config is post-override and post-canonicalization; together
    with the subcommand parameters it is sufficient to re-run the command.
    """

    subcommand: str
    config: dict[str, float]
    seed: int | None
    tool_version: str
    outputs: list[str]
    duration_seconds: float
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "outputs": self.outputs,
            "duration_seconds": self.duration_seconds,
            "parameters": self.parameters,
        }


def _write_manifest(
    primary: Path, subcommand: str, cfg: ExperimentConfig, outputs: list[str],
    started: float, seed: int | None = None, parameters: dict | None = None,
) -> None:
    manifest = RunManifest(
        subcommand=subcommand,
        config=cfg.to_mapping(),
        seed=seed,
        tool_version=__version__,
        outputs=outputs,
        duration_seconds=time.time() - started,
        parameters=parameters or {},
    )
    _write_text(primary.with_name(primary.stem + ".manifest.json"), _dump_json(manifest.to_dict()))


def _uqsd_payload(cfg: ExperimentConfig) -> dict:
    amps, basis = basis_from_config(cfg)
    d_q = distinguishability(basis, amps)
    return {
        "c1": amps.c1,
        "c2": amps.c2,
        "swapped": amps.swapped,
        "case": basis.case_label.value,
        "alpha": basis.alpha,
        "beta": basis.beta,
        "gamma": basis.gamma,
        "delta_mod": basis.delta_mod,
        "delta_phase": basis.theta,
        "p_outcome1": basis.p_outcome1,
        "p_outcome2": basis.p_outcome2,
        "p_outcome3": basis.p_outcome3,
        "d_q": d_q,
    }


def _cmd_uqsd(args) -> int:
    cfg = _resolve_config(args)
    payload = _uqsd_payload(cfg)
    if args.format == "table":
        width = max(len(k) for k in payload)
        text = "".join(f"{k:<{width}}  {_fmt(v)}\n" for k, v in payload.items())
    else:
        text = _dump_json(payload)
    if args.out:
        started = time.time()
        out = Path(args.out)
        _write_text(out, text)
        _write_manifest(out, "uqsd", cfg, [out.name], started)
    else:
        sys.stdout.write(text)
    return 0


def _duality_payload(cfg: ExperimentConfig) -> tuple[DualityReport, dict]:
    amps, basis = basis_from_config(cfg)
    state = QuantonDetectorState(
        amps=amps, overlap=cfg.overlap, theta=canonical_theta(cfg, amps), kappa=cfg.kappa
    )
    pattern = intensity(cfg, basis, Conditioning.ALL, Mode.FRAUNHOFER)
    metrics = measure_visibility(pattern)
    report = evaluate_duality(state, basis, v_measured=metrics.v_envelope_comp)
    payload = report.to_dict()
    payload["fringe_metrics"] = metrics.to_dict()
    payload["swapped"] = amps.swapped
    return report, payload


def _cmd_duality(args) -> int:
    cfg = _resolve_config(args)
    report, payload = _duality_payload(cfg)
    text = _dump_json(payload)
    if args.out:
        started = time.time()
        out = Path(args.out)
        _write_text(out, text)
        _write_manifest(out, "duality", cfg, [out.name], started)
    else:
        sys.stdout.write(text)
    if report.violations:
        sys.stderr.write(_dump_json({"violations": list(report.violations)}))
        return 2
    return 0


def _cmd_pattern(args) -> int:
    started = time.time()
    cfg = _resolve_config(args)
    _, basis = basis_from_config(cfg)
    pattern = intensity(
        cfg,
        basis,
        Conditioning(args.conditioning),
        Mode(args.mode),
        points=args.points,
    )
    metrics = measure_visibility(pattern)
    out = Path(args.out)
    rows = "".join(
        f"{_fmt(float(x))},{_fmt(float(v))}\n" for x, v in zip(pattern.xs, pattern.values)
    )
    _write_text(out, "x,intensity\n" + rows)
    sidecar = {
        "mode": pattern.mode.value,
        "conditioning": pattern.conditioning.value,
        "norm_estimate": pattern.norm_estimate,
        "branch_probability": pattern.branch_probability,
        "fringe_metrics": metrics.to_dict(),
    }
    sidecar_path = out.with_name(out.stem + ".json")
    _write_text(sidecar_path, _dump_json(sidecar))
    _write_manifest(out, "pattern", cfg, [out.name, sidecar_path.name], started)
    return 0


def _cmd_montecarlo(args) -> int:
    started = time.time()
    cfg = _resolve_config(args)
    _, basis = basis_from_config(cfg)
    batch = sample_batch(cfg, basis, args.n, args.seed)
    stats = group_statistics(batch, cfg, basis, bins=args.bins)
    out = Path(args.out)
    rows = "".join(
        f"{i},{int(o)},{_fmt(float(x))}\n"
        for i, (o, x) in enumerate(zip(batch.outcomes, batch.xs))
    )
    _write_text(out, "trial,outcome,x\n" + rows)
    payload = stats.to_dict()
    payload["acceptance_rate"] = batch.acceptance_rate
    stats_path = out.with_name(out.stem + "_stats.json")
    _write_text(stats_path, _dump_json(payload))
    _write_manifest(
        out, "montecarlo", cfg, [out.name, stats_path.name], started,
        seed=args.seed, extra={"n": args.n, "bins": args.bins},
    )
    return 0


def _parse_grid(spec: str) -> tuple[str, list[float]]:
    key, sep, rest = spec.partition("=")
    key = key.strip()
    if not sep or key not in CONFIG_KEYS:
        raise ValidationError(f"--grid expects KEY=START:STOP:STEP with a config key, got {spec!r}")
    parts = rest.split(":")
    if len(parts) != 3:
        raise ValidationError(f"--grid expects KEY=START:STOP:STEP, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"--grid values must be numbers, got {spec!r}")
    if step <= 0.0 or stop < start:
        raise ValidationError(f"--grid needs step > 0 and stop >= start, got {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return key, [start + k * step for k in range(count)]


_SWEEP_COLUMNS = (
    "p1", "xi", "overlap", "theta", "kappa", "case",
    "d_q", "v", "lhs1", "lhs2", "saturated1", "saturated2",
)


def _sweep_row(values: dict[str, float]) -> tuple[list, tuple[str, ...]]:
    from .duality import evaluate_config

    cfg = config_from_mapping(values)
    report = evaluate_config(cfg)
    row = [
        cfg.p1, cfg.xi, cfg.overlap, cfg.theta, cfg.kappa, report.case_label.value,
        report.d_q, report.v_analytic, report.lhs_duality1, report.lhs_duality2,
        report.saturated1, report.saturated2,
    ]
    return row, report.violations


def _cmd_sweep(args) -> int:
    started = time.time()
    base: dict[str, float] = {}
    if args.config:
        base.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        override = vars(args).get(key)
        if override is not None:
            base[key] = override
    grids = [_parse_grid(spec) for spec in args.grid]
    keys = [k for k, _ in grids]
    if len(set(keys)) != len(keys):
        raise ValidationError("each config key may appear in at most one --grid")
    if "p1" in keys and "p2" in keys:
        raise ValidationError("sweep p1 or p2, not both; the other is set to 1 - value")

    points: list[dict[str, float]] = []
    for combo in itertools.product(*(vals for _, vals in grids)):
        values = dict(base)
        values.update(zip(keys, combo))
        if "p1" in keys:
            values["p2"] = 1.0 - values["p1"]
        elif "p2" in keys:
            values["p1"] = 1.0 - values["p2"]
        points.append(values)

    workers = int(os.environ.get("ASYMDUALITY_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_row, points))
    else:
        results = [_sweep_row(values) for values in points]

    lines = [",".join(_SWEEP_COLUMNS) + "\n"]
    all_violations: list[str] = []
    for row, violations in results:
        lines.append(",".join(_fmt(cell) for cell in row) + "\n")
        all_violations.extend(violations)

    out = Path(args.out)
    _write_text(out, "".join(lines))
    cfg_for_manifest = config_from_mapping(points[0]) if points else config_from_mapping(base)
    _write_manifest(
        out, "sweep", cfg_for_manifest, [out.name], started,
        extra={"grids": {k: v for k, v in grids}, "rows": len(points)},
    )
    if all_violations:
        sys.stderr.write(_dump_json({"violations": all_violations}))
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="asymduality", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parent = _config_parent()
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_uqsd = sub.add_parser("uqsd", parents=[parent], help="discrimination basis and outcome probabilities")
    p_uqsd.add_argument("--format", choices=("json", "table"), default="json")
    p_uqsd.add_argument("--out", metavar="PATH")
    p_uqsd.set_defaults(func=_cmd_uqsd)

    p_dual = sub.add_parser("duality", parents=[parent], help="duality report with fringe metrics")
    p_dual.add_argument("--out", metavar="PATH")
    p_dual.set_defaults(func=_cmd_duality)

    p_pat = sub.add_parser("pattern", parents=[parent], help="screen intensity pattern as CSV")
    p_pat.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.EXACT.value)
    p_pat.add_argument(
        "--conditioning", choices=[c.value for c in Conditioning], default=Conditioning.ALL.value
    )
    p_pat.add_argument("--points", type=int, default=4096)
    p_pat.add_argument("--out", metavar="PATH", default="pattern.csv")
    p_pat.set_defaults(func=_cmd_pattern)

    p_mc = sub.add_parser("montecarlo", parents=[parent], help="sample individual quanton detections")
    p_mc.add_argument("--n", type=int, default=100_000)
    p_mc.add_argument("--seed", type=int, default=1)
    p_mc.add_argument("--bins", type=int, default=None)
    p_mc.add_argument("--out", metavar="PATH", default="records.csv")
    p_mc.set_defaults(func=_cmd_montecarlo)

    p_sw = sub.add_parser("sweep", parents=[parent], help="evaluate duality over a parameter grid")
    p_sw.add_argument(
        "--grid", action="append", required=True, metavar="KEY=START:STOP:STEP",
        help="inclusive sweep range; repeat for a cartesian product",
    )
    p_sw.add_argument("--out", metavar="PATH", default="sweep.csv")
    p_sw.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ConsistencyError as exc:
        sys.stderr.write(f"internal consistency failure: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
