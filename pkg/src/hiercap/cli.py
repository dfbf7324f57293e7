"""Command-line front end.

Subcommands cover the full pipeline: ``capacity`` (per-stream capacity
curves), ``invert`` (threshold for a target capacity), ``predict``
(real-code operating points and efficiency curves), ``region``
(superposition vs time-sharing rate regions) and ``availability``
(indisponibility / mean-efficiency sweeps over an SNR distribution).

Outputs are CSV files (optionally mirrored as JSON) computed fully before
anything is written; each file lands via temp-file + atomic rename so a
failure never leaves partial artifacts. Identical inputs and flags produce
byte-identical outputs. Exit codes: 0 success, 2 usage, 3 bad input data,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

from .availability import (
    ConfigFormatError,
    DistributionFormatError,
    NoCoverageError,
    load_configs,
    load_distribution,
    lp_invariance_report,
    sweep_tradeoff,
    tradeoff_csv,
)
from .capacity import (
    CapacityBracketError,
    QuadratureConfig,
    QuadratureError,
    capacity_curve,
    curve_csv,
    invert_capacity,
    mc_capacity_oracle,
)
from .constellations import (
    Constellation,
    full_stream,
    hp_stream,
    lp_stream,
    make_hier_16qam,
    make_hier_8psk,
    make_qpsk,
    make_uniform_16qam,
    make_uniform_8psk,
)
from .predictor import (
    TableFormatError,
    build_efficiency_curve,
    efficiency_curve_csv,
    load_reference_table,
)
from .regions import (
    Region,
    default_rho_grid,
    efficiency_curve_family,
    merge_regions,
    pareto_frontier,
    qpsk_time_sharing_endpoints,
    qpsk_time_sharing_endpoints_real,
    region_csv,
    superposition_region_ideal,
    superposition_region_real,
    time_sharing_region,
)

__all__ = ["RunConfig", "UsageError", "main"]

_PLAIN_FAMILIES = ("qpsk", "uniform16qam", "uniform8psk")
_HIER_FAMILIES = ("16qam", "8psk")


class UsageError(ValueError):
    """Bad flag combination or parameter; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation of one subcommand."""

    subcommand: str
    family: str = ""
    alphas: tuple[float, ...] = ()
    thetas: tuple[float, ...] = ()
    streams: tuple[str, ...] = ()
    grid: tuple[float, ...] = ()
    order: int = 32
    seed: int = 0
    oracle_samples: int | None = None
    target: float | None = None
    normalized: bool = False
    bracket: tuple[float, float] = (-40.0, 40.0)
    snr1: float | None = None
    snr2: float | None = None
    mode: str = "ideal"
    rho_grid: tuple[float, ...] | None = None
    table: str | None = None
    dist: str | None = None
    configs: str | None = None
    out: str | None = None
    json_mirror: bool = False

    def __post_init__(self):
        for a in self.alphas:
            if not a > 0:
                raise UsageError(f"alpha must be positive, got {a}")
        for t in self.thetas:
            if not 0.0 < t < 45.0:
                raise UsageError(f"theta must lie in (0, 45) degrees, got {t}")
        if self.grid and any(b - a <= 0 for a, b in zip(self.grid, self.grid[1:])):
            raise UsageError("grid must be strictly increasing")
        if self.order < 8:
            raise UsageError(f"quadrature order must be >= 8, got {self.order}")
        for s in self.streams:
            if s not in ("full", "hp", "lp"):
                raise UsageError(f"unknown stream {s!r}")

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(order=self.order, rng_seed=self.seed)


def _parse_grid(text: str, what: str = "grid") -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{what} must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"bad {what} {text!r}: {exc}") from exc
    if step <= 0:
        raise UsageError(f"{what} step must be positive, got {step}")
    if stop < start:
        raise UsageError(f"{what} stop {stop} below start {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(n))


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad {what} {text!r}: {exc}") from exc


def _family_constellations(cfg: RunConfig) -> list[tuple[str, Constellation]]:
    """(parameter tag, constellation) pairs for the requested family."""
    fam = cfg.family
    if fam == "qpsk":
        return [("qpsk", make_qpsk())]
    if fam == "uniform16qam":
        return [("uniform16qam", make_uniform_16qam())]
    if fam == "uniform8psk":
        return [("uniform8psk", make_uniform_8psk())]
    if fam == "16qam":
        if not cfg.alphas:
            raise UsageError("family 16qam needs --alpha")
        return [(f"16qam:alpha={a:g}", make_hier_16qam(a)) for a in sorted(cfg.alphas)]
    if fam == "8psk":
        if not cfg.thetas:
            raise UsageError("family 8psk needs --theta")
        return [(f"8psk:theta={t:g}", make_hier_8psk(t)) for t in sorted(cfg.thetas)]
    raise UsageError(f"unknown family {fam!r}")


def _streams_for(cfg: RunConfig, tag: str, c: Constellation):
    roles = cfg.streams or (("hp", "lp") if cfg.family in _HIER_FAMILIES else ("full",))
    if cfg.family in _PLAIN_FAMILIES and set(roles) != {"full"}:
        raise UsageError(f"family {cfg.family} carries a single stream; use --streams full")
    make = {"full": full_stream, "hp": hp_stream, "lp": lp_stream}
    order = {"full": 0, "hp": 1, "lp": 2}
    out = []
    for role in sorted(set(roles), key=order.get):
        desc = tag if (role == "full" and cfg.family in _PLAIN_FAMILIES) else f"{tag}:{role}"
        out.append(make[role](c, desc))
    return out


def _fname(desc: str) -> str:
    return desc.replace(":", "_").replace("=", "-")


def cmd_capacity(cfg: RunConfig) -> dict[str, str]:
    if not cfg.grid:
        raise UsageError("capacity needs --grid start:stop:step")
    q = cfg.quadrature()
    outputs: dict[str, str] = {}
    for tag, c in _family_constellations(cfg):
        for s in _streams_for(cfg, tag, c):
            points = capacity_curve(s, list(cfg.grid), q)
            outputs[f"capacity_{_fname(s.descriptor)}.csv"] = curve_csv(points)
            if cfg.oracle_samples:
                lines = ["esn0_db,bits,standard_error"]
                for db in cfg.grid:
                    est, se = mc_capacity_oracle(s, db, cfg.oracle_samples, cfg.seed)
                    lines.append(f"{db!r},{est!r},{se!r}")
                outputs[f"capacity_{_fname(s.descriptor)}_oracle.csv"] = "\n".join(lines) + "\n"
    return outputs


def cmd_invert(cfg: RunConfig) -> tuple[dict[str, str], str]:
    if cfg.target is None:
        raise UsageError("invert needs --target")
    pairs = _family_constellations(cfg)
    if len(pairs) != 1:
        raise UsageError("invert takes exactly one constellation parameter")
    tag, c = pairs[0]
    streams = _streams_for(cfg, tag, c)
    if len(streams) != 1:
        raise UsageError("invert takes exactly one stream (--streams hp|lp|full)")
    s = streams[0]
    normalized = cfg.target if cfg.normalized else cfg.target / s.k
    if not 0.0 < normalized < 1.0:
        raise UsageError(
            f"target {cfg.target} maps to normalized capacity {normalized}, "
            "which must lie strictly inside (0, 1)"
        )
    esn0 = invert_capacity(s, normalized, cfg.quadrature(), cfg.bracket)
    text = (
        "stream,target_normalized,esn0_db\n"
        f"{s.descriptor},{normalized!r},{esn0!r}\n"
    )
    return {f"invert_{_fname(s.descriptor)}.csv": text}, f"{esn0!r}"


def cmd_predict(cfg: RunConfig) -> dict[str, str]:
    if not cfg.table:
        raise UsageError("predict needs --table with reference points")
    refs = load_reference_table(cfg.table)
    q = cfg.quadrature()
    outputs: dict[str, str] = {}
    op_lines = ["stream,code_rate,esn0_db,efficiency"]
    for tag, c in _family_constellations(cfg):
        for s in _streams_for(cfg, tag, c):
            curve = build_efficiency_curve(s, refs, q)
            outputs[f"efficiency_{_fname(s.descriptor)}.csv"] = efficiency_curve_csv(curve)
            for p in curve.points:
                op_lines.append(f"{p.stream},{p.code_rate!r},{p.esn0_db!r},{p.efficiency!r}")
    outputs["operating_points.csv"] = "\n".join(op_lines) + "\n"
    return outputs


def cmd_region(cfg: RunConfig) -> dict[str, str]:
    if cfg.snr1 is None or cfg.snr2 is None:
        raise UsageError("region needs --snr1 and --snr2")
    q = cfg.quadrature()
    if cfg.mode == "ideal":
        sup = superposition_region_ideal(cfg.snr1, cfg.snr2, cfg.rho_grid, q)
        endpoints = qpsk_time_sharing_endpoints(cfg.snr1, cfg.snr2, q)
    elif cfg.mode == "real":
        if not cfg.table:
            raise UsageError("region --mode real needs --table")
        if not cfg.alphas:
            raise UsageError("region --mode real needs --alpha values")
        refs = load_reference_table(cfg.table)
        family = efficiency_curve_family(refs, sorted(cfg.alphas), q)
        sup = superposition_region_real(family, cfg.snr1, cfg.snr2, cfg.rho_grid)
        qpsk_curve = build_efficiency_curve(full_stream(make_qpsk(), "qpsk"), refs, q)
        endpoints = qpsk_time_sharing_endpoints_real(qpsk_curve, cfg.snr1, cfg.snr2)
    else:
        raise UsageError(f"unknown region mode {cfg.mode!r}")
    ts = time_sharing_region(endpoints)
    frontier = pareto_frontier(merge_regions("combined", sup, ts))
    return {
        "superposition.csv": region_csv(sup),
        "time_sharing.csv": region_csv(ts),
        "frontier.csv": region_csv(frontier),
    }


def cmd_availability(cfg: RunConfig) -> tuple[dict[str, str], list[str]]:
    if not cfg.dist or not cfg.configs:
        raise UsageError("availability needs --dist and --configs")
    dist = load_distribution(cfg.dist)
    configs = load_configs(cfg.configs)
    points, failures = sweep_tradeoff(dist, configs)
    if not points:
        raise NoCoverageError(
            "no config produced a trade-off point; "
            + "; ".join(msg for _, msg in failures)
        )
    notes = [f"skipped {c.family} config: {msg}" for c, msg in failures]
    return {
        "tradeoff.csv": tradeoff_csv(points),
        "lp_invariance.csv": lp_invariance_report(points),
    }, notes


def _json_mirror(text: str) -> str:
    rows = list(csv.reader(io.StringIO(text)))
    payload = {"columns": rows[0], "rows": rows[1:]}
    return json.dumps(payload, separators=(",", ":")) + "\n"


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_outputs(outputs: dict[str, str], out: str, single_file: bool, mirror: bool) -> None:
    if single_file:
        if len(outputs) != 1:
            raise UsageError("--out names a single file for this subcommand")
        parent = os.path.dirname(out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        text = next(iter(outputs.values()))
        _atomic_write(out, text)
        if mirror:
            _atomic_write(os.path.splitext(out)[0] + ".json", _json_mirror(text))
        return
    os.makedirs(out, exist_ok=True)
    for name, text in outputs.items():
        path = os.path.join(out, name)
        _atomic_write(path, text)
        if mirror:
            _atomic_write(os.path.splitext(path)[0] + ".json", _json_mirror(text))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiercap",
        description="Hierarchical-modulation capacity, prediction, regions, availability.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, family=False):
        p.add_argument("--order", type=int, default=32, help="quadrature order")
        p.add_argument("--out", help="output file or directory")
        p.add_argument("--json", action="store_true", help="also write JSON mirrors")
        if family:
            p.add_argument(
                "--family",
                required=True,
                choices=_PLAIN_FAMILIES + _HIER_FAMILIES,
            )
            p.add_argument("--alpha", help="comma-separated amplitude ratios (16qam)")
            p.add_argument("--theta", help="comma-separated offsets in degrees (8psk)")

    p = sub.add_parser("capacity", help="per-stream capacity curves over an Es/N0 grid")
    add_common(p, family=True)
    p.add_argument("--streams", help="comma-separated subset of full,hp,lp")
    p.add_argument("--grid", required=True, help="start:stop:step in dB")
    p.add_argument("--oracle", type=int, help="also run the MC oracle with this many samples")
    p.add_argument("--seed", type=int, default=0, help="oracle RNG seed")

    p = sub.add_parser("invert", help="Es/N0 threshold for a target capacity")
    add_common(p, family=True)
    p.add_argument("--streams", help="single stream: full, hp or lp")
    p.add_argument("--target", type=float, required=True, help="target capacity in bits/symbol")
    p.add_argument("--normalized", action="store_true", help="treat --target as C/k")
    p.add_argument("--bracket", default="-40:40", help="search bracket lo:hi in dB")

    p = sub.add_parser("predict", help="real-code operating points from a reference table")
    add_common(p, family=True)
    p.add_argument("--streams", help="comma-separated subset of full,hp,lp")
    p.add_argument("--table", required=True, help="reference table CSV")

    p = sub.add_parser("region", help="superposition vs time-sharing rate regions")
    add_common(p)
    p.add_argument("--snr1", type=float, required=True, help="worse population SNR in dB")
    p.add_argument("--snr2", type=float, required=True, help="better population SNR in dB")
    p.add_argument("--mode", choices=("ideal", "real"), default="ideal")
    p.add_argument("--rho-grid", help="HP energy fractions start:stop:step")
    p.add_argument("--table", help="reference table CSV (real mode)")
    p.add_argument("--alpha", help="comma-separated amplitude ratios (real mode)")

    p = sub.add_parser("availability", help="indisponibility / efficiency sweep")
    add_common(p)
    p.add_argument("--dist", required=True, help="SNR distribution CSV")
    p.add_argument("--configs", required=True, help="scheme config CSV")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    def split(text):
        return tuple(s.strip() for s in text.split(",")) if text else ()

    bracket = (-40.0, 40.0)
    if getattr(args, "bracket", None):
        lo_hi = _parse_floats(args.bracket.replace(":", ","), "bracket")
        if len(lo_hi) != 2 or lo_hi[0] >= lo_hi[1]:
            raise UsageError(f"bracket must be lo:hi with lo < hi, got {args.bracket!r}")
        bracket = (lo_hi[0], lo_hi[1])
    return RunConfig(
        subcommand=args.subcommand,
        family=getattr(args, "family", "") or "",
        alphas=_parse_floats(args.alpha, "alpha") if getattr(args, "alpha", None) else (),
        thetas=_parse_floats(args.theta, "theta") if getattr(args, "theta", None) else (),
        streams=split(getattr(args, "streams", None)),
        grid=_parse_grid(args.grid) if getattr(args, "grid", None) else (),
        order=args.order,
        seed=getattr(args, "seed", 0),
        oracle_samples=getattr(args, "oracle", None),
        target=getattr(args, "target", None),
        normalized=getattr(args, "normalized", False),
        bracket=bracket,
        snr1=getattr(args, "snr1", None),
        snr2=getattr(args, "snr2", None),
        mode=getattr(args, "mode", "ideal"),
        rho_grid=_parse_grid(args.rho_grid, "rho grid") if getattr(args, "rho_grid", None) else None,
        table=getattr(args, "table", None),
        dist=getattr(args, "dist", None),
        configs=getattr(args, "configs", None),
        out=args.out,
        json_mirror=args.json,
    )


# flags whose values may start with "-" (negative dB, grids); argparse would
# otherwise mistake them for option strings
_DASH_VALUE_FLAGS = frozenset(
    ("--grid", "--rho-grid", "--bracket", "--target", "--snr1", "--snr2")
)


def _glue_dash_values(argv: list[str]) -> list[str]:
    glued = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _DASH_VALUE_FLAGS and nxt.startswith("-") and not nxt.startswith("--"):
            glued.append(f"{tok}={nxt}")
            i += 2
        else:
            glued.append(tok)
            i += 1
    return glued


def main(argv: "list[str] | None" = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(_glue_dash_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _run_config(args)
        stdout_text = None
        notes: list[str] = []
        if cfg.subcommand == "capacity":
            outputs = cmd_capacity(cfg)
        elif cfg.subcommand == "invert":
            outputs, stdout_text = cmd_invert(cfg)
        elif cfg.subcommand == "predict":
            outputs = cmd_predict(cfg)
        elif cfg.subcommand == "region":
            outputs = cmd_region(cfg)
        else:
            outputs, notes = cmd_availability(cfg)
        if cfg.out:
            _write_outputs(outputs, cfg.out, cfg.subcommand == "invert", cfg.json_mirror)
        elif stdout_text is None:
            raise UsageError(f"{cfg.subcommand} writes files; --out is required")
        for note in notes:
            print(note, file=sys.stderr)
        if stdout_text is not None:
            print(stdout_text)
        return 0
    except (TableFormatError, DistributionFormatError, ConfigFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoCoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (QuadratureError, CapacityBracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
