"""Operating-point prediction for real codes via capacity inversion.

A real code of rate R behaves, threshold-wise, like an ideal code of some
rate R~ >= R. The prediction pipeline:

1. take a measured reference threshold (Es/N0 reaching the target BER/PER
   on a reference modulation, typically QPSK),
2. read R~ as the reference stream's normalized capacity at that Es/N0,
3. invert the target stream's normalized capacity at R~ to get its
   predicted threshold,
4. pair it with the spectral efficiency R * k.

Repeating over a table of code rates yields a piecewise-linear spectral
efficiency curve per stream.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .capacity import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    invert_capacity,
    stream_capacity,
)
from .constellations import (
    StreamSpec,
    full_stream,
    hp_stream,
    lp_stream,
    make_hier_16qam,
    make_hier_8psk,
    make_qpsk,
    make_uniform_16qam,
    make_uniform_8psk,
)

__all__ = [
    "ErrorTarget",
    "ReferencePoint",
    "OperatingPoint",
    "EfficiencyCurve",
    "TableFormatError",
    "parse_stream",
    "parse_code_rate",
    "load_reference_table",
    "equivalent_ideal_rate",
    "operating_point",
    "build_efficiency_curve",
    "interpolate_efficiency",
    "delta_to_reference",
    "efficiency_curve_csv",
]

DUPLICATE_ESN0_TOL_DB = 0.001


class TableFormatError(ValueError):
    """Malformed reference table input; carries the offending row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class ErrorTarget:
    """Performance target shared by one reference table, e.g. BER 1e-5."""

    metric: str
    level: float

    def __post_init__(self):
        if self.metric.lower() not in ("ber", "per"):
            raise ValueError(f"metric must be 'ber' or 'per', got {self.metric!r}")
        object.__setattr__(self, "metric", self.metric.lower())
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"target level must lie in (0, 1), got {self.level}")


@dataclass(frozen=True)
class ReferencePoint:
    """Measured threshold of one (reference modulation, code rate) pair."""

    reference_stream: StreamSpec
    code_rate: float
    esn0_ref_db: float
    target: ErrorTarget

    def __post_init__(self):
        if not 0.0 < self.code_rate < 1.0:
            raise ValueError(f"code rate must lie in (0, 1), got {self.code_rate}")


@dataclass(frozen=True)
class OperatingPoint:
    """Predicted decoding threshold of one stream and code rate."""

    stream: str
    code_rate: float
    esn0_db: float
    efficiency: float


@dataclass(frozen=True)
class EfficiencyCurve:
    """Spectral-efficiency vs required-Es/N0 points of one stream, sorted."""

    stream: str
    points: tuple[OperatingPoint, ...]

    def __post_init__(self):
        esn0 = [p.esn0_db for p in self.points]
        if any(b - a <= 0 for a, b in zip(esn0, esn0[1:])):
            raise ValueError("curve points must be strictly increasing in esn0_db")
        if any(p.efficiency < 0 for p in self.points):
            raise ValueError("efficiencies must be non-negative")

    @property
    def esn0_db(self) -> np.ndarray:
        return np.array([p.esn0_db for p in self.points])

    @property
    def efficiency(self) -> np.ndarray:
        return np.array([p.efficiency for p in self.points])


def parse_stream(text: str) -> StreamSpec:
    """Build a stream from its table descriptor.

    Accepted forms: ``qpsk``, ``uniform16qam``, ``uniform8psk``,
    ``16qam:alpha=<v>:hp|lp`` and ``8psk:theta=<v>:hp|lp``.
    """
    t = text.strip().lower()
    if t == "qpsk":
        return full_stream(make_qpsk(), "qpsk")
    if t == "uniform16qam":
        return full_stream(make_uniform_16qam(), "uniform16qam")
    if t == "uniform8psk":
        return full_stream(make_uniform_8psk(), "uniform8psk")
    parts = t.split(":")
    if len(parts) == 3 and parts[2] in ("hp", "lp"):
        family, param, role = parts
        key, _, value = param.partition("=")
        try:
            v = float(value)
        except ValueError:
            v = None
        if v is not None:
            if family == "16qam" and key == "alpha":
                c = make_hier_16qam(v)
            elif family == "8psk" and key == "theta":
                c = make_hier_8psk(v)
            else:
                c = None
            if c is not None:
                make = hp_stream if role == "hp" else lp_stream
                return make(c, f"{family}:{key}={v:g}:{role}")
    raise ValueError(f"unrecognized stream descriptor {text!r}")


def parse_code_rate(text: str) -> float:
    """Parse a code rate given as a fraction ('2/9') or a decimal."""
    t = text.strip()
    rate = float(Fraction(t)) if "/" in t else float(t)
    if not 0.0 < rate < 1.0:
        raise ValueError(f"code rate must lie in (0, 1), got {text!r}")
    return rate


def load_reference_table(source) -> list[ReferencePoint]:
    """Read reference points from CSV (``modulation,code_rate,esn0_db,metric,level``).

    ``source`` is a path or a text file object. All rows must share one
    error target; malformed rows raise :class:`TableFormatError` with their
    1-based data row number.
    """
    if hasattr(source, "read"):
        return _parse_reference_rows(source)
    with open(source, newline="") as fh:
        return _parse_reference_rows(fh)


def _parse_reference_rows(fh) -> list[ReferencePoint]:
    reader = csv.reader(fh)
    header = next(reader, None)
    expected = ["modulation", "code_rate", "esn0_db", "metric", "level"]
    if header is None or [h.strip().lower() for h in header] != expected:
        raise TableFormatError(0, f"header must be {','.join(expected)}")
    points: list[ReferencePoint] = []
    for row_no, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 5:
            raise TableFormatError(row_no, f"expected 5 fields, got {len(row)}")
        try:
            stream = parse_stream(row[0])
            rate = parse_code_rate(row[1])
            esn0 = float(row[2])
            target = ErrorTarget(row[3].strip(), float(row[4]))
        except ValueError as exc:
            raise TableFormatError(row_no, str(exc)) from exc
        if points and target != points[0].target:
            raise TableFormatError(
                row_no, f"mixed targets: {target} vs {points[0].target}"
            )
        points.append(ReferencePoint(stream, rate, esn0, target))
    if not points:
        raise TableFormatError(0, "reference table contains no data rows")
    return points


def equivalent_ideal_rate(
    ref: ReferencePoint, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Ideal-code rate matching the reference threshold.

    The normalized capacity of the reference stream at its measured
    threshold. Warns (but proceeds) when it falls below the real code's
    rate, which would mean a better-than-capacity measurement.
    """
    r_tilde = stream_capacity(ref.reference_stream, ref.esn0_ref_db, q) / ref.reference_stream.k
    if r_tilde < ref.code_rate:
        warnings.warn(
            f"equivalent ideal rate {r_tilde:.4f} below code rate "
            f"{ref.code_rate:.4f} for {ref.reference_stream.descriptor} at "
            f"{ref.esn0_ref_db} dB; reference data may be inconsistent",
            stacklevel=2,
        )
    return min(max(r_tilde, 1e-9), 1.0 - 1e-9)


def operating_point(
    target: StreamSpec,
    code_rate: float,
    r_tilde: float,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> OperatingPoint:
    """Transfer an equivalent ideal rate onto a target stream."""
    esn0 = invert_capacity(target, r_tilde, q)
    return OperatingPoint(target.descriptor, code_rate, esn0, code_rate * target.k)


def build_efficiency_curve(
    target: StreamSpec,
    refs: list[ReferencePoint],
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> EfficiencyCurve:
    """Predict one operating point per reference rate and sort them.

    Needs at least two reference points with distinct code rates. Points
    whose predicted thresholds collide within 0.001 dB are collapsed,
    keeping the more efficient one.
    """
    if len(refs) < 2:
        raise ValueError("need at least two reference points to build a curve")
    if len({ref.code_rate for ref in refs}) != len(refs):
        raise ValueError("reference code rates must be distinct")
    ops = [
        operating_point(target, ref.code_rate, equivalent_ideal_rate(ref, q), q)
        for ref in refs
    ]
    ops.sort(key=lambda p: (p.esn0_db, p.efficiency))
    kept: list[OperatingPoint] = []
    for op in ops:
        if kept and op.esn0_db - kept[-1].esn0_db < DUPLICATE_ESN0_TOL_DB:
            if op.efficiency > kept[-1].efficiency:
                kept[-1] = op
        else:
            kept.append(op)
    return EfficiencyCurve(target.descriptor, tuple(kept))


def interpolate_efficiency(curve: EfficiencyCurve, esn0_db: float) -> float:
    """Spectral efficiency available at an Es/N0, linear between points.

    Below the first point nothing decodes (0); beyond the last the
    efficiency saturates at the final value.
    """
    if not curve.points:
        raise ValueError("empty efficiency curve")
    x = curve.esn0_db
    if esn0_db < x[0]:
        return 0.0
    return float(np.interp(esn0_db, x, curve.efficiency))


def delta_to_reference(
    curve_a: EfficiencyCurve, curve_b: EfficiencyCurve
) -> list[tuple[float, float]]:
    """Per-rate Es/N0 gap (a minus b) between two curves from one table."""
    rates_a = {p.code_rate: p.esn0_db for p in curve_a.points}
    rates_b = {p.code_rate: p.esn0_db for p in curve_b.points}
    if set(rates_a) != set(rates_b):
        raise ValueError(
            f"curves cover different rate sets: {sorted(rates_a)} vs {sorted(rates_b)}"
        )
    return [(rate, rates_a[rate] - rates_b[rate]) for rate in sorted(rates_a)]


def efficiency_curve_csv(curve: EfficiencyCurve) -> str:
    """CSV dump of a curve (``esn0_db,efficiency,code_rate``)."""
    lines = ["esn0_db,efficiency,code_rate"]
    for p in curve.points:
        lines.append(f"{p.esn0_db!r},{p.efficiency!r},{p.code_rate!r}")
    return "\n".join(lines) + "\n"
