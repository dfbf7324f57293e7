"""Broadcast availability analysis over a receiver SNR distribution.

A population of receivers is summarized by a piecewise-linear CDF of its
Es/N0. A transmission scheme (plain or hierarchical) carries per-stream
decoding thresholds obtained from the predictor. From these we compute

  - indisponibility: the population fraction that decodes nothing, i.e.
    the CDF evaluated at the HP threshold (a receiver decodes a stream
    iff its SNR >= the stream's required Es/N0);
  - mean spectral efficiency: (mu_hp * rho_hp + mu_lp * rho_lp) / rho_hp,
    where mu is a stream's spectral efficiency (code rate times bits) and
    rho the population fraction decoding it, so the average is taken over
    the covered population only.

CDF convention: evaluation returns P(SNR < x), which is 0 at and below the
first knot, linear between knots, and 1 above the last knot. A single-knot
distribution therefore behaves as a unit step just above its knot.

Measured distributions are typically proprietary; a synthetic fixture with
the right general shape ships with the package for tests and demos.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .predictor import parse_code_rate

__all__ = [
    "DistributionFormatError",
    "ConfigFormatError",
    "NoCoverageError",
    "SnrDistribution",
    "SchemeConfig",
    "TradeoffPoint",
    "load_distribution",
    "distribution_csv",
    "mix_distributions",
    "indisponibility",
    "decode_fractions",
    "mean_spectral_efficiency",
    "tradeoff_point",
    "sweep_tradeoff",
    "load_configs",
    "tradeoff_csv",
    "lp_invariance_report",
]

# population mass allowed to sit beyond the last knot of an input CDF
FINAL_MASS_FLOOR = 0.999

# bits carried by (hp, lp) for each constellation family; 0 lp bits marks
# the family as non-hierarchical
_FAMILY_BITS = {
    "qpsk": (2, 0),
    "uniform16qam": (4, 0),
    "uniform8psk": (3, 0),
    "16qam": (2, 2),
    "8psk": (2, 1),
}


class DistributionFormatError(ValueError):
    """Malformed distribution CSV; carries the offending row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class ConfigFormatError(ValueError):
    """Malformed scheme-config CSV; carries the offending row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class NoCoverageError(Exception):
    """Nobody decodes the HP stream, so per-covered-user averages are undefined."""


@dataclass(frozen=True)
class SnrDistribution:
    """Piecewise-linear CDF of receiver Es/N0 in dB."""

    esn0_db: tuple[float, ...]
    cdf: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.esn0_db, dtype=np.float64)
        c = np.asarray(self.cdf, dtype=np.float64)
        if e.size == 0 or e.shape != c.shape:
            raise ValueError("need matching, non-empty esn0 and cdf sequences")
        if not np.all(np.isfinite(e)) or not np.all(np.isfinite(c)):
            raise ValueError("distribution knots must be finite")
        if np.any(np.diff(e) <= 0):
            raise ValueError("esn0 knots must be strictly increasing")
        if np.any(np.diff(c) < 0):
            raise ValueError("cdf values must be non-decreasing")
        if c[0] < 0.0 or c[-1] > 1.0:
            raise ValueError("cdf values must lie in [0, 1]")
        if c[-1] < 1.0 - 1e-6:
            raise ValueError(f"cdf must reach 1 at the last knot, got {c[-1]}")

    def cdf_at(self, esn0_db: float) -> float:
        """P(SNR < esn0_db) under the piecewise-linear model."""
        e = self.esn0_db
        if esn0_db <= e[0]:
            return 0.0
        if esn0_db > e[-1]:
            return 1.0
        return float(np.interp(esn0_db, e, self.cdf))

    @property
    def support(self) -> tuple[float, float]:
        return self.esn0_db[0], self.esn0_db[-1]


def load_distribution(source, label: str = "") -> SnrDistribution:
    """Read an SNR distribution from CSV (``esn0_db,cdf``).

    ``source`` is a path or a text file object. Knots must come sorted with
    a non-decreasing CDF; total mass short of 1 by less than 0.1% is
    rescaled to exactly 1, anything shorter is rejected. Errors carry the
    1-based data row number.
    """
    if hasattr(source, "read"):
        return _parse_distribution_rows(source, label)
    with open(source, newline="") as fh:
        return _parse_distribution_rows(fh, label)


def _parse_distribution_rows(fh, label: str) -> SnrDistribution:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ["esn0_db", "cdf"]:
        raise DistributionFormatError(0, "header must be esn0_db,cdf")
    esn0: list[float] = []
    cdf: list[float] = []
    for row_no, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise DistributionFormatError(row_no, f"expected 2 fields, got {len(row)}")
        try:
            e, c = float(row[0]), float(row[1])
        except ValueError as exc:
            raise DistributionFormatError(row_no, str(exc)) from exc
        if not (math.isfinite(e) and math.isfinite(c)):
            raise DistributionFormatError(row_no, "values must be finite")
        if esn0 and e <= esn0[-1]:
            raise DistributionFormatError(row_no, f"esn0 {e} not above previous {esn0[-1]}")
        if not 0.0 <= c <= 1.0:
            raise DistributionFormatError(row_no, f"cdf value {c} outside [0, 1]")
        if cdf and c < cdf[-1]:
            raise DistributionFormatError(row_no, f"cdf {c} decreases from {cdf[-1]}")
        esn0.append(e)
        cdf.append(c)
    if not esn0:
        raise DistributionFormatError(0, "distribution contains no data rows")
    if cdf[-1] < FINAL_MASS_FLOOR:
        raise DistributionFormatError(
            len(esn0), f"cdf reaches only {cdf[-1]}, need at least {FINAL_MASS_FLOOR}"
        )
    if cdf[-1] < 1.0:
        # rescale to exactly 1; clamp so rounding cannot push mass past 1
        scale = 1.0 / cdf[-1]
        cdf = [min(c * scale, 1.0) for c in cdf]
        cdf[-1] = 1.0
    return SnrDistribution(tuple(esn0), tuple(cdf), label)


def distribution_csv(dist: SnrDistribution) -> str:
    """CSV dump of a distribution (``esn0_db,cdf``)."""
    lines = ["esn0_db,cdf"]
    for e, c in zip(dist.esn0_db, dist.cdf):
        lines.append(f"{e!r},{c!r}")
    return "\n".join(lines) + "\n"


def mix_distributions(
    dists: Sequence[SnrDistribution],
    weights: Sequence[float],
    label: str = "mixture",
) -> SnrDistribution:
    """Weighted mixture of populations, e.g. urban and suburban receivers.

    Weights must be non-negative and sum to 1. The mixture CDF is rebuilt
    on the union of the input knots; a point mass sitting strictly inside
    another component's support is smeared linearly up to the next knot,
    which is the best a piecewise-linear CDF can represent.
    """
    if len(dists) == 0 or len(dists) != len(weights):
        raise ValueError("need one weight per distribution")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-9:
        raise ValueError(f"weights must be non-negative and sum to 1, got {list(weights)}")
    knots = sorted({e for d in dists for e in d.esn0_db})
    vals = [sum(wi * d.cdf_at(x) for wi, d in zip(w, dists)) for x in knots]
    # right limit at the top knot, so trailing point masses are kept
    vals[-1] = sum(
        wi * (1.0 if knots[-1] >= d.esn0_db[-1] else d.cdf_at(knots[-1]))
        for wi, d in zip(w, dists)
    )
    return SnrDistribution(tuple(knots), tuple(vals), label)


@dataclass(frozen=True)
class SchemeConfig:
    """One candidate transmission scheme with its decoding thresholds.

    ``family`` picks the constellation (``qpsk``, ``uniform16qam``,
    ``uniform8psk`` or the hierarchical ``16qam``/``8psk``), ``param`` its
    alpha or theta. Non-hierarchical schemes leave the LP fields unset.
    Thresholds normally come from the operating-point predictor.
    """

    family: str
    param: float | None
    hp_rate: float
    esn0_hp_db: float
    lp_rate: float | None = None
    esn0_lp_db: float | None = None

    def __post_init__(self):
        family = self.family.strip().lower()
        object.__setattr__(self, "family", family)
        if family not in _FAMILY_BITS:
            raise ValueError(f"unknown family {self.family!r}")
        if self.hierarchical:
            if self.param is None or self.param <= 0:
                raise ValueError(f"family {family} needs a positive parameter")
            if family == "8psk" and not 0.0 < self.param < 45.0:
                raise ValueError(f"theta must lie in (0, 45) degrees, got {self.param}")
        elif self.param is not None:
            raise ValueError(f"family {family} takes no parameter")
        if not 0.0 < self.hp_rate < 1.0:
            raise ValueError(f"hp rate must lie in (0, 1), got {self.hp_rate}")
        if (self.lp_rate is None) != (self.esn0_lp_db is None):
            raise ValueError("lp_rate and esn0_lp_db must be given together")
        if self.lp_rate is not None:
            if not self.hierarchical:
                raise ValueError(f"family {family} carries no LP stream")
            if not 0.0 < self.lp_rate < 1.0:
                raise ValueError(f"lp rate must lie in (0, 1), got {self.lp_rate}")
            if self.esn0_lp_db < self.esn0_hp_db:
                raise ValueError(
                    f"LP threshold {self.esn0_lp_db} dB below HP threshold "
                    f"{self.esn0_hp_db} dB; the LP stream cannot be the easier one"
                )

    @property
    def hierarchical(self) -> bool:
        return _FAMILY_BITS[self.family][1] > 0

    @property
    def hp_bits(self) -> int:
        return _FAMILY_BITS[self.family][0]

    @property
    def lp_bits(self) -> int:
        return _FAMILY_BITS[self.family][1]

    @property
    def mu_hp(self) -> float:
        """HP spectral efficiency in bits/symbol."""
        return self.hp_rate * self.hp_bits

    @property
    def mu_lp(self) -> float:
        """LP spectral efficiency in bits/symbol (0 when no LP stream)."""
        return 0.0 if self.lp_rate is None else self.lp_rate * self.lp_bits


@dataclass(frozen=True)
class TradeoffPoint:
    config: SchemeConfig
    indisponibility: float
    mean_efficiency: float

    def __post_init__(self):
        if not 0.0 <= self.indisponibility <= 1.0:
            raise ValueError(f"indisponibility {self.indisponibility} outside [0, 1]")
        if self.mean_efficiency < 0.0:
            raise ValueError(f"mean efficiency {self.mean_efficiency} negative")


def indisponibility(dist: SnrDistribution, esn0_hp_db: float) -> float:
    """Fraction of the population unable to decode even the HP stream."""
    return dist.cdf_at(esn0_hp_db)


def decode_fractions(dist: SnrDistribution, config: SchemeConfig) -> tuple[float, float]:
    """(rho_hp, rho_lp): population fractions decoding each stream."""
    rho_hp = 1.0 - dist.cdf_at(config.esn0_hp_db)
    if config.lp_rate is None:
        return rho_hp, 0.0
    return rho_hp, 1.0 - dist.cdf_at(config.esn0_lp_db)


def mean_spectral_efficiency(
    mu_hp: float, mu_lp: float, rho_hp: float, rho_lp: float
) -> float:
    """Average bits/symbol over the covered (HP-decoding) population."""
    if mu_hp < 0 or mu_lp < 0:
        raise ValueError("stream efficiencies must be non-negative")
    if not 0.0 <= rho_lp <= rho_hp <= 1.0:
        raise ValueError(f"need 0 <= rho_lp <= rho_hp <= 1, got ({rho_hp}, {rho_lp})")
    if rho_hp == 0.0:
        raise NoCoverageError("no receiver decodes the HP stream")
    return (mu_hp * rho_hp + mu_lp * rho_lp) / rho_hp


def tradeoff_point(dist: SnrDistribution, config: SchemeConfig) -> TradeoffPoint:
    """Evaluate one scheme against one population."""
    rho_hp, rho_lp = decode_fractions(dist, config)
    eff = mean_spectral_efficiency(config.mu_hp, config.mu_lp, rho_hp, rho_lp)
    return TradeoffPoint(config, indisponibility(dist, config.esn0_hp_db), eff)


def sweep_tradeoff(
    dist: SnrDistribution, configs: Iterable[SchemeConfig]
) -> tuple[list[TradeoffPoint], list[tuple[SchemeConfig, str]]]:
    """Evaluate every config; collect failures instead of aborting the sweep."""
    points: list[TradeoffPoint] = []
    failures: list[tuple[SchemeConfig, str]] = []
    for config in configs:
        try:
            points.append(tradeoff_point(dist, config))
        except (NoCoverageError, ValueError) as exc:
            failures.append((config, str(exc)))
    return points, failures


def load_configs(source) -> list[SchemeConfig]:
    """Read scheme configs from CSV.

    Header ``family,param,hp_rate,lp_rate,esn0_hp_db,esn0_lp_db``; param and
    the LP fields may be left empty. Rates accept fractions like ``2/9``.
    Errors carry the 1-based data row number.
    """
    if hasattr(source, "read"):
        return _parse_config_rows(source)
    with open(source, newline="") as fh:
        return _parse_config_rows(fh)


def _parse_config_rows(fh) -> list[SchemeConfig]:
    reader = csv.reader(fh)
    header = next(reader, None)
    expected = ["family", "param", "hp_rate", "lp_rate", "esn0_hp_db", "esn0_lp_db"]
    if header is None or [h.strip().lower() for h in header] != expected:
        raise ConfigFormatError(0, f"header must be {','.join(expected)}")
    configs: list[SchemeConfig] = []
    for row_no, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 6:
            raise ConfigFormatError(row_no, f"expected 6 fields, got {len(row)}")
        try:
            configs.append(
                SchemeConfig(
                    family=row[0],
                    param=float(row[1]) if row[1].strip() else None,
                    hp_rate=parse_code_rate(row[2]),
                    esn0_hp_db=float(row[4]),
                    lp_rate=parse_code_rate(row[3]) if row[3].strip() else None,
                    esn0_lp_db=float(row[5]) if row[5].strip() else None,
                )
            )
        except ValueError as exc:
            raise ConfigFormatError(row_no, str(exc)) from exc
    if not configs:
        raise ConfigFormatError(0, "config table contains no data rows")
    return configs


def _config_fields(c: SchemeConfig) -> list[str]:
    return [
        c.family,
        "" if c.param is None else repr(float(c.param)),
        repr(float(c.hp_rate)),
        "" if c.lp_rate is None else repr(float(c.lp_rate)),
        repr(float(c.esn0_hp_db)),
        "" if c.esn0_lp_db is None else repr(float(c.esn0_lp_db)),
    ]


def tradeoff_csv(points: Sequence[TradeoffPoint]) -> str:
    """CSV dump of a sweep, one row per evaluated config."""
    lines = [
        "family,param,hp_rate,lp_rate,esn0_hp_db,esn0_lp_db,"
        "indisponibility,mean_efficiency"
    ]
    for p in points:
        fields = _config_fields(p.config) + [
            repr(float(p.indisponibility)),
            repr(float(p.mean_efficiency)),
        ]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def lp_invariance_report(points: Sequence[TradeoffPoint]) -> str:
    """CSV report checking that LP choices leave indisponibility untouched.

    Configs sharing (family, param, hp_rate, esn0_hp_db) must agree on
    indisponibility whatever their LP stream does; the ``invariant`` column
    says whether they do.
    """
    groups: dict[tuple, list[TradeoffPoint]] = {}
    for p in points:
        key = (p.config.family, p.config.param, p.config.hp_rate, p.config.esn0_hp_db)
        groups.setdefault(key, []).append(p)
    lines = [
        "family,param,hp_rate,esn0_hp_db,config_count,"
        "indisponibility_min,indisponibility_max,invariant"
    ]
    for key in sorted(groups, key=lambda k: (k[0], k[1] is not None, k[1] or 0.0, k[2], k[3])):
        family, param, hp_rate, esn0_hp = key
        vals = [p.indisponibility for p in groups[key]]
        lo, hi = min(vals), max(vals)
        lines.append(
            ",".join(
                [
                    family,
                    "" if param is None else repr(float(param)),
                    repr(float(hp_rate)),
                    repr(float(esn0_hp)),
                    str(len(vals)),
                    repr(float(lo)),
                    repr(float(hi)),
                    "yes" if hi - lo == 0.0 else "no",
                ]
            )
        )
    return "\n".join(lines) + "\n"
