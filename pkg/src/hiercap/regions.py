"""Achievable-rate regions: superposition coding vs time sharing.

Two receiver populations at SNR1 <= SNR2 receive dependent streams. Under
superposition on a non-uniform 16-QAM, the energy split rho_hp fixes the
amplitude ratio alpha and the rate pair is

    r1 = C_hp(SNR1),   r2 = C_hp(SNR1) + C_lp(SNR2).

Time sharing mixes any two achievable pairs convexly. Regions come in an
ideal flavor (stream capacities) and a real-code flavor (interpolated
spectral-efficiency curves from the predictor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .capacity import DEFAULT_QUADRATURE, QuadratureConfig, full_capacity, stream_capacity
from .constellations import (
    PowerSplit,
    alpha_from_power_split,
    hp_stream,
    lp_stream,
    make_hier_16qam,
    make_qpsk,
    power_split_from_alpha,
)
from .predictor import EfficiencyCurve, ReferencePoint, build_efficiency_curve, interpolate_efficiency

__all__ = [
    "RatePair",
    "Region",
    "default_rho_grid",
    "superposition_region_ideal",
    "superposition_region_real",
    "time_sharing_region",
    "qpsk_time_sharing_endpoints",
    "qpsk_time_sharing_endpoints_real",
    "efficiency_curve_family",
    "pareto_frontier",
    "region_csv",
]


@dataclass(frozen=True)
class RatePair:
    """One achievable (population-1, population-2) rate pair."""

    r1: float
    r2: float
    scheme: str = ""
    rho_hp: float | None = None
    param: float | None = None  # alpha for superposition, tau for time sharing
    detail: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise ValueError(f"rates must be finite, got ({self.r1}, {self.r2})")
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError(f"rates must be non-negative, got ({self.r1}, {self.r2})")


@dataclass(frozen=True)
class Region:
    scheme: str
    pairs: tuple[RatePair, ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a region needs at least one rate pair")


def default_rho_grid() -> np.ndarray:
    """HP energy fractions 0.51 .. 0.99 in steps of 0.01."""
    return np.arange(51, 100) / 100.0


def _check_snr_order(snr1_db: float, snr2_db: float) -> None:
    if snr1_db > snr2_db:
        raise ValueError(
            f"population 2 must be at least as good: snr1={snr1_db} > snr2={snr2_db} dB"
        )


def superposition_region_ideal(
    snr1_db: float,
    snr2_db: float,
    rho_grid: Iterable[float] | None = None,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> Region:
    """Ideal-capacity superposition region over an HP energy-fraction grid."""
    _check_snr_order(snr1_db, snr2_db)
    rhos = default_rho_grid() if rho_grid is None else np.asarray(list(rho_grid), float)
    pairs = []
    for rho in sorted(rhos):
        alpha = alpha_from_power_split(PowerSplit(float(rho)))
        c = make_hier_16qam(alpha)
        r1 = stream_capacity(hp_stream(c), snr1_db, q)
        r2 = r1 + stream_capacity(lp_stream(c), snr2_db, q)
        pairs.append(RatePair(r1, r2, "superposition", float(rho), alpha))
    return Region("superposition", tuple(pairs))


def qpsk_time_sharing_endpoints(
    snr1_db: float,
    snr2_db: float,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> list[RatePair]:
    """The two-QPSK VCM endpoints: serve everyone, or only population 2."""
    _check_snr_order(snr1_db, snr2_db)
    c1 = full_capacity(make_qpsk(), snr1_db, q)
    c2 = full_capacity(make_qpsk(), snr2_db, q)
    return [
        RatePair(c1, c1, "time_sharing", detail=f"qpsk@{snr1_db:g}dB"),
        RatePair(0.0, c2, "time_sharing", detail=f"qpsk@{snr2_db:g}dB"),
    ]


def qpsk_time_sharing_endpoints_real(
    qpsk_curve: EfficiencyCurve, snr1_db: float, snr2_db: float
) -> list[RatePair]:
    """Two-QPSK endpoints with real-code efficiencies from the QPSK curve."""
    _check_snr_order(snr1_db, snr2_db)
    e1 = interpolate_efficiency(qpsk_curve, snr1_db)
    e2 = interpolate_efficiency(qpsk_curve, snr2_db)
    return [
        RatePair(e1, e1, "time_sharing", detail=f"qpsk@{snr1_db:g}dB"),
        RatePair(0.0, e2, "time_sharing", detail=f"qpsk@{snr2_db:g}dB"),
    ]


def time_sharing_region(
    endpoint_pairs: Sequence[RatePair],
    tau_grid: Iterable[float] | None = None,
) -> Region:
    """All convex combinations along the tau grid between every endpoint pair."""
    if len(endpoint_pairs) < 2:
        raise ValueError("time sharing needs at least two endpoint pairs")
    taus = np.linspace(0.0, 1.0, 101) if tau_grid is None else np.asarray(list(tau_grid), float)
    if taus.size == 0 or np.any((taus < 0) | (taus > 1)):
        raise ValueError("tau grid must lie inside [0, 1]")
    pairs = []
    for i, a in enumerate(endpoint_pairs):
        for j in range(i + 1, len(endpoint_pairs)):
            b = endpoint_pairs[j]
            label = f"{a.detail or i}|{b.detail or j}"
            for tau in taus:
                pairs.append(
                    RatePair(
                        tau * a.r1 + (1 - tau) * b.r1,
                        tau * a.r2 + (1 - tau) * b.r2,
                        "time_sharing",
                        param=float(tau),
                        detail=label,
                    )
                )
    pairs.sort(key=lambda p: (p.r1, p.r2))
    return Region("time_sharing", tuple(pairs))


def efficiency_curve_family(
    refs: list[ReferencePoint],
    alphas: Iterable[float],
    q: QuadratureConfig = DEFAULT_QUADRATURE,
) -> dict[float, tuple[EfficiencyCurve, EfficiencyCurve]]:
    """Predict (HP, LP) efficiency curves for each amplitude ratio."""
    family = {}
    for alpha in alphas:
        c = make_hier_16qam(alpha)
        family[float(alpha)] = (
            build_efficiency_curve(hp_stream(c), refs, q),
            build_efficiency_curve(lp_stream(c), refs, q),
        )
    return family


def superposition_region_real(
    curves: Mapping[float, tuple[EfficiencyCurve, EfficiencyCurve]],
    snr1_db: float,
    snr2_db: float,
    rho_grid: Iterable[float] | None = None,
    alpha_tol: float = 1e-6,
) -> Region:
    """Real-code superposition region from per-alpha efficiency curves.

    With no explicit grid, the HP fractions realizing the family's alpha
    values are used. Each grid point must match an available alpha within
    ``alpha_tol`` (no interpolation across alpha is attempted).
    """
    _check_snr_order(snr1_db, snr2_db)
    available = sorted(curves)
    if not available:
        raise ValueError("empty efficiency curve family")
    if rho_grid is None:
        rhos = [power_split_from_alpha(a).rho_hp for a in available]
    else:
        rhos = [float(r) for r in rho_grid]
    pairs = []
    for rho in sorted(rhos):
        alpha = alpha_from_power_split(PowerSplit(rho))
        nearest = min(available, key=lambda a: abs(a - alpha))
        if abs(nearest - alpha) > alpha_tol * max(1.0, alpha):
            raise KeyError(
                f"no efficiency curve for alpha={alpha:.6g} (rho_hp={rho:.4g}); "
                f"available alpha values: {available}"
            )
        hp_curve, lp_curve = curves[nearest]
        r1 = interpolate_efficiency(hp_curve, snr1_db)
        r2 = r1 + interpolate_efficiency(lp_curve, snr2_db)
        pairs.append(RatePair(r1, r2, "superposition", rho, nearest))
    return Region("superposition", tuple(pairs))


def pareto_frontier(region: Region) -> Region:
    """Non-dominated rate pairs under the componentwise order, sorted by r1."""
    pairs = region.pairs
    kept = [
        p
        for p in pairs
        if not any(
            q.r1 >= p.r1 and q.r2 >= p.r2 and (q.r1 > p.r1 or q.r2 > p.r2)
            for q in pairs
        )
    ]
    kept.sort(key=lambda p: (p.r1, p.r2))
    return Region(region.scheme, tuple(kept))


def merge_regions(label: str, *regions: Region) -> Region:
    """Pool the pairs of several regions (e.g. before a joint frontier)."""
    pairs = tuple(p for r in regions for p in r.pairs)
    return Region(label, pairs)


def region_csv(region: Region) -> str:
    """CSV dump of a region (``scheme,rho_hp,alpha_or_tau,r1,r2``)."""
    lines = ["scheme,rho_hp,alpha_or_tau,r1,r2"]
    for p in region.pairs:
        rho = "" if p.rho_hp is None else repr(float(p.rho_hp))
        param = "" if p.param is None else repr(float(p.param))
        lines.append(f"{p.scheme},{rho},{param},{p.r1!r},{p.r2!r}")
    return "\n".join(lines) + "\n"
