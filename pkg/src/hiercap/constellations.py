"""Constellation construction, labeling and bit-stream decomposition.

Conventions used throughout the package:

* Labels are m-bit integers. Bit position ``n`` (1-based, ``n = 1`` is the
  least significant bit) of the label of a point is its n-th mapping bit.
* Bits 1 and 2 select the quadrant: ``sign(I) = (-1)**b1``,
  ``sign(Q) = (-1)**b2``. Adjacent quadrants then differ in exactly one bit.
* Remaining bits Gray-select the position inside the quadrant, mirrored
  across quadrants so that the constellation is symmetric under I/Q
  reflection.
* Every constructor returns a constellation normalized to unit average
  symbol energy, so an Es/N0 value alone fixes the noise density.

The exact bit-to-symbol tables of the DVB standards are not reproduced
here; the quadrant-first Gray mapping above is an assumption (it leaves
all per-stream capacities unchanged for any relabeling that preserves the
quadrant/offset split).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "StreamSpec",
    "PowerSplit",
    "make_qpsk",
    "make_hier_16qam",
    "make_uniform_16qam",
    "make_hier_8psk",
    "make_uniform_8psk",
    "full_stream",
    "hp_stream",
    "lp_stream",
    "bit_subsets",
    "alpha_from_power_split",
    "power_split_from_alpha",
    "constellation_csv",
]

_ES_TOL = 1e-12


@dataclass(frozen=True)
class Constellation:
    """A labeled set of 2-D constellation points.

    ``points[i]`` is the (I, Q) coordinate carrying the label ``labels[i]``;
    labels must be a permutation of ``0 .. 2**m - 1``.
    """

    name: str
    points: np.ndarray
    labels: np.ndarray
    m: int

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        labs = np.asarray(self.labels, dtype=np.int64)
        M = 2**self.m
        if pts.shape != (M, 2):
            raise ValueError(f"expected {M} points of shape (M, 2), got {pts.shape}")
        if labs.shape != (M,) or sorted(labs.tolist()) != list(range(M)):
            raise ValueError(f"labels must be a permutation of 0..{M - 1}")
        pts.flags.writeable = False
        labs.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labs)

    @property
    def size(self) -> int:
        return 2**self.m

    @property
    def es(self) -> float:
        """Average symbol energy (1.0 for constructor-built constellations)."""
        return float(np.mean(np.sum(self.points**2, axis=1)))

    def normalized(self) -> "Constellation":
        """Return a copy scaled to unit average symbol energy."""
        es = self.es
        if es <= 0:
            raise ValueError("cannot normalize a zero-energy constellation")
        if abs(es - 1.0) <= _ES_TOL:
            return self
        return Constellation(self.name, self.points / math.sqrt(es), self.labels, self.m)

    def label_bit(self, n: int) -> np.ndarray:
        """Value of mapping bit ``n`` (1-based, LSB first) for every point."""
        if not 1 <= n <= self.m:
            raise ValueError(f"bit position {n} outside 1..{self.m}")
        return (self.labels >> (n - 1)) & 1


@dataclass(frozen=True)
class StreamSpec:
    """One stream of a constellation: the subset of bit positions it occupies."""

    constellation: Constellation
    positions: tuple[int, ...]
    descriptor: str = field(default="", compare=False)

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        m = self.constellation.m
        if not 1 <= len(pos) <= m:
            raise ValueError(f"need between 1 and {m} bit positions, got {len(pos)}")
        if len(set(pos)) != len(pos) or any(not 1 <= p <= m for p in pos):
            raise ValueError(f"positions must be distinct and within 1..{m}: {pos}")
        object.__setattr__(self, "positions", pos)
        if not self.descriptor:
            bits = ",".join(str(p) for p in pos)
            object.__setattr__(self, "descriptor", f"{self.constellation.name}:bits={bits}")

    @property
    def k(self) -> int:
        """Number of bits the stream carries per symbol."""
        return len(self.positions)

    def subset_index(self) -> np.ndarray:
        """Subset id of each constellation point.

        Point ``x`` belongs to cell ``i`` when the stream's bits of its label
        spell ``i`` (position ``positions[n]`` holding bit ``n`` of ``i``).
        """
        c = self.constellation
        idx = np.zeros(c.size, dtype=np.int64)
        for n, p in enumerate(self.positions):
            idx |= c.label_bit(p) << n
        return idx


def bit_subsets(spec: StreamSpec) -> list[np.ndarray]:
    """Partition the constellation into the stream's 2**k point cells.

    Cell ``i`` contains the points whose stream bits equal the binary
    digits of ``i``; the cells are disjoint, of equal size ``2**(m-k)``,
    and their union is the whole constellation.
    """
    idx = spec.subset_index()
    pts = spec.constellation.points
    return [pts[idx == i] for i in range(2**spec.k)]


def full_stream(c: Constellation, descriptor: str = "") -> StreamSpec:
    """Stream over all m bits (the classical single-stream case)."""
    return StreamSpec(c, tuple(range(1, c.m + 1)), descriptor or c.name)


def hp_stream(c: Constellation, descriptor: str = "") -> StreamSpec:
    """High-priority stream: the two quadrant bits."""
    return StreamSpec(c, (1, 2), descriptor or f"{c.name}:hp")


def lp_stream(c: Constellation, descriptor: str = "") -> StreamSpec:
    """Low-priority stream: every bit except the two quadrant bits."""
    if c.m < 3:
        raise ValueError(f"{c.name} has no bits left for an LP stream")
    return StreamSpec(c, tuple(range(3, c.m + 1)), descriptor or f"{c.name}:lp")


def _quadrant_signs():
    # (b1, b2) -> (sign I, sign Q) = ((-1)**b1, (-1)**b2)
    for b1 in (0, 1):
        for b2 in (0, 1):
            yield b1, b2, -2 * b1 + 1, -2 * b2 + 1


def make_qpsk() -> Constellation:
    """Gray-labeled QPSK with unit symbol energy."""
    s = 1.0 / math.sqrt(2.0)
    pts, labs = [], []
    for b1, b2, si, sq in _quadrant_signs():
        pts.append((si * s, sq * s))
        labs.append(b1 | (b2 << 1))
    return Constellation("qpsk", np.array(pts), np.array(labs), 2)


def make_hier_16qam(alpha: float) -> Constellation:
    """Non-uniform 16-QAM with amplitude ratio ``alpha``.

    ``alpha = d_h / d_l`` where ``2*d_h`` is the minimum distance between
    points in different quadrants and ``2*d_l`` the minimum distance inside
    a quadrant. Per-axis magnitudes are ``d_h`` (inner) and ``d_h + 2*d_l``
    (outer); ``alpha = 1`` gives the uniform 16-QAM. Bits 3 and 4 pick the
    I and Q magnitudes, mirrored across quadrants.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    inner = float(alpha)  # d_l = 1
    outer = float(alpha) + 2.0
    pts, labs = [], []
    for b1, b2, si, sq in _quadrant_signs():
        for b3 in (0, 1):
            for b4 in (0, 1):
                pts.append((si * (outer if b3 else inner), sq * (outer if b4 else inner)))
                labs.append(b1 | (b2 << 1) | (b3 << 2) | (b4 << 3))
    name = f"16qam:alpha={alpha:g}"
    return Constellation(name, np.array(pts), np.array(labs), 4).normalized()


def make_uniform_16qam() -> Constellation:
    """Uniform 16-QAM (the ``alpha = 1`` special case)."""
    c = make_hier_16qam(1.0)
    return Constellation("uniform16qam", c.points, c.labels, 4)


def make_hier_8psk(theta_deg: float) -> Constellation:
    """Non-uniform 8-PSK with half-angle ``theta_deg`` inside each quadrant.

    Unit-circle points sit at ``45*(2q+1) +/- theta`` degrees for quadrant
    ``q``; bit 3 picks the offset, alternating per quadrant so consecutive
    points around the circle differ in exactly one bit.
    ``theta = 22.5`` gives the uniform 8-PSK.
    """
    if not 0.0 < theta_deg < 45.0:
        raise ValueError(f"theta must lie strictly inside (0, 45) degrees, got {theta_deg}")
    th = math.radians(theta_deg)
    pts, labs = [], []
    for b1, b2, si, sq in _quadrant_signs():
        center = math.atan2(sq, si)  # odd multiple of 45 degrees
        ccw = si * sq  # +1 in quadrants 1/3, -1 in 2/4: mirrors the offset
        for b3 in (0, 1):
            ang = center + ccw * (th if b3 else -th)
            pts.append((math.cos(ang), math.sin(ang)))
            labs.append(b1 | (b2 << 1) | (b3 << 2))
    return Constellation(f"8psk:theta={theta_deg:g}", np.array(pts), np.array(labs), 3)


def make_uniform_8psk() -> Constellation:
    """Uniform 8-PSK (the ``theta = 22.5`` special case)."""
    c = make_hier_8psk(22.5)
    return Constellation("uniform8psk", c.points, c.labels, 3)


@dataclass(frozen=True)
class PowerSplit:
    """Energy fractions of the HP and LP streams, ``rho_hp > rho_lp``."""

    rho_hp: float

    def __post_init__(self):
        if not 0.5 < self.rho_hp < 1.0:
            raise ValueError(f"rho_hp must lie strictly inside (0.5, 1), got {self.rho_hp}")

    @property
    def rho_lp(self) -> float:
        return 1.0 - self.rho_hp


def alpha_from_power_split(split: PowerSplit) -> float:
    """Amplitude ratio realizing a given HP/LP energy split.

    The HP/LP energy ratio of the non-uniform 16-QAM is ``(1 + alpha)**2``,
    so ``alpha = sqrt(rho_hp / rho_lp) - 1``.
    """
    return math.sqrt(split.rho_hp / split.rho_lp) - 1.0


def power_split_from_alpha(alpha: float) -> PowerSplit:
    """Energy split of the non-uniform 16-QAM with amplitude ratio ``alpha``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    r = (1.0 + alpha) ** 2
    return PowerSplit(rho_hp=r / (1.0 + r))


def constellation_csv(c: Constellation) -> str:
    """CSV dump of a constellation (``i,q,label``), round-trip decimals."""
    lines = ["i,q,label"]
    for (pi, pq), lab in zip(c.points, c.labels):
        lines.append(f"{float(pi)!r},{float(pq)!r},{int(lab)}")
    return "\n".join(lines) + "\n"
