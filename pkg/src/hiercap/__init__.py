"""Per-stream capacities of hierarchical modulations and what they buy you.

The package follows the analysis pipeline for layered broadcasting over
AWGN (DVB-SH / DVB-S2 style):

  - :mod:`hiercap.constellations`: plain and hierarchical constellations
    (non-uniform 16-QAM, offset 8-PSK) with their HP/LP bit streams;
  - :mod:`hiercap.capacity`: constrained-capacity integrals per stream via
    Gauss-Hermite quadrature, plus an independent Monte-Carlo oracle;
  - :mod:`hiercap.predictor`: transfer of measured code thresholds onto
    other streams by capacity inversion, yielding operating points and
    spectral-efficiency curves;
  - :mod:`hiercap.regions`: superposition vs time-sharing rate regions;
  - :mod:`hiercap.availability`: indisponibility and mean spectral
    efficiency of candidate schemes over a receiver SNR distribution;
  - :mod:`hiercap.cli`: the ``hiercap`` command tying it all together.

The quadrature inner loop runs in a compiled extension when available and
falls back to a pure-NumPy kernel otherwise; ``hiercap.BACKEND`` names the
one in use.
"""

from ._backend import BACKEND
from .availability import (
    NoCoverageError,
    SchemeConfig,
    SnrDistribution,
    TradeoffPoint,
    decode_fractions,
    indisponibility,
    load_distribution,
    mean_spectral_efficiency,
    mix_distributions,
    sweep_tradeoff,
)
from .capacity import (
    CapacityBracketError,
    CapacityPoint,
    QuadratureConfig,
    QuadratureError,
    capacity_curve,
    full_capacity,
    invert_capacity,
    mc_capacity_oracle,
    stream_capacity,
)
from .constellations import (
    Constellation,
    PowerSplit,
    StreamSpec,
    alpha_from_power_split,
    full_stream,
    hp_stream,
    lp_stream,
    make_hier_16qam,
    make_hier_8psk,
    make_qpsk,
    make_uniform_16qam,
    make_uniform_8psk,
    power_split_from_alpha,
)
from .predictor import (
    EfficiencyCurve,
    ErrorTarget,
    OperatingPoint,
    ReferencePoint,
    build_efficiency_curve,
    equivalent_ideal_rate,
    interpolate_efficiency,
    load_reference_table,
    operating_point,
    parse_stream,
)
from .regions import (
    RatePair,
    Region,
    pareto_frontier,
    qpsk_time_sharing_endpoints,
    superposition_region_ideal,
    superposition_region_real,
    time_sharing_region,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
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
    "alpha_from_power_split",
    "power_split_from_alpha",
    "QuadratureConfig",
    "QuadratureError",
    "CapacityBracketError",
    "CapacityPoint",
    "stream_capacity",
    "full_capacity",
    "capacity_curve",
    "invert_capacity",
    "mc_capacity_oracle",
    "ErrorTarget",
    "ReferencePoint",
    "OperatingPoint",
    "EfficiencyCurve",
    "parse_stream",
    "load_reference_table",
    "equivalent_ideal_rate",
    "operating_point",
    "build_efficiency_curve",
    "interpolate_efficiency",
    "RatePair",
    "Region",
    "superposition_region_ideal",
    "superposition_region_real",
    "time_sharing_region",
    "qpsk_time_sharing_endpoints",
    "pareto_frontier",
    "SnrDistribution",
    "SchemeConfig",
    "TradeoffPoint",
    "NoCoverageError",
    "load_distribution",
    "mix_distributions",
    "indisponibility",
    "decode_fractions",
    "mean_spectral_efficiency",
    "sweep_tradeoff",
]
