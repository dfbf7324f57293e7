from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

import hiercap
from hiercap.capacity import QuadratureConfig

# capacity evaluations inside property tests can blow the default deadline,
# especially on the NumPy fallback backend
settings.register_profile(
    "hiercap",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hiercap")

DATA_DIR = Path(hiercap.__file__).parent / "data"


@pytest.fixture(scope="session")
def q32() -> QuadratureConfig:
    return QuadratureConfig(order=32)


@pytest.fixture(scope="session")
def q16() -> QuadratureConfig:
    # cheaper grid for property tests; plenty for monotonicity checks
    return QuadratureConfig(order=16)


@pytest.fixture(scope="session")
def reference_table_path() -> Path:
    return DATA_DIR / "dvbsh_reference.csv"


@pytest.fixture(scope="session")
def sband_cdf_path() -> Path:
    return DATA_DIR / "synthetic_sband_cdf.csv"
