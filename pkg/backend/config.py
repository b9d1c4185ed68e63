"""
Trispin: Application Configuration

Only the pseudo-random seed is read from the environment (TRISPIN_SEED).
Everything else is a fixed constant of the numerical contract.
"""

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

APP_NAME = "Trispin"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = (
    "Time-optimal pulse sequences for coupled three-spin networks: "
    "construction, exact propagator simulation and verification"
)

DEFAULT_SEED = 0xC0FFEE

# ──────────────────────────────────────────────────────────────────
# Numerical tolerances (max-abs entry differences unless noted)
# ──────────────────────────────────────────────────────────────────

MATRIX_TOL = 1e-12
ALGEBRA_TOL = 1e-12
UNITARITY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
FIDELITY_TOL = 1e-9          # 1 - fidelity
RESIDUAL_TOL = 1e-9
DURATION_RTOL = 1e-12        # relative
EXTREMAL_ODE_TOL = 1e-5      # at DEFAULT_EXTREMAL_STEPS, scales as h^2
EXTREMAL_ODE_SAFETY = 4.0    # multiple of the leading central-difference error

# Dense 2^n x 2^n propagators
MAX_SPINS = 4

DEFAULT_SWEEP_POINTS = 201
DEFAULT_EXTREMAL_STEPS = 10_000
MIN_EXTREMAL_STEPS = 1_000
PERIOD_SAMPLES = 20
SWAP_TRIPLES = 10


class Settings(BaseSettings):
    SEED: int = DEFAULT_SEED

    model_config = SettingsConfigDict(env_prefix="TRISPIN_", extra="ignore")

    @field_validator("SEED", mode="before")
    @classmethod
    def parse_seed(cls, value):
        # "0xC0FFEE" as well as plain decimal
        if isinstance(value, str):
            return int(value.strip(), 0)
        return value


settings = Settings()
