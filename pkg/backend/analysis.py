"""
Trispin: Duration Analysis

Closed-form durations of the three trilinear constructions, the duration
comparison table and the κ sweep of the three curves:

    conventional   (2+κ)/(2J)
    improved       (1+κ)/(2J)
    geodesic       √(κ(4-κ))/(2J)
"""

import logging
import math

import numpy as np

from config import DEFAULT_SWEEP_POINTS, DURATION_RTOL
from errors import AngleRangeError, ContractViolationError
from schemas import DurationRow, SweepRow, VerificationReport
from sequences import THETA_MAX, build_conventional, build_geodesic, build_swap13, build_VF, check_J, check_theta

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
SWEEP_HEADER = "kappa,t_conventional,t_improved,t_optimal"


def t_star(theta: float, J: float) -> float:
    """Minimum time for exp(-iθ I1zI2zI3z); the sign of θ and J does not matter."""
    if not math.isfinite(theta) or abs(theta) > THETA_MAX:
        raise AngleRangeError(f"|theta| must not exceed 4π, got {theta}")
    if not math.isfinite(J) or J == 0:
        raise AngleRangeError(f"coupling J must be finite and nonzero, got {J}")
    theta, J = abs(theta), abs(J)
    kappa = theta / (2 * math.pi)

    from_theta = math.sqrt(max(0.0, 2 * math.pi * theta - (theta / 2) ** 2)) / (2 * math.pi * J)
    from_kappa = math.sqrt(max(0.0, kappa * (4 - kappa))) / (2 * J)
    if not math.isclose(from_theta, from_kappa, rel_tol=DURATION_RTOL, abs_tol=1e-300):
        raise ContractViolationError(f"t_star forms disagree: {from_theta!r} vs {from_kappa!r}")
    return from_kappa


def t_conventional(theta: float, J: float) -> float:
    kappa = check_theta(theta) / (2 * math.pi)
    return (2 + kappa) / (2 * check_J(J))


def t_improved(theta: float, J: float) -> float:
    kappa = check_theta(theta) / (2 * math.pi)
    return (1 + kappa) / (2 * check_J(J))


# ──────────────────────────────────────────────────────────────────
# Duration table
# ──────────────────────────────────────────────────────────────────

def duration_table(J: float = 1.0, kappa: float = 1.0) -> list[DurationRow]:
    J = check_J(J)
    theta = check_theta(2 * math.pi * kappa)
    return [
        DurationRow(
            label=f"exp(-i 2pi kappa I1aI2bI3c), kappa={kappa:g}",
            tau_conventional_s=t_conventional(theta, J),
            tau_geodesic_s=t_star(theta, J),
        ),
        DurationRow(
            label="exp(-i 2pi I1aI2bI3c)",
            tau_conventional_s=3 / (2 * J),
            tau_geodesic_s=SQRT3 / (2 * J),
        ),
        DurationRow(
            label="Swap(1,3)",
            tau_conventional_s=9 / (2 * J),
            tau_geodesic_s=3 * SQRT3 / (2 * J),
        ),
        DurationRow(
            label="I1- -> I3-",
            tau_conventional_s=3 / J,
            tau_geodesic_s=3 * SQRT3 / (2 * J),
        ),
    ]


def builder_durations(J: float = 1.0, kappa: float = 1.0) -> dict[str, float]:
    """Accounted durations of the built sequences behind each table row."""
    theta = check_theta(2 * math.pi * kappa)
    return {
        "generic_conventional": build_conventional(theta, J).duration,
        "generic_geodesic": build_geodesic(theta, J).duration,
        "trilinear_conventional": build_conventional(2 * math.pi, J).duration,
        "trilinear_geodesic": build_geodesic(2 * math.pi, J).duration,
        "swap_geodesic": build_swap13(J).duration,
        "transfer_geodesic": build_VF(J).duration,
    }


def check_table_against_builders(rows: list[DurationRow], J: float = 1.0, kappa: float = 1.0) -> VerificationReport:
    built = builder_durations(J, kappa)
    expected = {
        "generic_conventional": rows[0].tau_conventional_s,
        "generic_geodesic": rows[0].tau_geodesic_s,
        "trilinear_conventional": rows[1].tau_conventional_s,
        "trilinear_geodesic": rows[1].tau_geodesic_s,
        "swap_geodesic": rows[2].tau_geodesic_s,
        "transfer_geodesic": rows[3].tau_geodesic_s,
    }
    residuals = {
        name: abs(built[name] - value) / value if value else abs(built[name])
        for name, value in expected.items()
    }
    report = VerificationReport(
        label="table_vs_builders",
        residuals=residuals,
        tolerances={name: DURATION_RTOL for name in residuals},
        notes=[f"J={J:g} Hz, kappa={kappa:g}; residuals are relative"],
    )
    if not report.passed:
        logger.warning(f"Duration table disagrees with built sequences: {residuals}")
    return report


# ──────────────────────────────────────────────────────────────────
# Sweep
# ──────────────────────────────────────────────────────────────────

def sweep(
    kappa_min: float = 0.0,
    kappa_max: float = 2.0,
    n_points: int = DEFAULT_SWEEP_POINTS,
    J: float = 1.0,
) -> list[SweepRow]:
    if not 0.0 <= kappa_min < kappa_max <= 2.0:
        raise AngleRangeError(f"need 0 <= kappa_min < kappa_max <= 2, got [{kappa_min}, {kappa_max}]")
    if n_points < 2:
        raise AngleRangeError(f"n_points must be at least 2, got {n_points}")
    J = check_J(J)

    rows = []
    for kappa in np.linspace(kappa_min, kappa_max, n_points):
        kappa = float(kappa)
        theta = 2 * math.pi * kappa
        rows.append(SweepRow(
            kappa=kappa,
            t_conventional=t_conventional(theta, J),
            t_improved=t_improved(theta, J),
            t_optimal=t_star(theta, J),
        ))
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for row in rows:
        lines.append(",".join("%.17g" % v for v in (row.kappa, row.t_conventional, row.t_improved, row.t_optimal)))
    return "\n".join(lines) + "\n"
