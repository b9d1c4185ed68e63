"""
Trispin: Self-test Suite

run_selftest() executes every invariant check in a fixed order and returns
the reports; the CLI and the service only format them.
"""

import logging
import math

import numpy as np

from analysis import check_table_against_builders, duration_table, sweep
from config import FIDELITY_TOL, MATRIX_TOL, RESIDUAL_TOL
from dynamics import evolve, expm
from models import SPIN_AXES
from opalg import basis, commutator, gram_matrix, max_abs, pauli, realize_sum
from schemas import SpinSystem, VerificationReport
from sequences import (
    N_SPINS,
    build_conventional,
    build_geodesic,
    build_improved,
    build_swap13,
    build_trilinear,
    build_VF,
    compile_z_pulses,
    expand_refocusing,
    lambda2_decomposition,
    lambda2_effective_hamiltonian,
    lambda2_target,
    swap13_target,
    trilinear_target,
    vf_target,
)
from verify import (
    check_bch_rotation,
    check_coherence_transfer,
    check_decoupling_sandwich,
    check_extremal,
    check_conjugation_triples,
    check_geodesic_generators,
    check_remark3_relations,
    check_swap,
    period_battery,
    geodesic_generators,
    verify_sequence,
)

logger = logging.getLogger(__name__)

PAULI_TOL = 1e-14
THETA_GRID = (math.pi / 2, math.pi, 2 * math.pi, 3 * math.pi, 4 * math.pi)
TRILINEAR_AXES = ("xzz", "yzy", "xyz")


def _report(label: str, residuals: dict, tol: float, notes=None) -> VerificationReport:
    return VerificationReport(
        label=label,
        residuals=residuals,
        tolerances={name: tol for name in residuals},
        notes=notes or [],
    )


def _pauli_relations() -> VerificationReport:
    x, y, z = (pauli(a) for a in SPIN_AXES)
    quarter = np.eye(2) / 4
    residuals = {
        "[Ix,Iy]-iIz": max_abs(commutator(x, y) - 1j * z),
        "[Iy,Iz]-iIx": max_abs(commutator(y, z) - 1j * x),
        "[Iz,Ix]-iIy": max_abs(commutator(z, x) - 1j * y),
    }
    for axis, m in zip(SPIN_AXES, (x, y, z)):
        residuals[f"I{axis.value}^2-1/4"] = max_abs(m @ m - quarter)
    return _report("pauli_relations", residuals, PAULI_TOL)


def _basis_orthogonality() -> VerificationReport:
    residuals = {}
    for n in (2, 3):
        expected = np.eye(4 ** n - 1) * 2.0 ** (n - 2)
        residuals[f"gram_n{n}"] = max_abs(gram_matrix(n) - expected)
    notes = [f"basis sizes {len(basis(2))}, {len(basis(3))}"]
    return _report("basis_orthogonality", residuals, MATRIX_TOL, notes)


def _bch_rotation() -> VerificationReport:
    A, B, C, _ = geodesic_generators()
    worst = max(check_bch_rotation(A, B, C, t) for t in np.linspace(0.0, 2 * math.pi, 7))
    return _report("bch_rotation", {"max_residual": worst}, RESIDUAL_TOL)


def _builder_reports(J: float, tol: float) -> list[VerificationReport]:
    system = SpinSystem.chain(N_SPINS, J)
    reports = []
    for builder in (build_conventional, build_improved, build_geodesic):
        for theta in THETA_GRID:
            reports.append(verify_sequence(builder(theta, J), system, trilinear_target(theta), tol))
    for axes in TRILINEAR_AXES:
        seq = build_trilinear(2 * math.pi, J, axes)
        reports.append(verify_sequence(seq, system, trilinear_target(2 * math.pi, axes), tol))

    vf = build_VF(J)
    reports.append(verify_sequence(vf, system, vf_target(), tol))
    reports.append(check_coherence_transfer(evolve(vf, system).matrix))

    swap = build_swap13(J)
    reports.append(verify_sequence(swap, system, swap13_target(), tol))
    reports.append(check_swap(evolve(swap, system).matrix))
    reports.append(verify_sequence(compile_z_pulses(swap), system, swap13_target(), tol))

    for theta in (math.pi / 2, 2 * math.pi):
        refocused = expand_refocusing(build_conventional(theta, J), system)
        reports.append(verify_sequence(refocused, system, trilinear_target(theta), tol))
    return reports


def _decoupling() -> VerificationReport:
    system = SpinSystem.chain(N_SPINS, 1.0)
    residuals = {f"spin{spin}": check_decoupling_sandwich(system, spin, 0.5) for spin in (1, 3)}
    return _report("decoupling_sandwich", residuals, RESIDUAL_TOL)


def _lambda2() -> VerificationReport:
    identity_weight, expansion = lambda2_effective_hamiltonian()
    H_eff = identity_weight * np.eye(2 ** N_SPINS) + realize_sum(expansion)
    residuals = {
        "decomposition": max_abs(lambda2_decomposition() - lambda2_target()),
        "effective_hamiltonian": max_abs(expm(H_eff, 1.0).matrix - lambda2_target()),
    }
    return _report("lambda2", residuals, MATRIX_TOL)


def _sweep_ordering() -> VerificationReport:
    rows = sweep()
    interior = rows[1:-1]
    ordering = max(
        max(r.t_optimal - r.t_improved, r.t_improved - r.t_conventional) for r in interior
    )
    t_opt = np.array([r.t_optimal for r in rows])
    curvature = float(np.max(t_opt[2:] - 2 * t_opt[1:-1] + t_opt[:-2]))
    # Strict ordering: the largest gap must be negative, not merely small
    return VerificationReport(
        label="sweep_ordering",
        passed=ordering < 0 and curvature <= 0,
        residuals={"largest_ordering_gap": ordering, "largest_second_difference": curvature},
        notes=[f"{len(rows)} points over kappa in [0, 2]"],
    )


def run_selftest(seed: int, tol: float = FIDELITY_TOL, J: float = 1.0) -> list[VerificationReport]:
    """All invariant checks in a fixed order.

    tol is the infidelity allowed for sequence verifications; a negative tol
    makes those checks fail.
    """
    logger.info(f"Self-test started (seed {seed:#x}, tol {tol:g})")
    reports = [
        _pauli_relations(),
        _basis_orthogonality(),
        check_geodesic_generators(),
        check_conjugation_triples(),
        _bch_rotation(),
        period_battery(seed),
        check_remark3_relations(),
        check_extremal(math.pi / 2, J, seed=seed),
        check_extremal(2 * math.pi, J, seed=seed),
    ]
    reports.extend(_builder_reports(J, tol))
    reports.append(_decoupling())
    reports.append(_lambda2())
    reports.append(check_table_against_builders(duration_table(J), J))
    reports.append(_sweep_ordering())

    failed = [r.label for r in reports if not r.passed]
    if failed:
        logger.warning(f"Self-test: {len(failed)} of {len(reports)} checks failed: {', '.join(failed)}")
    else:
        logger.info(f"Self-test: all {len(reports)} checks passed")
    return reports
