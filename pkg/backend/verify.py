"""
Trispin: Verification

Phase-invariant checks of built sequences against target propagators, plus
numerical confirmation of the Lie-algebraic identities the constructions
rest on. Every check returns a VerificationReport; residuals are max-abs
entry differences unless the name says otherwise.
"""

import logging
import math
from typing import Optional

import numpy as np

from config import (
    ALGEBRA_TOL,
    DEFAULT_EXTREMAL_STEPS,
    DEFAULT_SEED,
    EXTREMAL_ODE_SAFETY,
    EXTREMAL_ODE_TOL,
    FIDELITY_TOL,
    MIN_EXTREMAL_STEPS,
    PERIOD_SAMPLES,
    RESIDUAL_TOL,
    SWAP_TRIPLES,
    UNITARITY_TOL,
)
from dynamics import drift_hamiltonian, evolve, expm, fidelity, hard_pulse, phase_aligned_error
from errors import ContractViolationError, DimensionMismatchError
from models import Axis
from opalg import ComplexMatrix, commutator, embed, max_abs, spin_product
from schemas import PulseSequence, SpinSystem, VerificationReport
from sequences import (
    N_SPINS,
    build_named,
    build_target,
    geodesic_params,
    resolve_theta,
    swap13_target,
    term_target,
    trilinear_target,
)

logger = logging.getLogger(__name__)

DIM = 2 ** N_SPINS


def _exp_skew(X: ComplexMatrix, t: float = 1.0) -> ComplexMatrix:
    """exp(tX) for skew-Hermitian X."""
    return expm(1j * X, t).matrix


def _log_report(report: VerificationReport) -> VerificationReport:
    if report.passed:
        logger.info(f"{report.label}: passed")
    else:
        worst = max(report.residuals.items(), key=lambda kv: kv[1], default=("fidelity", report.achieved))
        logger.warning(f"{report.label}: FAILED (fidelity {report.achieved:.15f}, worst {worst[0]}={worst[1]:.3e})")
    return report


def _require_dim(U: ComplexMatrix, what: str):
    if U.shape != (DIM, DIM):
        raise DimensionMismatchError(f"{what} expects an {DIM}x{DIM} propagator, got {U.shape}")


# ──────────────────────────────────────────────────────────────────
# Propagator checks
# ──────────────────────────────────────────────────────────────────

def verify_sequence(
    seq: PulseSequence,
    sys: SpinSystem,
    target: ComplexMatrix,
    tol: float = FIDELITY_TOL,
    label: Optional[str] = None,
) -> VerificationReport:
    """Evolve seq and compare with target up to global phase.

    Passes when fidelity ≥ 1 - tol; a negative tol can never pass.
    """
    prop = evolve(seq, sys)
    if target.shape != prop.matrix.shape:
        raise DimensionMismatchError(f"target is {target.shape}, sequence evolves to {prop.matrix.shape}")
    # Entry-wise error implied by an infidelity of tol on a 2^n space
    entry_tol = 2.0 * math.sqrt(prop.dim * max(tol, 0.0))
    report = VerificationReport(
        label=label or seq.label or "sequence",
        achieved=fidelity(prop.matrix, target),
        target_fidelity=1.0 - tol,
        duration_s=prop.duration,
        residuals={
            "phase_aligned_error": phase_aligned_error(prop.matrix, target),
            "unitarity_error": prop.unitarity_error(),
        },
        tolerances={"phase_aligned_error": entry_tol, "unitarity_error": UNITARITY_TOL},
    )
    return _log_report(report)


def verify_against(
    seq: PulseSequence,
    sys: SpinSystem,
    target=None,
    theta: Optional[float] = None,
    kappa: Optional[float] = None,
    axes: str = "zzz",
    tol: float = FIDELITY_TOL,
    term: Optional[str] = None,
) -> VerificationReport:
    """verify_sequence against a named target, or against exp(-iθ·term) for a textual term."""
    if (target is None) == (term is None):
        raise ContractViolationError("supply exactly one of a named target or a term")
    if term is None:
        return verify_sequence(seq, sys, build_target(target, theta, kappa, axes), tol)
    matrix, canonical = term_target(term, resolve_theta(theta, kappa))
    report = verify_sequence(seq, sys, matrix, tol)
    return report.model_copy(update={"notes": [*report.notes, f"target exp(-i theta ({canonical}))"]})


def verify_named(
    builtin,
    target=None,
    theta: Optional[float] = None,
    kappa: Optional[float] = None,
    axes: str = "zzz",
    J: float = 1.0,
    tol: float = FIDELITY_TOL,
    term: Optional[str] = None,
) -> VerificationReport:
    seq = build_named(builtin, theta=theta, kappa=kappa, J=J, axes=axes)
    return verify_against(seq, SpinSystem.chain(N_SPINS, J), target, theta, kappa, axes, tol, term)


def check_coherence_transfer(U: ComplexMatrix, tol: float = RESIDUAL_TOL) -> VerificationReport:
    """U I1x U† = I3x and U I1y U† = I3y, i.e. I1⁻ → I3⁻."""
    _require_dim(U, "check_coherence_transfer")
    residuals = {}
    for axis in (Axis.X, Axis.Y):
        moved = U @ embed(axis, 1, N_SPINS) @ U.conj().T
        residuals[f"I1{axis.value}->I3{axis.value}"] = max_abs(moved - embed(axis, 3, N_SPINS))
    report = VerificationReport(
        label="coherence_transfer",
        residuals=residuals,
        tolerances={name: tol for name in residuals},
    )
    return _log_report(report)


def _random_hermitian(rng: np.random.Generator, dim: int) -> ComplexMatrix:
    X = rng.uniform(-1, 1, (dim, dim)) + 1j * rng.uniform(-1, 1, (dim, dim))
    return (X + X.conj().T) / 2


def check_swap(
    U: ComplexMatrix,
    seed: int = DEFAULT_SEED,
    triples: int = SWAP_TRIPLES,
    tol: float = RESIDUAL_TOL,
) -> VerificationReport:
    """U(A⊗B⊗C)U† = C⊗B⊗A on seeded Hermitian triples and |U| = |SWAP13| on basis states."""
    _require_dim(U, "check_swap")
    rng = np.random.default_rng(seed)
    conjugation = 0.0
    for _ in range(triples):
        A, B, C = (_random_hermitian(rng, 2) for _ in range(3))
        moved = U @ np.kron(np.kron(A, B), C) @ U.conj().T
        conjugation = max(conjugation, max_abs(moved - np.kron(np.kron(C, B), A)))
    basis = max_abs(np.abs(U) - swap13_target().real)
    report = VerificationReport(
        label="swap13",
        residuals={"conjugation": conjugation, "basis_states": basis},
        tolerances={"conjugation": tol, "basis_states": tol},
        notes=[f"{triples} Hermitian triples, seed {seed:#x}"],
    )
    return _log_report(report)


# ──────────────────────────────────────────────────────────────────
# Algebraic identities
# ──────────────────────────────────────────────────────────────────

def geodesic_generators() -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """A, B, C, D spanning the reduced three-spin control problem."""
    A = -1j * (spin_product("zx1") + spin_product("1xz"))
    B = -1j * (spin_product("zy1") + spin_product("1yz"))
    C = -1j * (2 * spin_product("zzz") + embed(Axis.Z, 2, N_SPINS) / 2)
    D = -1j * 4 * spin_product("zzz")
    return A, B, C, D


def check_so3_relations(
    A: ComplexMatrix,
    B: ComplexMatrix,
    C: ComplexMatrix,
    D: Optional[ComplexMatrix] = None,
) -> dict[str, float]:
    residuals = {
        "[A,B]-C": max_abs(commutator(A, B) - C),
        "[B,C]-A": max_abs(commutator(B, C) - A),
        "[C,A]-B": max_abs(commutator(C, A) - B),
    }
    if D is not None:
        residuals["[A,D]+B"] = max_abs(commutator(A, D) + B)
        residuals["[B,D]-A"] = max_abs(commutator(B, D) - A)
    return residuals


def check_geodesic_generators() -> VerificationReport:
    residuals = check_so3_relations(*geodesic_generators())
    report = VerificationReport(
        label="geodesic_generators_so3",
        residuals=residuals,
        tolerances={name: ALGEBRA_TOL for name in residuals},
    )
    return _log_report(report)


def check_bch_rotation(A: ComplexMatrix, B: ComplexMatrix, C: ComplexMatrix, t: float) -> float:
    """Residual of exp(tA) B exp(-tA) = B cos t + C sin t."""
    rotated = _exp_skew(A, t) @ B @ _exp_skew(A, -t)
    return max_abs(rotated - (B * math.cos(t) + C * math.sin(t)))


def check_conjugation_triples() -> VerificationReport:
    """The two so(3) triples and π/2 conjugations carrying I1x to I3x."""
    x1 = embed(Axis.X, 1, N_SPINS)
    yzz = 4 * spin_product("yzz")
    zzz = 4 * spin_product("zzz")
    yzy = 4 * spin_product("yzy")
    x3 = embed(Axis.X, 3, N_SPINS)

    residuals = {}
    for name, triple in (("I1x,4I1yI2zI3z,4I1zI2zI3z", (x1, yzz, zzz)), ("4I1yI2zI3y,4I1yI2zI3z,I3x", (yzy, yzz, x3))):
        for relation, value in check_so3_relations(*(-1j * X for X in triple)).items():
            residuals[f"{name}: {relation}"] = value
    tolerances = {name: ALGEBRA_TOL for name in residuals}

    step1 = expm(zzz, math.pi / 2).matrix
    step2 = expm(yzy, math.pi / 2).matrix
    residuals["I1x->4I1yI2zI3z"] = max_abs(step1 @ x1 @ step1.conj().T - yzz)
    residuals["4I1yI2zI3z->I3x"] = max_abs(step2 @ yzz @ step2.conj().T - x3)

    report = VerificationReport(label="conjugation_triples", residuals=residuals, tolerances=tolerances)
    return _log_report(report)


def check_period_lemma(alpha) -> float:
    """‖exp(2πC)·exp(α1A + α2B + α3C) - 1‖ with α rescaled onto |α| = 2π."""
    alpha = np.asarray(alpha, dtype=float)
    norm = float(np.linalg.norm(alpha))
    if alpha.shape != (3,) or norm == 0.0:
        raise ContractViolationError(f"alpha must be a nonzero 3-vector, got {alpha.tolist()}")
    alpha = alpha * (2 * math.pi / norm)
    A, B, C, _ = geodesic_generators()
    product = _exp_skew(C, 2 * math.pi) @ _exp_skew(alpha[0] * A + alpha[1] * B + alpha[2] * C)
    return max_abs(product - np.eye(DIM))


def period_battery(seed: int = DEFAULT_SEED, count: int = PERIOD_SAMPLES) -> VerificationReport:
    rng = np.random.default_rng(seed)
    worst = max(check_period_lemma(rng.standard_normal(3)) for _ in range(count))
    report = VerificationReport(
        label="period_battery",
        residuals={"max_residual": worst},
        notes=[f"{count} normalized alpha vectors, seed {seed:#x}"],
    )
    return _log_report(report)


def check_remark3_relations(thetas=None) -> VerificationReport:
    """The printed decoupling commutators and the conjugation sandwich.

    The third printed relation repeats the second verbatim; the intended
    [2I2yI3z, 4I1zI2zI3z] = i2I1zI2x is checked alongside it.
    """
    zx = 2 * spin_product("zx1")
    yz = 2 * spin_product("1yz")
    zzz = 4 * spin_product("zzz")
    printed = [
        ("[2I1zI2x,2I2yI3z]=i4I1zI2zI3z", zx, yz, 1j * zzz),
        ("[4I1zI2zI3z,2I1zI2x]=i2I2yI3z", zzz, zx, 1j * yz),
        ("[4I1zI2zI3z,2I1zI2x]=i2I2yI3z (repeated)", zzz, zx, 1j * yz),
    ]
    residuals = {name: max_abs(commutator(X, Y) - Z) for name, X, Y, Z in printed}
    residuals["[2I2yI3z,4I1zI2zI3z]=i2I1zI2x"] = max_abs(commutator(yz, zzz) - 1j * zx)
    tolerances = {name: ALGEBRA_TOL for name in residuals}

    if thetas is None:
        thetas = np.linspace(0, 4 * math.pi, 9)[1:]
    outer = expm(spin_product("zx1"), math.pi).matrix
    sandwich = 0.0
    for theta in thetas:
        inner = expm(spin_product("1yz"), theta / 2).matrix
        produced = outer @ inner @ outer.conj().T
        sandwich = max(sandwich, max_abs(produced - trilinear_target(theta)))
    residuals["sandwich"] = sandwich

    report = VerificationReport(
        label="remark3_relations",
        residuals=residuals,
        tolerances=tolerances,
        notes=["printed relation 3 duplicates relation 2; the intended third relation is checked separately"],
    )
    return _log_report(report)


def check_decoupling_sandwich(sys: SpinSystem, spin: int, t: float) -> float:
    """Residual of exp(-iH_d t/2) k⁻¹ exp(-iH_d t/2) k = exp(-iH_d^A t), k = x-π on spin.

    H_d^A drops every coupling of `spin` (and its offset, which the echo also refocuses).
    """
    n = sys.n
    pairs = [(i, j) for i, j, _ in sys.coupled_pairs() if spin in (i, j)]
    reduced = drift_hamiltonian(sys, pairs) - 2 * math.pi * sys.offset(spin) * embed(Axis.Z, spin, n)
    half = expm(drift_hamiltonian(sys), t / 2).matrix
    k = hard_pulse(spin, Axis.X, math.pi, n)
    produced = half @ k.conj().T @ half @ k
    return max_abs(produced - expm(reduced, t).matrix)


# ──────────────────────────────────────────────────────────────────
# Extremal trajectory
# ──────────────────────────────────────────────────────────────────

def _random_local_unitary(rng: np.random.Generator) -> ComplexMatrix:
    factors = [expm(_random_hermitian(rng, 2), 1.0).matrix for _ in range(N_SPINS)]
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def check_extremal(
    theta: float,
    J: float = 1.0,
    n_steps: int = DEFAULT_EXTREMAL_STEPS,
    seed: int = DEFAULT_SEED,
    samples: int = 8,
) -> VerificationReport:
    """Finite-difference check of the geodesic's extremal equations.

    On t_k = kT/n_steps:
      dM/dt = [H̄, M],   M = -H̄ - (β/T)D,   H̄ = 2πJ(A cos(βt/T) - B sin(βt/T))
      dP̄/dt = H̄P̄,      P̄ = exp(-βCt/T) exp((βC/T + 2πJA)t)
    with P̄(T) = exp(θC/2) and exp(iθI2z/4)P̄(T) = U_F. The maximum condition
    tr(k(-iH_d)k†·M) ≤ tr(H̄M) is sampled over seeded local unitaries k.
    """
    p = geodesic_params(theta, J)
    label = f"extremal(theta={p.theta:.12g}, J={p.J:g})"
    if p.T == 0.0:
        return _log_report(VerificationReport(label=label, notes=["T = 0: empty interval, check skipped"]))
    if n_steps < MIN_EXTREMAL_STEPS:
        raise ContractViolationError(f"n_steps must be >= {MIN_EXTREMAL_STEPS}, got {n_steps}")

    A, B, C, D = geodesic_generators()
    w = p.beta / p.T
    h = p.T / n_steps
    t = np.arange(n_steps + 1) * h

    H_bar = 2 * math.pi * p.J * (np.cos(w * t)[:, None, None] * A - np.sin(w * t)[:, None, None] * B)
    M = -H_bar - w * D

    dM = (M[2:] - M[:-2]) / (2 * h)
    bracket = H_bar[1:-1] @ M[1:-1] - M[1:-1] @ H_bar[1:-1]
    costate = max_abs(dM - bracket)

    # exp(Gt) through the eigenbasis of the Hermitian iG; C is diagonal
    G = w * C + 2 * math.pi * p.J * A
    eigenvalues, V = np.linalg.eigh(1j * G)
    phases = np.exp(-1j * np.outer(t, eigenvalues))
    free = (V[None, :, :] * phases[:, None, :]) @ V.conj().T
    frame = np.exp(-w * np.outer(t, np.diag(C)))
    P_bar = frame[:, :, None] * free

    dP = (P_bar[2:] - P_bar[:-2]) / (2 * h)
    trajectory = max_abs(dP - H_bar[1:-1] @ P_bar[1:-1])

    endpoint = fidelity(P_bar[-1], _exp_skew(C, p.theta / 2))
    k = hard_pulse(2, Axis.Z, -p.theta / 4, N_SPINS)
    coset = fidelity(k @ P_bar[-1], trilinear_target(p.theta))

    rng = np.random.default_rng(seed)
    drift = -1j * drift_hamiltonian(SpinSystem.chain(N_SPINS, p.J))
    violation = 0.0
    for index in np.linspace(0, n_steps, 5).astype(int):
        best = np.trace(H_bar[index] @ M[index]).real
        for _ in range(samples):
            u = _random_local_unitary(rng)
            value = np.trace(u @ drift @ u.conj().T @ M[index]).real
            violation = max(violation, value - best)

    # Leading central-difference error is h²/6·|X'''|. |H̄| = 2πJ|A| along the whole arc,
    # |H̄'| = w|H̄|, |H̄''| = w²|H̄|, and M''' = -H̄'''.
    a = 2 * math.pi * p.J * float(np.linalg.norm(A, 2))
    costate_bound = h ** 2 / 6 * w ** 3 * a
    trajectory_bound = h ** 2 / 6 * (w ** 2 * a + 3 * w * a ** 2 + a ** 3)
    ode_floor = EXTREMAL_ODE_TOL * (DEFAULT_EXTREMAL_STEPS / n_steps) ** 2
    report = VerificationReport(
        label=label,
        achieved=endpoint,
        target_fidelity=1.0 - FIDELITY_TOL,
        duration_s=p.T,
        residuals={
            "costate_ode": costate,
            "trajectory_ode": trajectory,
            "coset_infidelity": 1.0 - coset,
            "maximum_condition": violation,
        },
        tolerances={
            "costate_ode": max(ode_floor, EXTREMAL_ODE_SAFETY * costate_bound),
            "trajectory_ode": max(ode_floor, EXTREMAL_ODE_SAFETY * trajectory_bound),
            "coset_infidelity": FIDELITY_TOL,
            "maximum_condition": RESIDUAL_TOL,
        },
        notes=[
            f"n_steps={n_steps}, h={h:.6g} s",
            f"finite-difference constants: costate {costate / h ** 2:.6g}, trajectory {trajectory / h ** 2:.6g}",
        ],
    )
    return _log_report(report)
