"""
Trispin: Spin Dynamics

Hamiltonian matrices are in rad/s: couplings, offsets and rf amplitudes are
given in Hz and the 2π is applied here, once. Propagators solve
dU/dt = -iHU for piecewise-constant H; later events multiply on the left.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import linalg as sla

from config import HERMITIAN_TOL
from errors import ContractViolationError, DimensionMismatchError, SpinIndexError
from models import Axis
from opalg import ComplexMatrix, embed, max_abs, unitarity_error
from schemas import Delay, HardPulse, PulseSequence, RfField, ShapedEvolution, SpinSystem

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Propagator:
    matrix: ComplexMatrix
    duration: float = 0.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def unitarity_error(self) -> float:
        return unitarity_error(self.matrix)


# ──────────────────────────────────────────────────────────────────
# Hamiltonians
# ──────────────────────────────────────────────────────────────────

def _z_diagonals(n: int) -> list[np.ndarray]:
    return [np.real(np.diag(embed(Axis.Z, k, n))) for k in range(1, n + 1)]


def drift_hamiltonian(sys: SpinSystem, off_pairs: Iterable[tuple[int, int]] = ()) -> ComplexMatrix:
    """2π Σ_{i<j} J_ij I_iz I_jz + 2π Σ_i offset_i I_iz, skipping the couplings in off_pairs."""
    n = sys.n
    omitted = set()
    for i, j in off_pairs:
        if not (1 <= i <= n and 1 <= j <= n):
            raise SpinIndexError(f"coupling pair ({i},{j}) out of range for {n} spins")
        omitted.add((min(i, j), max(i, j)))

    z = _z_diagonals(n)
    diagonal = np.zeros(2 ** n)
    for i, j, coupling in sys.coupled_pairs():
        if (i, j) not in omitted:
            diagonal += TWO_PI * coupling * z[i - 1] * z[j - 1]
    for k in range(1, n + 1):
        if sys.offset(k):
            diagonal += TWO_PI * sys.offset(k) * z[k - 1]
    return np.diag(diagonal).astype(complex)


def control_hamiltonian(fields: Iterable[RfField], n: int) -> ComplexMatrix:
    """Σ 2π · amp_hz · I_{spin,axis}."""
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for field in fields:
        H += TWO_PI * field.amp_hz * embed(field.axis, field.spin, n)
    return H


# ──────────────────────────────────────────────────────────────────
# Exponentials
# ──────────────────────────────────────────────────────────────────

def expm(H: ComplexMatrix, t: float) -> Propagator:
    """exp(-iHt) for Hermitian H.

    Diagonal generators are exponentiated entrywise; everything else goes
    through scipy's scaling-and-squaring Padé approximant.
    """
    H = np.asarray(H, dtype=complex)
    if max_abs(H - H.conj().T) > HERMITIAN_TOL:
        raise ContractViolationError("expm expects a Hermitian generator")

    off_diagonal = H - np.diag(np.diag(H))
    if not off_diagonal.any():
        matrix = np.diag(np.exp(-1j * t * np.diag(H).real))
    else:
        matrix = sla.expm(-1j * t * H)
    return Propagator(matrix=matrix, duration=t)


def hard_pulse(spin: int, axis, angle: float, n: int) -> ComplexMatrix:
    """exp(-i·angle·I_{spin,axis}) = cos(angle/2)·1 - 2i·sin(angle/2)·I_{spin,axis}."""
    generator = embed(axis, spin, n)
    return math.cos(angle / 2) * np.eye(2 ** n, dtype=complex) - 2j * math.sin(angle / 2) * generator


# ──────────────────────────────────────────────────────────────────
# Sequences
# ──────────────────────────────────────────────────────────────────

def event_propagator(event, sys: SpinSystem) -> Propagator:
    n = sys.n
    if isinstance(event, HardPulse):
        return Propagator(matrix=hard_pulse(event.spin, event.axis, event.angle, n), duration=0.0)
    if isinstance(event, Delay):
        return expm(drift_hamiltonian(sys, event.off_pairs), event.duration)
    if isinstance(event, ShapedEvolution):
        return expm(drift_hamiltonian(sys) + control_hamiltonian(event.rf, n), event.duration)
    raise ContractViolationError(f"unknown event {event!r}")


def evolve(seq: PulseSequence, sys: SpinSystem) -> Propagator:
    """U_N ··· U_2 U_1 over the events of seq; hard pulses take no time."""
    if seq.n != sys.n:
        raise DimensionMismatchError(f"{seq.n}-spin sequence on a {sys.n}-spin system")

    U = np.eye(2 ** sys.n, dtype=complex)
    for event in seq.events:
        U = event_propagator(event, sys).matrix @ U
    duration = seq.duration
    logger.debug(f"Evolved {seq.label!r}: {len(seq.events)} events, {duration:.9g} s")
    return Propagator(matrix=U, duration=duration)


def fidelity(U: ComplexMatrix, V: ComplexMatrix) -> float:
    """|tr(U†V)| / 2^n, insensitive to global phase."""
    if U.shape != V.shape:
        raise DimensionMismatchError(f"cannot compare {U.shape} with {V.shape}")
    return min(1.0, abs(np.vdot(U, V)) / U.shape[0])


def phase_aligned_error(U: ComplexMatrix, V: ComplexMatrix) -> float:
    """max-abs of U - e^{iφ}V with φ the phase of tr(V†U)."""
    if U.shape != V.shape:
        raise DimensionMismatchError(f"cannot compare {U.shape} with {V.shape}")
    overlap = np.vdot(V, U)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return max_abs(U - phase * V)
