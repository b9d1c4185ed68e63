"""
Trispin: Product-Operator Algebra

Spin-1/2 operators I_x, I_y, I_z (entries ±1/2, ±i/2), their embeddings
I_{kα} into the 2^n-dimensional space of n spins, and the orthogonal
product-operator basis of su(2^n):

    B_s = 2^(q-1) · Π_k I_{kα}     tr(B_r B_s) = δ_rs · 2^(n-2)

Spin indices are 1-based; spin 1 is the leftmost tensor factor.
"""

import itertools
import re
from functools import lru_cache, reduce

import numpy as np
import numpy.typing as npt

from config import MATRIX_TOL
from errors import ContractViolationError, DimensionMismatchError, SequenceFormatError, SpinIndexError
from models import AXIS_ORDER, Axis
from schemas import OperatorSum, ProductOperatorTerm

ComplexMatrix = npt.NDArray[np.complex128]

_PAULI = {
    Axis.IDENTITY: np.eye(2, dtype=complex),
    Axis.X: 0.5 * np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: 0.5 * np.array([[1, 0], [0, -1]], dtype=complex),
}

_TOKEN = re.compile(r"^I(\d+)([xyz])$")


# ──────────────────────────────────────────────────────────────────
# Operators
# ──────────────────────────────────────────────────────────────────

def pauli(axis) -> ComplexMatrix:
    return _PAULI[Axis(axis)].copy()


def _kron_all(mats) -> ComplexMatrix:
    return reduce(np.kron, mats)


def embed(axis, k: int, n: int) -> ComplexMatrix:
    """I_{k,axis} for an n-spin system."""
    if not 1 <= k <= n:
        raise SpinIndexError(f"spin {k} out of range 1..{n}")
    factors = [_PAULI[Axis.IDENTITY]] * n
    factors[k - 1] = _PAULI[Axis(axis)]
    return _kron_all(factors)


def spin_product(axes: str) -> ComplexMatrix:
    """Plain product Π I_{kα} from a per-spin string, '1' marking identity.

    spin_product("zzz") is I1z I2z I3z, spin_product("z1z") is I1z I3z.
    """
    lookup = {"1": Axis.IDENTITY, "x": Axis.X, "y": Axis.Y, "z": Axis.Z}
    try:
        return _kron_all([_PAULI[lookup[c]] for c in axes])
    except KeyError as e:
        raise SequenceFormatError(f"bad axis character {e.args[0]!r} in {axes!r}") from None


def realize(term: ProductOperatorTerm) -> ComplexMatrix:
    q = term.q
    if q == 0:
        raise ContractViolationError("q = 0 is the identity, which is not part of su(2^n)")
    return (2.0 ** (q - 1) * term.coefficient) * _kron_all([_PAULI[f] for f in term.factors])


def realize_sum(op: OperatorSum) -> ComplexMatrix:
    total = np.zeros((2 ** op.n, 2 ** op.n), dtype=complex)
    for term in op.terms:
        total += realize(term)
    return total


@lru_cache(maxsize=8)
def _basis(n: int) -> tuple[ProductOperatorTerm, ...]:
    return tuple(
        ProductOperatorTerm(n=n, factors=factors)
        for factors in itertools.product(AXIS_ORDER, repeat=n)
        if any(f != Axis.IDENTITY for f in factors)
    )


def basis(n: int) -> list[ProductOperatorTerm]:
    """All 4^n - 1 basis terms, lexicographic with identity < x < y < z (spin 1 most significant)."""
    if n < 1:
        raise ContractViolationError(f"spin count must be >= 1, got {n}")
    return list(_basis(n))


def gram_matrix(n: int) -> np.ndarray:
    """Real matrix of tr(B_r B_s) over basis(n)."""
    mats = np.stack([realize(t) for t in basis(n)])
    return np.einsum("rij,sji->rs", mats, mats).real


# ──────────────────────────────────────────────────────────────────
# Brackets and inner products
# ──────────────────────────────────────────────────────────────────

def _check_same_dims(A, B):
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"operands have shapes {A.shape} and {B.shape}")


def commutator(A: ComplexMatrix, B: ComplexMatrix) -> ComplexMatrix:
    _check_same_dims(A, B)
    return A @ B - B @ A


def inner_product(A: ComplexMatrix, B: ComplexMatrix) -> complex:
    """tr(A† B)."""
    _check_same_dims(A, B)
    return complex(np.vdot(A, B))


def skew(H: ComplexMatrix) -> ComplexMatrix:
    """-iH: the su(2^n) element generated by a Hermitian operator."""
    return -1j * H


# ──────────────────────────────────────────────────────────────────
# Predicates
# ──────────────────────────────────────────────────────────────────

def max_abs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def is_hermitian(M: ComplexMatrix, tol: float = MATRIX_TOL) -> bool:
    return max_abs(M - M.conj().T) <= tol


def is_skew_hermitian(M: ComplexMatrix, tol: float = MATRIX_TOL) -> bool:
    return max_abs(M + M.conj().T) <= tol


def unitarity_error(M: ComplexMatrix) -> float:
    return max_abs(M.conj().T @ M - np.eye(M.shape[0]))


def is_unitary(M: ComplexMatrix, tol: float = MATRIX_TOL) -> bool:
    return unitarity_error(M) <= tol


# ──────────────────────────────────────────────────────────────────
# Textual form: "1.0 I1z I2z"
# ──────────────────────────────────────────────────────────────────

def parse_term(text: str, n: int) -> ProductOperatorTerm:
    tokens = text.split()
    coefficient = 1.0
    if tokens and not _TOKEN.match(tokens[0]):
        head = tokens.pop(0)
        try:
            coefficient = float(head)
        except ValueError:
            raise SequenceFormatError(f"bad coefficient {head!r} in {text!r}") from None

    factors = [Axis.IDENTITY] * n
    for token in tokens:
        match = _TOKEN.match(token)
        if not match:
            raise SequenceFormatError(f"bad factor {token!r} in {text!r}; expected I<k><x|y|z>")
        k = int(match.group(1))
        if not 1 <= k <= n:
            raise SpinIndexError(f"spin {k} out of range 1..{n} in {text!r}")
        if factors[k - 1] != Axis.IDENTITY:
            raise SequenceFormatError(f"spin {k} appears twice in {text!r}")
        factors[k - 1] = Axis(match.group(2))

    if all(f == Axis.IDENTITY for f in factors):
        raise SequenceFormatError(f"{text!r} has no spin factors")
    return ProductOperatorTerm(n=n, factors=tuple(factors), coefficient=coefficient)


def format_term(term: ProductOperatorTerm) -> str:
    factors = [f"I{k}{f.value}" for k, f in enumerate(term.factors, start=1) if f != Axis.IDENTITY]
    return " ".join([repr(float(term.coefficient))] + factors)
