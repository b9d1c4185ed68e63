"""
Trispin: Pulse-Sequence Builders and Targets

Builders for the linear chain J12 = J23 = J, J13 = 0:

- build_conventional: decoupling-based trilinear sequence, (2+κ)/(2J)
- build_improved: non-decoupled sequence, (1+κ)/(2J)
- build_geodesic: time-optimal sequence, √(κ(4-κ))/(2J)
- build_trilinear: geodesic conjugated onto arbitrary axes
- build_VF, build_swap13: coherence transfer and indirect 1↔3 swap, 3√3/(2J)

Every builder evolves its own result once and raises ConstructionError if the
unitary misses its target. Hard pulses follow exp(-i·angle·I_{k,axis}).
"""

import logging
import math
from typing import Optional

import numpy as np

from config import FIDELITY_TOL
from dynamics import evolve, expm, fidelity
from errors import AngleRangeError, ConstructionError, UnsupportedPatternError
from models import Axis, SequenceName, TargetName
from opalg import ComplexMatrix, embed, format_term, parse_term, realize, spin_product
from schemas import (
    Delay,
    GeodesicParams,
    HardPulse,
    OperatorSum,
    ProductOperatorTerm,
    PulseSequence,
    RfField,
    ShapedEvolution,
    SpinSystem,
)

logger = logging.getLogger(__name__)

N_SPINS = 3
HALF_PI = math.pi / 2
THETA_MAX = 4 * math.pi
VF_AXES = ("zzz", "yzy", "xzx")


# ──────────────────────────────────────────────────────────────────
# Parameters
# ──────────────────────────────────────────────────────────────────

def check_J(J: float) -> float:
    if not math.isfinite(J) or J <= 0:
        raise AngleRangeError(f"coupling J must be a positive number of Hz, got {J}")
    return float(J)


def check_theta(theta: float) -> float:
    if not math.isfinite(theta) or not 0.0 <= theta <= THETA_MAX:
        raise AngleRangeError(f"theta must lie in [0, 4π], got {theta}")
    return float(theta)


def resolve_theta(theta: Optional[float] = None, kappa: Optional[float] = None) -> float:
    """Angle in radians from either theta or kappa = theta/2π; defaults to θ = 2π."""
    if theta is not None and kappa is not None:
        raise AngleRangeError("theta and kappa are mutually exclusive")
    if kappa is not None:
        theta = 2 * math.pi * kappa
    if theta is None:
        theta = 2 * math.pi
    return check_theta(theta)


def geodesic_params(theta: float, J: float) -> GeodesicParams:
    theta = check_theta(theta)
    J = check_J(J)
    kappa = theta / (2 * math.pi)
    radicand = kappa * (4 - kappa)
    root = math.sqrt(radicand) if radicand > 0 else 0.0
    return GeodesicParams(
        theta=theta,
        J=J,
        kappa=kappa,
        beta=2 * math.pi - theta / 2,
        T=root / (2 * J),
        nu_rf=(2 - kappa) * J / root if root > 0 else 0.0,
    )


def _check_axes(axes: str) -> str:
    axes = axes.lower()
    if len(axes) != N_SPINS or any(c not in "xyz" for c in axes):
        raise UnsupportedPatternError(f"axes must be three of x, y, z (e.g. 'xzz'), got {axes!r}")
    return axes


# ──────────────────────────────────────────────────────────────────
# Targets
# ──────────────────────────────────────────────────────────────────

def trilinear_target(theta: float, axes: str = "zzz") -> ComplexMatrix:
    """exp(-iθ I1α I2β I3γ)."""
    return expm(spin_product(_check_axes(axes)), theta).matrix


def term_target(text: str, theta: float) -> tuple[ComplexMatrix, str]:
    """exp(-iθ B) for a textual product-operator term, with the term's canonical text.

    "0.25 I1z I2z I3z" realizes to I1zI2zI3z and so gives trilinear_target(θ).
    """
    term = parse_term(text, N_SPINS)
    return expm(realize(term), check_theta(theta)).matrix, format_term(term)


def vf_target() -> ComplexMatrix:
    """exp(-i2π(I1zI2zI3z + I1yI2zI3y + I1xI2zI3x))."""
    H = sum(spin_product(axes) for axes in VF_AXES)
    return expm(H, 2 * math.pi).matrix


def swap13_target() -> ComplexMatrix:
    """Permutation |abc⟩ → |cba⟩ (spin 1 is the most significant bit)."""
    dim = 2 ** N_SPINS
    P = np.zeros((dim, dim), dtype=complex)
    for index in range(dim):
        a, b, c = (index >> 2) & 1, (index >> 1) & 1, index & 1
        P[(c << 2) | (b << 1) | a, index] = 1.0
    return P


def lambda2_target() -> ComplexMatrix:
    """Doubly controlled phase flip diag(1, ..., 1, -1)."""
    return np.diag([1.0] * (2 ** N_SPINS - 1) + [-1.0]).astype(complex)


def lambda2_decomposition() -> ComplexMatrix:
    """exp(-iπ (1/2 - I1z)⊗(1/2 - I2z)⊗(1/2 - I3z))."""
    down = 0.5 * np.eye(2) - np.real(embed(Axis.Z, 1, 1))
    return expm(np.kron(np.kron(down, down), down), math.pi).matrix


def lambda2_effective_hamiltonian() -> tuple[float, OperatorSum]:
    """Expansion of π(1/2 - I1z)(1/2 - I2z)(1/2 - I3z) as (identity weight, traceless part).

    Expanded: π/8 - π/4 ΣIkz + π/2 ΣIizIjz - π I1zI2zI3z. Coefficients are
    given per basis term, so the 2^(q-1) prefactor of realize() is divided out.
    """
    terms = []
    for factors_on in ((1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)):
        q = len(factors_on)
        sign = -1.0 if q % 2 else 1.0
        weight = sign * math.pi / 2 ** (3 - q)
        factors = tuple(Axis.Z if k in factors_on else Axis.IDENTITY for k in range(1, N_SPINS + 1))
        terms.append(ProductOperatorTerm(n=N_SPINS, factors=factors, coefficient=weight / 2 ** (q - 1)))
    return math.pi / 8, OperatorSum(n=N_SPINS, terms=tuple(terms))


# ──────────────────────────────────────────────────────────────────
# Construction helpers
# ──────────────────────────────────────────────────────────────────

def _hard(spin: int, axis: str, angle: float) -> HardPulse:
    return HardPulse(spin=spin, axis=axis, angle=angle)


def _validated(seq: PulseSequence, target: ComplexMatrix, J: float) -> PulseSequence:
    achieved = fidelity(evolve(seq, SpinSystem.chain(seq.n, J)).matrix, target)
    if achieved < 1.0 - FIDELITY_TOL:
        raise ConstructionError(f"{seq.label}: fidelity {achieved:.15f} misses its target")
    logger.info(f"Built {seq.label}: {len(seq.events)} events, {seq.duration:.12g} s")
    return seq


def _geodesic_events(theta: float, J: float, beta_sign: float = 1.0) -> tuple:
    p = geodesic_params(theta, J)
    if p.T == 0.0:
        return ()
    beta = beta_sign * p.beta
    return (
        _hard(2, "y", -HALF_PI),
        ShapedEvolution(duration=p.T, rf=(RfField(spin=2, axis="x", amp_hz=-beta / (2 * math.pi * p.T)),)),
        _hard(2, "x", math.pi + beta / 2),
        _hard(2, "y", HALF_PI),
    )


def _conjugated(core: tuple, axes: str) -> tuple:
    """Rotate the I_kz factors of the core onto the requested axes."""
    if not core:
        return ()
    before, after = [], []
    for spin, axis in enumerate(axes, start=1):
        if axis == "x":
            before.append(_hard(spin, "y", -HALF_PI))
            after.append(_hard(spin, "y", HALF_PI))
        elif axis == "y":
            before.append(_hard(spin, "x", HALF_PI))
            after.append(_hard(spin, "x", -HALF_PI))
    return tuple(before) + tuple(core) + tuple(after)


# ──────────────────────────────────────────────────────────────────
# Builders
# ──────────────────────────────────────────────────────────────────

def build_conventional(theta: float, J: float = 1.0) -> PulseSequence:
    """exp(-iπI1zI2x) · exp(-iθI2yI3z/2) · exp(iπI1zI2x) using ideal decoupling."""
    theta, J = check_theta(theta), check_J(J)
    tau = 1 / (2 * J)
    events = (
        # exp(+iπ I1z I2x), spin 3 decoupled
        _hard(2, "y", HALF_PI),
        Delay(duration=tau, off_pairs=((2, 3),)),
        _hard(2, "y", -HALF_PI),
        # exp(-iθ/2 I2y I3z), spin 1 decoupled
        _hard(2, "x", HALF_PI),
        Delay(duration=theta / (4 * math.pi * J), off_pairs=((1, 2),)),
        _hard(2, "x", -HALF_PI),
        # exp(-iπ I1z I2x)
        _hard(2, "y", -HALF_PI),
        Delay(duration=tau, off_pairs=((2, 3),)),
        _hard(2, "y", HALF_PI),
    )
    seq = PulseSequence(n=N_SPINS, label=f"conventional(theta={theta:.12g}, J={J:g})", events=events)
    return _validated(seq, trilinear_target(theta), J)


def build_improved(theta: float, J: float = 1.0) -> PulseSequence:
    """exp(π/2 A) exp(θ/2 B) exp(-π/2 A) followed by exp(iθI2z/4).

    A = -i(I1z+I3z)I2x and B = -i(I1z+I3z)I2y are each a full-coupling delay
    with I2z rotated onto x or y by hard pulses on spin 2.
    """
    theta, J = check_theta(theta), check_J(J)
    quarter = 1 / (4 * J)
    events = (
        _hard(2, "y", HALF_PI),
        Delay(duration=quarter),
        _hard(2, "y", -HALF_PI),
        _hard(2, "x", HALF_PI),
        Delay(duration=theta / (4 * math.pi * J)),
        _hard(2, "x", -HALF_PI),
        _hard(2, "y", -HALF_PI),
        Delay(duration=quarter),
        _hard(2, "y", HALF_PI),
        _hard(2, "z", -theta / 4),
    )
    seq = PulseSequence(n=N_SPINS, label=f"improved(theta={theta:.12g}, J={J:g})", events=events)
    return _validated(seq, trilinear_target(theta), J)


def build_geodesic(theta: float, J: float = 1.0) -> PulseSequence:
    p = geodesic_params(theta, J)
    seq = PulseSequence(
        n=N_SPINS,
        label=f"geodesic(theta={p.theta:.12g}, J={p.J:g})",
        events=_geodesic_events(p.theta, p.J),
        meta={"beta": p.beta, "T": p.T, "nu_rf": p.nu_rf},
    )
    return _validated(seq, trilinear_target(p.theta), p.J)


def build_trilinear(theta: float, J: float = 1.0, axes: str = "zzz") -> PulseSequence:
    axes = _check_axes(axes)
    p = geodesic_params(theta, J)
    seq = PulseSequence(
        n=N_SPINS,
        label=f"trilinear(theta={p.theta:.12g}, J={p.J:g}, axes={axes})",
        events=_conjugated(_geodesic_events(p.theta, p.J), axes),
    )
    return _validated(seq, trilinear_target(p.theta, axes), p.J)


def build_VF(J: float = 1.0) -> PulseSequence:
    """U1 U2 U3 with trilinear 2π blocks on zzz, yzy and xzx.

    The β sign of the blocks is taken from the closed form first and flipped
    only if the assembled propagator misses V_F.
    """
    J = check_J(J)
    target = vf_target()
    system = SpinSystem.chain(N_SPINS, J)
    for beta_sign in (1.0, -1.0):
        events = ()
        for axes in VF_AXES:
            events += _conjugated(_geodesic_events(2 * math.pi, J, beta_sign), axes)
        seq = PulseSequence(n=N_SPINS, label=f"vf(J={J:g})", events=events, meta={"beta_sign": beta_sign})
        achieved = fidelity(evolve(seq, system).matrix, target)
        if achieved >= 1.0 - FIDELITY_TOL:
            if beta_sign < 0:
                logger.warning(f"{seq.label}: closed-form beta sign failed, using the flipped sign")
            logger.info(f"Built {seq.label}: beta sign {beta_sign:+g}, {seq.duration:.12g} s")
            return seq
    raise ConstructionError(f"vf(J={J:g}): neither beta sign reproduces V_F")


def build_swap13(J: float = 1.0) -> PulseSequence:
    """V_F followed by exp(iπ/2 I2z)."""
    vf = build_VF(J)
    tail = PulseSequence(n=N_SPINS, events=(_hard(2, "z", -HALF_PI),))
    seq = vf.concat(tail, label=f"swap13(J={J:g})")
    return _validated(seq, swap13_target(), J)


# ──────────────────────────────────────────────────────────────────
# Rewrites
# ──────────────────────────────────────────────────────────────────

def _refocusing_spin(delay: Delay, sys: SpinSystem) -> int:
    omitted = set(delay.off_pairs)
    common = set.intersection(*(set(pair) for pair in omitted))
    for m in sorted(common):
        incident = {(i, j) for i, j, _ in sys.coupled_pairs() if m in (i, j)}
        if incident <= omitted:
            if sys.offset(m) != 0.0:
                raise UnsupportedPatternError(f"spin {m} has a nonzero offset; a π-pulse echo would remove it")
            return m
    raise UnsupportedPatternError(
        f"decoupled pairs {sorted(omitted)} do not isolate a single spin from all its couplings"
    )


def expand_refocusing(seq: PulseSequence, sys: SpinSystem) -> PulseSequence:
    """Replace every decoupled delay by a π-pulse echo on the isolated spin.

    Delay(τ, off) becomes Delay(τ/2) · x-π on m · Delay(τ/2) · x-π on m; the
    result matches the ideal propagator up to a global phase of -1 per echo.
    """
    events = []
    for event in seq.events:
        if isinstance(event, Delay) and event.off_pairs:
            m = _refocusing_spin(event, sys)
            half = Delay(duration=event.duration / 2)
            events.extend([half, _hard(m, "x", math.pi), half, _hard(m, "x", math.pi)])
        else:
            events.append(event)
    if len(events) == len(seq.events):
        return seq
    return PulseSequence(n=seq.n, label=f"{seq.label} [refocused]", events=tuple(events), meta=dict(seq.meta))


def compile_z_pulses(seq: PulseSequence) -> PulseSequence:
    """Rewrite z hard pulses as x(-π/2), y(φ), x(+π/2) in time order."""
    events = []
    for event in seq.events:
        if isinstance(event, HardPulse) and event.axis == "z":
            events.extend([
                _hard(event.spin, "x", -HALF_PI),
                _hard(event.spin, "y", event.angle),
                _hard(event.spin, "x", HALF_PI),
            ])
        else:
            events.append(event)
    if len(events) == len(seq.events):
        return seq
    return PulseSequence(n=seq.n, label=f"{seq.label} [xy]", events=tuple(events), meta=dict(seq.meta))


# ──────────────────────────────────────────────────────────────────
# Registries
# ──────────────────────────────────────────────────────────────────

def build_named(
    name,
    theta: Optional[float] = None,
    kappa: Optional[float] = None,
    J: float = 1.0,
    axes: str = "zzz",
    xy_only: bool = False,
) -> PulseSequence:
    name = SequenceName(name)
    if name == SequenceName.VF:
        seq = build_VF(J)
    elif name == SequenceName.SWAP13:
        seq = build_swap13(J)
    else:
        angle = resolve_theta(theta, kappa)
        if name == SequenceName.CONVENTIONAL:
            seq = build_conventional(angle, J)
        elif name == SequenceName.IMPROVED:
            seq = build_improved(angle, J)
        elif name == SequenceName.GEODESIC:
            seq = build_geodesic(angle, J)
        else:
            seq = build_trilinear(angle, J, axes)
    return compile_z_pulses(seq) if xy_only else seq


def build_target(
    name,
    theta: Optional[float] = None,
    kappa: Optional[float] = None,
    axes: str = "zzz",
) -> ComplexMatrix:
    name = TargetName(name)
    if name == TargetName.TRILINEAR:
        return trilinear_target(resolve_theta(theta, kappa), axes)
    if name == TargetName.VF:
        return vf_target()
    if name == TargetName.SWAP13:
        return swap13_target()
    return lambda2_target()
