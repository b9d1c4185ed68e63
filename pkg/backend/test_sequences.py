"""Tests for the pulse-sequence builders, targets and rewrites."""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dynamics import evolve, expm, fidelity, hard_pulse
from errors import AngleRangeError, SequenceFormatError, SpinIndexError, UnsupportedPatternError
from models import Axis
from opalg import embed, realize, realize_sum, spin_product
from schemas import Delay, HardPulse, PulseSequence, ShapedEvolution, SpinSystem
from sequences import (
    build_conventional,
    build_geodesic,
    build_improved,
    build_named,
    build_swap13,
    build_target,
    build_trilinear,
    build_VF,
    compile_z_pulses,
    expand_refocusing,
    geodesic_params,
    lambda2_decomposition,
    lambda2_effective_hamiltonian,
    lambda2_target,
    resolve_theta,
    swap13_target,
    term_target,
    trilinear_target,
    vf_target,
)

SQRT3 = math.sqrt(3)
FIDELITY = 1 - 1e-9


def _unitary(seq, J=1.0):
    return evolve(seq, SpinSystem.chain(3, J)).matrix


# ──────────────────────────────────────────────────────────────────
# Parameters
# ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("kappa", [0.25, 0.5, 1.0, 1.5, 1.9])
def test_geodesic_params_identities(kappa):
    p = geodesic_params(2 * math.pi * kappa, 1.0)
    assert (2 * math.pi * p.J * p.T) ** 2 + p.beta ** 2 == pytest.approx((2 * math.pi) ** 2, rel=1e-12)
    assert 2 * math.pi * p.nu_rf == pytest.approx(p.beta / p.T, rel=1e-10)


def test_geodesic_params_at_kappa_one():
    p = geodesic_params(2 * math.pi, 1.0)
    assert p.T == pytest.approx(SQRT3 / 2)
    assert p.nu_rf == pytest.approx(1 / SQRT3)
    assert p.beta == pytest.approx(math.pi)


def test_resolve_theta():
    assert resolve_theta(kappa=0.5) == pytest.approx(math.pi)
    assert resolve_theta(theta=1.0) == 1.0
    assert resolve_theta() == pytest.approx(2 * math.pi)
    with pytest.raises(AngleRangeError):
        resolve_theta(theta=1.0, kappa=0.5)


@pytest.mark.parametrize("theta", [-0.1, 4 * math.pi + 1e-6, math.inf])
def test_theta_out_of_range(theta):
    for builder in (build_conventional, build_improved, build_geodesic):
        with pytest.raises(AngleRangeError):
            builder(theta, 1.0)


@pytest.mark.parametrize("J", [0.0, -1.0])
def test_nonpositive_coupling(J):
    with pytest.raises(AngleRangeError):
        build_geodesic(math.pi, J)
    with pytest.raises(AngleRangeError):
        build_VF(J)


# ──────────────────────────────────────────────────────────────────
# Trilinear builders
# ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("builder", [build_conventional, build_improved, build_geodesic])
def test_builders_reach_trilinear_target(builder, theta_grid):
    for theta in theta_grid:
        seq = builder(theta, 1.0)
        assert fidelity(_unitary(seq), trilinear_target(theta)) >= FIDELITY


@pytest.mark.parametrize("J", [1.0, 2.5])
def test_builder_durations_follow_closed_forms(J, theta_grid):
    for theta in theta_grid:
        kappa = theta / (2 * math.pi)
        assert build_conventional(theta, J).duration == pytest.approx((2 + kappa) / (2 * J), rel=1e-12)
        assert build_improved(theta, J).duration == pytest.approx((1 + kappa) / (2 * J), rel=1e-12)
        assert build_geodesic(theta, J).duration == pytest.approx(math.sqrt(kappa * (4 - kappa)) / (2 * J), rel=1e-12)


def test_durations_at_kappa_one():
    assert build_conventional(2 * math.pi).duration == pytest.approx(1.5)
    assert build_improved(2 * math.pi).duration == pytest.approx(1.0)
    assert build_geodesic(2 * math.pi).duration == pytest.approx(SQRT3 / 2)


def test_zero_angle():
    assert build_geodesic(0.0).events == ()
    assert build_geodesic(0.0).duration == 0.0
    assert build_conventional(0.0).duration == pytest.approx(1.0)
    assert build_improved(0.0).duration == pytest.approx(0.5)


def test_full_angle_geodesic():
    seq = build_geodesic(4 * math.pi)
    assert seq.duration == pytest.approx(1.0)
    assert fidelity(_unitary(seq), trilinear_target(4 * math.pi)) >= FIDELITY


def test_geodesic_event_layout():
    seq = build_geodesic(2 * math.pi)
    first, shaped, flip, last = seq.events
    assert (first.spin, first.axis, first.angle) == (2, "y", pytest.approx(-math.pi / 2))
    assert isinstance(shaped, ShapedEvolution)
    assert shaped.duration == pytest.approx(SQRT3 / 2)
    (field,) = shaped.rf
    assert (field.spin, field.axis) == (2, "x")
    assert field.amp_hz == pytest.approx(-1 / SQRT3)
    assert flip.angle == pytest.approx(1.5 * math.pi)
    assert (last.axis, last.angle) == ("y", pytest.approx(math.pi / 2))


def test_ordering_of_durations():
    for kappa in np.linspace(0.05, 2.0, 40):
        theta = 2 * math.pi * kappa
        assert build_geodesic(theta).duration < build_improved(theta).duration < build_conventional(theta).duration


def test_trilinear_matches_conjugated_form():
    theta = 1.7
    seq = build_trilinear(theta, 1.0, "xzz")
    expected = (
        expm(embed(Axis.Y, 1, 3), math.pi / 2).matrix
        @ trilinear_target(theta)
        @ expm(embed(Axis.Y, 1, 3), -math.pi / 2).matrix
    )
    assert fidelity(_unitary(seq), expected) >= FIDELITY
    assert seq.duration == pytest.approx(build_geodesic(theta).duration)


def test_trilinear_zzz_is_the_geodesic():
    assert build_trilinear(2.0, 1.0, "zzz").events == build_geodesic(2.0).events


@pytest.mark.parametrize("axes", ["xzz", "yzy", "xzx", "xyz", "yyy"])
def test_trilinear_axes(axes):
    seq = build_trilinear(2 * math.pi, 1.0, axes)
    assert fidelity(_unitary(seq), trilinear_target(2 * math.pi, axes)) >= FIDELITY


@pytest.mark.parametrize("axes", ["xz", "abc", "xzzz"])
def test_trilinear_rejects_bad_axes(axes):
    with pytest.raises(UnsupportedPatternError):
        build_trilinear(1.0, 1.0, axes)


# ──────────────────────────────────────────────────────────────────
# Coherence transfer and swap
# ──────────────────────────────────────────────────────────────────

def test_vf():
    seq = build_VF(1.0)
    assert seq.duration == pytest.approx(3 * SQRT3 / 2)
    assert seq.meta["beta_sign"] == 1.0
    U = _unitary(seq)
    assert fidelity(U, vf_target()) >= FIDELITY
    assert_allclose(U @ embed(Axis.X, 1, 3) @ U.conj().T, embed(Axis.X, 3, 3), atol=1e-9)
    assert_allclose(U @ embed(Axis.Z, 2, 3) @ U.conj().T, embed(Axis.Z, 2, 3), atol=1e-9)


def test_vf_target_factors_commute():
    product = np.eye(8, dtype=complex)
    for axes in ("zzz", "yzy", "xzx"):
        product = product @ trilinear_target(2 * math.pi, axes)
    assert_allclose(product, vf_target(), atol=1e-12)


def test_swap13_maps_basis_states():
    U = _unitary(build_swap13(1.0))
    P = swap13_target()
    for index in range(8):
        column = U[:, index]
        j = int(np.argmax(np.abs(P[:, index])))
        assert abs(abs(column[j]) - 1) < 1e-9
        assert np.max(np.abs(np.delete(column, j))) < 1e-9


def test_swap13_leaves_spin2_alone():
    U = _unitary(build_swap13(1.0))
    assert_allclose(U @ embed(Axis.Y, 2, 3) @ U.conj().T, embed(Axis.Y, 2, 3), atol=1e-9)


def test_swap13_duration_scales_with_J():
    assert build_swap13(1.0).duration == pytest.approx(3 * SQRT3 / 2)
    assert build_swap13(2.0).duration == pytest.approx(3 * SQRT3 / 4)


def test_swap_target_is_qubit_permutation():
    P = swap13_target()
    # |011> (index 3) -> |110> (index 6)
    assert P[6, 3] == 1
    assert_allclose(P @ P, np.eye(8))


# ──────────────────────────────────────────────────────────────────
# Doubly controlled phase
# ──────────────────────────────────────────────────────────────────

def test_lambda2_target():
    target = lambda2_target()
    assert_allclose(target, np.diag([1, 1, 1, 1, 1, 1, 1, -1]))
    assert np.trace(target).real == pytest.approx(6.0)
    assert_allclose(lambda2_decomposition(), target, atol=1e-12)


def test_lambda2_effective_hamiltonian():
    identity_weight, expansion = lambda2_effective_hamiltonian()
    assert identity_weight == pytest.approx(math.pi / 8)
    H = identity_weight * np.eye(8) + realize_sum(expansion)
    down = np.diag([0.0, 1.0])
    assert_allclose(H, math.pi * np.kron(np.kron(down, down), down), atol=1e-14)
    assert_allclose(expm(H, 1.0).matrix, lambda2_target(), atol=1e-12)

    (trilinear,) = [t for t in expansion.terms if t.q == 3]
    assert_allclose(np.abs(realize(trilinear)), np.abs(math.pi * spin_product("zzz")), atol=1e-15)


# ──────────────────────────────────────────────────────────────────
# Rewrites
# ──────────────────────────────────────────────────────────────────

def test_refocusing_decoupled_delay(chain):
    tau = 0.5
    seq = PulseSequence(n=3, events=(Delay(duration=tau, off_pairs=((2, 3),)),))
    expanded = expand_refocusing(seq, chain)
    assert [e.type for e in expanded.events] == ["delay", "hard", "delay", "hard"]
    assert expanded.events[1].spin == 3
    assert expanded.duration == pytest.approx(tau)
    ideal = expm(2 * math.pi * spin_product("zz1"), tau).matrix
    assert fidelity(_unitary(expanded), ideal) >= FIDELITY


def test_refocusing_picks_the_isolated_spin(chain):
    seq = PulseSequence(n=3, events=(Delay(duration=0.2, off_pairs=((1, 2),)),))
    assert expand_refocusing(seq, chain).events[1].spin == 1


def test_refocusing_without_decoupled_delays_is_identity(chain):
    seq = build_geodesic(2.0)
    assert expand_refocusing(seq, chain) is seq


@pytest.mark.parametrize("theta", [math.pi / 2, 2 * math.pi])
def test_refocused_conventional(chain, theta):
    seq = build_conventional(theta, 1.0)
    expanded = expand_refocusing(seq, chain)
    assert expanded.duration == pytest.approx(seq.duration, rel=1e-12)
    assert all(not (isinstance(e, Delay) and e.off_pairs) for e in expanded.events)
    assert fidelity(_unitary(expanded), trilinear_target(theta)) >= FIDELITY


def test_refocusing_unsupported_patterns():
    triangle = SpinSystem(couplings=((0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)))
    seq = PulseSequence(n=3, events=(Delay(duration=0.2, off_pairs=((1, 2),)),))
    with pytest.raises(UnsupportedPatternError):
        expand_refocusing(seq, triangle)

    offset = SpinSystem(couplings=SpinSystem.chain(3).couplings, offsets=(0.0, 0.0, 3.0))
    seq = PulseSequence(n=3, events=(Delay(duration=0.2, off_pairs=((2, 3),)),))
    with pytest.raises(UnsupportedPatternError):
        expand_refocusing(seq, offset)


def test_compile_z_pulses():
    seq = build_improved(1.3)
    compiled = compile_z_pulses(seq)
    assert not any(isinstance(e, HardPulse) and e.axis == "z" for e in compiled.events)
    assert compiled.duration == seq.duration
    assert fidelity(_unitary(compiled), _unitary(seq)) >= FIDELITY


@pytest.mark.parametrize("angle", [0.3, -math.pi / 2, 2.9])
def test_z_rotation_identity(angle):
    seq = PulseSequence(n=3, events=(HardPulse(spin=2, axis="z", angle=angle),))
    assert_allclose(_unitary(compile_z_pulses(seq)), hard_pulse(2, "z", angle, 3), atol=1e-14)


# ──────────────────────────────────────────────────────────────────
# Wire format and registries
# ──────────────────────────────────────────────────────────────────

def test_json_wire_format():
    seq = build_geodesic(2 * math.pi)
    payload = json.loads(seq.to_json())
    assert set(payload) == {"n", "label", "events"}
    assert [e["type"] for e in payload["events"]] == ["hard", "shaped", "hard", "hard"]
    assert set(payload["events"][1]["rf"][0]) == {"spin", "axis", "amp_hz"}

    restored = PulseSequence.from_json(seq.to_json())
    assert restored.events == seq.events
    assert restored.meta == {}


def test_delay_pairs_are_normalized():
    delay = Delay(duration=1.0, off_pairs=((3, 2), (2, 3), (1, 2)))
    assert delay.off_pairs == ((1, 2), (2, 3))
    with pytest.raises(ValueError):
        Delay(duration=1.0, off_pairs=((2, 2),))


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        '{"n": 3, "events": [{"type": "pulse", "spin": 1}]}',
        '{"n": 3, "events": [{"type": "hard", "spin": 4, "axis": "x", "angle": 1.0}]}',
        '{"n": 3, "events": [{"type": "delay", "duration": -1.0}]}',
        '{"n": 3, "events": [{"type": "shaped", "duration": 1.0, "rf": [{"spin": 1, "axis": "z", "amp_hz": 1.0}]}]}',
    ],
)
def test_from_json_rejects_malformed(text):
    with pytest.raises(SequenceFormatError):
        PulseSequence.from_json(text)


def test_sequence_rejects_spin_out_of_range():
    with pytest.raises(SpinIndexError):
        PulseSequence(n=2, events=(HardPulse(spin=3, axis="x", angle=1.0),))


def test_concat_requires_same_spin_count():
    with pytest.raises(SpinIndexError):
        PulseSequence(n=3).concat(PulseSequence(n=2))


def test_build_named_registry():
    assert build_named("geodesic", kappa=1.0).duration == pytest.approx(SQRT3 / 2)
    assert build_named("vf", J=2.0).duration == pytest.approx(3 * SQRT3 / 4)
    assert build_named("trilinear", theta=1.0, axes="xyz").label.endswith("axes=xyz)")
    compiled = build_named("swap13", xy_only=True)
    assert all(e.axis != "z" for e in compiled.events if isinstance(e, HardPulse))
    with pytest.raises(ValueError):
        build_named("grape")


def test_build_target_registry():
    assert_allclose(build_target("trilinear", kappa=0.5, axes="zzz"), trilinear_target(math.pi))
    assert_allclose(build_target("swap13"), swap13_target())
    assert_allclose(build_target("lambda2"), lambda2_target())


@pytest.mark.parametrize("theta", [0.3, math.pi, 4 * math.pi])
def test_term_target_matches_trilinear(theta):
    matrix, canonical = term_target("0.25 I1z I2z I3z", theta)
    assert_allclose(matrix, trilinear_target(theta), atol=1e-13)
    assert canonical == "0.25 I1z I2z I3z"


def test_term_target_canonicalizes_factor_order():
    matrix, canonical = term_target("0.5 I3x I2z", 1.0)
    assert canonical == "0.5 I2z I3x"
    assert_allclose(matrix, expm(spin_product("1zx"), 1.0).matrix, atol=1e-13)


@pytest.mark.parametrize(
    "text, theta, error",
    [("I1q", 1.0, SequenceFormatError), ("1.0 I4z", 1.0, SpinIndexError), ("0.25 I1z I2z I3z", 20.0, AngleRangeError)],
)
def test_term_target_rejects_bad_input(text, theta, error):
    with pytest.raises(error):
        term_target(text, theta)


def test_sequence_spin_count_is_capped():
    with pytest.raises(SequenceFormatError):
        PulseSequence.from_json(json.dumps({"n": 40, "events": []}))
    with pytest.raises(ValueError):
        PulseSequence(n=5)
