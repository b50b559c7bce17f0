import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localpulse.errors import InvalidInputError
from localpulse.states import (
    GeometricState,
    PureState,
    fidelity,
    random_state,
    state_from_json,
    state_to_json,
    geometric_to_json,
    to_amplitudes,
    to_geometric,
)
from oracles import amplitudes_by_hand

R2 = math.sqrt(2) / 2


def test_basis_angles():
    psi = to_amplitudes(GeometricState([0.0], [0.0]))
    np.testing.assert_allclose(psi.amplitudes, [1, 0], atol=1e-15)


def test_worked_example_target():
    psi = to_amplitudes(GeometricState([math.pi / 2], [math.pi / 2]))
    np.testing.assert_allclose(psi.amplitudes, [R2, 1j * R2], atol=1e-15)


def test_qutrit_by_hand():
    psi = to_amplitudes(GeometricState([math.pi, math.pi / 2], [0.0, 0.0]))
    np.testing.assert_allclose(psi.amplitudes, [0, R2, R2], atol=1e-15)


def test_dim_mismatch():
    with pytest.raises(InvalidInputError):
        GeometricState([0.1, 0.2], [0.3])
    with pytest.raises(InvalidInputError):
        to_amplitudes(GeometricState([0.1], [0.3]), dim=3)


@pytest.mark.parametrize("theta, phi", [([-0.1], [0.0]), ([3.2], [0.0]), ([0.1], [2 * math.pi])])
def test_angle_ranges_enforced(theta, phi):
    with pytest.raises(InvalidInputError):
        GeometricState(theta, phi)


def test_to_geometric_basis_state():
    geo = to_geometric(PureState([1, 0, 0]))
    assert geo.theta.tolist() == [0.0, 0.0]
    assert geo.phi.tolist() == [0.0, 0.0]


def test_to_geometric_worked_example():
    geo = to_geometric(PureState([R2, 1j * R2]))
    np.testing.assert_allclose(geo.theta, [math.pi / 2], atol=1e-15)
    np.testing.assert_allclose(geo.phi, [math.pi / 2], atol=1e-15)


def test_to_geometric_zero_vector():
    with pytest.raises(InvalidInputError):
        to_geometric(np.zeros(3))


def test_global_phase_when_first_amplitude_vanishes():
    # c_0 = 0: the first nonzero amplitude sets the phase reference
    v = np.array([0, 1j, -1]) / math.sqrt(2)
    geo = to_geometric(PureState(v))
    assert geo.phi[0] == 0.0
    assert fidelity(to_amplitudes(geo), PureState(v)) == pytest.approx(1.0, abs=1e-15)


def test_undefined_angles_are_zero():
    geo = to_geometric(PureState([0, 0, 1j]))
    np.testing.assert_allclose(geo.theta, [math.pi, math.pi])
    assert geo.phi.tolist() == [0.0, 0.0]
    geo = to_geometric(PureState([1j, 0, 0]))
    assert geo.theta.tolist() == [0.0, 0.0]


def test_fidelity_examples():
    zero, one = PureState.basis(2, 0), PureState.basis(2, 1)
    assert fidelity(zero, zero) == 1.0
    assert fidelity(zero, one) == 0.0
    assert fidelity(PureState([R2, R2]), PureState([R2, 1j * R2])) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(InvalidInputError):
        fidelity(zero, PureState.basis(3, 0))


def test_pure_state_rejects_unnormalized():
    with pytest.raises(InvalidInputError):
        PureState([1, 1])


def test_round_trip_random():
    rng = np.random.default_rng(11)
    for _ in range(300):
        n = int(rng.integers(2, 9))
        v = random_state(rng, n)
        geo = to_geometric(v)
        assert np.all((geo.theta >= 0) & (geo.theta <= math.pi))
        assert np.all((geo.phi >= 0) & (geo.phi < 2 * math.pi))
        assert fidelity(to_amplitudes(geo), v) >= 1 - 1e-10


angles = st.floats(0.0, math.pi)
phases = st.floats(0.0, 2 * math.pi, exclude_max=True)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.tuples(st.lists(angles, min_size=n - 1, max_size=n - 1), st.lists(phases, min_size=n - 1, max_size=n - 1))))
def test_to_amplitudes_matches_hand_transcription(angles_pair):
    theta, phi = angles_pair
    psi = to_amplitudes(GeometricState(theta, phi))
    assert abs(np.linalg.norm(psi.amplitudes) - 1) <= 1e-12
    np.testing.assert_allclose(psi.amplitudes, amplitudes_by_hand(theta, phi), atol=1e-14)
    # and back again
    assert fidelity(to_amplitudes(to_geometric(psi)), psi) >= 1 - 1e-10


def test_json_forms():
    psi = PureState([R2, 1j * R2])
    assert fidelity(state_from_json(state_to_json(psi)), psi) == pytest.approx(1.0)
    geo = to_geometric(psi)
    assert fidelity(state_from_json(geometric_to_json(geo)), psi) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        state_from_json({"theta": [90.0], "phi": [0.0], "units": "deg"})
    with pytest.raises(InvalidInputError):
        state_from_json({"amplitudes": [[1, 0]], "theta": [0.0], "phi": [0.0]})
    with pytest.raises(InvalidInputError):
        state_from_json({"theta": [0.0]})
