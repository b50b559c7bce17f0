import csv
import math

import numpy as np
import pytest

from localpulse.errors import IntegrationError, InvalidInputError, UnsupportedScheduleError
from localpulse.operators import build, expm_oracle
from localpulse.reference import (
    ONE_ROTATION_TIME,
    one_rotation_field,
    one_rotation_frequency,
    one_rotation_schedule,
    qubit_initial,
    qubit_target,
    recurrence_times,
)
from localpulse.scheduler import Schedule, synthesize, transition_spec
from localpulse.simulator import (
    ControlField,
    batch_propagate,
    bloch_coordinates,
    exact_unitary,
    propagate_exact,
    propagate_numeric,
    pulse_sample_times,
    schedule_to_field,
    simulate_schedule,
    write_controls_csv,
    write_trajectory_csv,
)
from localpulse.states import PureState, fidelity, random_state
from localpulse.waveforms import Pulse, WaveformFamily, adaptive_simpson, energy

from oracles import rk4_scalar_loop

R2 = math.sqrt(2) / 2
LS = WaveformFamily("ls")


def random_schedule(rng, family=None, amp=None):
    n = int(rng.integers(2, 7))
    if family is None:
        family = [WaveformFamily("bb"), LS, WaveformFamily("ln", int(rng.integers(1, 6)))][int(rng.integers(3))]
    a, b = random_state(rng, n), random_state(rng, n)
    spec = transition_spec(a, b, family, rng.uniform(0.3, 3.0) if amp is None else amp)
    return synthesize(spec), a, b


def qubit_schedule():
    return synthesize(transition_spec(qubit_initial(), qubit_target(), LS, 1.0))


def test_zero_field_is_constant():
    psi = random_state(np.random.default_rng(0), 4)
    traj = propagate_numeric(ControlField(4), psi, 2.0, 0.1)
    assert np.all(traj.states == psi.amplitudes)
    assert np.all(np.diff(traj.times) > 0)
    assert traj.times[-1] == 2.0


def test_empty_schedule_exact():
    psi = random_state(np.random.default_rng(1), 3)
    out = propagate_exact(Schedule(3, LS), psi)
    assert np.allclose(out.amplitudes, psi.amplitudes, atol=1e-15)


def test_qubit_example_both_paths():
    sched = qubit_schedule()
    assert fidelity(propagate_exact(sched, qubit_initial()), qubit_target()) == pytest.approx(1.0, abs=1e-14)
    traj = simulate_schedule(sched, qubit_initial(), target=qubit_target())
    assert traj.fidelities[-1] >= 1 - 1e-10
    assert traj.renormalizations == 0


def test_matches_textbook_rk4():
    rng = np.random.default_rng(5)
    sched, a, _ = random_schedule(rng, LS)
    field = schedule_to_field(sched)
    gens = field.generators()
    t_end = sched.pulses[0].t1  # single smooth segment so both grids coincide
    n = 64

    def ham(t):
        return np.tensordot(field.sample([min(t, np.nextafter(t_end, 0))])[0], gens, 1)

    ours = propagate_numeric(field, a, t_end, t_end / n).final_vector
    ref = rk4_scalar_loop(ham, a.amplitudes, t_end, n)
    assert np.max(np.abs(ours - ref)) < 1e-13


def test_oracle_equivalence_random():
    rng = np.random.default_rng(11)
    for _ in range(15):
        sched, a, _ = random_schedule(rng)
        exact = exact_unitary(sched) @ a.amplitudes
        traj = simulate_schedule(sched, a, steps_per_pulse=400)
        assert np.linalg.norm(traj.final_vector - exact) < 1e-6
        assert traj.max_norm_drift < 1e-8


def test_convergence_order():
    initial = PureState([0.6, 0.0, 0.8j])
    sched = synthesize(transition_spec(initial, PureState([0.0, R2, -R2]), LS, 1.0))
    exact = exact_unitary(sched) @ initial.amplitudes
    field = schedule_to_field(sched)
    longest = max(p.duration for p in sched.pulses)
    errs = []
    for steps in (8, 16):
        out = propagate_numeric(field, initial, sched.t_f, longest / steps, min_steps_per_segment=steps)
        errs.append(np.linalg.norm(out.final_vector - exact))
    assert errs[0] / errs[1] >= 12


def test_exact_unitary_is_unitary():
    rng = np.random.default_rng(2)
    for _ in range(20):
        sched, _, _ = random_schedule(rng)
        u = exact_unitary(sched)
        assert np.max(np.abs(u.conj().T @ u - np.eye(sched.dim))) < 1e-11


def test_overlap_rejected():
    with pytest.raises(UnsupportedScheduleError):
        exact_unitary(one_rotation_schedule())


def test_non_finite_field():
    field = ControlField(2, {("y", 0): lambda t: np.where(t > 0.5, np.nan, 1.0)})
    with pytest.raises(IntegrationError):
        propagate_numeric(field, qubit_initial(), 1.0, 0.01)


@pytest.mark.parametrize("kw", [dict(step=0.0), dict(step=-1.0), dict(t_end=-1.0)])
def test_bad_integration_args(kw):
    args = dict(t_end=1.0, step=0.1) | kw
    with pytest.raises(InvalidInputError):
        propagate_numeric(ControlField(2), qubit_initial(), **args)


def test_invalid_channel():
    with pytest.raises(InvalidInputError):
        ControlField(2, {("y", 1): np.sin})
    with pytest.raises(InvalidInputError):
        ControlField(3, {("x", 0): np.sin})


@pytest.mark.parametrize("channel", ["y", "z"])
@pytest.mark.parametrize("family", [LS, WaveformFamily("ln", 1), WaveformFamily("ln", 4)], ids=lambda f: f.label)
def test_single_pulse_closed_form(channel, family):
    rng = np.random.default_rng(7)
    for index in (0, 2):
        pulse = Pulse(channel, index, int(rng.choice([-1, 1])), rng.uniform(0.5, 2), 0.0, rng.uniform(0.5, 3), family)
        sched = Schedule(4, family, (pulse,), (0.0, pulse.t1))
        psi = random_state(rng, 4)
        exact = exact_unitary(sched) @ psi.amplitudes
        numeric = simulate_schedule(sched, psi).final_vector
        assert np.max(np.abs(numeric - exact)) < 1e-8


def test_one_rotation_reaches_target():
    traj = propagate_numeric(one_rotation_field(), qubit_initial(), ONE_ROTATION_TIME, 1e-3, target=qubit_target())
    assert traj.fidelities[-1] >= 1 - 1e-6
    # the drive has a fixed direction, so a single exponential of the combined generator applies
    total_area = 2.0 / one_rotation_frequency()
    u = expm_oracle(-1j * total_area * (build("y", 2, 0) + build("z", 2, 0)))
    assert np.linalg.norm(traj.final_vector - u @ qubit_initial().amplitudes) < 1e-9


def test_one_rotation_recurs():
    traj = propagate_numeric(one_rotation_field(6), qubit_initial(), 6 * ONE_ROTATION_TIME, 1e-3, target=qubit_target())
    for t in recurrence_times(3):
        i = int(np.argmin(np.abs(traj.times - t)))
        assert traj.times[i] == pytest.approx(t, abs=1e-12)
        assert traj.fidelities[i] >= 1 - 1e-6
    # half way between recurrences the state is back at |0>, far from the target
    i = int(np.argmin(np.abs(traj.times - 2 * ONE_ROTATION_TIME)))
    assert traj.fidelities[i] < 0.6


def test_schedule_to_field_pointwise():
    sched = qubit_schedule()
    field = schedule_to_field(sched)
    t = np.linspace(0, sched.t_f, 1001, endpoint=False)
    u = field.sample(t)
    mid = math.pi**2 / 8
    assert np.allclose(u[:, 0], np.where(t < mid, np.sin(8 * t / math.pi), 0.0), atol=1e-14)
    assert np.allclose(u[:, 1], np.where(t >= mid, np.sin((8 * t - math.pi**2) / math.pi), 0.0), atol=1e-14)
    assert np.all(field.sample([-1.0, sched.t_f, sched.t_f + 1]) == 0)
    assert schedule_to_field(Schedule(2, LS)).channels == {}


def test_field_energy_matches_pulses():
    rng = np.random.default_rng(8)
    for _ in range(5):
        sched, _, _ = random_schedule(rng)
        field = schedule_to_field(sched)
        knots = sorted(set(field.breakpoints) | {0.0})
        total = 0.0
        for key, fn in field.channels.items():
            for a, b in zip(knots, knots[1:]):
                right = np.nextafter(b, a)
                total += adaptive_simpson(lambda t: float(fn(np.array(min(t, right)))) ** 2, a, b, 1e-12)
        expected = sum(energy(p) for p in sched.pulses)
        assert total == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize(
    "amps, xyz",
    [([1, 0], (0, 0, 1)), ([R2, 1j * R2], (0, 1, 0)), ([R2, R2], (1, 0, 0)), ([0, 1], (0, 0, -1))],
)
def test_bloch_examples(amps, xyz):
    assert bloch_coordinates(PureState(amps)) == pytest.approx(xyz, abs=1e-15)


def test_bloch_unit_and_dim():
    rng = np.random.default_rng(3)
    for _ in range(50):
        assert sum(c**2 for c in bloch_coordinates(random_state(rng, 2))) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(InvalidInputError):
        bloch_coordinates(PureState.basis(3, 0))


def test_batch_matches_serial():
    rng = np.random.default_rng(12)
    cases = [random_schedule(rng) for _ in range(8)]
    out = batch_propagate([c[0] for c in cases], [c[1] for c in cases], max_workers=4)
    for (sched, a, _), got in zip(cases, out):
        assert np.array_equal(got.amplitudes, propagate_exact(sched, a).amplitudes)


def test_csv_exports(tmp_path):
    sched = qubit_schedule()
    traj = simulate_schedule(sched, qubit_initial(), steps_per_pulse=200, target=qubit_target())
    times = pulse_sample_times(sched, per_pulse=16)
    assert times.size == 33 and times[-1] == sched.t_f
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj, traj.nearest_indices(times))
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "re_c0", "im_c0", "re_c1", "im_c1", "fidelity", "bloch_x", "bloch_y", "bloch_z"]
    assert len(rows) == 34
    assert float(rows[-1][5]) >= 1 - 1e-8
    assert [float(x) for x in rows[-1][6:]] == pytest.approx([0, 1, 0], abs=1e-6)

    path = tmp_path / "controls.csv"
    write_controls_csv(path, schedule_to_field(sched), times)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "u_y0", "u_z0"]
    assert float(rows[-1][1]) == 0.0 and float(rows[-1][2]) == 0.0
