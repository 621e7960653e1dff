"""Mode transport against the static closed form and the reference stepper."""

import math
import subprocess
import sys

import numpy as np
import pytest

from adiavac.adiabatic import adiabatic_frequency
from adiavac.background import ScaleFactorModel
from adiavac.errors import NotNormalized
from adiavac.modes import (
    ModeInitialData,
    adiabatic_initial_data,
    require_normalized,
    solve_mode,
    solve_mode_batch,
    static_exact_solution,
    wronskian,
)

from oracles import static_mode

STATIC = ScaleFactorModel.constant(1.0)


def vacuum_data(model, k, m, n, t0):
    return adiabatic_initial_data(model, adiabatic_frequency(model, k, m, n, t0))


def test_initial_data_is_normalized():
    for k, m in [(0, 1.0), (3, 1.0), (10, 0.5)]:
        data = vacuum_data(ScaleFactorModel.exponential(0.4), k, m, 2, 0.1)
        a3 = math.exp(0.4 * 0.1) ** 3
        assert abs(wronskian(data.W, data.Wdot, a3) - 1j) < 1e-14


def test_initial_data_validation_rejects_denormalized():
    with pytest.raises(ValueError):
        ModeInitialData(k=1, t0=0.0, W=1.0, Wdot=0.0, a_cubed=1.0)


def test_static_vacuum_matches_closed_form():
    # criterion scale: 20 mass periods at tol 1e-10
    m, tol = 1.0, 1e-10
    t1 = 20 * 2 * math.pi
    for k in (0, 2, 9):
        data = vacuum_data(STATIC, k, m, 0, 0.0)
        traj = solve_mode(STATIC, m, data, (0.0, t1), tol, samples=std_grid(t1))
        W_exact, Wd_exact = static_exact_solution(STATIC, m, k, 0.0, traj.times)
        err = max(
            np.max(np.abs(traj.W - W_exact)), np.max(np.abs(traj.Wdot - Wd_exact))
        )
        assert err < 10 * tol
        assert traj.max_drift < 1e-9 * t1


def std_grid(t1, n=129):
    return np.linspace(0.0, t1, n)


def test_static_solution_agrees_with_mpmath():
    W, Wd = static_exact_solution(STATIC, 1.0, 4, 0.25, [1.7])
    w_o, wd_o = static_mode(1.0, math.sqrt(4 * 6 + 1), 0.25, 1.7)
    assert abs(W[0] - w_o) < 1e-15
    assert abs(Wd[0] - wd_o) < 1e-14


def test_wronskian_preserved_on_expanding_background():
    model = ScaleFactorModel.exponential(0.5)
    data = vacuum_data(model, 5, 1.0, 2, 0.0)
    traj = solve_mode(model, 1.0, data, (0.0, 4.0), 1e-10, samples=np.linspace(0, 4, 65))
    assert traj.max_drift < 1e-9 * 4.0
    assert traj.steps > 0
    assert traj.rhs_evals >= 6 * traj.steps


def test_two_sided_span_prepared_in_the_interior():
    # t0 strictly inside the span: both legs must run and the sample at t0
    # must be the initial data itself
    model = ScaleFactorModel.exponential(0.3)
    data = vacuum_data(model, 3, 1.0, 1, 1.0)
    grid = np.linspace(-1.0, 3.0, 41)
    traj = solve_mode(model, 1.0, data, (-1.0, 3.0), 1e-9, samples=grid)
    i0 = np.nonzero(traj.times == 1.0)[0][0]
    assert traj.W[i0] == data.W and traj.Wdot[i0] == data.Wdot
    assert traj.times[0] == -1.0 and traj.times[-1] == 3.0
    assert traj.max_drift < 1e-8


def test_backward_transport_inverts_forward():
    model = ScaleFactorModel.exponential(0.5)
    data = vacuum_data(model, 4, 1.0, 2, 0.0)
    fwd = solve_mode(model, 1.0, data, (0.0, 2.0), 1e-11, samples=np.array([0.0, 2.0]))
    arrived = ModeInitialData(
        k=4, t0=2.0, W=fwd.W[-1], Wdot=fwd.Wdot[-1], a_cubed=model.value(2.0) ** 3
    )
    back = solve_mode(model, 1.0, arrived, (0.0, 2.0), 1e-11, samples=np.array([0.0, 2.0]))
    assert abs(back.W[0] - data.W) < 1e-10
    assert abs(back.Wdot[0] - data.Wdot) < 1e-10


def test_batch_chunking_is_bit_identical_to_solo():
    model = ScaleFactorModel.exponential(0.4)
    datas = [vacuum_data(model, k, 1.0, 1, 0.0) for k in range(6)]
    grid = np.linspace(0.0, 1.5, 17)
    solo = solve_mode_batch(model, 1.0, datas, (0.0, 1.5), 1e-9, samples=grid, chunk_size=1)
    multi = solve_mode_batch(
        model, 1.0, datas, (0.0, 1.5), 1e-9, samples=grid, chunk_size=1, workers=3
    )
    for a, b in zip(solo, multi):
        assert np.array_equal(a.W, b.W)
        assert np.array_equal(a.Wdot, b.Wdot)
    # chunked solves share the error test across the chunk, so accuracy
    # still holds per channel even though the floats may differ
    grouped = solve_mode_batch(model, 1.0, datas, (0.0, 1.5), 1e-9, samples=grid, chunk_size=3)
    for a, b in zip(solo, grouped):
        assert np.max(np.abs(a.W - b.W)) < 1e-9


def test_sample_at_exact_times_only():
    data = vacuum_data(STATIC, 2, 1.0, 0, 0.0)
    grid = np.linspace(0.0, 1.0, 9)
    traj = solve_mode(STATIC, 1.0, data, (0.0, 1.0), 1e-9, samples=grid)
    W, Wd = traj.sample_at(grid[3])
    assert W == traj.W[3] and Wd == traj.Wdot[3]
    with pytest.raises(KeyError):
        traj.sample_at(0.123456)


def test_default_sample_grid_contains_endpoints_and_t0():
    model = ScaleFactorModel.exponential(0.3)
    data = vacuum_data(model, 1, 1.0, 0, 0.7)
    traj = solve_mode(model, 1.0, data, (0.0, 2.0), 1e-8)
    assert traj.times[0] == 0.0 and traj.times[-1] == 2.0
    assert np.any(traj.times == 0.7)
    assert np.all(np.diff(traj.times) > 0.0)


def test_span_validation():
    data = vacuum_data(STATIC, 1, 1.0, 0, 0.0)
    with pytest.raises(ValueError):
        solve_mode(STATIC, 1.0, data, (1.0, 2.0), 1e-9)  # t0 outside
    with pytest.raises(ValueError):
        solve_mode(STATIC, 1.0, data, (0.0, 0.0), 1e-9)
    with pytest.raises(ValueError):
        solve_mode(STATIC, 1.0, data, (0.0, 1.0), -1e-9)
    batch = [vacuum_data(STATIC, 1, 1.0, 0, 0.0), vacuum_data(STATIC, 2, 1.0, 0, 0.5)]
    with pytest.raises(ValueError):
        solve_mode_batch(STATIC, 1.0, batch, (0.0, 1.0), 1e-9)


def test_require_normalized():
    data = vacuum_data(STATIC, 3, 1.0, 0, 0.0)
    require_normalized(data.W, data.Wdot, 1.0)
    with pytest.raises(NotNormalized):
        require_normalized(data.W * 1.01, data.Wdot, 1.0)


def test_kernel_agrees_with_reference_integrator():
    # the compiled marcher and the numpy reference implement the same
    # pair, controller, and interpolant; on one channel they must take
    # the same steps and land within rounding of each other
    from adiavac.rungekutta import integrate

    model = ScaleFactorModel.exponential(0.5)
    m, k, t1, tol = 1.0, 6, 2.0, 1e-9
    data = vacuum_data(model, k, m, 1, 0.0)
    traj = solve_mode(model, m, data, (0.0, t1), tol, samples=np.array([0.0, t1]))

    eig = float(k * (k + 2))

    def rhs(t, y):
        a, rate = model.value_and_rate(t)
        return np.array(
            [y[1], -3.0 * (rate / a) * y[1] - (eig / (a * a) + m * m) * y[0]],
            dtype=complex,
        )

    om_max = math.sqrt(eig + m * m)  # a >= 1 on [0, t1]
    y0 = np.array([data.W, data.Wdot], dtype=complex)
    y_ref, stats = integrate(
        rhs, 0.0, y0, t1,
        budget=tol, span=t1,
        max_step=min(2 * math.pi / (20 * om_max), t1 / 16.0),
    )
    assert stats.steps == traj.steps
    assert abs(y_ref[0] - traj.W[-1]) < 1e-13
    assert abs(y_ref[1] - traj.Wdot[-1]) < 1e-13


def test_pure_python_fallback_matches_compiled():
    # block numba in a subprocess; the identity-decorator fallback must
    # produce the same trajectory values
    code = """
import sys
sys.modules['numba'] = None
import numpy as np
from adiavac.background import ScaleFactorModel
from adiavac.adiabatic import adiabatic_frequency
from adiavac.modes import adiabatic_initial_data, solve_mode
model = ScaleFactorModel.exponential(0.5)
data = adiabatic_initial_data(model, adiabatic_frequency(model, 2, 1.0, 1, 0.0))
traj = solve_mode(model, 1.0, data, (0.0, 1.0), 1e-8, samples=np.array([0.0, 1.0]))
print(repr(complex(traj.W[-1])), repr(complex(traj.Wdot[-1])), traj.steps)
"""
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, timeout=300
    )
    assert out.returncode == 0, out.stderr
    w_str, wd_str, steps_str = out.stdout.strip().rsplit(" ", 2)
    model = ScaleFactorModel.exponential(0.5)
    data = vacuum_data(model, 2, 1.0, 1, 0.0)
    traj = solve_mode(model, 1.0, data, (0.0, 1.0), 1e-8, samples=np.array([0.0, 1.0]))
    assert complex(w_str) == pytest.approx(traj.W[-1], rel=1e-12)
    assert complex(wd_str) == pytest.approx(traj.Wdot[-1], rel=1e-12)
    assert int(steps_str) == traj.steps
