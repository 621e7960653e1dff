"""Mode function evolution for the spatially closed scalar field.

Each channel k satisfies

    Wddot + 3 (adot/a) Wdot + omega_k(t)^2 W = 0,
    omega_k(t)^2 = k(k+2)/a(t)^2 + m^2,

and carries the conserved Wronskian a^3 (W conj(Wdot) - conj(W) Wdot) = i.
Order-n vacuum data at t0 is W = (2 a^3 Omega)^(-1/2) (real positive),
Wdot = (r - i Omega) W with the per-mode multipliers (r, Omega).

Batches of channels are integrated on a shared adaptive grid with a
max-norm error test, so the local accuracy contract holds for every
channel in the batch; the oscillation floor of twenty steps per period
of the fastest channel is always enforced. The solver never transforms
to a WKB frame; any frequency-adapted comparison happens downstream.
The stepping itself runs in the compiled kernel (same scheme and error
control as rungekutta.integrate, which stays the reference engine).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernel import (
    STATUS_MIN_STEP,
    STATUS_MISSED_TARGETS,
    STATUS_OK,
    STATUS_STEP_LIMIT,
    march_leg,
)
from .adiabatic import AdiabaticFrequency, rj_multipliers
from .background import ScaleFactorModel
from .errors import NotNormalized, StepSizeUnderflow, ToleranceNotMet

WRONSKIAN_DATA_TOL = 1e-12
STEPS_PER_PERIOD = 20


def wronskian(W: complex, Wdot: complex, a_cubed: float) -> complex:
    """a^3 (W conj(Wdot) - conj(W) Wdot); equals i for normalized data."""
    return a_cubed * (W * np.conjugate(Wdot) - np.conjugate(W) * Wdot)


@dataclass(frozen=True)
class ModeInitialData:
    """Wronskian-normalized Cauchy data (W, Wdot) for one channel at t0."""

    k: int
    t0: float
    W: complex
    Wdot: complex
    a_cubed: float

    def __post_init__(self):
        defect = self.wronskian_defect()
        if not (defect <= WRONSKIAN_DATA_TOL):
            raise ValueError(
                f"mode data not Wronskian-normalized: defect {defect:.3e} at k={self.k}"
            )

    def wronskian_defect(self) -> float:
        return abs(wronskian(self.W, self.Wdot, self.a_cubed) - 1j)


def adiabatic_initial_data(
    model: ScaleFactorModel, freq: AdiabaticFrequency
) -> ModeInitialData:
    """Vacuum data of the given adiabatic order at its preparation time."""
    r, Omega = rj_multipliers(model, freq)
    a_cubed = model.value(freq.t0) ** 3
    W = 1.0 / math.sqrt(2.0 * a_cubed * Omega)
    Wdot = (r - 1j * Omega) * W
    return ModeInitialData(k=freq.k, t0=freq.t0, W=W, Wdot=complex(Wdot), a_cubed=a_cubed)


@dataclass
class ModeTrajectory:
    """One solved channel: samples of (W, Wdot) on an increasing time grid."""

    k: int
    t0: float
    tol: float
    times: np.ndarray
    W: np.ndarray
    Wdot: np.ndarray
    wronskian_drift: np.ndarray
    steps: int
    rejected: int
    rhs_evals: int

    @property
    def max_drift(self) -> float:
        return float(np.max(self.wronskian_drift))

    def sample_at(self, t: float) -> tuple[complex, complex]:
        """(W, Wdot) at a grid time t (exact match required)."""
        i = int(np.searchsorted(self.times, t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < self.times.size and self.times[j] == t:
                return complex(self.W[j]), complex(self.Wdot[j])
        raise KeyError(f"time {t!r} is not on the sample grid")


def _max_frequency(model: ScaleFactorModel, eig_max: float, m: float, t_lo: float, t_hi: float) -> float:
    om_max = 0.0
    for i in range(33):
        t = t_lo + (t_hi - t_lo) * i / 32.0
        a = model.value(t)
        om_max = max(om_max, math.sqrt(eig_max / (a * a) + m * m))
    return om_max


def _sample_grid(t_lo: float, t_hi: float, t0: float, samples) -> np.ndarray:
    if samples is None:
        samples = 129
    if isinstance(samples, int):
        grid = np.linspace(t_lo, t_hi, samples)
    else:
        grid = np.asarray(samples, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("sample times must be a non-empty 1-d array")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("sample times must be strictly increasing")
        if grid[0] < t_lo or grid[-1] > t_hi:
            raise ValueError("sample times must lie inside the span")
    if not np.any(grid == t0):
        grid = np.sort(np.append(grid, t0))
    return grid


def _solve_coupled(
    model: ScaleFactorModel,
    m: float,
    datas: list[ModeInitialData],
    t_span: tuple[float, float],
    tol: float,
    samples,
) -> list[ModeTrajectory]:
    t_lo, t_hi = float(t_span[0]), float(t_span[1])
    if not datas:
        return []
    t0 = datas[0].t0
    if any(d.t0 != t0 for d in datas):
        raise ValueError("batched channels must share the preparation time")
    if not (t_lo <= t0 <= t_hi) or t_lo == t_hi:
        raise ValueError(f"span ({t_lo}, {t_hi}) must contain t0 = {t0} and be nonempty")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    model.assert_positive_on(t_lo, t_hi)
    ks = [d.k for d in datas]
    eig = np.array([k * (k + 2) for k in ks], dtype=float)
    span = t_hi - t_lo
    om_max = _max_frequency(model, float(np.max(eig)), m, t_lo, t_hi)
    max_step = min(2.0 * math.pi / (STEPS_PER_PERIOD * om_max), span / 16.0)

    m2 = m * m
    code, packed = model.compiled_params()
    packed = np.asarray(packed, dtype=float)

    grid = _sample_grid(t_lo, t_hi, t0, samples)
    nT, B = grid.size, len(datas)
    out_W = np.empty((nT, B), dtype=complex)
    out_Wd = np.empty((nT, B), dtype=complex)
    filled = np.zeros(nT, dtype=bool)

    y0 = np.array([[d.W for d in datas], [d.Wdot for d in datas]], dtype=complex)
    at_t0 = grid == t0
    out_W[at_t0] = y0[0]
    out_Wd[at_t0] = y0[1]
    filled |= at_t0

    stats = np.zeros(3, dtype=np.int64)
    for forward in (True, False):
        t_end = t_hi if forward else t_lo
        if t_end == t0:
            continue
        inside = (grid > t0) if forward else (grid < t0)
        idx = np.nonzero(inside)[0]
        if not forward:
            idx = idx[::-1]  # targets must be sorted in the march direction
        targets = np.ascontiguousarray(grid[idx])
        leg_W = np.empty((targets.size, B), dtype=complex)
        leg_Wd = np.empty((targets.size, B), dtype=complex)
        y_end = y0.copy()
        status = march_leg(
            code, packed, m2, eig, t0, float(t_end), y_end,
            tol, span, max_step, targets, leg_W, leg_Wd, stats,
        )
        if status != STATUS_OK:
            if status == STATUS_MISSED_TARGETS:
                raise AssertionError("dense sampler missed targets")
            if status == STATUS_STEP_LIMIT:
                raise ToleranceNotMet("step limit exceeded")
            if status == STATUS_MIN_STEP:
                raise ToleranceNotMet("error exceeds the allowance at the minimal step")
            raise StepSizeUnderflow(f"step size collapsed on leg ending at {t_end!r}")
        out_W[idx] = leg_W
        out_Wd[idx] = leg_Wd
        # the leg endpoint is pinned from the final state, not the interpolant
        at_end = grid == t_end
        out_W[at_end] = y_end[0]
        out_Wd[at_end] = y_end[1]
        filled |= inside | at_end

    if not bool(np.all(filled)):
        raise AssertionError("sample grid not fully populated")

    a3 = np.array([model.value(t) ** 3 for t in grid])
    wr = a3[:, None] * (out_W * np.conjugate(out_Wd) - np.conjugate(out_W) * out_Wd)
    drift = np.abs(wr - 1j)

    return [
        ModeTrajectory(
            k=ks[b],
            t0=t0,
            tol=tol,
            times=grid.copy(),
            W=out_W[:, b].copy(),
            Wdot=out_Wd[:, b].copy(),
            wronskian_drift=drift[:, b].copy(),
            steps=int(stats[0]),
            rejected=int(stats[1]),
            rhs_evals=int(stats[2]),
        )
        for b in range(B)
    ]


def solve_mode(
    model: ScaleFactorModel,
    m: float,
    data: ModeInitialData,
    t_span: tuple[float, float],
    tol: float,
    samples=None,
) -> ModeTrajectory:
    """Integrate one channel across t_span (which must contain data.t0).

    tol is an end-to-end error budget for the whole span, not a per-step
    tolerance; see rungekutta.integrate.
    """
    return _solve_coupled(model, m, [data], t_span, tol, samples)[0]


def solve_mode_batch(
    model: ScaleFactorModel,
    m: float,
    datas: list[ModeInitialData],
    t_span: tuple[float, float],
    tol: float,
    samples=None,
    chunk_size: int | None = None,
    workers: int = 1,
) -> list[ModeTrajectory]:
    """Integrate many channels, optionally in chunks of neighbouring k.

    Channels inside one chunk share the adaptive grid (the error test is
    the max over the chunk, so per-channel accuracy is preserved); chunks
    are independent, deterministic, and may be dispatched to worker
    threads without changing any result.
    """
    if chunk_size is None or chunk_size >= len(datas):
        return _solve_coupled(model, m, datas, t_span, tol, samples)
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    order = sorted(range(len(datas)), key=lambda i: datas[i].k)
    chunks = [order[i:i + chunk_size] for i in range(0, len(order), chunk_size)]

    def run(chunk):
        return _solve_coupled(model, m, [datas[i] for i in chunk], t_span, tol, samples)

    results: list[ModeTrajectory | None] = [None] * len(datas)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(run, chunks))
    else:
        solved = [run(c) for c in chunks]
    for chunk, trajs in zip(chunks, solved):
        for i, traj in zip(chunk, trajs):
            results[i] = traj
    return results  # type: ignore[return-value]


def static_exact_solution(
    model: ScaleFactorModel, m: float, k: int, t0: float, times
) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form vacuum mode on a constant background, for comparison."""
    if model.kind != "constant":
        raise ValueError("closed form only exists for constant backgrounds")
    a = model.value(t0)
    om = math.sqrt(k * (k + 2) / (a * a) + m * m)
    times = np.asarray(times, dtype=float)
    amp = 1.0 / math.sqrt(2.0 * a**3 * om)
    W = amp * np.exp(-1j * om * (times - t0))
    return W, -1j * om * W


def require_normalized(W: complex, Wdot: complex, a_cubed: float, tol: float = 1e-8) -> None:
    """Bracket precondition: raise NotNormalized on Wronskian defect > tol."""
    defect = abs(wronskian(W, Wdot, a_cubed) - 1j)
    if not (defect <= tol):
        raise NotNormalized(f"Wronskian defect {defect:.3e} exceeds {tol:.1e}")
