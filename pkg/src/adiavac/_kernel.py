"""Compiled inner loop for batched mode evolution.

Same Dormand-Prince 5(4) scheme, error control, and dense interpolant as
rungekutta.integrate, specialized to the second-order mode equation

    Wddot + 3 (adot/a) Wdot + omega_k(t)^2 W = 0

and written as plain loops so numba can compile it; without numba the
identical code runs as ordinary Python. The generic engine stays the
reference implementation and the two are cross-checked in the tests.
Error handling crosses the compiled boundary as status codes, mapped to
typed exceptions by the caller.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def njit(*args, **kwargs):
        def deco(f):
            return f
        return deco

from .rungekutta import (
    _A,
    _BUDGET_MARGIN,
    _C,
    _E,
    _MAX_GROW,
    _MIN_SHRINK,
    _P,
    _SAFETY,
)

_CA = np.array(_C)
_AA = np.zeros((7, 6))
for _s, _row in enumerate(_A):
    for _j, _v in enumerate(_row):
        _AA[_s, _j] = _v
_EA = np.array(_E)
_PA = np.ascontiguousarray(_P)

STATUS_OK = 0
STATUS_STEP_LIMIT = 1
STATUS_MIN_STEP = 2
STATUS_UNDERFLOW = 3
STATUS_MISSED_TARGETS = 4

_MAX_STEPS = 50_000_000


@njit(cache=True, nogil=True)
def _scale_factor(code: int, params, t: float):
    """(a, da/dt); codes match ScaleFactorModel.compiled_params."""
    if code == 0:
        return params[0], 0.0
    if code == 1:
        p = params[0]
        tau = t - params[1]
        a = tau ** p
        return a, p * a / tau
    if code == 2:
        H = params[0]
        a = math.exp(H * t)
        return a, H * a
    tau = t - params[0]
    acc = 0.0
    rate = 0.0
    for i in range(params.shape[0] - 1, 0, -1):
        rate = rate * tau + acc
        acc = acc * tau + params[i]
    return acc, rate


@njit(cache=True, nogil=True)
def _rhs(code: int, params, m2: float, eig, t: float, y, out) -> None:
    a, adot = _scale_factor(code, params, t)
    inv_a2 = 1.0 / (a * a)
    hub3 = 3.0 * adot / a
    for j in range(eig.shape[0]):
        om2 = eig[j] * inv_a2 + m2
        out[0, j] = y[1, j]
        out[1, j] = -hub3 * y[1, j] - om2 * y[0, j]


@njit(cache=True, nogil=True)
def march_leg(
    code: int,
    params,
    m2: float,
    eig,
    t0: float,
    t1: float,
    y,
    budget: float,
    span: float,
    max_step: float,
    targets,
    out_w,
    out_wd,
    stats,
) -> int:
    """March y from t0 to t1, filling dense samples at the given targets.

    y is (2, n) complex and holds the final state on return; targets must
    be sorted in the march direction and lie inside (t0, t1]; stats is an
    int64[3] accumulator (accepted, rejected, rhs evaluations).
    """
    n = eig.shape[0]
    direction = 1.0 if t1 > t0 else -1.0
    leg = abs(t1 - t0)
    h_abs = min(max_step, leg / 8.0)
    if h_abs > leg:
        h_abs = leg
    floor = max(1e-13 * leg, max(abs(t0), abs(t1)) * 1e-15)

    K = np.empty((7, 2, n), dtype=np.complex128)
    ys = np.empty((2, n), dtype=np.complex128)
    _rhs(code, params, m2, eig, t0, y, K[0])
    stats[2] += 1

    t = t0
    tp = 0
    ntarg = targets.shape[0]

    while (t1 - t) * direction > 0.0:
        if stats[0] + stats[1] > _MAX_STEPS:
            return STATUS_STEP_LIMIT
        # the endpoint is assigned exactly on the final step; clamping h to
        # the remaining gap and adding would stall once the gap is sub-ulp
        last = abs(t1 - t) <= h_abs
        if last:
            h = t1 - t
            h_abs = abs(h)
        else:
            h = direction * h_abs

        for s in range(1, 7):
            for i in range(2):
                for j in range(n):
                    acc = _AA[s, 0] * K[0, i, j]
                    for q in range(1, s):
                        acc = acc + _AA[s, q] * K[q, i, j]
                    ys[i, j] = y[i, j] + h * acc
            _rhs(code, params, m2, eig, t + _CA[s] * h, ys, K[s])
        stats[2] += 6
        # stage 7 sits at the 5th-order solution (FSAL), so ys is y_new

        allow = budget * h_abs / (_BUDGET_MARGIN * span)
        err_norm = 0.0
        for i in range(2):
            for j in range(n):
                e = (
                    _EA[0] * K[0, i, j]
                    + _EA[2] * K[2, i, j]
                    + _EA[3] * K[3, i, j]
                    + _EA[4] * K[4, i, j]
                    + _EA[5] * K[5, i, j]
                    + _EA[6] * K[6, i, j]
                )
                mag = abs(h * e)
                sc = abs(y[i, j])
                sb = abs(ys[i, j])
                if sb > sc:
                    sc = sb
                if sc < 1.0:
                    sc = 1.0
                r = mag / (allow * sc)
                if r > err_norm or math.isnan(r):
                    err_norm = r

        if err_norm <= 1.0:
            t_new = t1 if last else t + h
            while tp < ntarg and (targets[tp] - t_new) * direction <= 0.0:
                theta = (targets[tp] - t) / h
                for j in range(n):
                    out_w[tp, j] = y[0, j]
                    out_wd[tp, j] = y[1, j]
                for s in range(7):
                    qs = theta * (
                        _PA[s, 0]
                        + theta * (_PA[s, 1] + theta * (_PA[s, 2] + theta * _PA[s, 3]))
                    )
                    hq = h * qs
                    for j in range(n):
                        out_w[tp, j] += hq * K[s, 0, j]
                        out_wd[tp, j] += hq * K[s, 1, j]
                tp += 1
            t = t_new
            for i in range(2):
                for j in range(n):
                    y[i, j] = ys[i, j]
                    K[0, i, j] = K[6, i, j]  # FSAL reuse
            stats[0] += 1
            if err_norm == 0.0:
                factor = _MAX_GROW
            else:
                factor = _SAFETY * err_norm ** -0.2
                if factor > _MAX_GROW:
                    factor = _MAX_GROW
                elif factor < _MIN_SHRINK:
                    factor = _MIN_SHRINK
            h_abs = min(max_step, h_abs * factor)
        else:
            stats[1] += 1
            if h_abs <= floor:
                return STATUS_MIN_STEP
            if math.isnan(err_norm):
                factor = _MIN_SHRINK
            else:
                factor = _SAFETY * err_norm ** -0.2
                if factor < _MIN_SHRINK:
                    factor = _MIN_SHRINK
            # K[0] = f(t, y) is still valid after a rejection
            h_abs = h_abs * factor
            if h_abs < 0.5 * floor:
                h_abs = 0.5 * floor
            if h_abs < floor:
                return STATUS_UNDERFLOW

    if tp != ntarg:
        return STATUS_MISSED_TARGETS
    return STATUS_OK
