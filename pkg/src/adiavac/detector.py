"""Windowed detector response of a comoving worldline.

For a state given by mode functions W_k and a smooth window chi supported
on [tau_a, tau_b], the response at energy E is

    F(E) = sum_{k <= K} (k+1)^2 / (2 pi^2) |I_k(E)|^2,
    I_k(E) = int chi(tau) e^(-i E tau) W_k(tau) dtau,

the (k+1)^2 / (2 pi^2) factor being the coincidence density of the
degenerate harmonics on the unit three-sphere. F is manifestly
non-negative. The transform is a composite Simpson rule on a uniform
grid resolving the fastest combined oscillation E + omega_k, with a
per-mode Richardson check against the half-resolution rule; the mode
cutoff must dominate the energy window (omega_K above every requested E
throughout the window) or the tail would alias into the fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .adiabatic import FrequencyChain
from .background import ScaleFactorModel
from .errors import CutoffInadequate, InsufficientPoints, ToleranceNotMet
from .fitting import PowerLawFit, fit_loglog
from .modes import adiabatic_initial_data, solve_mode_batch

COINCIDENCE_DENSITY = 1.0 / (2.0 * math.pi**2)
QUADRATURE_REL_TOL = 1e-3
OSCILLATION_POINTS = 10
# A mode is exempt from the relative quadrature check when its transform
# maximum lies within this factor of the rule's floating-point floor;
# refinement cannot reduce roundoff, and such contributions enter F only
# as squared noise far below any certified fit window.  The factor leaves
# three decades of headroom above the observed Simpson roundoff scatter so
# that every checked mode can actually reach QUADRATURE_REL_TOL.
RESOLUTION_GUARD = 1e6


@dataclass(frozen=True)
class WindowFunction:
    """Compactly supported window on [t_start, t_end] with sup |chi| = 1."""

    kind: str
    t_start: float
    t_end: float
    rel_width: float = 0.25  # gaussian sigma as a fraction of the half-width

    def __post_init__(self):
        if self.kind not in ("smooth_bump", "gaussian_truncated"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if not (self.t_end > self.t_start):
            raise ValueError("window support must have positive length")
        if self.kind == "gaussian_truncated" and not (0.0 < self.rel_width <= 1.0):
            raise ValueError("gaussian width must be in (0, 1] of the half-width")

    @property
    def support(self) -> tuple[float, float]:
        return (self.t_start, self.t_end)

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        x = 2.0 * (tau - self.t_start) / (self.t_end - self.t_start) - 1.0
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0
        if self.kind == "smooth_bump":
            xi = x[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
        else:
            xi = x[inside]
            out[inside] = np.exp(-0.5 * (xi / self.rel_width) ** 2)
        return out


def bound_exponent(n: int) -> int | None:
    """Largest integer strictly below 2n - 3/2, or None when empty.

    This is the guaranteed decay power of the response for an order-n
    state (adiabatic order N = 2n); it is recorded next to fits and only
    ever asserted as a direction, never as an equality.
    """
    x = 2 * n - 1.5
    if x <= 0.0:
        return None
    return math.ceil(x) - 1


@dataclass(frozen=True)
class ResponseCurve:
    """F(E) on an energy grid, with per-mode contributions retained.

    unresolved_ks lists the channels whose transform never rose above the
    quadrature's floating-point resolution; their contributions are kept
    (they are non-negative squared noise, orders below the curve) but
    they carry no relative-accuracy certificate.
    """

    energies: np.ndarray
    values: np.ndarray
    ks: tuple[int, ...]
    cutoff_adequate: bool
    quadrature_rel_err: float
    unresolved_ks: tuple[int, ...]
    contributions: np.ndarray  # (n_E, n_modes), |I_k|^2 weighted terms

    @property
    def K(self) -> int:
        return max(self.ks)

    def restricted(self, k_cutoff: int) -> "ResponseCurve":
        """Response with the mode sum truncated at a lower cutoff."""
        if k_cutoff >= self.K:
            return self
        sel = [i for i, k in enumerate(self.ks) if k <= k_cutoff]
        contrib = self.contributions[:, sel]
        values = np.array([math.fsum(row) for row in contrib])
        return replace(
            self,
            values=values,
            ks=tuple(self.ks[i] for i in sel),
            unresolved_ks=tuple(k for k in self.unresolved_ks if k <= k_cutoff),
            contributions=contrib,
        )


def _simpson_weights(n: int, dt: float) -> np.ndarray:
    if n % 2 == 0 or n < 3:
        raise ValueError("composite Simpson needs an odd number of nodes >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (dt / 3.0)


def _transform(energies, taus, chi_vals, W) -> np.ndarray:
    """I_k(E) for all modes at once; W has shape (n_tau, n_modes)."""
    w = _simpson_weights(taus.size, taus[1] - taus[0])
    weighted = (w * chi_vals)[:, None] * W
    phase = np.exp(-1j * energies[:, None] * taus[None, :])
    return phase @ weighted


def detector_response(
    model: ScaleFactorModel,
    m: float,
    n: int,
    t0: float,
    window: WindowFunction,
    energies,
    k_cutoff: int,
    tol: float = 1e-8,
    positivity_action: str = "strict",
    require_adequate: bool = True,
    chunk_size: int = 64,
    workers: int = 1,
) -> ResponseCurve:
    """Windowed response of the order-n vacuum prepared at t0.

    Modes k = 0..k_cutoff (k >= 1 when massless) are evolved across the
    window in chunks; each chunk gets a tau grid resolving its fastest
    oscillation E + omega with OSCILLATION_POINTS nodes per period, which
    is refined until the Richardson defect of every resolvable mode in
    the chunk drops below QUADRATURE_REL_TOL. Chunking keeps the dense
    trajectory storage bounded: a single grid sized for the cutoff
    channel across hundreds of modes would not fit in memory.
    """
    energies = np.asarray(energies, dtype=float)
    if energies.ndim != 1 or energies.size == 0 or np.any(energies <= 0.0):
        raise ValueError("energies must be a 1-d grid of positive values")
    if np.any(np.diff(energies) <= 0.0):
        raise ValueError("energies must be strictly increasing")
    ta, tb = window.support
    k_min = 1 if m == 0.0 else 0
    ks = tuple(range(k_min, k_cutoff + 1))

    # frequency extremes of the cutoff channel across the window
    a_vals = [model.value(ta + (tb - ta) * i / 32.0) for i in range(33)]
    eig_K = k_cutoff * (k_cutoff + 2)
    om_K_min = math.sqrt(eig_K / max(a_vals) ** 2 + m * m)
    E_max = float(energies[-1])
    adequate = om_K_min > E_max
    if require_adequate and not adequate:
        raise CutoffInadequate(
            f"omega_K dips to {om_K_min:.3g} inside the window but the energy "
            f"grid reaches {E_max:.3g}; raise the cutoff"
        )

    span = (min(t0, ta), max(t0, tb))
    contributions = np.empty((energies.size, len(ks)))
    unresolved: list[int] = []
    worst_rel = 0.0
    for lo in range(0, len(ks), chunk_size):
        chunk = ks[lo:lo + chunk_size]
        datas = [
            adiabatic_initial_data(
                model,
                FrequencyChain(model, k, m, n, t0, positivity_action).frequency(n),
            )
            for k in chunk
        ]
        eig_c = chunk[-1] * (chunk[-1] + 2)
        om_c_max = math.sqrt(eig_c / min(a_vals) ** 2 + m * m)
        n_tau = int(
            math.ceil(
                OSCILLATION_POINTS * (E_max + om_c_max) * (tb - ta) / (2.0 * math.pi)
            )
        )
        n_tau = max(n_tau, 801)
        n_tau += (-(n_tau - 1)) % 4  # 1 mod 4, so the half grid is Simpson-compatible

        for _ in range(4):
            taus = np.linspace(ta, tb, n_tau)
            trajs = solve_mode_batch(
                model, m, datas, span, tol, samples=taus,
                chunk_size=len(chunk), workers=workers,
            )
            # every trajectory carries the same sample grid (taus, plus t0
            # when it lies off-grid), so one mask serves the whole chunk
            mask = np.isin(trajs[0].times, taus)
            W = np.column_stack([tr.W[mask] for tr in trajs])
            chi_vals = window(taus)
            I_full = _transform(energies, taus, chi_vals, W)
            I_half = _transform(energies, taus[::2], chi_vals[::2], W[::2])
            # absolute resolution of the rule per mode: eps on the scale of
            # the weighted absolute integrand
            abs_sum = (np.abs(_simpson_weights(n_tau, taus[1] - taus[0])) * np.abs(chi_vals)) @ np.abs(W)
            floor = RESOLUTION_GUARD * np.finfo(float).eps * abs_sum
            scale = np.max(np.abs(I_full), axis=0)
            checked = scale > floor
            if not np.any(checked):
                quad_err = 0.0
                break
            rel = np.max(np.abs(I_full - I_half)[:, checked], axis=0) / scale[checked]
            quad_err = float(np.max(rel))
            if quad_err <= QUADRATURE_REL_TOL:
                break
            n_tau = 2 * (n_tau - 1) + 1
        else:
            raise ToleranceNotMet(
                f"window quadrature stuck at relative defect {quad_err:.3e} "
                f"for channels {chunk[0]}..{chunk[-1]}"
            )

        worst_rel = max(worst_rel, quad_err)
        unresolved.extend(k for k, ok in zip(chunk, checked) if not ok)
        deg = np.array([(k + 1) ** 2 for k in chunk], dtype=float)
        contributions[:, lo:lo + len(chunk)] = (
            (deg * COINCIDENCE_DENSITY) * np.abs(I_full) ** 2
        )

    values = np.array([math.fsum(row) for row in contributions])
    return ResponseCurve(
        energies=energies,
        values=values,
        ks=ks,
        cutoff_adequate=adequate,
        quadrature_rel_err=worst_rel,
        unresolved_ks=tuple(unresolved),
        contributions=contributions,
    )


def slope_fit(curve: ResponseCurve, e_window: tuple[float, float]) -> PowerLawFit:
    """Least-squares slope of log F against log E inside e_window."""
    lo, hi = e_window
    sel = (curve.energies >= lo) & (curve.energies <= hi)
    if int(np.sum(sel)) < 8:
        raise InsufficientPoints(
            f"only {int(np.sum(sel))} energies inside [{lo}, {hi}]; need 8"
        )
    return fit_loglog(curve.energies[sel], curve.values[sel])
