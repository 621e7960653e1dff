"""Iterated frequency correction for adiabatic vacuum data.

The order-n frequency Omega^(n) is defined by the recursion on squares

    (Omega^(0))^2  = omega^2 = k(k+2)/a^2 + m^2
    (Omega^(n+1))^2 = omega^2 - (3/4)(adot/a)^2 - (3/2)(addot/a)
                      + (1/16) L_n^2 - (1/4) dL_n/dt,
    L_n = d/dt log (Omega^(n))^2,

evaluated on jets so every time derivative is exact. Successive squared
frequencies agree to high order in omega, so the recursion is carried as
a difference chain: with S_n = (Omega^(n))^2, D_n = S_{n+1} - S_n and
Delta_n = L_n - L_{n-1}, algebraically

    Delta_n = (Ddot_{n-1} S_{n-1} - Sdot_{n-1} D_{n-1}) / (S_n S_{n-1})
    D_n     = (1/16) Delta_n (L_n + L_{n-1}) - (1/4) dDelta_n/dt.

This is the same recursion, but the small differences are produced
directly instead of by subtracting two O(omega^2) floats, which would
lose all digits exactly where the decay of D_n in omega is measured.
Each recursion step consumes two derivative orders, so the base jet of a
runs at order 2*n_max + 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .background import ModeChannel, ScaleFactorModel, omega_sq_jet
from .errors import DegenerateFit, FrequencySquaredNonPositive
from .fitting import UNDERFLOW_FLOOR, PowerLawFit, fit_loglog
from .jets import Jet

CLAMP_FLOOR_DEFAULT = 1e-6


@dataclass(frozen=True)
class AdiabaticFrequency:
    """Order-n frequency data for one mode channel.

    omega_sq_jet is the jet of (Omega^(n))^2 at the preparation time; the
    positive frequency itself and its logarithmic rate are derived from
    it. clamped records whether the positivity floor intervened anywhere
    along the recursion for this channel.
    """

    n: int
    k: int
    omega_sq_jet: Jet
    positivity_action: str
    clamped: bool = False

    @property
    def t0(self) -> float:
        return self.omega_sq_jet.base_point

    @property
    def Omega(self) -> float:
        """Omega^(n)(t0) > 0."""
        return math.sqrt(self.omega_sq_jet.value)

    @property
    def log_rate(self) -> float:
        """d/dt log Omega^(n) at t0, i.e. Omegadot/Omega."""
        return 0.5 * self.omega_sq_jet.first / self.omega_sq_jet.value


class FrequencyChain:
    """All recursion stages 0..n_max for one channel, kept as jets.

    Holds the squared frequencies S_n, their log-derivatives L_n, and the
    stable differences D_n = S_{n+1} - S_n and Delta_n = L_n - L_{n-1}
    that downstream consumers (symbol-order probes, same-time Bogoliubov
    coefficients) need at full relative precision.
    """

    def __init__(
        self,
        model: ScaleFactorModel,
        k: int,
        m: float,
        n_max: int,
        t0: float,
        positivity_action: str = "strict",
        clamp_floor: float = CLAMP_FLOOR_DEFAULT,
    ):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        if positivity_action not in ("strict", "clamped"):
            raise ValueError(f"unknown positivity action {positivity_action!r}")
        self.model = model
        self.k = int(k)
        self.m = float(m)
        self.n_max = int(n_max)
        self.t0 = float(t0)
        self.positivity_action = positivity_action
        self.clamp_floor = float(clamp_floor)
        self.clamped_orders: set[int] = set()

        d0 = 2 * n_max + 3
        a = model.jet_at(t0, d0 + 1)
        self.hubble = a.first / a.value

        s0 = omega_sq_jet(model, k, m, t0, d0)
        adot_over_a = (a.differentiate() / a.truncate(d0)).truncate(d0 - 1)
        addot_over_a = a.differentiate().differentiate() / a.truncate(d0 - 1)
        # curvature term of the recursion, constant across orders
        self._curv = (
            adot_over_a.squared().truncate(d0 - 2).scale(-0.75)
            + addot_over_a.truncate(d0 - 2).scale(-1.5)
        )

        l0 = (s0.differentiate() / s0.truncate(d0 - 1)).truncate(d0 - 1)
        self.s_jets: list[Jet] = [s0]
        self.l_jets: list[Jet] = [l0]
        self.d_jets: list[Jet] = []       # d_jets[j] = D_j = S_{j+1} - S_j
        self.delta_jets: list[Jet] = []   # delta_jets[j-1] = Delta_j = L_j - L_{j-1}

        for n in range(n_max):
            self._advance(n)
        if n_max >= 1:
            # one more Delta so L_{n_max} is available at full precision
            self._append_delta(n_max)
        self._final_d()

    # -- chain steps ----------------------------------------------------------

    def _advance(self, n: int, enforce: bool = True) -> None:
        """Produce D_n, S_{n+1}, and (for n >= 1) Delta_n, L_n."""
        if n == 0:
            l0 = self.l_jets[0]
            target = l0.order - 1
            d0jet = (
                self._curv.truncate(target)
                + l0.squared().truncate(target).scale(1.0 / 16.0)
                + l0.differentiate().truncate(target).scale(-0.25)
            )
            self.d_jets.append(d0jet)
        else:
            delta = self._make_delta(n)
            self.delta_jets.append(delta)
            l_prev = self.l_jets[n - 1]
            l_n = l_prev.truncate(delta.order) + delta
            self.l_jets.append(l_n)
            target = delta.order - 1
            dn = (
                delta.truncate(target) * (l_n + l_prev.truncate(delta.order)).truncate(target)
            ).scale(1.0 / 16.0) + delta.differentiate().truncate(target).scale(-0.25)
            self.d_jets.append(dn)
        s_next = self.s_jets[n].truncate(self.d_jets[n].order) + self.d_jets[n]
        if enforce:
            s_next = self._enforce_positivity(s_next, n + 1)
        self.s_jets.append(s_next)

    def _make_delta(self, n: int) -> Jet:
        """Delta_n = L_n - L_{n-1} without subtracting O(1) quantities."""
        d_prev = self.d_jets[n - 1]
        s_prev = self.s_jets[n - 1]
        s_n = self.s_jets[n]
        target = d_prev.order - 1
        num = d_prev.differentiate().truncate(target) * s_prev.truncate(target) - \
            s_prev.differentiate().truncate(target) * d_prev.truncate(target)
        den = s_n.truncate(target) * s_prev.truncate(target)
        return num / den

    def _append_delta(self, n: int) -> None:
        if len(self.delta_jets) < n:
            delta = self._make_delta(n)
            self.delta_jets.append(delta)
            l_n = self.l_jets[n - 1].truncate(delta.order) + delta
            self.l_jets.append(l_n)

    def _final_d(self) -> None:
        """D_{n_max}, so the probe at order n_max needs no deeper chain."""
        n = self.n_max
        if n == 0:
            # D_0 itself must be reported even where S_1 would go negative,
            # so the beyond-chain square is not positivity-checked
            self._advance(0, enforce=False)
            self.s_jets.pop()  # S_1 beyond n_max is not part of the chain
            return
        delta = self.delta_jets[n - 1]
        l_n = self.l_jets[n]
        l_prev = self.l_jets[n - 1]
        target = delta.order - 1
        dn = (
            delta.truncate(target) * (l_n.truncate(target) + l_prev.truncate(target))
        ).scale(1.0 / 16.0) + delta.differentiate().truncate(target).scale(-0.25)
        self.d_jets.append(dn)

    def _enforce_positivity(self, s: Jet, n: int) -> Jet:
        floor = self.clamp_floor * self.s_jets[0].value
        if self.positivity_action == "strict":
            if s.value <= 0.0:
                raise FrequencySquaredNonPositive(self.k, n, s.value)
            return s
        if s.value < floor:
            # constant shift: value pinned to the floor, derivatives kept
            shift = floor - s.value
            self.clamped_orders.add(n)
            self.d_jets[n - 1] = self.d_jets[n - 1] + shift
            return s + shift
        return s

    # -- accessors --------------------------------------------------------------

    def frequency(self, n: int) -> AdiabaticFrequency:
        if not (0 <= n <= self.n_max):
            raise ValueError(f"order {n} outside chain range 0..{self.n_max}")
        return AdiabaticFrequency(
            n=n,
            k=self.k,
            omega_sq_jet=self.s_jets[n],
            positivity_action=self.positivity_action,
            clamped=any(j <= n for j in self.clamped_orders),
        )

    @property
    def omega0(self) -> float:
        """Zeroth-order frequency omega_k(t0)."""
        return math.sqrt(self.s_jets[0].value)

    def diff_value(self, n: int) -> float:
        """(Omega^(n+1))^2 - (Omega^(n))^2 at t0, full relative precision."""
        if not (0 <= n < len(self.d_jets)):
            raise ValueError(f"difference D_{n} not in chain")
        return self.d_jets[n].value

    def s_gap(self, n1: int, n2: int) -> float:
        """S_{n2} - S_{n1} at t0 via the chain (n1 <= n2)."""
        if not (0 <= n1 <= n2 <= self.n_max):
            raise ValueError("order pair outside chain range")
        return math.fsum(self.d_jets[j].value for j in range(n1, n2))

    def l_gap(self, n1: int, n2: int) -> float:
        """L_{n2} - L_{n1} at t0 via the chain (n1 <= n2)."""
        if not (0 <= n1 <= n2 <= self.n_max):
            raise ValueError("order pair outside chain range")
        return math.fsum(self.delta_jets[j - 1].value for j in range(n1 + 1, n2 + 1))


# -- public operations -----------------------------------------------------------


def adiabatic_frequency(
    model: ScaleFactorModel,
    k: int,
    m: float,
    n: int,
    t0: float,
    positivity_action: str = "strict",
    clamp_floor: float = CLAMP_FLOOR_DEFAULT,
) -> AdiabaticFrequency:
    """Order-n frequency data at the preparation time t0."""
    chain = FrequencyChain(model, k, m, n, t0, positivity_action, clamp_floor)
    return chain.frequency(n)


def rj_multipliers(model: ScaleFactorModel, freq: AdiabaticFrequency) -> tuple[float, float]:
    """Per-mode multipliers (r, Omega) of the order-n pure state.

    r = -(1/2)(3 adot/a + Omegadot/Omega), Omega = Omega^(n)(t0) > 0.
    """
    a = model.jet_at(freq.t0, 1)
    hubble = a.first / a.value
    r = -0.5 * (3.0 * hubble + freq.log_rate)
    return r, freq.Omega


@dataclass(frozen=True)
class SymbolOrderProbe:
    """Measured decay of (Omega^(n+1))^2 - (Omega^(n))^2 along a frequency grid."""

    n: int
    fit: PowerLawFit
    rows: tuple  # (k, omega, diff) per grid point

    @property
    def slope(self) -> float:
        return self.fit.slope


def symbol_order_probe(
    model: ScaleFactorModel,
    m: float,
    n: int,
    t0: float,
    omega_grid,
    positivity_action: str = "strict",
) -> SymbolOrderProbe:
    """Fit the decay exponent of the order-(n -> n+1) frequency update.

    The grid of target frequencies is realized by integer mode numbers k
    chosen so that omega_k(t0) sweeps the requested values; the fit runs
    against the realized omega_k. Raises DegenerateFit when the update
    underflows (e.g. static background, where it vanishes identically).
    """
    a0 = model.value(t0)
    seen = set()
    rows = []
    for omega_target in omega_grid:
        if omega_target <= m:
            raise ValueError(f"target frequency {omega_target!r} not above the mass {m!r}")
        lam = a0 * a0 * (omega_target * omega_target - m * m)
        k = max(1, round(-1.0 + math.sqrt(1.0 + lam)))
        if k in seen:
            continue
        seen.add(k)
        chain = FrequencyChain(model, k, m, n, t0, positivity_action)
        rows.append((k, chain.omega0, chain.diff_value(n)))
    if len(rows) < 2:
        raise DegenerateFit("frequency grid collapsed to fewer than 2 distinct channels")
    diffs = [abs(r[2]) for r in rows]
    if max(diffs) <= UNDERFLOW_FLOOR:
        raise DegenerateFit("frequency update underflows on this background")
    fit = fit_loglog([r[1] for r in rows], diffs)
    return SymbolOrderProbe(n=n, fit=fit, rows=tuple(rows))
