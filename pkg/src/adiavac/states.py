"""Per-mode quasifree state structure built from the multipliers (r, Omega).

For one channel the pure quasifree state is encoded by the one-particle
map on real Cauchy data F = (q, p),

    kF = (2 Omega)^(-1/2) ((r - i Omega) q - p),

from which mu(F1, F2) = Re<kF1, kF2>, sigma(F1, F2) = 2 Im<kF1, kF2> and
the smeared two-point form lambda = mu + (i/2) sigma follow. Everything
here is per mode in the unit-measure normalization, where the symplectic
matrix over (q, p) is exactly [[0, -1], [1, 0]]; the physical volume
factor a^3 multiplies mu and sigma identically and cancels from every
diagnostic. Purity is checked through the 2x2 projector built from the
scalar multipliers; the projector property holds identically in exact
arithmetic, so its Frobenius defect measures only rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adiabatic import AdiabaticFrequency, rj_multipliers
from .background import ScaleFactorModel
from .modes import ModeInitialData

SIGMA_MATRIX = np.array([[0.0, -1.0], [1.0, 0.0]])


def one_particle_map(r: float, Omega: float, F) -> complex:
    """Image of the data pair F = (q, p) under the one-particle map."""
    if not (Omega > 0.0):
        raise ValueError(f"Omega must be positive, got {Omega!r}")
    q, p = F
    return ((r - 1j * Omega) * q - p) / math.sqrt(2.0 * Omega)


@dataclass(frozen=True)
class ModeQuasifreeState:
    """2x2 forms (mu, sigma, lambda) of one channel over (q, p) data."""

    k: int
    r: float
    Omega: float

    @property
    def kappa(self) -> np.ndarray:
        """Images of the basis vectors e_q = (1,0), e_p = (0,1)."""
        return np.array(
            [one_particle_map(self.r, self.Omega, (1.0, 0.0)),
             one_particle_map(self.r, self.Omega, (0.0, 1.0))]
        )

    @property
    def lambda_matrix(self) -> np.ndarray:
        return self.mu_matrix + 0.5j * SIGMA_MATRIX

    @property
    def mu_matrix(self) -> np.ndarray:
        kap = self.kappa
        return np.real(np.conjugate(kap)[:, None] * kap[None, :])

    @property
    def sigma_matrix(self) -> np.ndarray:
        return SIGMA_MATRIX.copy()

    # forms on real data pairs
    def mu(self, F1, F2) -> float:
        return float(np.asarray(F1) @ self.mu_matrix @ np.asarray(F2))

    def sigma(self, F1, F2) -> float:
        return float(np.asarray(F1) @ SIGMA_MATRIX @ np.asarray(F2))

    def lam(self, F1, F2) -> complex:
        return complex(np.asarray(F1) @ self.lambda_matrix @ np.asarray(F2))

    def cauchy_schwarz_defect(self, F1, F2) -> float:
        """max(0, |sigma(F1,F2)|^2 / 4 - mu(F1,F1) mu(F2,F2))."""
        lhs = 0.25 * self.sigma(F1, F2) ** 2
        rhs = self.mu(F1, F1) * self.mu(F2, F2)
        return max(0.0, lhs - rhs)


def state_from_frequency(model: ScaleFactorModel, freq: AdiabaticFrequency) -> ModeQuasifreeState:
    r, Omega = rj_multipliers(model, freq)
    return ModeQuasifreeState(k=freq.k, r=r, Omega=Omega)


def lambda_matrix_from_mode(data: ModeInitialData) -> np.ndarray:
    """Smeared two-point matrix of the state defined by a mode function.

    The coefficient of the annihilation part of the smeared field is
    c(F) = a^(3/2) (p W - q Wdot); the a^(3/2) factor carries the channel
    into the same unit-measure normalization used by the (r, Omega) form,
    so both constructions of lambda agree entrywise.
    """
    root_a3 = math.sqrt(data.a_cubed)
    c = np.array([-root_a3 * data.Wdot, root_a3 * data.W])
    return np.conjugate(c)[:, None] * c[None, :]


def purity_check(r: float, Omega: float) -> float:
    """Frobenius defect ||S^2 - S||_F of the purity projector.

    S = 1/2 [[i r/Omega + 1, -i/Omega], [i r^2/Omega + i Omega, -i r/Omega + 1]]
    is idempotent exactly when the state is pure.
    """
    if not (Omega > 0.0):
        raise ValueError(f"Omega must be positive, got {Omega!r}")
    S = 0.5 * np.array(
        [
            [1.0 + 1j * r / Omega, -1j / Omega],
            [1j * (r * r / Omega + Omega), 1.0 - 1j * r / Omega],
        ]
    )
    return float(np.linalg.norm(S @ S - S))


# -- Sobolev-weighted mode norms ------------------------------------------------


def sobolev_mode_norm(ks, values, s: float) -> float:
    """sum_k (k+1)^2 (1 + k^2)^s |v_k|^2 with order-independent summation."""
    ks = list(ks)
    values = list(values)
    if len(ks) != len(values):
        raise ValueError("ks and values must have equal length")
    terms = [
        (k + 1) ** 2 * (1.0 + k * k) ** s * abs(v) ** 2
        for k, v in zip(ks, values)
    ]
    return math.fsum(terms)


def mu_energy(multipliers, data) -> float:
    """mu(F, F) = sum_k deg(k) |k_map(q_k, p_k)|^2 over the channels.

    multipliers: iterable of (k, r, Omega); data: matching (q_k, p_k).
    """
    terms = []
    for (k, r, Omega), (q, p) in zip(multipliers, data, strict=True):
        terms.append((k + 1) ** 2 * abs(one_particle_map(r, Omega, (q, p))) ** 2)
    return math.fsum(terms)


@dataclass(frozen=True)
class SobolevComparison:
    """Ratios mu(F,F) / (|q|_{1/2}^2 + |p|_{-1/2}^2) over an ensemble."""

    ratios: tuple[float, ...]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    @property
    def min_ratio(self) -> float:
        return min(self.ratios)

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio


def mu_sobolev_ratio(multipliers, ensemble) -> SobolevComparison:
    """Compare the energy form against the Sobolev pair norm on samples.

    multipliers: list of (k, r, Omega); ensemble: list of data vectors,
    each a list of (q_k, p_k) matching the channels. The norm equivalence
    claim is about the topology, so only the spread of the ratios is
    meaningful, never the absolute constants.
    """
    ks = [k for (k, _, _) in multipliers]
    ratios = []
    for data in ensemble:
        num = mu_energy(multipliers, data)
        den = sobolev_mode_norm(ks, [q for (q, _) in data], 0.5) + sobolev_mode_norm(
            ks, [p for (_, p) in data], -0.5
        )
        if den <= 0.0:
            raise ValueError("ensemble sample with vanishing Sobolev norm")
        ratios.append(num / den)
    return SobolevComparison(ratios=tuple(ratios))
