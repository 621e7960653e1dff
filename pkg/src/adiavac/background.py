"""Scale-factor models, S^3 mode channels, and mode frequency jets.

The spatial section is the unit three-sphere, so the scalar Laplacian
spectrum is k(k+2) with degeneracy (k+1)^2 for k = 0, 1, 2, ... A
background is a positive scale factor a(t) given in closed form; all
models can produce exact jets of a at any interior time, which is what
the frequency recursion consumes. Analytic derivatives only: a model
that cannot provide the requested order raises instead of estimating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    MasslessZeroMode,
    NonPositiveScaleFactor,
    OrderUnavailable,
)
from .jets import Jet


@dataclass(frozen=True)
class ModeChannel:
    """One S^3 scalar harmonic channel, labelled by total momentum k."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError(f"mode number must be a non-negative integer, got {self.k!r}")

    @property
    def eigenvalue(self) -> float:
        """Laplacian eigenvalue k(k+2) on the unit three-sphere."""
        return float(self.k * (self.k + 2))

    @property
    def degeneracy(self) -> int:
        """Number of harmonics sharing this k: (k+1)^2."""
        return (self.k + 1) ** 2


@dataclass(frozen=True)
class ScaleFactorModel:
    """Closed-form scale factor a(t) > 0 with exact jets of any available order.

    Kinds:
      constant(a0)          a(t) = a0
      power_law(p, t_ref)   a(t) = (t - t_ref)^p on t > t_ref
      exponential(H)        a(t) = exp(H t)
      taylor(coeffs, t_ref) a(t) = sum_j coeffs[j] (t - t_ref)^j; jets are
                            only available up to the stored degree, since
                            coefficients beyond it are not data.
    """

    kind: str
    params: dict = field(default_factory=dict)

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def constant(a0: float) -> "ScaleFactorModel":
        if not (a0 > 0.0):
            raise NonPositiveScaleFactor(f"constant scale factor {a0!r} must be positive")
        return ScaleFactorModel("constant", {"a0": float(a0)})

    @staticmethod
    def power_law(p: float, t_ref: float = 0.0) -> "ScaleFactorModel":
        return ScaleFactorModel("power_law", {"p": float(p), "t_ref": float(t_ref)})

    @staticmethod
    def exponential(H: float) -> "ScaleFactorModel":
        return ScaleFactorModel("exponential", {"H": float(H)})

    @staticmethod
    def taylor(coeffs, t_ref: float = 0.0) -> "ScaleFactorModel":
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise ValueError("taylor model needs at least one coefficient")
        if not (coeffs[0] > 0.0):
            raise NonPositiveScaleFactor(
                f"taylor scale factor value {coeffs[0]!r} at t_ref must be positive"
            )
        return ScaleFactorModel("taylor", {"coeffs": coeffs, "t_ref": float(t_ref)})

    # -- point evaluation (fast paths for the mode integrator) ----------------

    def value(self, t: float) -> float:
        a = self._value_unchecked(t)
        if not (a > 0.0):
            raise NonPositiveScaleFactor(f"a({t!r}) = {a!r}")
        return a

    def _value_unchecked(self, t: float) -> float:
        if self.kind == "constant":
            return self.params["a0"]
        if self.kind == "exponential":
            return math.exp(self.params["H"] * t)
        if self.kind == "power_law":
            dt = t - self.params["t_ref"]
            if dt <= 0.0:
                raise NonPositiveScaleFactor(
                    f"power-law background undefined at t = {t!r} (t_ref = {self.params['t_ref']!r})"
                )
            return dt ** self.params["p"]
        coeffs = self.params["coeffs"]
        dt = t - self.params["t_ref"]
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * dt + c
        return acc

    def value_and_rate(self, t: float) -> tuple[float, float]:
        """(a, da/dt) at t, cheap enough for an ODE right-hand side."""
        if self.kind == "constant":
            return self.params["a0"], 0.0
        if self.kind == "exponential":
            H = self.params["H"]
            a = math.exp(H * t)
            return a, H * a
        if self.kind == "power_law":
            p = self.params["p"]
            dt = t - self.params["t_ref"]
            if dt <= 0.0:
                raise NonPositiveScaleFactor(f"power-law background undefined at t = {t!r}")
            a = dt ** p
            return a, p * a / dt
        coeffs = self.params["coeffs"]
        dt = t - self.params["t_ref"]
        acc = 0.0
        rate = 0.0
        for c in reversed(coeffs):
            rate = rate * dt + acc
            acc = acc * dt + c
        a = acc
        if not (a > 0.0):
            raise NonPositiveScaleFactor(f"a({t!r}) = {a!r}")
        return a, rate

    # -- jets ------------------------------------------------------------------

    def jet_at(self, t0: float, order: int) -> Jet:
        """Exact Taylor jet of a(t) around t0, truncated at the given order."""
        if order < 0:
            raise ValueError("jet order must be non-negative")
        if self.kind == "constant":
            return Jet.constant(self.params["a0"], t0, order)
        if self.kind == "exponential":
            H = self.params["H"]
            a0 = math.exp(H * t0)
            c = [a0]
            for j in range(1, order + 1):
                c.append(c[-1] * H / j)
            return Jet(t0, tuple(c))
        if self.kind == "power_law":
            p = self.params["p"]
            dt = t0 - self.params["t_ref"]
            if dt <= 0.0:
                raise NonPositiveScaleFactor(f"power-law background undefined at t = {t0!r}")
            a0 = dt ** p
            c = [a0]
            for j in range(1, order + 1):
                # c_j = c_{j-1} * (p - j + 1) / (j * dt), the binomial series
                c.append(c[-1] * (p - j + 1) / (j * dt))
            return Jet(t0, tuple(c))
        coeffs = self.params["coeffs"]
        degree = len(coeffs) - 1
        if order > degree:
            raise OrderUnavailable(
                f"taylor background stores derivatives up to order {degree}, "
                f"requested {order}"
            )
        dt = t0 - self.params["t_ref"]
        # Taylor shift: expand the stored polynomial around t0, then truncate.
        shifted = [0.0] * (degree + 1)
        for i in range(degree + 1):
            acc = 0.0
            for j in range(degree, i - 1, -1):
                acc = acc * dt + coeffs[j] * math.comb(j, i)
            shifted[i] = acc
        a0 = shifted[0]
        if not (a0 > 0.0):
            raise NonPositiveScaleFactor(f"a({t0!r}) = {a0!r}")
        return Jet(t0, tuple(shifted[: order + 1]))

    def assert_positive_on(self, t_lo: float, t_hi: float, samples: int = 64) -> None:
        """Sampled positivity check over a working interval."""
        if t_hi < t_lo:
            raise ValueError("empty working interval")
        for i in range(samples + 1):
            t = t_lo + (t_hi - t_lo) * i / samples
            self.value(t)

    def compiled_params(self) -> tuple[int, "tuple[float, ...]"]:
        """(kind code, packed parameters) consumed by the compiled integrator."""
        if self.kind == "constant":
            return 0, (self.params["a0"],)
        if self.kind == "power_law":
            return 1, (self.params["p"], self.params["t_ref"])
        if self.kind == "exponential":
            return 2, (self.params["H"],)
        return 3, (self.params["t_ref"], *self.params["coeffs"])


# -- frequency jets -----------------------------------------------------------


def _check_mass_channel(k: int, m: float) -> None:
    if m < 0.0 or not math.isfinite(m):
        raise ValueError(f"mass must be finite and non-negative, got {m!r}")
    if m == 0.0 and k == 0:
        raise MasslessZeroMode("k = 0 with m = 0 carries no oscillator")


def omega_sq_jet(model: ScaleFactorModel, k: int, m: float, t0: float, order: int) -> Jet:
    """Jet of omega_k^2(t) = k(k+2)/a(t)^2 + m^2 around t0."""
    _check_mass_channel(k, m)
    chan = ModeChannel(k)
    a = model.jet_at(t0, order)
    inv_a2 = 1.0 / (a * a)
    return inv_a2.scale(chan.eigenvalue) + m * m


def omega_jet(model: ScaleFactorModel, k: int, m: float, t0: float, order: int) -> Jet:
    """Jet of omega_k(t) around t0 (positive branch)."""
    return omega_sq_jet(model, k, m, t0, order).sqrt()
