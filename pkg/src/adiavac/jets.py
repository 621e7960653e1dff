"""Truncated Taylor expansions (jets) with exact arithmetic recurrences.

A jet stores the coefficients c_j = f^(j)(t0) / j! of a scalar function
around a base point t0, truncated at a fixed order d. Sums, products,
quotients and square roots of jets are again jets of the same order, via
the usual convolution recurrences, and time differentiation is an exact
coefficient shift that lowers the order by one. All higher derivatives in
the frequency recursion are obtained this way; nothing is ever
finite-differenced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivisionByZeroJet, JetMismatch, NegativeSqrtJet


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients (c_0, ..., c_d) of a function at base_point.

    c_j = f^(j)(base_point) / j!, so c_0 is the value and c_1 the first
    derivative. Immutable; arithmetic returns new jets.
    """

    base_point: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("jet needs at least the value coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return self.coeffs[0]

    @property
    def first(self) -> float:
        """First derivative f'(base_point); requires order >= 1."""
        if self.order < 1:
            raise JetMismatch("jet of order 0 has no first derivative")
        return self.coeffs[1]

    def derivative(self, j: int) -> float:
        """j-th derivative f^(j)(base_point), un-normalized."""
        if j > self.order:
            raise JetMismatch(f"derivative {j} of an order-{self.order} jet")
        return self.coeffs[j] * math.factorial(j)

    # -- helpers ------------------------------------------------------------

    def _check(self, other: "Jet") -> None:
        if self.base_point != other.base_point:
            raise JetMismatch(
                f"base points differ: {self.base_point} vs {other.base_point}"
            )
        if self.order != other.order:
            raise JetMismatch(f"orders differ: {self.order} vs {other.order}")

    @staticmethod
    def constant(value: float, base_point: float, order: int) -> "Jet":
        return Jet(base_point, (float(value),) + (0.0,) * order)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetMismatch(f"cannot raise order {self.order} to {order}")
        return Jet(self.base_point, self.coeffs[: order + 1])

    # -- linear ops ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float)):
            c = list(self.coeffs)
            c[0] += other
            return Jet(self.base_point, tuple(c))
        self._check(other)
        return Jet(
            self.base_point,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.base_point, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s: float) -> "Jet":
        return Jet(self.base_point, tuple(s * a for a in self.coeffs))

    # -- multiplicative ops ---------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        self._check(other)
        a, b = self.coeffs, other.coeffs
        d = self.order
        out = [0.0] * (d + 1)
        for n in range(d + 1):
            out[n] = math.fsum(a[j] * b[n - j] for j in range(n + 1))
        return Jet(self.base_point, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(1.0 / float(other))
        self._check(other)
        u, w = self.coeffs, other.coeffs
        if w[0] == 0.0:
            raise DivisionByZeroJet("divisor jet has zero value coefficient")
        d = self.order
        v = [0.0] * (d + 1)
        for n in range(d + 1):
            acc = u[n] - math.fsum(v[j] * w[n - j] for j in range(n))
            v[n] = acc / w[0]
        return Jet(self.base_point, tuple(v))

    def __rtruediv__(self, other):
        return Jet.constant(float(other), self.base_point, self.order) / self

    def sqrt(self) -> "Jet":
        x = self.coeffs
        if x[0] <= 0.0:
            raise NegativeSqrtJet(f"value coefficient {x[0]!r} not positive")
        d = self.order
        s = [0.0] * (d + 1)
        s[0] = math.sqrt(x[0])
        for n in range(1, d + 1):
            acc = x[n] - math.fsum(s[j] * s[n - j] for j in range(1, n))
            s[n] = acc / (2.0 * s[0])
        return Jet(self.base_point, tuple(s))

    def squared(self) -> "Jet":
        return self * self

    # -- calculus -------------------------------------------------------------

    def differentiate(self) -> "Jet":
        """d/dt as an exact coefficient shift; order drops by one."""
        if self.order < 1:
            raise JetMismatch("cannot differentiate an order-0 jet")
        c = self.coeffs
        return Jet(
            self.base_point,
            tuple((j + 1) * c[j + 1] for j in range(self.order)),
        )

    def __call__(self, t: float) -> float:
        """Evaluate the truncated polynomial at t (Horner)."""
        dt = t - self.base_point
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * dt + c
        return acc
