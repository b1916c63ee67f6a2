"""Trigonometric (Laurent) polynomials on the unit circle.

A polynomial is a finite map n -> a_n acting as z -> sum a_n z^n on |z| = 1.
The weight sum(n^2 |a_n|) controls membership in the function class for which
the second-order trace identity extends from monomials to series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TrigPolynomial:
    coeffs: dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(n): complex(a) for n, a in self.coeffs.items() if a != 0}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def monomial(cls, n: int, a: complex = 1.0) -> "TrigPolynomial":
        return cls({n: a})

    @classmethod
    def constant(cls, a: complex) -> "TrigPolynomial":
        return cls({0: a})

    def items(self):
        """Coefficient pairs in ascending n, for reproducible iteration."""
        return sorted(self.coeffs.items())

    @property
    def support(self) -> list[int]:
        return sorted(self.coeffs)

    @property
    def degree(self) -> int:
        return max((abs(n) for n in self.coeffs), default=0)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.zeros_like(z)
        for n, a in self.items():
            out = out + a * z**n
        return out if out.ndim else complex(out)

    def at_angle(self, t):
        return self(np.exp(1j * np.asarray(t)))

    def second_derivative_at_angle(self, t):
        """(d/dt)^2 of t -> p(e^{it})."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=np.complex128)
        for n, a in self.items():
            out = out + a * (1j * n) ** 2 * np.exp(1j * n * t)
        return out if out.ndim else complex(out)

    def z_derivative(self) -> "TrigPolynomial":
        """Coefficient map of dp/dz (still a Laurent polynomial)."""
        return TrigPolynomial({n - 1: n * a for n, a in self.coeffs.items() if n != 0})

    def abs_sum(self) -> float:
        return float(sum(abs(a) for a in self.coeffs.values()))

    def weighted_abs_sum(self, power: int) -> float:
        """sum |n|^power |a_n|; power 2 is the series-class weight."""
        return float(sum(abs(n) ** power * abs(a) for n, a in self.coeffs.items()))

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out = dict(self.coeffs)
        for n, a in other.coeffs.items():
            out[n] = out.get(n, 0.0) + a
        return TrigPolynomial(out)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "TrigPolynomial":
        return TrigPolynomial({n: c * a for n, a in self.coeffs.items()})


def random_trig_polynomial(
    rng: np.random.Generator, max_degree: int, decay: float = 1.0
) -> TrigPolynomial:
    """Random polynomial with coefficients damped like (1 + |n|^2)^{-decay}."""
    coeffs = {}
    for n in range(-max_degree, max_degree + 1):
        re, im = rng.standard_normal(2)
        coeffs[n] = (re + 1j * im) / (1.0 + abs(n) ** 2) ** decay
    return TrigPolynomial(coeffs)
