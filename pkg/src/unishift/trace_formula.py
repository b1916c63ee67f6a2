"""Both sides of the second-order trace identity for unitary pairs.

For U = e^{iA} U0 and a trigonometric polynomial p, the identity reads

    Tr{ p(U) - p(U0) - d/ds p(U_s)|_{s=0} }
        = integral over [0, 2pi] of (d/dt)^2 p(e^{it}) * eta(t) dt .

The left side is evaluated by cached repeated matrix multiplication, the
right side by exact per-node step integration plus Gauss-Legendre in s, so
the two sides share no spectral code path and agreeing results actually mean
something.  The directional derivative of a monomial follows the product rule
along the path:

    d/ds U_s^r = sum_{k=0}^{r-1} U_s^{r-k-1} (iA) U_s^{k+1}      (r >= 1)
               = 0                                               (r = 0)
               = -sum_{k=0}^{|r|-1} (U_s*)^{|r|-k} (iA) (U_s*)^k (r <= -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OnUnitCircle, PathMismatch
from .linalg import (
    UnitaryPath,
    as_matrix,
    herm_eig,
    hs_norm,
    op_norm,
    require_hermitian,
    require_unitary,
    trace,
)
from .quadrature import as_rule
from .spectral_shift import EtaIntegrator
from .trigpoly import TrigPolynomial


class PowerCache:
    """Integer powers of a unitary by repeated multiplication.

    Negative powers use the adjoint, which for unitary input is the exact
    inverse; nothing here touches an eigendecomposition.
    """

    def __init__(self, u: np.ndarray):
        self._u = u
        self._ustar = u.conj().T
        self._cache: dict[int, np.ndarray] = {0: np.eye(u.shape[0], dtype=np.complex128)}

    def power(self, n: int) -> np.ndarray:
        if n not in self._cache:
            step = self._u if n > 0 else self._ustar
            sign = 1 if n > 0 else -1
            k = max((m for m in self._cache if m * sign > 0 and abs(m) < abs(n)), default=0, key=abs)
            acc = self._cache[k]
            while k != n:
                acc = acc @ step
                k += sign
                self._cache[k] = acc
        return self._cache[n]

    def polynomial(self, p: TrigPolynomial) -> np.ndarray:
        out = np.zeros_like(self._cache[0])
        for n, a in p.items():
            out = out + a * self.power(n)
        return out


def _monomial_derivative(powers: PowerCache, ia: np.ndarray, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros_like(ia)
    if r >= 1:
        total = np.zeros_like(ia)
        for k in range(r):
            total += powers.power(r - k - 1) @ ia @ powers.power(k + 1)
        return total
    m = -r
    total = np.zeros_like(ia)
    for k in range(m):
        total += powers.power(-(m - k)) @ ia @ powers.power(-k)
    return -total


def gateaux_monomial(u0, a, r: int, s: float = 0.0) -> np.ndarray:
    """d/ds (U_s)^r along U_s = e^{isA} U0, evaluated at the given s."""
    u0 = require_unitary(u0, what="gateaux base")
    a = require_hermitian(a, what="gateaux direction")
    us = UnitaryPath(u0, a, check=False).at(s) if s != 0.0 else u0
    return _monomial_derivative(PowerCache(us), 1j * a, r)


def gateaux_series(u0, a, p: TrigPolynomial, s: float = 0.0) -> np.ndarray:
    """d/ds p(U_s): coefficient-weighted sum of the monomial derivatives."""
    u0 = require_unitary(u0, what="gateaux base")
    a = require_hermitian(a, what="gateaux direction")
    us = UnitaryPath(u0, a, check=False).at(s) if s != 0.0 else u0
    powers = PowerCache(us)
    ia = 1j * a
    out = np.zeros_like(ia)
    for n, coeff in p.items():
        out = out + coeff * _monomial_derivative(powers, ia, n)
    return out


def derivative_tail_bound(p: TrigPolynomial, cutoff: int, a_op: float) -> float:
    """Operator-norm bound sum_{|n|>cutoff} |a_n| |n| ||A|| on dropped derivative terms."""
    return a_op * sum(abs(n) * abs(c) for n, c in p.coeffs.items() if abs(n) > cutoff)


def _exp_remainder_factor(x: float) -> float:
    """(e^x - x - 1) / x^2, continuous through x = 0."""
    if x < 1e-6:
        return 0.5 + x / 6.0 + x * x / 24.0
    return (math.expm1(x) - x) / (x * x)


def remainder_trace_norm_bound(r: int, a_hs: float, a_op: float) -> float:
    """Trace-norm bound on U^r - U0^r - d/ds(U_s^r)|_0 in terms of A.

    Splitting each term of the telescoped difference into the quadratic
    exponential remainder plus a first-order mismatch gives

        [ |r|(|r|-1)/2 + |r| (e^{||A||} - ||A|| - 1)/||A||^2 ] * ||A||_2^2 .
    """
    n = abs(r)
    return (n * (n - 1) / 2.0 + n * _exp_remainder_factor(a_op)) * a_hs**2


def require_path(u0, u, a, tol: float | None = None) -> None:
    """Check U = e^{iA} U0 within tolerance (default dim * 1e-10)."""
    u0, u, a = as_matrix(u0), as_matrix(u), as_matrix(a)
    if tol is None:
        tol = u0.shape[0] * 1e-10
    dev = op_norm(u - herm_eig(a, check=False).exp_i() @ u0)
    if dev > tol:
        raise PathMismatch(f"U deviates from e^(iA) U0 by {dev:.3e} (tol {tol:.3e})")


def lhs_trace(u0, u, a, p: TrigPolynomial) -> complex:
    """Tr{ p(U) - p(U0) - d/ds p(U_s)|_0 } via cached matrix powers."""
    u0 = require_unitary(u0, what="lhs base")
    u = require_unitary(u, what="lhs endpoint")
    a = require_hermitian(a, what="lhs direction")
    require_path(u0, u, a)
    derivative = gateaux_series(u0, a, p)
    return trace(PowerCache(u).polynomial(p) - PowerCache(u0).polynomial(p) - derivative)


def rhs_integral(u0, a, p: TrigPolynomial, s_rule=None) -> complex:
    """Curvature integral of p against eta: exact in t, quadrature in s."""
    session = EtaIntegrator(u0, a, as_rule(s_rule))
    pairings = session.curvature_pairings([n for n, _ in p.items()])
    return complex(sum(coeff * pairings[n] for n, coeff in p.items()))


@dataclass(frozen=True)
class VerificationReport:
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    s_nodes_used: int
    passed: bool
    tolerance: float

    @staticmethod
    def from_sides(lhs: complex, rhs: complex, tol: float, s_nodes: int) -> "VerificationReport":
        abs_err = abs(lhs - rhs)
        scale = 1.0 + abs(lhs)
        return VerificationReport(
            lhs=lhs,
            rhs=rhs,
            abs_err=abs_err,
            rel_err=abs_err / scale,
            s_nodes_used=s_nodes,
            passed=abs_err <= tol * scale,
            tolerance=tol,
        )


def verify(u0, u, a, p: TrigPolynomial, tol: float = 1e-8, s_rule=None) -> VerificationReport:
    """Evaluate both sides of the identity for one polynomial and compare."""
    rule = as_rule(s_rule)
    lhs = lhs_trace(u0, u, a, p)
    rhs = rhs_integral(u0, a, p, rule)
    return VerificationReport.from_sides(lhs, rhs, tol, rule.count)


def batch_verify(u0, u, a, polys, tol: float = 1e-8, s_rule=None) -> list[VerificationReport]:
    """Verify many polynomials for one pair, sharing spectra and power caches.

    Both sides are linear in the coefficients, so each side is assembled from
    per-mode values: traces of U^n - U0^n - D_n on the left, curvature
    pairings on the right.
    """
    rule = as_rule(s_rule)
    u0 = require_unitary(u0, what="batch base")
    u = require_unitary(u, what="batch endpoint")
    a = require_hermitian(a, what="batch direction")
    require_path(u0, u, a)
    modes = sorted({n for p in polys for n in p.coeffs})
    u_pow, u0_pow = PowerCache(u), PowerCache(u0)
    ia = 1j * a
    lhs_mode = {
        n: trace(u_pow.power(n) - u0_pow.power(n) - _monomial_derivative(u0_pow, ia, n))
        for n in modes
    }
    session = EtaIntegrator(u0, a, rule)
    rhs_mode = session.curvature_pairings(modes)
    reports = []
    for p in polys:
        lhs = complex(sum(c * lhs_mode[n] for n, c in p.items()))
        rhs = complex(sum(c * rhs_mode[n] for n, c in p.items()))
        reports.append(VerificationReport.from_sides(lhs, rhs, tol, rule.count))
    return reports


@dataclass(frozen=True)
class ResolventReport(VerificationReport):
    """Verification of the resolvent identity with its truncation bookkeeping."""

    z: complex
    truncation_order: int
    tail_bound: float
    direct_lhs: complex
    series_vs_direct: float


def resolvent_coefficients(z: complex, order: int) -> TrigPolynomial:
    """Truncated Fourier expansion of w -> (w - z)^{-1} on |w| = 1.

    Inside the circle the coefficients sit at negative modes, a_{-(k+1)} = z^k;
    outside they sit at nonnegative modes, a_k = -z^{-(k+1)}.
    """
    if abs(z) < 1.0:
        return TrigPolynomial({-(k + 1): z**k for k in range(order + 1)})
    return TrigPolynomial({k: -(z ** -(k + 1)) for k in range(order + 1)})


def resolvent_truncation(z: complex, a_hs: float, a_op: float, tol: float, cap: int = 100_000):
    """Smallest order whose dropped terms cannot move either side by tol/10.

    The k-th dropped coefficient has modulus rho^k with rho = min(|z|, 1/|z|),
    and each dropped mode n contributes at most ``remainder_trace_norm_bound``;
    the geometric tail is summed explicitly until it is negligible.
    """
    rho = min(abs(z), 1.0 / abs(z)) if z != 0 else 0.0
    budget = tol / 10.0
    if rho == 0.0:
        return 0, 0.0
    terms = []
    k = 0
    while True:
        term = rho**k * remainder_trace_norm_bound(k + 1, a_hs, a_op)
        terms.append(term)
        if k > 4 and term < budget * 1e-6 * (1.0 - rho):
            break
        if k >= cap:
            raise OnUnitCircle(
                f"|z| = {abs(z):.6f} needs more than {cap} series terms for tolerance {tol:g}"
            )
        k += 1
    suffix = np.cumsum(terms[::-1])[::-1]
    for order in range(len(terms)):
        tail = float(suffix[order + 1]) if order + 1 < len(terms) else 0.0
        if tail < budget:
            return order, tail
    return len(terms) - 1, 0.0  # pragma: no cover - loop above always returns


def resolvent_check(u0, u, a, z: complex, tol: float = 1e-7, s_rule=None, order: int | None = None) -> ResolventReport:
    """Verify the trace identity for w -> (w - z)^{-1}, |z| != 1.

    The function enters as a truncated coefficient expansion chosen from an
    explicit tail bound, and the series left side must also agree with the
    left side computed directly from matrix inverses.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) < 1e-6:
        raise OnUnitCircle(f"|z| = {abs(z):.8f} is within 1e-6 of the unit circle")
    u0 = require_unitary(u0, what="resolvent base")
    u = require_unitary(u, what="resolvent endpoint")
    a = require_hermitian(a, what="resolvent direction")
    require_path(u0, u, a)
    if order is None:
        order, tail = resolvent_truncation(z, hs_norm(a), op_norm(a), tol)
    else:
        tail = 0.0
    p = resolvent_coefficients(z, order)
    report = verify(u0, u, a, p, tol=tol, s_rule=s_rule)

    eye = np.eye(u0.shape[0])
    r_u = np.linalg.inv(u - z * eye)
    r_u0 = np.linalg.inv(u0 - z * eye)
    # d/ds (U_s - z)^{-1}|_0 = -R0 (iA U0) R0
    direct = trace(r_u - r_u0 + r_u0 @ (1j * a @ u0) @ r_u0)
    gap = abs(report.lhs - direct)
    agreement = gap <= tol * (1.0 + abs(direct))
    return ResolventReport(
        lhs=report.lhs,
        rhs=report.rhs,
        abs_err=report.abs_err,
        rel_err=report.rel_err,
        s_nodes_used=report.s_nodes_used,
        passed=report.passed and agreement,
        tolerance=tol,
        z=z,
        truncation_order=order,
        tail_bound=float(tail),
        direct_lhs=direct,
        series_vs_direct=gap,
    )
