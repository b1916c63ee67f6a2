"""Double operator integrals as Schur multipliers in two eigenbases.

At finite dimension the transform X -> integral of k(lambda, mu) dE X dF
collapses to: rotate X into the (left, right) eigenbases, multiply entrywise
by the divided-difference kernel of g, rotate back.  Applied to X = Us - U0
with the kernel of g this reproduces g(Us) - g(U0) exactly, and the kernel
sup bound (pi/2) ||f||_inf for g the primitive of a mean-zero f yields the
Hilbert-Schmidt Lipschitz estimate

    || g(Us) - g(U0) ||_2  <=  pi ||f||_inf ||Us - U0||_2 .
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SpectralDecomposition, hs_norm, require_unitary, unitary_eig
from .trigpoly import TrigPolynomial

# Eigenvalue pairs closer than this switch to the derivative limit of the
# divided difference, which dodges catastrophic cancellation in the quotient.
NEAR_DIAGONAL = 1e-8

SUP_SAMPLES = 4096


def primitive_of(f: TrigPolynomial) -> TrigPolynomial:
    """Antiderivative g of the mean-zero part of f along the circle.

    g(e^{it}) = integral of f0 over [0, t] with f0 = f - mean(f); in
    coefficients g_n = f_n / (i n) for n != 0, and g_0 makes g(1) = 0.
    """
    coeffs = {n: c / (1j * n) for n, c in f.coeffs.items() if n != 0}
    coeffs[0] = -sum(coeffs.values())
    return TrigPolynomial(coeffs)


@dataclass(frozen=True)
class DOIKernel:
    """Divided-difference kernel of g over a (left, right) pair of spectra."""

    left_angles: np.ndarray
    right_angles: np.ndarray
    matrix: np.ndarray

    def sup_abs(self) -> float:
        return float(np.max(np.abs(self.matrix), initial=0.0))


def kernel(g: TrigPolynomial, left: SpectralDecomposition, right: SpectralDecomposition) -> DOIKernel:
    """K_{jk} = [g(e^{i lambda_j}) - g(e^{i mu_k})] / [e^{i lambda_j} - e^{i mu_k}].

    Near-coincident eigenvalues (gap below ``NEAR_DIAGONAL``) take the
    analytic limit sum_n n g_n e^{i(n-1) mu_k} instead of the quotient.
    """
    zl = np.exp(1j * left.angles)[:, None]
    zr = np.exp(1j * right.angles)[None, :]
    denom = zl - zr
    near = np.abs(denom) < NEAR_DIAGONAL
    quotient = (g(zl) - g(zr)) / np.where(near, 1.0, denom)
    limit = np.broadcast_to(g.z_derivative()(zr), quotient.shape)
    return DOIKernel(
        left_angles=left.angles.copy(),
        right_angles=right.angles.copy(),
        matrix=np.where(near, limit, quotient),
    )


def doi_apply(g: TrigPolynomial, us, u0, x) -> np.ndarray:
    """Schur-multiply X by the kernel of g in the eigenbases of (Us, U0).

    With X = Us - U0 the result equals g(Us) - g(U0); that identity is what
    makes the kernel the right finite-dimensional stand-in for the abstract
    two-variable spectral integral.
    """
    us = require_unitary(us, what="doi left unitary")
    u0 = require_unitary(u0, what="doi right unitary")
    x = np.asarray(x, dtype=np.complex128)
    ldec, rdec = unitary_eig(us, check=False), unitary_eig(u0, check=False)
    k = kernel(g, ldec, rdec)
    rotated = ldec.vectors.conj().T @ x @ rdec.vectors
    return ldec.vectors @ (k.matrix * rotated) @ rdec.vectors.conj().T


def circle_function_of(g: TrigPolynomial, dec: SpectralDecomposition) -> np.ndarray:
    """g(U) assembled from a spectral decomposition of U."""
    return dec.apply_function(g(np.exp(1j * dec.angles)))


def sampled_sup_norm(p: TrigPolynomial, samples: int = SUP_SAMPLES) -> float:
    """max |p(e^{it})| on a uniform mesh; exact enough for low-degree input."""
    t = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    return float(np.max(np.abs(p.at_angle(t)), initial=0.0))


@dataclass(frozen=True)
class SchurBoundReport:
    lhs: float
    rhs: float
    f_sup: float
    kernel_sup: float
    kernel_bound: float
    samples: int
    passed: bool


def schur_bound_check(f: TrigPolynomial, us, u0, samples: int = SUP_SAMPLES) -> SchurBoundReport:
    """Check ||g(Us) - g(U0)||_2 <= pi ||f||_inf ||Us - U0||_2 for g = primitive_of(f).

    Also audits the kernel itself against its sup bound (pi/2) ||f0||_inf.
    The sup norms come from dense sampling, so the reported mesh matters.
    """
    us = require_unitary(us, what="bound left unitary")
    u0 = require_unitary(u0, what="bound right unitary")
    g = primitive_of(f)
    ldec, rdec = unitary_eig(us, check=False), unitary_eig(u0, check=False)
    lhs = hs_norm(circle_function_of(g, ldec) - circle_function_of(g, rdec))
    f_sup = sampled_sup_norm(f, samples)
    f0 = f - TrigPolynomial.constant(f.coeffs.get(0, 0.0))
    f0_sup = sampled_sup_norm(f0, samples)
    rhs = np.pi * f_sup * hs_norm(us - u0)
    ker_sup = kernel(g, ldec, rdec).sup_abs()
    ker_bound = 0.5 * np.pi * f0_sup
    passed = lhs <= rhs + 1e-10 and ker_sup <= ker_bound + 1e-8
    return SchurBoundReport(
        lhs=lhs,
        rhs=float(rhs),
        f_sup=f_sup,
        kernel_sup=ker_sup,
        kernel_bound=float(ker_bound),
        samples=samples,
        passed=passed,
    )
