"""Dense complex linear algebra for unitary perturbation pairs.

The rest of the package works with three kinds of objects built here:

  * Hermitian eigendecompositions (``herm_eig``), used both directly and as
    the backend for unitary spectra,
  * spectral decompositions of unitaries (``unitary_eig``) with eigenangles
    in (0, 2pi]; an eigenvalue 1 is parked at angle 2pi, so the cumulative
    spectral projection vanishes at t = 0,
  * principal logarithms of unitaries (``log_unitary``) with spectrum in
    (-pi, pi]; the boundary eigenvalue -1 maps to +pi.

Unitary spectra are computed by rotating the matrix away from -1, taking the
Cayley transform ``i (I - U') (I + U')^{-1}`` (a Hermitian matrix), and
mapping Hermitian eigenvalues back to the circle.  ``choose_phase`` picks the
rotation so that the avoided point sits in the middle of the largest spectral
gap, which keeps the transform well conditioned for any input.

Everything here is a pure function of its arguments; returned arrays are
freshly allocated and never aliased to the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian, NotUnitary

TWO_PI = 2.0 * np.pi

# Angles within this distance of 0 (mod 2pi) are treated as eigenvalue 1.
_ONE_SNAP = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex128 array with finite entries."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise ValueError("matrix has NaN or Inf entries")
    return a


def op_norm(m) -> float:
    """Operator norm (largest singular value)."""
    m = np.asarray(m)
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def hs_norm(m) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(m)))


def trace_norm(m) -> float:
    """Trace norm (sum of singular values)."""
    m = np.asarray(m)
    return float(np.linalg.svd(m, compute_uv=False).sum()) if m.size else 0.0


def trace(m) -> complex:
    return complex(np.trace(np.asarray(m)))


@dataclass(frozen=True)
class MatrixNorms:
    op: float
    hs: float
    tr: float


def norms(m) -> MatrixNorms:
    """Operator, Hilbert-Schmidt and trace norms from one singular spectrum."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if s.size == 0:
        return MatrixNorms(0.0, 0.0, 0.0)
    return MatrixNorms(op=float(s[0]), hs=float(np.sqrt(np.sum(s * s))), tr=float(np.sum(s)))


def is_hermitian(m, tol: float | None = None) -> bool:
    m = as_matrix(m)
    if tol is None:
        tol = 1e-10 * max(op_norm(m), 1.0)
    return op_norm(m - m.conj().T) <= tol


def is_unitary(m, tol: float | None = None) -> bool:
    m = as_matrix(m)
    if tol is None:
        tol = m.shape[0] * 1e-10
    eye = np.eye(m.shape[0])
    return op_norm(m.conj().T @ m - eye) <= tol


def require_hermitian(m, tol: float | None = None, what: str = "matrix") -> np.ndarray:
    m = as_matrix(m)
    if tol is None:
        tol = 1e-10 * op_norm(m)
    dev = op_norm(m - m.conj().T)
    if dev > tol:
        raise NotHermitian(f"{what} deviates from Hermitian by {dev:.3e} (tol {tol:.3e})")
    return m


def require_unitary(m, tol: float | None = None, what: str = "matrix") -> np.ndarray:
    m = as_matrix(m)
    if tol is None:
        tol = m.shape[0] * 1e-10
    dev = op_norm(m.conj().T @ m - np.eye(m.shape[0]))
    if dev > tol:
        raise NotUnitary(f"{what} deviates from unitary by {dev:.3e} (tol {tol:.3e})")
    return m


@dataclass(frozen=True)
class HermitianDecomposition:
    """Eigenvalues (real, ascending) and orthonormal eigencolumns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def apply_function(self, values) -> np.ndarray:
        """Assemble V diag(values) V* for per-eigenvalue scalars ``values``."""
        return (self.vectors * np.asarray(values)) @ self.vectors.conj().T

    def matrix(self) -> np.ndarray:
        return self.apply_function(self.eigenvalues)

    def exp_i(self, s: float = 1.0) -> np.ndarray:
        """e^{i s H} from the cached spectrum."""
        return self.apply_function(np.exp(1j * s * self.eigenvalues))


def herm_eig(h, check: bool = True) -> HermitianDecomposition:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    Deterministic for a fixed input.  Raises ``NotHermitian`` when the input
    deviates from its adjoint by more than 1e-10 of its operator norm, and
    ``NoConvergence`` if the LAPACK iteration fails.
    """
    h = require_hermitian(h, what="eigensolver input") if check else as_matrix(h)
    sym = 0.5 * (h + h.conj().T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hardware dependent
        raise NoConvergence(str(exc)) from exc
    return HermitianDecomposition(eigenvalues=w, vectors=v)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Unitary spectrum as eigenangles in (0, 2pi] with orthonormal columns.

    The cumulative projection E(t) sums the eigenprojections with angle <= t,
    so E(0) = 0 and E(2pi) = I.  Eigenvalue 1 always carries the angle 2pi.
    """

    angles: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.angles.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def matrix(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T

    def apply_function(self, values) -> np.ndarray:
        return (self.vectors * np.asarray(values)) @ self.vectors.conj().T


def choose_phase(u0, check: bool = True) -> float:
    """Rotation phase phi in (-pi, pi] placing -e^{i phi} farthest from the spectrum.

    The avoided point is the midpoint of the largest gap between consecutive
    eigenangles; on ties the first largest gap in the ascending scan wins,
    which keeps the choice reproducible.
    """
    u0 = require_unitary(u0, what="choose_phase input") if check else as_matrix(u0)
    ang = np.sort(np.mod(np.angle(np.linalg.eigvals(u0)), TWO_PI))
    gaps = np.empty_like(ang)
    gaps[:-1] = ang[1:] - ang[:-1]
    gaps[-1] = ang[0] + TWO_PI - ang[-1]
    k = int(np.argmax(gaps))
    midpoint = ang[k] + 0.5 * gaps[k]
    phi = np.mod(midpoint - np.pi, TWO_PI)
    if phi > np.pi:
        phi -= TWO_PI
    return float(phi)


def unitary_eig(u, check: bool = True) -> SpectralDecomposition:
    """Spectral decomposition of a unitary via the phase-rotated Cayley transform.

    Reduces to ``herm_eig`` of i (I - e^{-i phi} U)(I + e^{-i phi} U)^{-1}
    and maps each Hermitian eigenvalue h back to the angle of
    e^{i phi} (i - h)/(i + h), normalised into (0, 2pi].
    """
    u = require_unitary(u, what="unitary_eig input") if check else as_matrix(u)
    n = u.shape[0]
    phi = choose_phase(u, check=False)
    rotated = np.exp(-1j * phi) * u
    eye = np.eye(n)
    h0 = 1j * np.linalg.solve(eye + rotated, eye - rotated)
    h0 = 0.5 * (h0 + h0.conj().T)
    dec = herm_eig(h0, check=False)
    # angle of e^{i phi} (i - h)/(i + h); the arctan form avoids complex division
    theta = np.mod(phi + np.pi - 2.0 * np.arctan2(1.0, dec.eigenvalues), TWO_PI)
    theta = np.where((theta <= _ONE_SNAP) | (theta >= TWO_PI - _ONE_SNAP), TWO_PI, theta)
    order = np.argsort(theta, kind="stable")
    return SpectralDecomposition(angles=theta[order], vectors=dec.vectors[:, order])


def log_unitary(v, check: bool = True) -> np.ndarray:
    """Principal logarithm A of a unitary: A Hermitian, spectrum in (-pi, pi], e^{iA} = V."""
    dec = unitary_eig(v, check=check)
    x = np.where(dec.angles > np.pi, dec.angles - TWO_PI, dec.angles)
    a = dec.apply_function(x)
    return 0.5 * (a + a.conj().T)


class UnitaryPath:
    """The path s -> e^{isA} U0 with the decomposition of A computed once."""

    def __init__(self, u0, a, check: bool = True):
        if check:
            self.u0 = require_unitary(u0, what="path base")
            adec = herm_eig(require_hermitian(a, what="path direction"), check=False)
        else:
            self.u0 = as_matrix(u0)
            adec = herm_eig(as_matrix(a), check=False)
        if self.u0.shape != adec.vectors.shape:
            raise ValueError("base unitary and direction must share dimension")
        self.direction_spectrum = adec

    @property
    def dim(self) -> int:
        return self.u0.shape[0]

    def at(self, s: float) -> np.ndarray:
        return self.direction_spectrum.exp_i(s) @ self.u0


def unitary_path(u0, a, s: float) -> np.ndarray:
    """e^{isA} U0 for one parameter value (see ``UnitaryPath`` for reuse across s)."""
    return UnitaryPath(u0, a).at(s)


@dataclass(frozen=True)
class UnitaryPair:
    """A seeded test instance: U0 Haar unitary, A Hermitian, U = e^{iA} U0."""

    u0: np.ndarray
    a: np.ndarray
    u: np.ndarray
    seed: int
    dim: int
    scale: float


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix, R-diagonal phases fixed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int, op_scale: float) -> np.ndarray:
    """GUE-like Hermitian matrix rescaled to a prescribed operator norm."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / 2.0
    h = g + g.conj().T
    top = op_norm(h)
    if top == 0.0:  # pragma: no cover - probability zero
        raise ValueError("degenerate random draw")
    return h * (op_scale / top)


def random_pair(seed: int, dim: int, scale: float) -> UnitaryPair:
    """Deterministic random pair (U0, A, U = e^{iA} U0) with ||A||_op = scale.

    ``scale`` must stay in (0, pi) so the principal logarithm of U U0* is A.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if not 0.0 < scale < np.pi:
        raise ValueError("scale must lie in (0, pi)")
    rng = np.random.default_rng(seed)
    u0 = haar_unitary(rng, dim)
    a = random_hermitian(rng, dim, scale)
    u = herm_eig(a, check=False).exp_i() @ u0
    return UnitaryPair(u0=u0, a=a, u=u, seed=seed, dim=dim, scale=scale)
