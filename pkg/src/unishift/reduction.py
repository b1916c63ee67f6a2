"""Finite-rank reduction of a unitary pair via spectral-window projections.

A large "ambient" space stands in for infinite dimension.  Starting from the
self-adjoint Cayley preimage H0 of the base unitary and a low-rank direction
A, the construction slices the window (-a, a] into n equal spectral cells,
projects each seed vector into every cell, and spans the normalised pieces.
The off-block couplings of the resulting projection P obey quantitative
bounds with the constructive size

    eps = L * a / sqrt(n),

and compressing (H0, A) by P yields a model pair whose second-order trace
approaches the ambient one as the partition refines.  The audit functions
evaluate every bounded quantity and compare against its bound, with a small
numerical slack; ``convergence_study`` tabulates the compressed-versus-full
trace error over a ladder of partition resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadWindow, PhaseTooClose
from .linalg import (
    as_matrix,
    herm_eig,
    hs_norm,
    op_norm,
    require_hermitian,
    require_unitary,
    trace,
    trace_norm,
)
from .trace_formula import PowerCache, _exp_remainder_factor, lhs_trace
from .trigpoly import TrigPolynomial

GS_DROP_TOL = 1e-12
AUDIT_SLACK = 1e-10


def cayley_forward(u0, phase: float, min_gap: float = 1e-6) -> np.ndarray:
    """Hermitian H0 with e^{i phase} (i - H0)(i + H0)^{-1} = U0.

    Requires -e^{i phase} to keep an angular distance of at least ``min_gap``
    from the spectrum of U0; otherwise I + e^{-i phase} U0 is near singular.
    """
    u0 = require_unitary(u0, what="cayley input")
    n = u0.shape[0]
    rotated = np.exp(-1j * phase) * u0
    eye = np.eye(n)
    smallest = float(np.linalg.svd(eye + rotated, compute_uv=False)[-1])
    if smallest < 2.0 * np.sin(min_gap / 2.0):
        raise PhaseTooClose(
            f"-e^(i phase) is within {min_gap:g} of the spectrum (sigma_min {smallest:.3e})"
        )
    h0 = 1j * np.linalg.solve(eye + rotated, eye - rotated)
    return 0.5 * (h0 + h0.conj().T)


def cayley_inverse(h0, phase: float) -> np.ndarray:
    """Unitary e^{i phase} (i - H0)(i + H0)^{-1} from a Hermitian H0."""
    h0 = require_hermitian(h0, what="cayley preimage")
    eye = 1j * np.eye(h0.shape[0])
    return np.exp(1j * phase) * np.linalg.solve(eye + h0, eye - h0)


@dataclass(frozen=True)
class WindowParams:
    """Construction record: seed count L, half-width a, cell count n, eps = L a / sqrt(n)."""

    count: int
    half_width: float
    cells: int
    eps: float


@dataclass(frozen=True)
class ProjectionBasis:
    """Orthonormal columns spanning ran P, with the inputs that built it."""

    ambient_dim: int
    columns: np.ndarray
    directions: np.ndarray
    params: WindowParams | None = None

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def matrix(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T

    def offblock_hs(self, x) -> float:
        """|| P_perp X P ||_2; right-multiplying by the isometry preserves it."""
        y = np.asarray(x) @ self.columns
        return hs_norm(y - self.columns @ (self.columns.conj().T @ y))

    def compress(self, x) -> np.ndarray:
        return self.columns.conj().T @ np.asarray(x) @ self.columns

    @classmethod
    def full_space(cls, dim: int) -> "ProjectionBasis":
        eye = np.eye(dim, dtype=np.complex128)
        return cls(ambient_dim=dim, columns=eye, directions=eye[:, :0])


def _orthonormalize(candidates: list[np.ndarray], dim: int, drop_tol: float) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalisation pass per vector."""
    basis = np.zeros((dim, len(candidates)), dtype=np.complex128)
    kept = 0
    for vec in candidates:
        v = vec.astype(np.complex128, copy=True)
        for _ in range(2):
            if kept:
                q = basis[:, :kept]
                v -= q @ (q.conj().T @ v)
        norm = np.linalg.norm(v)
        if norm > drop_tol:
            basis[:, kept] = v / norm
            kept += 1
    return basis[:, :kept].copy()


def build_projection(h0, vectors, half_width: float, cells: int, drop_tol: float = GS_DROP_TOL) -> ProjectionBasis:
    """Span of the spectral-cell pieces of the seed vectors.

    The window (-a, a] splits into ``cells`` half-open intervals; each seed
    f_l contributes the normalised projection of f_l onto every cell it
    meets.  A seed leaking past the window by more than eps = L a / sqrt(n)
    is an error, since every off-block estimate downstream assumes capture.
    """
    h0 = require_hermitian(h0, what="window operator")
    f = np.column_stack([np.asarray(v, dtype=np.complex128) for v in vectors])
    dim, count = f.shape
    lengths = np.linalg.norm(f, axis=0)
    if np.any(np.abs(lengths - 1.0) > 1e-10):
        raise ValueError("seed vectors must be normalised")
    if cells < 1 or half_width <= 0.0:
        raise ValueError("need a positive window and at least one cell")
    eps = count * half_width / np.sqrt(cells)
    dec = herm_eig(h0, check=False)
    coords = dec.vectors.conj().T @ f  # eigenbasis coordinates of the seeds
    inside = (dec.eigenvalues > -half_width) & (dec.eigenvalues <= half_width)
    leak = np.linalg.norm(np.where(inside[:, None], 0.0, coords), axis=0)
    if np.any(leak >= eps):
        worst = float(np.max(leak))
        raise BadWindow(f"a seed vector leaks {worst:.3e} outside the window (eps {eps:.3e})")
    edges = np.linspace(-half_width, half_width, cells + 1)
    cell_index = np.clip(np.searchsorted(edges, dec.eigenvalues, side="left") - 1, 0, cells - 1)
    candidates = []
    for k in range(cells):
        rows = (cell_index == k) & inside
        if not np.any(rows):
            continue
        block = dec.vectors[:, rows]
        pieces = block @ coords[rows, :]
        for l in range(count):
            piece = pieces[:, l]
            norm = np.linalg.norm(piece)
            if norm > drop_tol:
                candidates.append(piece / norm)
    basis = _orthonormalize(candidates, dim, drop_tol)
    return ProjectionBasis(
        ambient_dim=dim,
        columns=basis,
        directions=f,
        params=WindowParams(count=count, half_width=half_width, cells=cells, eps=float(eps)),
    )


def perturbation_directions(a, rel_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of A with non-negligible eigenvalues, and those eigenvalues."""
    a = require_hermitian(a, what="direction operator")
    dec = herm_eig(a, check=False)
    top = float(np.max(np.abs(dec.eigenvalues), initial=0.0))
    keep = np.abs(dec.eigenvalues) > rel_tol * max(top, 1.0)
    return dec.vectors[:, keep], dec.eigenvalues[keep]


def build_direction_projection(h0, a, half_width: float, cells: int) -> ProjectionBasis:
    """Window projection seeded by the eigenvectors of the low-rank direction A."""
    f, _ = perturbation_directions(a)
    if f.shape[1] == 0:
        raise ValueError("direction operator is zero; no seeds to project")
    return build_projection(h0, [f[:, l] for l in range(f.shape[1])], half_width, cells)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    value: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class AuditReport:
    label: str
    eps: float
    checks: tuple[BoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def violations(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.ok]


def _check(name: str, value: float, bound: float, slack: float = AUDIT_SLACK) -> BoundCheck:
    return BoundCheck(name=name, value=float(value), bound=float(bound), ok=bool(value <= bound + slack))


def audit_projection_estimates(p: ProjectionBasis, h0, u0, m_list) -> AuditReport:
    """Off-block estimates of the window projection against eps = L a / sqrt(n).

    Checks, in order: seed capture ||P_perp f_l||, the window operator
    ||P_perp H0 P||_2, both resolvents ||P_perp (i +- H0)^{-1} P||_2, and the
    unitary powers ||P_perp U0^m P||_2 <= 2|m| eps.
    """
    if p.params is None:
        raise ValueError("projection carries no construction record to audit")
    eps = p.params.eps
    h0 = as_matrix(h0)
    u0 = as_matrix(u0)
    b = p.columns
    checks = []
    for l in range(p.directions.shape[1]):
        f = p.directions[:, l]
        value = float(np.linalg.norm(f - b @ (b.conj().T @ f)))
        checks.append(_check(f"seed_capture[{l}]", value, eps))
    checks.append(_check("window_offblock", p.offblock_hs(h0), eps))
    eye = 1j * np.eye(p.ambient_dim)
    checks.append(_check("resolvent_plus", p.offblock_hs(np.linalg.inv(eye + h0)), eps))
    checks.append(_check("resolvent_minus", p.offblock_hs(np.linalg.inv(eye - h0)), eps))
    powers = PowerCache(u0)
    for m in m_list:
        checks.append(_check(f"base_power[{m}]", p.offblock_hs(powers.power(int(m))), 2 * abs(m) * eps))
    return AuditReport(label="window-projection", eps=eps, checks=tuple(checks))


def audit_perturbation_estimates(p: ProjectionBasis, u0, u, a, t_max: float, m_list, t_samples) -> AuditReport:
    """Off-block estimates involving the perturbation direction.

    Checks ||P_perp A||_2 < 2 eps, the propagator ||P_perp e^{itA} P||_2
    < 2 T e^{T ||A||} eps over the sample grid, the base powers, and the
    perturbed powers ||P_perp U^m P||_2 < 2|m| (e^{||A||} + 1) eps.
    """
    if p.params is None:
        raise ValueError("projection carries no construction record to audit")
    eps = p.params.eps
    a = as_matrix(a)
    u0 = as_matrix(u0)
    u = as_matrix(u)
    a_op = op_norm(a)
    adec = herm_eig(a, check=False)
    b = p.columns
    checks = [_check("direction_offblock", _perp_full_hs(a, b), 2 * eps)]
    propagator_bound = 2.0 * t_max * np.exp(t_max * a_op) * eps
    for t in t_samples:
        if abs(t) > t_max + 1e-12:
            raise ValueError("propagator samples must stay within [-T, T]")
        value = _perp_hs(adec.exp_i(float(t)), b)
        checks.append(_check(f"propagator[t={float(t):+.3f}]", value, propagator_bound))
    base_powers = PowerCache(u0)
    pert_powers = PowerCache(u)
    pert_factor = 2.0 * (np.exp(a_op) + 1.0) * eps
    for m in m_list:
        m = int(m)
        checks.append(_check(f"base_power[{m}]", _perp_hs(base_powers.power(m), b), 2 * abs(m) * eps))
        checks.append(_check(f"pert_power[{m}]", _perp_hs(pert_powers.power(m), b), abs(m) * pert_factor))
    return AuditReport(label="perturbation-coupling", eps=eps, checks=tuple(checks))


def _perp_hs(x, b) -> float:
    """|| (I - B B*) X B ||_2 = || P_perp X P ||_2."""
    y = np.asarray(x) @ b
    return hs_norm(y - b @ (b.conj().T @ y))


def _perp_full_hs(x, b) -> float:
    """|| (I - B B*) X ||_2 = || P_perp X ||_2."""
    x = np.asarray(x)
    return hs_norm(x - b @ (b.conj().T @ x))


@dataclass(frozen=True)
class CompressedModel:
    """The pair compressed to ran P: base unitary, direction, endpoint, phase."""

    u0p: np.ndarray
    ap: np.ndarray
    up: np.ndarray
    phase: float

    @property
    def rank(self) -> int:
        return self.u0p.shape[0]


def compressed_model(p: ProjectionBasis, h0, a, phase: float) -> CompressedModel:
    """Compress H0 and A by P and rebuild the unitaries inside ran P.

    The compressed base is the phase-rotated Cayley image of B* H0 B, which
    is Hermitian, so i + B* H0 B is always invertible; the endpoint is
    e^{i Ap} U0p.  P commutes with both rebuilt unitaries by construction,
    which is what makes rank-coordinates legitimate.
    """
    hc = p.compress(as_matrix(h0))
    hc = 0.5 * (hc + hc.conj().T)
    ac = p.compress(as_matrix(a))
    ac = 0.5 * (ac + ac.conj().T)
    u0p = cayley_inverse(hc, phase)
    up = herm_eig(ac, check=False).exp_i() @ u0p
    return CompressedModel(u0p=u0p, ap=ac, up=up, phase=phase)


def audit_compressed_model(
    p: ProjectionBasis, h0, a, u0, u, phase: float, t_max: float, m_list, k_list, s_samples=None
) -> AuditReport:
    """Error bounds for replacing the ambient pair by its compressed model.

    Covers the six displayed quantities: the rank-one-step exponentials
    ||P_perp (e^{iA} - I)||_2 and ||(e^{isA} - e^{isAp}) P||_2, the
    trace-norm remainder ||P_perp (e^{iA} - iA - I)||_1, the power errors
    ||(U0^m - U0p^m) P||_2 and ||P (U^m - Up^m) P||_2, and the mixed traces
    |Tr{ P Up^m (e^{iA} - e^{iAp}) U0^k }|.
    """
    if p.params is None:
        raise ValueError("projection carries no construction record to audit")
    eps = p.params.eps
    a = as_matrix(a)
    u0 = as_matrix(u0)
    u = as_matrix(u)
    a_op = op_norm(a)
    a_hs = hs_norm(a)
    b = p.columns
    model = compressed_model(p, h0, a, phase)
    adec = herm_eig(a, check=False)
    acdec = herm_eig(model.ap, check=False)
    if s_samples is None:
        s_samples = np.linspace(-t_max, t_max, 21)
    checks = []
    exp_a = adec.exp_i()
    checks.append(_check("exp_step_offblock", _perp_full_hs(exp_a - np.eye(p.ambient_dim), b), 2 * eps))
    worst = 0.0
    for s in s_samples:
        worst = max(worst, hs_norm(adec.exp_i(float(s)) @ b - b @ acdec.exp_i(float(s))))
    checks.append(_check("propagator_vs_compressed", worst, 2 * t_max * eps))
    remainder = exp_a - 1j * a - np.eye(p.ambient_dim)
    perp_remainder = remainder - b @ (b.conj().T @ remainder)
    tr_bound = 2.0 * a_hs * _exp_remainder_factor(a_op) * eps
    checks.append(_check("taylor_remainder_tracenorm", trace_norm(perp_remainder), tr_bound))
    base_powers = PowerCache(u0)
    base_c_powers = PowerCache(model.u0p)
    pert_powers = PowerCache(u)
    pert_c_powers = PowerCache(model.up)
    for m in m_list:
        m = int(m)
        value = hs_norm(base_powers.power(m) @ b - b @ base_c_powers.power(m))
        checks.append(_check(f"base_power_error[{m}]", value, 2 * abs(m) * eps))
        value = hs_norm(b.conj().T @ pert_powers.power(m) @ b - pert_c_powers.power(m))
        bound = 2 * abs(m) * eps * ((abs(m) - 1) * np.exp(a_op) + abs(m) + 1)
        checks.append(_check(f"pert_power_error[{m}]", value, bound))
    # Tr{P Up^m (e^{iA} - e^{iAp}) U0^k} in rank coordinates:
    # B*(e^{iA} - e^{iAp}) = B* e^{iA} - e^{iAc} B*.
    exp_ac = acdec.exp_i()
    mixed_bound = 4.0 * eps * eps * np.exp(a_op)
    for m in m_list:
        for k in k_list:
            base_k = base_powers.power(int(k))
            inner = b.conj().T @ exp_a @ base_k @ b - exp_ac @ (b.conj().T @ base_k @ b)
            value = abs(trace(pert_c_powers.power(int(m)) @ inner))
            checks.append(_check(f"mixed_trace[m={int(m)},k={int(k)}]", value, mixed_bound))
    return AuditReport(label="compressed-model", eps=eps, checks=tuple(checks))


@dataclass(frozen=True)
class ConvergenceRow:
    cells: int
    rank: int
    compressed_trace: complex
    abs_diff: float


@dataclass(frozen=True)
class ConvergenceStudy:
    full_trace: complex
    rows: tuple[ConvergenceRow, ...]


def convergence_study(h0, a, phase: float, p: TrigPolynomial, cell_counts, half_width: float | None = None) -> ConvergenceStudy:
    """Compressed-trace error across a ladder of partition resolutions.

    For each cell count n the study builds the direction-seeded projection,
    forms the compressed model, evaluates the second-order trace on the
    compressed operators, and records |full - compressed|.  The ambient
    space must be at least 4x the finest partition so cells keep holding
    several eigenvalues.
    """
    h0 = require_hermitian(h0, what="ambient window operator")
    a = require_hermitian(a, what="ambient direction")
    cell_counts = [int(n) for n in cell_counts]
    if min(cell_counts) < 1:
        raise ValueError("cell counts must be positive")
    if h0.shape[0] < 4 * max(cell_counts):
        raise ValueError("ambient dimension must be at least 4x the finest partition")
    if half_width is None:
        extent = float(np.max(np.abs(np.linalg.eigvalsh(h0))))
        half_width = extent * (1.0 + 1e-12) + 1e-15
    u0 = cayley_inverse(h0, phase)
    u = herm_eig(a, check=False).exp_i() @ u0
    full = lhs_trace(u0, u, a, p)
    rows = []
    for n in sorted(cell_counts):
        proj = build_direction_projection(h0, a, half_width, n)
        model = compressed_model(proj, h0, a, phase)
        compressed = lhs_trace(model.u0p, model.up, model.ap, p)
        rows.append(
            ConvergenceRow(
                cells=n,
                rank=proj.rank,
                compressed_trace=compressed,
                abs_diff=abs(full - compressed),
            )
        )
    return ConvergenceStudy(full_trace=full, rows=tuple(rows))


def spread_diagonal(dim: int, half_width: float) -> np.ndarray:
    """Diagonal Hermitian with spectrum equidistributed strictly inside (-a, a)."""
    levels = -half_width + (np.arange(dim) + 0.5) * (2.0 * half_width / dim)
    return np.diag(levels).astype(np.complex128)


def random_low_rank_hermitian(rng: np.random.Generator, dim: int, rank: int, scale: float) -> np.ndarray:
    """Hermitian of exact rank ``rank`` with operator norm ``scale``."""
    z = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))) / np.sqrt(2.0)
    q, _ = np.linalg.qr(z)
    taus = rng.uniform(0.4, 1.0, rank) * rng.choice([-1.0, 1.0], rank)
    taus *= scale / np.max(np.abs(taus))
    return (q * taus) @ q.conj().T


@dataclass(frozen=True)
class ReductionInstance:
    h0: np.ndarray
    a: np.ndarray
    phase: float
    u0: np.ndarray
    u: np.ndarray
    half_width: float


def reduction_instance(seed: int, ambient: int, rank: int, scale: float, half_width: float = 1.0, phase: float = 0.0) -> ReductionInstance:
    """Seeded ambient model: equidistributed diagonal H0 and a low-rank direction."""
    rng = np.random.default_rng(seed)
    h0 = spread_diagonal(ambient, half_width)
    a = random_low_rank_hermitian(rng, ambient, rank, scale)
    u0 = cayley_inverse(h0, phase)
    u = herm_eig(a, check=False).exp_i() @ u0
    return ReductionInstance(h0=h0, a=a, phase=phase, u0=u0, u=u, half_width=half_width)
