import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unishift import (
    NotHermitian,
    NotUnitary,
    choose_phase,
    herm_eig,
    hs_norm,
    log_unitary,
    norms,
    op_norm,
    random_pair,
    trace,
    unitary_eig,
    unitary_path,
)
from unishift.linalg import TWO_PI, UnitaryPath, haar_unitary

seeds = st.integers(0, 2**31 - 1)
dims = st.integers(1, 12)


def test_herm_eig_zero_matrix():
    dec = herm_eig(np.zeros((3, 3), dtype=complex))
    np.testing.assert_allclose(dec.eigenvalues, np.zeros(3))
    np.testing.assert_allclose(dec.vectors @ dec.vectors.conj().T, np.eye(3), atol=1e-14)


def test_herm_eig_diagonal():
    dec = herm_eig(np.diag([-1.0, 2.0]).astype(complex))
    np.testing.assert_allclose(dec.eigenvalues, [-1.0, 2.0])


def test_herm_eig_roundtrip_8x8():
    rng = np.random.default_rng(42)
    g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = g + g.conj().T
    dec = herm_eig(h)
    assert op_norm(dec.matrix() - h) <= 8 * 1e-12
    # per-eigenpair residual stays at the machine level
    res = np.linalg.norm(h @ dec.vectors - dec.vectors * dec.eigenvalues, axis=0)
    assert np.all(res <= 50 * 8 * np.finfo(float).eps * op_norm(h))


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_choose_phase_identity():
    assert choose_phase(np.eye(4, dtype=complex)) == pytest.approx(0.0, abs=1e-15)


def test_choose_phase_two_point_tie():
    # spectrum {1, -1}: two equal gaps; the first in the ascending scan wins
    phi = choose_phase(np.diag([1.0, -1.0]).astype(complex))
    assert -np.exp(1j * phi) == pytest.approx(1j, abs=1e-14)


def test_choose_phase_largest_gap_midpoint():
    u0 = np.diag(np.exp(1j * np.array([0.1, 0.2])))
    phi = choose_phase(u0)
    midpoint = (0.2 + 0.1 + TWO_PI) / 2.0
    avoided = np.mod(np.angle(-np.exp(1j * phi)), TWO_PI)
    assert avoided == pytest.approx(np.mod(midpoint, TWO_PI), abs=1e-12)


@given(seeds, st.integers(2, 10))
def test_choose_phase_maximises_distance(seed, dim):
    # oracle: enumerate the gaps of the spectrum directly
    rng = np.random.default_rng(seed)
    ang = np.sort(rng.uniform(0.0, TWO_PI, dim))
    u0 = np.diag(np.exp(1j * ang))
    phi = choose_phase(u0)
    target = np.mod(np.angle(-np.exp(1j * phi)), TWO_PI)
    dist = np.min(np.abs(np.mod(ang - target + np.pi, TWO_PI) - np.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + TWO_PI]]))
    assert dist == pytest.approx(np.max(gaps) / 2.0, abs=1e-10)


def test_unitary_eig_identity_convention():
    dec = unitary_eig(np.eye(3, dtype=complex))
    np.testing.assert_allclose(dec.angles, np.full(3, TWO_PI))
    np.testing.assert_allclose(dec.vectors, np.eye(3), atol=1e-12)


def test_unitary_eig_diagonal():
    dec = unitary_eig(np.diag([1j, -1j]))
    np.testing.assert_allclose(dec.angles, [np.pi / 2, 3 * np.pi / 2], atol=1e-12)


def test_unitary_eig_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        unitary_eig(2.0 * np.eye(2, dtype=complex))


@given(seeds, dims)
def test_unitary_eig_reconstruction(seed, dim):
    u = haar_unitary(np.random.default_rng(seed), dim)
    dec = unitary_eig(u)
    assert op_norm(dec.matrix() - u) <= dim * 1e-12
    assert op_norm(dec.vectors.conj().T @ dec.vectors - np.eye(dim)) <= 1e-12
    assert np.all(dec.angles > 0.0) and np.all(dec.angles <= TWO_PI)
    assert np.all(np.diff(dec.angles) >= 0.0)


def test_log_unitary_identity():
    np.testing.assert_allclose(log_unitary(np.eye(2, dtype=complex)), np.zeros((2, 2)), atol=1e-14)


def test_log_unitary_branch_at_minus_one():
    np.testing.assert_allclose(log_unitary(np.array([[-1.0 + 0j]])), [[np.pi]], atol=1e-12)


def test_log_unitary_diagonal_and_bounds():
    v = np.diag(np.exp(1j * np.array([0.3, -2.9])))
    a = log_unitary(v)
    np.testing.assert_allclose(a, np.diag([0.3, -2.9]), atol=1e-12)
    dec = herm_eig(a)
    assert op_norm(dec.exp_i() - v) <= 2 * 1e-12
    assert hs_norm(a) <= np.pi / 2 * hs_norm(v - np.eye(2)) + 2 * 1e-10


@given(seeds, dims)
def test_log_exp_roundtrip(seed, dim):
    v = haar_unitary(np.random.default_rng(seed), dim)
    a = log_unitary(v)
    assert op_norm(a - a.conj().T) <= dim * 1e-12
    w = np.linalg.eigvalsh(a)
    assert np.all(w > -np.pi - 1e-12) and np.all(w <= np.pi + 1e-12)
    assert op_norm(herm_eig(a).exp_i() - v) <= dim * 1e-12


@given(seeds, dims, st.floats(0.05, 3.0))
def test_hs_bound_on_log(seed, dim, scale):
    pair = random_pair(seed, dim, scale)
    a = log_unitary(pair.u @ pair.u0.conj().T)
    assert hs_norm(a) <= np.pi / 2 * hs_norm(pair.u - pair.u0) + dim * 1e-10


def test_unitary_path_endpoints():
    pair = random_pair(9, 5, 1.0)
    np.testing.assert_allclose(unitary_path(pair.u0, pair.a, 0.0), pair.u0, atol=1e-14)
    u1 = unitary_path(pair.u0, pair.a, 1.0)
    np.testing.assert_allclose(u1, pair.u, atol=1e-13)
    assert op_norm(log_unitary(u1 @ pair.u0.conj().T) - pair.a) <= 5 * 1e-10


def test_unitary_path_scalar():
    beta, alpha, s = 0.7, 0.4, 0.6
    u0 = np.array([[np.exp(1j * beta)]])
    a = np.array([[alpha]], dtype=complex)
    np.testing.assert_allclose(unitary_path(u0, a, s), [[np.exp(1j * (s * alpha + beta))]])


def test_unitary_path_stays_unitary():
    pair = random_pair(3, 6, 2.5)
    path = UnitaryPath(pair.u0, pair.a)
    for s in (0.25, 0.5, 1.75):
        us_mat = path.at(s)
        assert op_norm(us_mat.conj().T @ us_mat - np.eye(6)) <= 6 * 1e-12


def test_norms_identity():
    n = norms(np.eye(4, dtype=complex))
    assert (n.op, n.tr) == (pytest.approx(1.0), pytest.approx(4.0))
    assert n.hs == pytest.approx(2.0)
    assert trace(np.eye(4)) == pytest.approx(4.0)


def test_norms_diagonal():
    n = norms(np.diag([3.0, -4.0]).astype(complex))
    assert (n.op, n.hs, n.tr) == (pytest.approx(4.0), pytest.approx(5.0), pytest.approx(7.0))
    assert trace(np.diag([3.0, -4.0])) == pytest.approx(-1.0)


@given(seeds)
def test_norm_ordering(seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    n = norms(m)
    assert n.tr + 1e-12 >= n.hs >= n.op - 1e-12
    assert abs(trace(m)) <= n.tr + 1e-10


def test_random_pair_deterministic():
    p1, p2 = random_pair(123, 7, 1.5), random_pair(123, 7, 1.5)
    assert p1.u0.tobytes() == p2.u0.tobytes()
    assert p1.a.tobytes() == p2.a.tobytes()
    assert p1.u.tobytes() == p2.u.tobytes()


def test_random_pair_small_scale_continuity():
    pair = random_pair(5, 6, 1e-6)
    assert hs_norm(pair.u - pair.u0) <= np.sqrt(6) * 1e-6 * (1 + 1e-6)


def test_random_pair_scale_sets_operator_norm():
    pair = random_pair(8, 5, 0.9)
    assert op_norm(pair.a) == pytest.approx(0.9, rel=1e-12)


@given(seeds, dims, st.floats(0.05, 3.0))
def test_random_pair_log_roundtrip(seed, dim, scale):
    pair = random_pair(seed, dim, scale)
    assert op_norm(log_unitary(pair.u @ pair.u0.conj().T) - pair.a) <= dim * 1e-10


def test_random_pair_rejects_bad_scale():
    with pytest.raises(ValueError):
        random_pair(0, 3, np.pi)
    with pytest.raises(ValueError):
        random_pair(0, 3, 0.0)


def test_matrix_coercion_rejects_bad_input():
    from unishift.linalg import as_matrix

    with pytest.raises(ValueError):
        as_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_predicates():
    from unishift import is_hermitian, is_unitary

    assert is_unitary(np.eye(3, dtype=complex))
    assert not is_unitary(1.5 * np.eye(3, dtype=complex))
    assert is_hermitian(np.array([[1.0, 2j], [-2j, 0.0]]))
    assert not is_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
