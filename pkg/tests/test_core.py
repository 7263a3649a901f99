"""Core linear algebra: fixed operators, POVM checks, payoff functional."""

import numpy as np
import pytest

from corrlab import core
from corrlab.core import TwoOutcomePOVM


def test_kron_identity():
    assert np.allclose(core.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_computational_basis():
    h = np.array([1, 0], dtype=complex)
    v = np.array([0, 1], dtype=complex)
    hv = core.kron(h, v)
    expected = np.zeros(4)
    expected[1] = 1.0  # (HH, HV, VH, VV) ordering puts HV at index 1
    assert np.allclose(hv, expected)


def test_kron_diagonal_pair():
    d = np.array([1, 1], dtype=complex) / np.sqrt(2)
    assert np.allclose(core.kron(d, d), np.full(4, 0.5))


def test_bell_states():
    psi_m = core.bell_state("psi_minus")
    assert np.allclose(psi_m, np.array([0, 1, -1, 0]) / np.sqrt(2))
    # orthonormal basis: Gram matrix is the identity
    basis = core.bell_basis()
    gram = basis.conj() @ basis.T
    assert np.abs(gram - np.eye(4)).max() < 1e-12


def test_bell_state_unknown_label():
    with pytest.raises(ValueError, match="unknown Bell label"):
        core.bell_state("sigma_plus")


def test_projectors():
    p_sym, p_anti = core.sym_antisym_projectors()
    assert abs(np.trace(p_anti) - 1) < 1e-12
    assert abs(np.trace(p_sym) - 3) < 1e-12
    assert np.abs(p_sym + p_anti - np.eye(4)).max() < 1e-12
    assert np.abs(p_sym @ p_sym - p_sym).max() < 1e-12
    assert np.abs(p_anti @ p_anti - p_anti).max() < 1e-12
    phi_p = core.bell_state("phi_plus")
    assert np.allclose(p_sym @ phi_p, phi_p)
    assert np.abs(p_anti @ phi_p).max() < 1e-12


def test_werner_endpoints():
    p_sym, p_anti = core.sym_antisym_projectors()
    assert np.abs(core.werner(0.0) - p_sym / 3).max() < 1e-12
    assert np.abs(core.werner(0.5) - (p_anti / 2 + p_sym / 6)).max() < 1e-12
    rho = core.werner(1.0)
    assert abs(np.trace(rho @ rho).real - 1.0) < 1e-12  # pure singlet endpoint


def test_werner_rejects_out_of_range():
    with pytest.raises(ValueError):
        core.werner(1.5)
    with pytest.raises(ValueError):
        core.werner(-0.1)


def test_werner_grid_is_valid_density():
    for q in np.linspace(0, 1, 11):
        core.validate_density(core.werner(q))  # raises on violation


def test_validate_povm():
    p_sym, p_anti = core.sym_antisym_projectors()
    assert core.validate_povm(TwoOutcomePOVM(p_anti, p_sym)).valid
    assert core.validate_povm(TwoOutcomePOVM(np.eye(4), np.zeros((4, 4)))).valid
    bad = core.validate_povm(TwoOutcomePOVM(1.5 * p_anti, p_sym))
    assert not bad.valid
    assert not bad.complete


def _standard_problem():
    p_sym, p_anti = core.sym_antisym_projectors()
    rho0 = p_anti / 2 + p_sym / 6
    rho1 = p_sym / 3
    return p_sym, p_anti, rho0, rho1


def test_expected_payoff_joint():
    p_sym, p_anti, rho0, rho1 = _standard_problem()
    povm = TwoOutcomePOVM(e0=p_anti, e1=p_sym)
    assert abs(core.expected_payoff(povm, rho0, rho1) - 0.75) < 1e-12


def test_expected_payoff_trivial_guess():
    p_sym, p_anti, rho0, rho1 = _standard_problem()
    povm = TwoOutcomePOVM(e0=np.eye(4), e1=np.zeros((4, 4)))
    assert abs(core.expected_payoff(povm, rho0, rho1) - 0.5) < 1e-12


def test_expected_payoff_local_hv():
    # same-basis H/V measurement, "identical" iff outcomes agree
    _, _, rho0, rho1 = _standard_problem()
    h = np.array([1, 0], dtype=complex)
    v = np.array([0, 1], dtype=complex)
    ph, pv = np.outer(h, h.conj()), np.outer(v, v.conj())
    e1 = core.kron(ph, ph) + core.kron(pv, pv)
    e0 = core.kron(ph, pv) + core.kron(pv, ph)
    assert abs(core.expected_payoff(TwoOutcomePOVM(e0, e1), rho0, rho1) - 2 / 3) < 1e-12


def test_expected_payoff_swap_invariance():
    p_sym, p_anti, rho0, rho1 = _standard_problem()
    a = core.expected_payoff(TwoOutcomePOVM(p_anti, p_sym), rho0, rho1, (0.3, 0.7))
    b = core.expected_payoff(TwoOutcomePOVM(p_sym, p_anti), rho1, rho0, (0.7, 0.3))
    assert abs(a - b) < 1e-12


def test_expected_payoff_identical_states_is_chance():
    rng = np.random.default_rng(3)
    p_sym, p_anti, rho0, _ = _standard_problem()
    for _ in range(10):
        u = core.random_unitary(4, rng)
        rho = u @ core.werner(rng.random()) @ u.conj().T
        povm = TwoOutcomePOVM(p_anti, p_sym)
        assert abs(core.expected_payoff(povm, rho, rho) - 0.5) < 1e-10


def test_expected_payoff_rejects_invalid_inputs():
    p_sym, p_anti, rho0, rho1 = _standard_problem()
    with pytest.raises(ValueError):
        core.expected_payoff(TwoOutcomePOVM(1.5 * p_anti, p_sym), rho0, rho1)
    with pytest.raises(ValueError):
        core.expected_payoff(TwoOutcomePOVM(p_anti, p_sym), 2 * rho0, rho1)
    with pytest.raises(ValueError):
        core.expected_payoff(TwoOutcomePOVM(p_anti, p_sym), rho0, rho1, (0.6, 0.6))


def test_projectors_commute_with_collective_rotations():
    # P_sym and P_anti are invariant under U x U for any single-qubit unitary
    rng = np.random.default_rng(7)
    p_sym, p_anti = core.sym_antisym_projectors()
    for _ in range(100):
        u = core.random_unitary(2, rng)
        uu = core.kron(u, u)
        assert np.abs(uu @ p_anti - p_anti @ uu).max() < 1e-10
        assert np.abs(uu @ p_sym - p_sym @ uu).max() < 1e-10


def test_trace_norm_examples():
    p_sym, p_anti, rho0, rho1 = _standard_problem()
    assert abs(core.trace_norm(p_anti) - 1.0) < 1e-12
    assert abs(core.trace_norm(np.zeros((4, 4))) - 0.0) < 1e-12
    # eigenvalues of rho0 - rho1 are {1/2, -1/6, -1/6, -1/6}
    assert abs(core.trace_norm(rho0 - rho1) - 1.0) < 1e-12


def test_trace_norm_matches_singular_values():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        a = a + a.conj().T
        oracle = np.linalg.svd(a, compute_uv=False).sum()
        assert abs(core.trace_norm(a) - oracle) < 1e-10


def test_trace_norm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        core.trace_norm(np.array([[0, 1], [0, 0]], dtype=complex))


def test_partial_transpose_involution():
    rng = np.random.default_rng(13)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.allclose(core.partial_transpose(core.partial_transpose(a)), a)
