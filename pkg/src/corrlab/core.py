"""Dense complex linear algebra on 2- and 4-dimensional Hilbert spaces.

Conventions, fixed once for the whole package:

* computational basis H = 0, V = 1;
* two-qubit tensor index order is (Alice/control, Bob/target), so the
  4-dimensional basis order is (HH, HV, VH, VV);
* global phases of pure states are meaningless, state equality is always
  checked through |<a|b>| = 1;
* constructed operators are validated to 1e-12, anything downstream of an
  eigendecomposition to 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONSTRUCTION_TOL = 1e-12
SPECTRAL_TOL = 1e-10

#: fixed outcome order used everywhere a Bell outcome is indexed
BELL_LABELS = ("psi_minus", "psi_plus", "phi_minus", "phi_plus")

_H2 = np.array([1.0, 0.0], dtype=complex)
_V2 = np.array([0.0, 1.0], dtype=complex)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two states or operators (first factor = Alice)."""
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def bell_state(label: str) -> np.ndarray:
    """Return one of the four Bell states as a normalized 4-vector.

    psi_minus = (|HV> - |VH>)/sqrt(2), psi_plus = (|HV> + |VH>)/sqrt(2),
    phi_minus = (|HH> - |VV>)/sqrt(2), phi_plus = (|HH> + |VV>)/sqrt(2).
    """
    s = 1.0 / np.sqrt(2.0)
    table = {
        "psi_minus": s * (kron(_H2, _V2) - kron(_V2, _H2)),
        "psi_plus": s * (kron(_H2, _V2) + kron(_V2, _H2)),
        "phi_minus": s * (kron(_H2, _H2) - kron(_V2, _V2)),
        "phi_plus": s * (kron(_H2, _H2) + kron(_V2, _V2)),
    }
    try:
        return table[label]
    except KeyError:
        raise ValueError(f"unknown Bell label {label!r}; expected one of {BELL_LABELS}") from None


def bell_basis() -> np.ndarray:
    """All four Bell states as rows, in BELL_LABELS order."""
    return np.stack([bell_state(lbl) for lbl in BELL_LABELS])


def sym_antisym_projectors() -> tuple[np.ndarray, np.ndarray]:
    """Projectors (P_sym, P_antisym) onto the symmetric/antisymmetric subspaces.

    The antisymmetric projector is rank one (the singlet), the symmetric
    projector is its rank-three complement spanned by the triplet states.
    """
    singlet = bell_state("psi_minus")
    p_anti = np.outer(singlet, singlet.conj())
    p_sym = np.eye(4, dtype=complex) - p_anti
    return p_sym, p_anti


def werner(q: float) -> np.ndarray:
    """Werner-form mixture q * P_antisym + (1 - q) * P_sym / 3.

    q = 0 is the normalized symmetric projector, q = 1 the pure singlet.
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {q}")
    p_sym, p_anti = sym_antisym_projectors()
    return q * p_anti + (1.0 - q) * p_sym / 3.0


def is_hermitian(a: np.ndarray, tol: float = CONSTRUCTION_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.abs(a - a.conj().T).max() <= tol)


def validate_density(rho: np.ndarray, tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    """Check Hermiticity, positivity and unit trace; return rho as complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density operator must be square, got shape {rho.shape}")
    if not is_hermitian(rho, tol):
        raise ValueError("density operator is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError(f"density operator trace is {np.trace(rho)}, expected 1")
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < -tol:
        raise ValueError(f"density operator has negative eigenvalue {min_eig}")
    return rho


@dataclass(frozen=True)
class TwoOutcomePOVM:
    """Two-outcome generalized measurement {e0, e1}.

    Outcome 0 is read as "orthogonal", outcome 1 as "identical".
    """

    e0: np.ndarray
    e1: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "e0", np.asarray(self.e0, dtype=complex))
        object.__setattr__(self, "e1", np.asarray(self.e1, dtype=complex))
        if self.e0.shape != self.e1.shape or self.e0.ndim != 2:
            raise ValueError("POVM elements must be square matrices of equal shape")

    @property
    def dim(self) -> int:
        return self.e0.shape[0]

    def elements(self) -> tuple[np.ndarray, np.ndarray]:
        return self.e0, self.e1


@dataclass(frozen=True)
class PovmValidation:
    """Outcome of validate_povm: eigenvalue floors and completeness defect."""

    min_eigenvalue_e0: float
    min_eigenvalue_e1: float
    completeness_deviation: float
    tol: float

    @property
    def psd_ok(self) -> bool:
        return min(self.min_eigenvalue_e0, self.min_eigenvalue_e1) >= -self.tol

    @property
    def complete(self) -> bool:
        return self.completeness_deviation <= self.tol

    @property
    def valid(self) -> bool:
        return self.psd_ok and self.complete


def validate_povm(m: TwoOutcomePOVM, tol: float = CONSTRUCTION_TOL) -> PovmValidation:
    """Report positivity of both elements and the max-norm completeness defect."""
    if not is_hermitian(m.e0, tol) or not is_hermitian(m.e1, tol):
        # a non-Hermitian element can never be positive; report through eigenvalues
        # of the Hermitian part so the caller still gets a finite number
        herm0 = (m.e0 + dagger(m.e0)) / 2
        herm1 = (m.e1 + dagger(m.e1)) / 2
    else:
        herm0, herm1 = m.e0, m.e1
    min0 = float(np.linalg.eigvalsh(herm0).min())
    min1 = float(np.linalg.eigvalsh(herm1).min())
    dev = float(np.abs(m.e0 + m.e1 - np.eye(m.dim)).max())
    return PovmValidation(min0, min1, dev, tol)


def expected_payoff(
    m: TwoOutcomePOVM,
    rho0: np.ndarray,
    rho1: np.ndarray,
    priors: tuple[float, float] = (0.5, 0.5),
) -> float:
    """Average probability of naming the correlation class correctly.

    Returns priors[0] * Tr[e0 rho0] + priors[1] * Tr[e1 rho1] for the
    two-outcome measurement m, where rho_j is the average state of class j.
    """
    p0, p1 = float(priors[0]), float(priors[1])
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1.0) > CONSTRUCTION_TOL:
        raise ValueError(f"priors must be nonnegative and sum to 1, got {priors}")
    report = validate_povm(m, tol=SPECTRAL_TOL)
    if not report.valid:
        raise ValueError(f"invalid POVM: {report}")
    rho0 = validate_density(rho0, tol=SPECTRAL_TOL)
    rho1 = validate_density(rho1, tol=SPECTRAL_TOL)
    value = p0 * np.trace(m.e0 @ rho0) + p1 * np.trace(m.e1 @ rho1)
    if abs(value.imag) > CONSTRUCTION_TOL:
        raise ValueError(f"payoff has imaginary residue {value.imag}")
    return float(value.real)


def trace_norm(a: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol=SPECTRAL_TOL):
        raise ValueError("trace_norm expects a Hermitian operator")
    return float(np.abs(np.linalg.eigvalsh(a)).sum())


def partial_transpose(rho: np.ndarray, dim_a: int = 2, dim_b: int = 2) -> np.ndarray:
    """Partial transpose over the first (Alice) subsystem."""
    rho = np.asarray(rho)
    r = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return r.transpose(2, 1, 0, 3).reshape(dim_a * dim_b, dim_a * dim_b)


def overlap(a: np.ndarray, b: np.ndarray) -> complex:
    """Inner product <a|b>."""
    return complex(np.vdot(np.asarray(a), np.asarray(b)))


def states_equal(a: np.ndarray, b: np.ndarray, tol: float = SPECTRAL_TOL) -> bool:
    """Equality of pure states up to global phase."""
    return abs(abs(overlap(a, b)) - 1.0) <= tol


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
