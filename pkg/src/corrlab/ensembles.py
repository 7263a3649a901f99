"""Preparation ensembles for the two correlated parties.

Three ensembles are supported:

* ``discrete6``: the six-pair polarization sets, one per correlation class
  ({HH, VV, DD, AA, RR, LL} and {HV, VH, DA, AD, RL, LR});
* ``uniform_sphere``: Alice drawn Haar-uniformly on the Poincare sphere;
* ``arc``: Alice a linear polarization cos(t)|H> + sin(t)|V> with t uniform
  on [0, pi/2] (the V -> D -> H quarter arc).

The orthogonal partner of alpha|H> + beta|V> is fixed globally as
-conj(beta)|H> + conj(alpha)|V>; any other phase choice yields the same
class-average states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from corrlab import core


class Correlation(IntEnum):
    """Correlation flag between the two preparations."""

    ORTHOGONAL = 0
    IDENTICAL = 1


POLARIZATION_LABELS = ("H", "V", "D", "A", "R", "L")

_SQ = 1.0 / np.sqrt(2.0)
_POL_STATES = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_SQ, _SQ], dtype=complex),
    "A": np.array([_SQ, -_SQ], dtype=complex),
    "R": np.array([_SQ, -1j * _SQ], dtype=complex),
    "L": np.array([_SQ, 1j * _SQ], dtype=complex),
}

#: label of the orthogonal polarization, per label
ORTHOGONAL_LABEL = {"H": "V", "V": "H", "D": "A", "A": "D", "R": "L", "L": "R"}

#: index into POLARIZATION_LABELS of the orthogonal partner label
_PARTNER_IDX = np.array([1, 0, 3, 2, 5, 4], dtype=np.int64)

_POL_TABLE = np.stack([_POL_STATES[lbl] for lbl in POLARIZATION_LABELS])

ENSEMBLE_KINDS = ("discrete6", "uniform_sphere", "arc")


def pol_state(label: str) -> np.ndarray:
    """Single-qubit polarization state for one of the six standard labels."""
    try:
        return _POL_STATES[label].copy()
    except KeyError:
        raise ValueError(
            f"unknown polarization label {label!r}; expected one of {POLARIZATION_LABELS}"
        ) from None


def orthogonal_partner(psi: np.ndarray) -> np.ndarray:
    """The orthogonal state -conj(beta)|H> + conj(alpha)|V>."""
    psi = np.asarray(psi, dtype=complex)
    return np.array([-np.conj(psi[1]), np.conj(psi[0])])


@dataclass(frozen=True)
class PreparationPair:
    """One product-state preparation: Alice's state, Bob's state, and the flag."""

    alice: np.ndarray
    bob: np.ndarray
    j: Correlation
    label: tuple[str, str] | None = None

    def validate(self, tol: float = 1e-12) -> None:
        ov = abs(core.overlap(self.alice, self.bob))
        want = 1.0 if self.j == Correlation.IDENTICAL else 0.0
        if abs(ov - want) > tol:
            raise ValueError(f"pair violates correlation invariant: |<a|b>| = {ov}, j = {self.j}")

    def product_state(self) -> np.ndarray:
        return core.kron(self.alice, self.bob)


@dataclass(frozen=True)
class EnsembleSpec:
    """Which preparation distribution to draw from.

    ``sample_count`` is only a hint for continuous kinds (e.g. Monte Carlo
    averaging); it is ignored by discrete6.
    """

    kind: str
    sample_count: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {ENSEMBLE_KINDS}")


def discrete_ensemble(j: Correlation) -> list[PreparationPair]:
    """The six labeled pairs of the requested correlation class."""
    pairs = []
    for lbl in POLARIZATION_LABELS:
        other = lbl if j == Correlation.IDENTICAL else ORTHOGONAL_LABEL[lbl]
        pairs.append(
            PreparationPair(
                alice=pol_state(lbl), bob=pol_state(other), j=Correlation(j), label=(lbl, other)
            )
        )
    return pairs


def sample_batch(
    spec: EnsembleSpec, j: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw one preparation per entry of ``j`` (0/1 array).

    Returns (alice, bob, label_idx) with alice/bob of shape (n, 2) complex and
    label_idx the Alice-label index for discrete6, -1 otherwise.

    The random stream is consumed in a fixed order (one block per call), so a
    given generator state always yields the same batch.
    """
    j = np.asarray(j)
    n = j.shape[0]
    ortho = j == Correlation.ORTHOGONAL
    if spec.kind == "discrete6":
        idx = rng.integers(0, 6, size=n)
        alice = _POL_TABLE[idx]
        bob_idx = np.where(ortho, _PARTNER_IDX[idx], idx)
        bob = _POL_TABLE[bob_idx]
        return alice, bob, idx.astype(np.int8)
    if spec.kind == "uniform_sphere":
        z = rng.standard_normal((n, 4))
        alice = z[:, 0] + 1j * z[:, 1], z[:, 2] + 1j * z[:, 3]
        alice = np.stack(alice, axis=1)
        alice /= np.linalg.norm(alice, axis=1, keepdims=True)
    elif spec.kind == "arc":
        theta = rng.random(n) * (np.pi / 2.0)
        alice = np.stack([np.cos(theta), np.sin(theta)], axis=1).astype(complex)
    else:  # pragma: no cover - guarded by EnsembleSpec
        raise ValueError(spec.kind)
    partner = np.stack([-np.conj(alice[:, 1]), np.conj(alice[:, 0])], axis=1)
    bob = np.where(ortho[:, None], partner, alice)
    return alice, bob, np.full(n, -1, dtype=np.int8)


def sample_pair(spec: EnsembleSpec, j: Correlation, rng: np.random.Generator) -> PreparationPair:
    """Draw a single preparation pair from the ensemble."""
    alice, bob, idx = sample_batch(spec, np.array([int(j)], dtype=np.uint8), rng)
    label = None
    if idx[0] >= 0:
        la = POLARIZATION_LABELS[idx[0]]
        lb = la if j == Correlation.IDENTICAL else ORTHOGONAL_LABEL[la]
        label = (la, lb)
    return PreparationPair(alice=alice[0], bob=bob[0], j=Correlation(j), label=label)


def _arc_moment(a: int, b: int) -> float:
    """Mean of cos^a(t) sin^b(t) for t uniform on [0, pi/2], in closed form."""
    return math.gamma((a + 1) / 2) * math.gamma((b + 1) / 2) / (math.pi * math.gamma((a + b) / 2 + 1))


def _arc_average(j: Correlation) -> np.ndarray:
    # product-state amplitudes are degree-2 monomials in (cos t, sin t):
    # identical: (c^2, cs, cs, s^2); orthogonal: (-cs, c^2, -s^2, cs)
    if j == Correlation.IDENTICAL:
        monos = ((1, 2, 0), (1, 1, 1), (1, 1, 1), (1, 0, 2))
    else:
        monos = ((-1, 1, 1), (1, 2, 0), (-1, 0, 2), (1, 1, 1))
    rho = np.zeros((4, 4), dtype=complex)
    for i, (ci, ai, bi) in enumerate(monos):
        for k, (ck, ak, bk) in enumerate(monos):
            rho[i, k] = ci * ck * _arc_moment(ai + ak, bi + bk)
    return rho


def average_state(
    spec: EnsembleSpec,
    j: Correlation,
    mode: str = "analytic",
    n: int | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Ensemble-average density operator of class ``j``.

    ``mode="analytic"`` uses the exact average (finite sum for discrete6, the
    Haar second-moment result for uniform_sphere, closed-form trigonometric
    moments for the arc). ``mode="monte_carlo"`` averages ``n`` sampled
    product states using ``rng``.
    """
    if mode == "analytic":
        if spec.kind == "discrete6":
            pairs = discrete_ensemble(j)
            states = np.stack([p.product_state() for p in pairs])
            rho = np.einsum("ni,nj->ij", states, states.conj()) / len(pairs)
        elif spec.kind == "uniform_sphere":
            rho = core.werner(0.5 if j == Correlation.ORTHOGONAL else 0.0)
        else:
            rho = _arc_average(Correlation(j))
    elif mode == "monte_carlo":
        if not n:
            raise ValueError("monte_carlo averaging needs a positive sample count")
        if rng is None:
            raise ValueError("monte_carlo averaging needs an explicit rng")
        jarr = np.full(n, int(j), dtype=np.uint8)
        alice, bob, _ = sample_batch(spec, jarr, rng)
        prod = np.einsum("ni,nj->nij", alice, bob).reshape(n, 4)
        rho = np.einsum("ni,nj->ij", prod, prod.conj()) / n
        # remove the O(n*eps) summation drift so the result is an exact density operator
        rho /= np.trace(rho).real
    else:
        raise ValueError(f"unknown averaging mode {mode!r}")
    return core.validate_density(rho, tol=core.CONSTRUCTION_TOL)
