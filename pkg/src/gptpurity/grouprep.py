"""Reversible-transformation groups: sampling, averaging, and diagnostics.

Group elements act on ambient coordinates as K x K real matrices that fix the
order unit and map the cone into itself.  This module provides

* uniform samplers for the built-in groups (Haar unitary / orthogonal
  conjugations, permutations, dihedral groups, the finite boxworld group),
* the invariant inner product (Gram matrix) on the Bloch subspace, both by
  group averaging and by exact analytic constructors,
* a numerical irreducibility diagnostic based on averaging rank-one maps,
* enumeration of the single-qubit Clifford group and the second-moment
  (2-design) identity check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import statespace as ss
from .errors import InternalError, ReducibleSpaceError, UnsupportedSpaceError
from .statespace import SpaceDescriptor

DEFAULT_GRAM_SAMPLES = 20_000


# -- raw matrix-group sampling -------------------------------------------------------


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random n x n unitary: QR of a complex Ginibre matrix, phase-fixed."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random n x n orthogonal matrix: QR of a real Gaussian, sign-fixed."""
    z = rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diagonal(r))


def conjugation_matrix(basis: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Superoperator of M -> U M U^dag in an orthonormal Hermitian basis.

    Returns the K x K real matrix T with (T c)_k = Tr(B_k U (sum_l c_l B_l) U^dag).
    """
    rotated = np.einsum("ab,lbc,dc->lad", u, basis, u.conj())
    return np.real(np.einsum("kij,lji->kl", basis, rotated))


# -- group samplers --------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSampler:
    """Uniform sampler over a space's reversible-transformation group.

    ``draw`` yields a K x K real matrix T with ``order_unit @ T == order_unit``
    and ``T(cone) <= cone``.  For finite groups with a stored element list,
    ``elements`` holds all of them and ``draw`` picks uniformly from it.
    Samplers are pure functions of the passed generator, so averaging can be
    partitioned across workers with per-sample generators derived from
    (seed, index) without changing any result.
    """

    space: SpaceDescriptor
    name: str
    is_finite: bool
    _draw: Callable[[np.random.Generator], np.ndarray]
    elements: np.ndarray | None = None

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        if self.elements is not None:
            return np.array(self.elements[rng.integers(len(self.elements))])
        return self._draw(rng)


def sample_haar_unitary(space: SpaceDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Conjugation by a Haar-random unitary, as a K x K coordinate matrix."""
    return conjugation_matrix(space.hermitian_basis, haar_unitary(space.level, rng))


def sample_orthogonal(space: SpaceDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Conjugation by a Haar-random orthogonal matrix (real quantum theory)."""
    return conjugation_matrix(space.hermitian_basis, haar_orthogonal(space.level, rng))


def permutation_matrix(perm: np.ndarray) -> np.ndarray:
    n = len(perm)
    t = np.zeros((n, n))
    t[perm, np.arange(n)] = 1.0
    return t


def sample_permutation(space: SpaceDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random permutation of classical outcomes, as a 0/1 matrix."""
    return permutation_matrix(rng.permutation(space.K))


def dihedral_elements(n: int) -> np.ndarray:
    """The 2n elements of D_n acting on the Bloch plane: rotations, then reflections."""
    mats = []
    for k in range(n):
        a = 2 * math.pi * k / n
        mats.append(np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]]))
    for k in range(n):
        a = math.pi * k / n
        mats.append(
            np.array([[math.cos(2 * a), math.sin(2 * a)], [math.sin(2 * a), -math.cos(2 * a)]])
        )
    return np.stack(mats)


def _lift_plane(g: np.ndarray) -> np.ndarray:
    t = np.eye(3)
    t[1:, 1:] = g
    return t


def sample_dihedral(space: SpaceDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of D_n lifted to the 3-dim polygon coordinates."""
    els = dihedral_elements(space.level if space.kind == ss.KIND_POLYGON else 4)
    return _lift_plane(els[rng.integers(len(els))])


@lru_cache(maxsize=None)
def _boxworld_group_elements() -> np.ndarray:
    """All 128 reversible transformations of bipartite boxworld.

    These are the local pairs G_A (x) G_B with G in D4 on each side, together
    with each of those composed with the swap of the two parties.
    """
    locals3 = [_lift_plane(g) for g in ss.gbit_symmetries()]
    swap = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            swap[3 * j + i, 3 * i + j] = 1.0
    out = []
    for ga in locals3:
        for gb in locals3:
            out.append(np.kron(ga, gb))
    for ga in locals3:
        for gb in locals3:
            out.append(np.kron(ga, gb) @ swap)
    return np.stack(out)


def _finite_sampler(space: SpaceDescriptor, name: str, elements: np.ndarray) -> GroupSampler:
    return GroupSampler(
        space=space,
        name=name,
        is_finite=True,
        _draw=lambda rng: np.array(elements[rng.integers(len(elements))]),
        elements=elements,
    )


def sampler_for(space: SpaceDescriptor, *, enumerate_limit: int = 1000) -> GroupSampler:
    """The reversible-group sampler belonging to a built-in space.

    Finite groups with at most ``enumerate_limit`` elements carry the full
    element list; the classical group S_n is enumerated only for small n.
    """
    if space.kind == ss.KIND_QUANTUM:
        return GroupSampler(space, "haar-unitary-conjugation", False,
                            lambda rng: sample_haar_unitary(space, rng))
    if space.kind == ss.KIND_REAL_QUANTUM:
        return GroupSampler(space, "haar-orthogonal-conjugation", False,
                            lambda rng: sample_orthogonal(space, rng))
    if space.kind == ss.KIND_CLASSICAL:
        if math.factorial(space.K) <= enumerate_limit:
            els = np.stack(
                [permutation_matrix(np.array(p)) for p in itertools.permutations(range(space.K))]
            )
            return _finite_sampler(space, "permutations", els)
        return GroupSampler(space, "permutations", True,
                            lambda rng: sample_permutation(space, rng))
    if space.kind in (ss.KIND_POLYGON, ss.KIND_BOXWORLD_LOCAL):
        n = space.level if space.kind == ss.KIND_POLYGON else 4
        els = np.stack([_lift_plane(g) for g in dihedral_elements(n)])
        return _finite_sampler(space, f"dihedral-{n}", els)
    if space.kind == ss.KIND_BOXWORLD_BIPARTITE:
        return _finite_sampler(space, "boxworld-local-and-swap", _boxworld_group_elements())
    raise UnsupportedSpaceError(f"no group sampler for kind {space.kind!r}")


# -- invariant inner product -------------------------------------------------------------


@dataclass(frozen=True)
class GramMatrix:
    """Invariant inner product on the Bloch subspace.

    ``matrix`` is K x K, symmetric positive semidefinite, supported on the
    Bloch subspace, and normalized so that pure states have norm 1.
    ``scale`` records the pure-state rescaling factor that was applied.
    """

    matrix: np.ndarray
    scale: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", ss._frozen(np.asarray(self.matrix, dtype=float)))

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.asarray(x) @ self.matrix @ np.asarray(y))

    def norm_sq(self, x: np.ndarray) -> float:
        return self.inner(x, x)


def analytic_gram(space: SpaceDescriptor) -> GramMatrix:
    """Exact invariant Gram for the built-in transitive spaces.

    In these coordinates every reversible transformation acts as a Euclidean
    isometry of the Bloch subspace, so the invariant product is the Euclidean
    one up to the pure-state normalization: n/(n-1) for quantum and classical
    n-level systems, m/(m-1) for real quantum theory, and 1 for polygons.
    """
    p = space.bloch_projector()
    if space.kind in (ss.KIND_QUANTUM, ss.KIND_CLASSICAL, ss.KIND_REAL_QUANTUM):
        n = space.level
        scale = n / (n - 1)
    elif space.kind in (ss.KIND_POLYGON, ss.KIND_BOXWORLD_LOCAL):
        scale = 1.0
    else:
        raise UnsupportedSpaceError(
            f"no pure-normalized invariant gram for kind {space.kind!r}"
        )
    return GramMatrix(matrix=scale * p, scale=scale)


def check_irreducible(
    space: SpaceDescriptor,
    sampler: GroupSampler,
    trials: int = 2000,
    rng: np.random.Generator | None = None,
    n_probes: int = 3,
) -> float:
    """Deviation of the averaged rank-one map from a multiple of the identity.

    For random Bloch vectors x, the group average of T x x^T T^T must be
    c * P with P the projector onto the Bloch subspace; the returned value is
    the maximum relative entry deviation over probes.  Values of order one
    indicate a reducible action; an irreducible action gives a value at the
    statistical-error scale (zero for exact finite sums).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    p = space.bloch_projector()
    dim = space.K - 1
    worst = 0.0
    for _ in range(n_probes):
        x = p @ rng.normal(size=space.K)
        x /= np.linalg.norm(x)
        if sampler.elements is not None:
            tx = sampler.elements @ x
        else:
            tx = np.stack([sampler.draw(rng) @ x for _ in range(trials)])
        avg = (tx[:, :, None] * tx[:, None, :]).mean(axis=0)
        c = np.trace(avg) / dim
        worst = max(worst, float(np.max(np.abs(avg - c * p)) / c))
    return worst


def _irreducibility_threshold(sampler: GroupSampler, trials: int) -> float:
    if sampler.elements is not None:
        return 1e-8
    return 10.0 / math.sqrt(trials)


def invariant_gram(
    space: SpaceDescriptor,
    sampler: GroupSampler,
    n_avg: int = DEFAULT_GRAM_SAMPLES,
    rng: np.random.Generator | None = None,
    *,
    check_trials: int = 4000,
    n_norm_states: int = 32,
) -> GramMatrix:
    """Invariant Gram by group averaging of the Euclidean Bloch product.

    Averages T^T E T over the group (exact sum for enumerated finite groups,
    ``n_avg`` Monte Carlo draws otherwise, with ~1/sqrt(n_avg) error) and
    rescales so sampled pure states have norm 1.  Raises
    ``ReducibleSpaceError`` when the irreducibility diagnostic exceeds ten
    times the statistical error, since no invariant product is then unique.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    dev = check_irreducible(space, sampler, trials=check_trials, rng=rng)
    if dev > _irreducibility_threshold(sampler, check_trials):
        raise ReducibleSpaceError(
            f"irreducibility deviation {dev:.3g} exceeds threshold; "
            "the invariant inner product is not unique"
        )
    e = space.bloch_projector()
    if sampler.elements is not None:
        ts = sampler.elements
        g = np.einsum("mki,kl,mlj->ij", ts, e, ts) / len(ts)
    else:
        g = np.zeros((space.K, space.K))
        for _ in range(n_avg):
            t = sampler.draw(rng)
            g += t.T @ e @ t
        g /= n_avg
    norms = []
    for _ in range(n_norm_states):
        phi = space.sample_pure(rng)
        b = phi - space.max_mixed
        norms.append(float(b @ g @ b))
    scale = 1.0 / float(np.mean(norms))
    return GramMatrix(matrix=scale * g, scale=scale)


# -- Clifford group and the 2-design identity ---------------------------------------------


def _phase_canonical(u: np.ndarray) -> np.ndarray:
    flat = u.ravel()
    idx = int(np.argmax(np.abs(flat) > 1e-9))
    z = flat[idx]
    return u * (z.conjugate() / abs(z))


def _key(u: np.ndarray) -> bytes:
    return (np.round(u, 9) + 0.0).tobytes()


def _bfs_closure(generators: list[np.ndarray], expect: int, cap: int) -> list[np.ndarray]:
    start = np.eye(generators[0].shape[0], dtype=complex)
    seen: dict[bytes, np.ndarray] = {_key(start): start}
    frontier = [start]
    while frontier:
        new = []
        for u in frontier:
            for g in generators:
                v = _phase_canonical(g @ u)
                k = _key(v)
                if k not in seen:
                    seen[k] = v
                    new.append(v)
        frontier = new
        if len(seen) > cap:
            raise InternalError(f"group closure exceeded {cap} elements")
    if len(seen) != expect:
        raise InternalError(f"group closure produced {len(seen)} elements, expected {expect}")
    return list(seen.values())


@lru_cache(maxsize=None)
def clifford_unitaries(k: int = 1) -> tuple[np.ndarray, ...]:
    """The k-qubit Clifford group modulo global phase (k = 1 or 2).

    Generated by breadth-first closure over Hadamard and phase gates (plus
    CNOT for k = 2), with a deterministic phase canonicalization.  Sizes are
    24 and 11520.
    """
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s = np.diag([1, 1j]).astype(complex)
    if k == 1:
        return tuple(_bfs_closure([h, s], expect=24, cap=1000))
    if k == 2:
        eye = np.eye(2, dtype=complex)
        cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
        gens = [np.kron(h, eye), np.kron(eye, h), np.kron(s, eye), np.kron(eye, s), cnot]
        return tuple(_bfs_closure(gens, expect=11520, cap=20000))
    raise UnsupportedSpaceError(f"Clifford enumeration supports k in (1, 2), got {k}")


def enumerate_clifford_1q() -> np.ndarray:
    """The 24 single-qubit Clifford conjugations as 4 x 4 coordinate matrices."""
    space = ss.build_quantum(2)
    return np.stack([conjugation_matrix(space.hermitian_basis, u) for u in clifford_unitaries(1)])


def swap_operator(d: int) -> np.ndarray:
    """Swap of the two tensor factors of C^d (x) C^d."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[d * j + i, d * i + j] = 1.0
    return s


def symmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) + swap_operator(d)) / 2


def antisymmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) - swap_operator(d)) / 2


def two_design_superoperators(k: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Left side (Clifford second-moment average) and right side superoperators.

    Both act on row-major-vectorized d^2 x d^2 matrices M: the left side is
    the group average of M -> (U (x) U) M (U (x) U)^dag; the right side is the
    projector combination 2 Tr(pi_s M) pi_s / (d(d+1)) + 2 Tr(pi_a M) pi_a / (d(d-1)).
    """
    d = 2**k
    lhs = np.zeros(((d * d) ** 2, (d * d) ** 2), dtype=complex)
    for u in clifford_unitaries(k):
        a = np.kron(u, u)
        lhs += np.kron(a, a.conj())
    lhs /= len(clifford_unitaries(k))
    pi_s = symmetric_projector(d)
    pi_a = antisymmetric_projector(d)
    rhs = (2.0 / (d * (d + 1))) * np.outer(pi_s.ravel(), pi_s.ravel()) + (
        2.0 / (d * (d - 1))
    ) * np.outer(pi_a.ravel(), pi_a.ravel())
    return lhs, rhs.astype(complex)


def two_design_check(k: int = 1) -> float:
    """Maximum absolute entry deviation of the second-moment identity.

    Comparing the superoperators entrywise is equivalent to comparing the two
    sides on a full basis of elementary matrices.
    """
    lhs, rhs = two_design_superoperators(k)
    return float(np.max(np.abs(lhs - rhs)))
