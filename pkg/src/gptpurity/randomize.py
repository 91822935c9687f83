"""Randomization experiments: closed-form predictions and Monte Carlo checks.

The central experiment draws a global state of fixed purity, applies a
Haar-random reversible transformation, marginalizes to one party, and
averages the local purity.  Closed forms:

* main:        (K_A-1)/(K_A K_B-1) * (N_A N_B-1)/(N_A-1) * P0
* general:     (K_A-1)/(K_A K_B-1) * P0 / P(phi_A (x) mu_B)
* power-law:   main with K = N^r on both parts
* nonlocaltomo (K_A-1)/(K_AB-1) * P0 / (P(phi_A (x) mu_B) - |mu_C|^2),
  for compositions that are not locally tomographic (real quantum theory).

Estimators are embarrassingly parallel: sample i uses a generator derived
from (seed, i), values are reduced in index order, so reports are identical
for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import composite as comp_mod
from . import grouprep
from . import statespace as ss
from .composite import CompositeDescriptor, partial_trace
from .errors import (
    DegenerateCompositeError,
    InternalError,
    RangeError,
    UndefinedRatioError,
)
from .grouprep import GramMatrix
from .statespace import SpaceDescriptor

HISTOGRAM_BINS = 100
GLOBAL_PURITY_TOL = 1e-9


# -- predictions ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prediction:
    """A closed-form expected local purity with its input echo."""

    value: float
    formula_id: str
    inputs: dict

    def to_json_dict(self) -> dict:
        return {"value": self.value, "formula_id": self.formula_id, "inputs": dict(self.inputs)}


def predict_main(k_a: int, k_b: int, n_a: int, n_b: int, p0: float) -> Prediction:
    """Expected local purity for composites with a composite classical subsystem."""
    for k, n, side in ((k_a, n_a, "A"), (k_b, n_b, "B")):
        if not k >= n >= 2:
            raise RangeError(f"need K >= N >= 2 on part {side}, got K={k}, N={n}")
    if not 0.0 <= p0 <= 1.0:
        raise RangeError(f"global purity must lie in [0, 1], got {p0}")
    value = (k_a - 1) / (k_a * k_b - 1) * (n_a * n_b - 1) / (n_a - 1) * p0
    return Prediction(
        value=value,
        formula_id="main",
        inputs={"K_A": k_a, "K_B": k_b, "N_A": n_a, "N_B": n_b, "P0": p0},
    )


def predict_general(
    comp: CompositeDescriptor, gram_ab: GramMatrix, p0: float, *, tol: float = 1e-6
) -> Prediction:
    """Expected local purity from the numerically evaluated P(phi_A (x) mu_B)."""
    if not 0.0 <= p0 <= 1.0:
        raise RangeError(f"global purity must lie in [0, 1], got {p0}")
    phimu = comp_mod.purity_pure_times_maxmixed(comp, gram_ab, tol=tol)
    k_a, k_b = comp.part_a.K, comp.part_b.K
    value = (k_a - 1) / (k_a * k_b - 1) * p0 / phimu.numeric
    return Prediction(
        value=value,
        formula_id="general",
        inputs={
            "K_A": k_a,
            "K_B": k_b,
            "P0": p0,
            "P_phi_mu": phimu.numeric,
        },
    )


def predict_power_law(r: int, n_a: int, n_b: int, p0: float) -> Prediction:
    """The main formula in a theory class with K = N^r on both parts.

    r = 1 reduces to the classical cancellation, r = 2 to quantum theory.
    The exact value scales like N_B^(1-r) for a large second party.
    """
    if r < 1 or int(r) != r:
        raise RangeError(f"power-law exponent must be a positive integer, got {r}")
    inner = predict_main(n_a**r, n_b**r, n_a, n_b, p0)
    return Prediction(
        value=inner.value,
        formula_id="power-law",
        inputs={"r": r, "N_A": n_a, "N_B": n_b, "P0": p0},
    )


def predict_nonlocaltomo(
    k_a: int, k_ab: int, p0: float, p_phi_mu: float, mu_c_norm_sq: float
) -> Prediction:
    """Expected local purity without local tomography.

    ``mu_c_norm_sq`` is the squared Gram norm of the locally inaccessible
    component of the joint maximally mixed state.
    """
    if not 0.0 <= p0 <= 1.0:
        raise RangeError(f"global purity must lie in [0, 1], got {p0}")
    denom = p_phi_mu - mu_c_norm_sq
    if denom <= 0:
        raise DegenerateCompositeError(
            f"P(phi (x) mu) - |mu_C|^2 = {denom!r} must be positive"
        )
    value = (k_a - 1) / (k_ab - 1) * p0 / denom
    return Prediction(
        value=value,
        formula_id="nonlocaltomo",
        inputs={
            "K_A": k_a,
            "K_AB": k_ab,
            "P0": p0,
            "P_phi_mu": p_phi_mu,
            "mu_C_norm_sq": mu_c_norm_sq,
        },
    )


# -- Monte Carlo reports -----------------------------------------------------------------


@dataclass(frozen=True)
class McReport:
    """Monte Carlo estimate of an expected local purity.

    ``stderr`` is the sample standard deviation over sqrt(n);
    ``realized_global_purity`` is the per-sample global purity, which is
    constant across samples because reversible transformations preserve
    purity.
    """

    mean: float
    stderr: float
    n_samples: int
    seed: int
    realized_global_purity: float
    histogram_counts: np.ndarray | None = None
    histogram_edges: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        d = {
            "mean": self.mean,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "realized_global_purity": self.realized_global_purity,
        }
        if self.histogram_counts is not None:
            d["histogram"] = {
                "counts": [int(c) for c in self.histogram_counts],
                "edges": [float(e) for e in self.histogram_edges],
            }
        return d


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one sample, derived from (seed, index).

    Every sample owns an independent stream, so partitioning samples across
    workers cannot change any drawn value.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _run_indexed(
    n_samples: int, body: Callable[[int], None], n_workers: int | None
) -> None:
    if not n_workers or n_workers <= 1:
        for i in range(n_samples):
            body(i)
        return
    chunk = math.ceil(n_samples / n_workers)
    spans = [(lo, min(lo + chunk, n_samples)) for lo in range(0, n_samples, chunk)]

    def run_span(span: tuple[int, int]) -> None:
        for i in range(*span):
            body(i)

    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        list(pool.map(run_span, spans))


def _make_report(
    vals: np.ndarray,
    gvals: np.ndarray,
    seed: int,
    histogram_bins: int | None,
) -> McReport:
    if float(np.ptp(gvals)) > GLOBAL_PURITY_TOL:
        raise InternalError(
            f"global purity varied by {float(np.ptp(gvals)):.3g} across samples"
        )
    counts = edges = None
    if histogram_bins:
        counts, edges = np.histogram(np.clip(vals, 0.0, 1.0), bins=histogram_bins, range=(0.0, 1.0))
    return McReport(
        mean=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / math.sqrt(len(vals))),
        n_samples=len(vals),
        seed=int(seed),
        realized_global_purity=float(gvals.mean()),
        histogram_counts=counts,
        histogram_edges=edges,
    )


def estimate_expected_local_purity(
    comp: CompositeDescriptor,
    gram_a: GramMatrix,
    gram_ab: GramMatrix,
    p0: float,
    n_samples: int,
    seed: int,
    *,
    initial: np.ndarray | None = None,
    histogram_bins: int | None = HISTOGRAM_BINS,
    n_workers: int | None = None,
) -> McReport:
    """Monte Carlo mean of the local purity after global randomization.

    Each sample builds a global state of purity ``p0`` (or starts from the
    fixed ``initial`` coordinates when given), applies a uniformly random
    reversible transformation of the joint space, marginalizes to A, and
    evaluates the local purity under ``gram_a``.
    """
    if not 0.0 <= p0 <= 1.0:
        raise RangeError(f"global purity must lie in [0, 1], got {p0}")
    vals = np.empty(n_samples)
    gvals = np.empty(n_samples)
    t = math.sqrt(p0)
    joint = comp.joint
    mm_a = comp.part_a.max_mixed
    mm_ab = joint.max_mixed
    if initial is not None:
        initial = np.asarray(initial, dtype=float)
        ss.validate_state(joint, initial)
        got = gram_ab.norm_sq(initial - mm_ab)
        if abs(got - p0) > 1e-9:
            raise RangeError(
                f"the supplied initial state has purity {got!r}, requested {p0}"
            )

    if comp.kind == ss.KIND_QUANTUM:
        na, nb = comp.part_a.level, comp.part_b.level
        n = na * nb
        init_mat = None if initial is None else joint.to_matrix(initial)

        def body(i: int) -> None:
            rng = sample_rng(seed, i)
            if init_mat is None:
                psi = ss.haar_ket(n, rng)
                phi = t * np.outer(psi, psi.conj()) + (1.0 - t) * np.eye(n) / n
            else:
                phi = init_mat
            u = grouprep.haar_unitary(n, rng)
            rho = u @ phi @ u.conj().T
            rho_a = partial_trace(rho, (na, nb), keep=0)
            b = comp.part_a.to_coords(rho_a) - mm_a
            vals[i] = gram_a.norm_sq(b)
            gb = joint.to_coords(rho) - mm_ab
            gvals[i] = gram_ab.norm_sq(gb)

    else:
        n = joint.K
        na = comp.part_a.K

        def body(i: int) -> None:
            rng = sample_rng(seed, i)
            if initial is None:
                p = np.full(n, (1.0 - t) / n)
                p[rng.integers(n)] += t
            else:
                p = np.asarray(initial, dtype=float)
            omega = p[rng.permutation(n)]
            marg = omega.reshape(na, -1).sum(axis=1)
            vals[i] = gram_a.norm_sq(marg - mm_a)
            gvals[i] = gram_ab.norm_sq(omega - mm_ab)

    _run_indexed(n_samples, body, n_workers)
    return _make_report(vals, gvals, seed, histogram_bins)


# -- real quantum theory (not locally tomographic) ----------------------------------------


@dataclass(frozen=True)
class RealQuantumPair:
    """A real-quantum composition with the inputs of the nonlocaltomo formula."""

    part_a: SpaceDescriptor
    part_b: SpaceDescriptor
    joint: SpaceDescriptor
    k_a: int
    k_ab: int
    p_phi_mu: float
    mu_c_norm_sq: float


def real_quantum_pair(m_a: int, m_b: int) -> RealQuantumPair:
    """Compose two real-quantum systems and evaluate the formula inputs.

    The joint space is real quantum theory on m_a * m_b levels; its dimension
    exceeds K_A * K_B, so the composition is not locally tomographic.  Both
    P(phi_A (x) mu_B) and the locally inaccessible part of the joint
    maximally mixed state are computed numerically from the joint Gram.
    """
    a = ss.build_real_quantum(m_a)
    b = ss.build_real_quantum(m_b)
    joint = ss.build_real_quantum(m_a * m_b)
    gram = grouprep.analytic_gram(joint)
    phi = np.zeros((m_a, m_a))
    phi[0, 0] = 1.0
    phimu_mat = np.kron(phi, np.eye(m_b) / m_b)
    phimu = joint.to_coords(phimu_mat) - joint.max_mixed
    p_phi_mu = gram.norm_sq(phimu)
    mu_c_mat = np.eye(m_a * m_b) / (m_a * m_b) - np.kron(np.eye(m_a) / m_a, np.eye(m_b) / m_b)
    mu_c = joint.to_coords(mu_c_mat)
    return RealQuantumPair(
        part_a=a,
        part_b=b,
        joint=joint,
        k_a=a.K,
        k_ab=joint.K,
        p_phi_mu=p_phi_mu,
        mu_c_norm_sq=gram.norm_sq(mu_c),
    )


def estimate_real_quantum_local_purity(
    m_a: int,
    m_b: int,
    p0: float,
    n_samples: int,
    seed: int,
    *,
    histogram_bins: int | None = HISTOGRAM_BINS,
    n_workers: int | None = None,
) -> McReport:
    """Monte Carlo expected local purity in bipartite real quantum theory.

    States are real symmetric density matrices; the global group is
    conjugation by Haar-random orthogonal matrices on the joint space.  The
    report is in generalized-purity units; convert with ``tr2_from_purity``
    for collision values.
    """
    if not 0.0 <= p0 <= 1.0:
        raise RangeError(f"global purity must lie in [0, 1], got {p0}")
    pair = real_quantum_pair(m_a, m_b)
    gram_a = grouprep.analytic_gram(pair.part_a)
    gram_ab = grouprep.analytic_gram(pair.joint)
    m = m_a * m_b
    t = math.sqrt(p0)
    vals = np.empty(n_samples)
    gvals = np.empty(n_samples)
    mm_a = pair.part_a.max_mixed
    mm_ab = pair.joint.max_mixed

    def body(i: int) -> None:
        rng = sample_rng(seed, i)
        psi = rng.normal(size=m)
        psi /= np.linalg.norm(psi)
        phi = t * np.outer(psi, psi) + (1.0 - t) * np.eye(m) / m
        o = grouprep.haar_orthogonal(m, rng)
        rho = o @ phi @ o.T
        rho_a = partial_trace(rho, (m_a, m_b), keep=0)
        vals[i] = gram_a.norm_sq(pair.part_a.to_coords(rho_a) - mm_a)
        gvals[i] = gram_ab.norm_sq(pair.joint.to_coords(rho) - mm_ab)

    _run_indexed(n_samples, body, n_workers)
    return _make_report(vals, gvals, seed, histogram_bins)


# -- qubit Pauli-coefficient oracle --------------------------------------------------------


@dataclass(frozen=True)
class QubitOracleResult:
    """Monte Carlo and closed-form sides of the qubit coefficient identity.

    The identity relates the expected local collision value on n_A qubits to
    the global one on n = n_A + n_B qubits:
    (E Tr rho_A^2 - 2^-n_A) / (Tr phi^2 - 2^-n) = 2^n_B (K_A-1)/(K_AB-1)
    with K_A = 4^n_A and K_AB = 4^n.
    """

    lhs: float
    lhs_stderr: float
    rhs: float
    mean_tr_a: float
    n_samples: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "lhs_stderr": self.lhs_stderr,
            "rhs": self.rhs,
            "mean_tr_a": self.mean_tr_a,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def qubit_pauli_oracle(
    n_a: int,
    n_b: int,
    global_tr_purity: float,
    n_samples: int,
    seed: int,
    *,
    n_workers: int | None = None,
) -> QubitOracleResult:
    """Estimate the qubit-register coefficient ratio and its closed form."""
    if n_a < 1 or n_b < 1:
        raise RangeError("both registers need at least one qubit")
    n = n_a + n_b
    dim = 2**n
    dim_a = 2**n_a
    min_tr = 1.0 / dim
    if not min_tr <= global_tr_purity <= 1.0 + 1e-12:
        raise RangeError(
            f"Tr phi^2 must lie in [{min_tr}, 1], got {global_tr_purity}"
        )
    if abs(global_tr_purity - min_tr) < 1e-12:
        raise UndefinedRatioError("the ratio is undefined at the globally maximally mixed state")
    t = math.sqrt((global_tr_purity - min_tr) / (1.0 - min_tr))
    vals = np.empty(n_samples)

    def body(i: int) -> None:
        rng = sample_rng(seed, i)
        psi = ss.haar_ket(dim, rng)
        phi = t * np.outer(psi, psi.conj()) + (1.0 - t) * np.eye(dim) / dim
        u = grouprep.haar_unitary(dim, rng)
        rho = u @ phi @ u.conj().T
        rho_a = partial_trace(rho, (dim_a, 2**n_b), keep=0)
        vals[i] = float(np.real(np.trace(rho_a @ rho_a)))

    _run_indexed(n_samples, body, n_workers)
    mean_tr_a = float(vals.mean())
    denom = global_tr_purity - min_tr
    lhs = (mean_tr_a - 1.0 / dim_a) / denom
    lhs_stderr = float(vals.std(ddof=1) / math.sqrt(n_samples) / denom)
    rhs = 2.0**n_b * (4.0**n_a - 1.0) / (4.0**n - 1.0)
    return QubitOracleResult(
        lhs=lhs,
        lhs_stderr=lhs_stderr,
        rhs=rhs,
        mean_tr_a=mean_tr_a,
        n_samples=n_samples,
        seed=int(seed),
    )


# -- Markov tail bound ---------------------------------------------------------------------


@dataclass(frozen=True)
class MarkovTailResult:
    """Empirical tail frequency P{P(omega_A) >= 1/x} against the bound x * mean."""

    x: float
    empirical: float
    bound: float
    binomial_sigma: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "x": self.x,
            "empirical": self.empirical,
            "bound": self.bound,
            "binomial_sigma": self.binomial_sigma,
            "passed": self.passed,
        }


def markov_tail_check(report: McReport, x: float) -> MarkovTailResult:
    """Check the Markov inequality on a histogram-bearing report.

    The empirical tail is measured from the first histogram edge at or above
    1/x (which understates the true tail when 1/x falls inside a bin, keeping
    the check conservative); it must not exceed x * mean plus three binomial
    standard deviations.
    """
    if x <= 1.0:
        raise RangeError(f"the tail parameter must exceed 1, got {x}")
    if report.histogram_counts is None:
        raise RangeError("the report carries no histogram")
    edges = report.histogram_edges
    counts = report.histogram_counts
    cut = 1.0 / x
    tail = int(counts[np.asarray(edges[:-1]) >= cut - 1e-12].sum())
    emp = tail / report.n_samples
    sigma = math.sqrt(max(emp * (1.0 - emp), 0.0) / report.n_samples)
    bound = x * report.mean
    return MarkovTailResult(
        x=float(x),
        empirical=emp,
        bound=bound,
        binomial_sigma=sigma,
        passed=bool(emp <= bound + 3.0 * sigma),
    )
