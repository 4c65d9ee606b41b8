"""Subspace minimization of the expansion ratios.

Three strategies approximate the minimum over subspaces V with
dim V <= floor(n/2):

* ``coordinate-exhaustive`` — exact over subspaces spanned by canonical basis
  vectors (recovers classical edge expansion on permutation tuples);
* ``random-sample`` — Haar-random subspaces with prefix-nested substreams,
  so larger sample counts only extend the candidate list;
* ``riemannian`` — multi-restart projected-gradient descent on the manifold
  of orthonormal n x k bases with backtracking line search and
  re-orthonormalization as the retraction.

Every returned value is the exactly recomputable (unsmoothed) ratio at its
witness; the search never reports an unattained value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .channels import BistochasticTuple, Subspace, expansion_ratio_sp
from .errors import (
    DimensionTooLarge,
    InstanceTooLarge,
    InvalidDimension,
    InvalidParameters,
    NonSmoothConfiguration,
    NumericalFailure,
    RankDeficient,
)
from .linalg import _check_exponent, as_matrix, haar_isometry, orthonormalize, substream

COORDINATE_LIMIT = 24
MIN_STEP = 1e-14
ARMIJO_C1 = 1e-4

STRATEGIES = ("coordinate-exhaustive", "random-sample", "riemannian")


@dataclass
class SearchConfig:
    strategy: str = "riemannian"
    k: object = "all"  # target dimension, or "all" for the 1..floor(n/2) sweep
    samples: int = 100
    restarts: int = 8
    max_iters: int = 200
    initial_step: float = 1.0
    backtrack_factor: float = 0.5
    grad_tol: float = 1e-8
    epsilon: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidParameters(f"unknown strategy {self.strategy!r}")
        if self.k != "all" and int(self.k) < 1:
            raise InvalidParameters("k must be >= 1 or 'all'")
        if self.samples < 1 or self.restarts < 1 or self.max_iters < 1:
            raise InvalidParameters("counts must be >= 1")
        if self.epsilon < 0:
            raise InvalidParameters("smoothing epsilon must be >= 0")
        if self.grad_tol <= 0 or self.initial_step <= 0:
            raise InvalidParameters("tolerances and steps must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise InvalidParameters("backtrack factor must lie in (0, 1)")

    def dims(self, n: int) -> list:
        if n < 2:
            raise InvalidDimension(f"no admissible subspace dimension for n={n}")
        if self.k == "all":
            return list(range(1, n // 2 + 1))
        k = int(self.k)
        if k > n // 2:
            raise DimensionTooLarge(f"k={k} exceeds floor(n/2)={n // 2}")
        return [k]


@dataclass
class ExpansionEstimate:
    """A minimization result: the value and the witness achieving it."""

    value: float
    witness: Subspace
    k: int
    p: object
    strategy: str
    subset: list | None = None  # vertex subset, coordinate strategy only
    samples_used: int = 0
    iterations: int = 0
    objective_traces: list = field(default_factory=list, repr=False)


def minimize_coordinate(
    t: BistochasticTuple, p: float, mode: str = "sp", rank_tol: float = 1e-8
) -> ExpansionEstimate:
    """Exact minimum over coordinate subspaces with 1 <= |W| <= floor(n/2).

    Ties broken by the lexicographically smallest vertex subset. On
    permutation tuples (modes sp and Q) this equals the multigraph's edge
    expansion. The restriction of B to a coordinate projector pair is the
    B[W, complement] block, so ratios are evaluated on submatrix slices.
    """
    n, d = t.n, t.d
    if n > COORDINATE_LIMIT:
        raise InstanceTooLarge(
            f"coordinate sweep limited to n <= {COORDINATE_LIMIT}, got n={n}"
        )
    if n < 2:
        raise InvalidDimension(f"no admissible subset size for n={n}")
    if mode == "sp":
        p = _check_exponent(p)
    if mode == "Q":
        # boundary weights sum_i |B_i[a, b]|^2 for a outside W, b inside W
        weight = np.zeros((n, n))
        for b in t.matrices:
            weight += np.abs(b) ** 2
    threshold = rank_tol * np.sqrt(d)
    best = None
    best_w = None
    evaluated = 0
    for k in range(1, n // 2 + 1):
        for w in combinations(range(n), k):
            comp = [j for j in range(n) if j not in w]
            if mode == "Q":
                num = float(weight[np.ix_(comp, w)].sum())
            else:
                num = 0.0
                for b in t.matrices:
                    s = np.linalg.svd(b[np.ix_(w, comp)], compute_uv=False)
                    if mode == "sp":
                        num += float(np.sum(s**p))
                    else:
                        num += int(np.count_nonzero(s > threshold))
            value = num / (d * k)
            evaluated += 1
            if best is None or value < best or (value == best and w < best_w):
                best, best_w = value, w
    witness = Subspace.coordinate(n, best_w)
    return ExpansionEstimate(
        value=best,
        witness=witness,
        k=len(best_w),
        p=p if mode == "sp" else mode,
        strategy="coordinate-exhaustive",
        subset=list(best_w),
        samples_used=evaluated,
    )


def minimize_random(t: BistochasticTuple, p: float, cfg: SearchConfig) -> ExpansionEstimate:
    """Minimum of the Schatten ratio over Haar-random k-dim subspaces.

    Candidate j of dimension k draws from substream (seed, k, j): the first
    ``samples`` candidates of a larger run are identical to a smaller run, so
    the minimum is monotone in the sample count.
    """
    if cfg.strategy != "random-sample":
        raise InvalidParameters("config strategy must be 'random-sample'")
    p = _check_exponent(p)
    n = t.n
    best = None  # (value, k, index, witness)
    total = 0
    for k in cfg.dims(n):
        for j in range(cfg.samples):
            v = Subspace(haar_isometry(n, k, substream(cfg.seed, k, j)))
            value = expansion_ratio_sp(t, v, p).value
            total += 1
            key = (value, k, j)
            if best is None or key < best[0]:
                best = (key, v)
    (value, k, _), witness = best
    return ExpansionEstimate(
        value=value,
        witness=witness,
        k=k,
        p=p,
        strategy="random-sample",
        samples_used=total,
    )


def objective_and_gradient(t: BistochasticTuple, q, p: float, epsilon: float):
    """Smoothed Schatten numerator and its Euclidean gradient in the basis.

    Objective F(Q) = sum_i sum_l (sigma_l^2 + epsilon)^(p/2) over all n
    singular values of P B_i (Id - P) with P = QQ*; smooth in Q for
    epsilon > 0 (and for epsilon = 0 when p >= 2). The gradient is the Riesz
    representer of dF under the real inner product Re Tr[A* B], so the
    entrywise real/imag parts match central finite differences directly.
    """
    p = _check_exponent(p)
    epsilon = float(epsilon)
    if epsilon < 0:
        raise InvalidParameters("smoothing epsilon must be >= 0")
    if epsilon == 0.0 and p < 2:
        raise NonSmoothConfiguration(
            "epsilon = 0 makes the Schatten-p objective nonsmooth for p < 2"
        )
    qm = q.basis if isinstance(q, Subspace) else as_matrix(q, "basis")
    n = qm.shape[0]
    if (t.n, t.n) != (n, n):
        raise InvalidParameters(f"basis rows {n} do not match tuple size {t.n}")
    proj = qm @ qm.conj().T
    comp = np.eye(n) - proj
    value = 0.0
    grad = np.zeros_like(qm)
    for b in t.matrices:
        m = proj @ b @ comp
        lam, u = np.linalg.eigh(m @ m.conj().T)
        lam = np.clip(lam, 0.0, None)
        value += float(np.sum((lam + epsilon) ** (p / 2.0)))
        h = (u * (lam + epsilon) ** (p / 2.0 - 1.0)) @ u.conj().T
        gm = p * (h @ m)
        k_mat = b @ comp @ gm.conj().T - gm.conj().T @ proj @ b
        grad += (k_mat + k_mat.conj().T) @ qm
    return value, grad


def _objective_only(t, qm, p, epsilon):
    proj = qm @ qm.conj().T
    comp = np.eye(qm.shape[0]) - proj
    value = 0.0
    for b in t.matrices:
        m = proj @ b @ comp
        lam = np.clip(np.linalg.eigvalsh(m @ m.conj().T), 0.0, None)
        value += float(np.sum((lam + epsilon) ** (p / 2.0)))
    return value


def _descend(t, q0, p, cfg, restart_tag):
    """Single descent run; returns (final basis, objective trace)."""
    qm = q0
    value, grad = objective_and_gradient(t, qm, p, cfg.epsilon)
    if not np.isfinite(value):
        raise NumericalFailure(f"non-finite objective at restart {restart_tag}")
    trace = [value]
    step = cfg.initial_step
    for _ in range(cfg.max_iters):
        # tangent projection on the orthonormal-basis manifold
        qhg = qm.conj().T @ grad
        xi = grad - qm @ ((qhg + qhg.conj().T) / 2.0)
        gnorm2 = float(np.linalg.norm(xi) ** 2)
        if np.sqrt(gnorm2) <= cfg.grad_tol * max(1.0, abs(value)):
            break
        s = step
        accepted = False
        while s > MIN_STEP:
            try:
                q_try = orthonormalize(qm - s * xi)
            except RankDeficient:
                s *= cfg.backtrack_factor
                continue
            v_try = _objective_only(t, q_try, p, cfg.epsilon)
            if not np.isfinite(v_try):
                raise NumericalFailure(
                    f"non-finite objective during line search at restart {restart_tag}"
                )
            if v_try <= value - ARMIJO_C1 * s * gnorm2:
                qm = q_try
                value = v_try
                _, grad = objective_and_gradient(t, qm, p, cfg.epsilon)
                step = min(2.0 * s, cfg.initial_step)
                accepted = True
                break
            s *= cfg.backtrack_factor
        if not accepted:
            break
        trace.append(value)
    return qm, trace


def minimize_riemannian(t: BistochasticTuple, p: float, cfg: SearchConfig) -> ExpansionEstimate:
    """Multi-restart Riemannian descent; reports the unsmoothed ratio at the
    best final witness."""
    if cfg.strategy != "riemannian":
        raise InvalidParameters("config strategy must be 'riemannian'")
    p = _check_exponent(p)
    n = t.n
    best = None  # ((value, k, restart), witness)
    traces = []
    iterations = 0
    for k in cfg.dims(n):
        for r in range(cfg.restarts):
            q0 = haar_isometry(n, k, substream(cfg.seed, k, r))
            qm, trace = _descend(t, q0, p, cfg, restart_tag=f"k={k},r={r}")
            traces.append(trace)
            iterations += len(trace) - 1
            v = Subspace(qm)
            value = expansion_ratio_sp(t, v, p).value
            key = (value, k, r)
            if best is None or key < best[0]:
                best = (key, v)
    (value, k, _), witness = best
    return ExpansionEstimate(
        value=value,
        witness=witness,
        k=k,
        p=p,
        strategy="riemannian",
        iterations=iterations,
        objective_traces=traces,
    )


def estimate_expansion(t: BistochasticTuple, p: float, cfg: SearchConfig) -> ExpansionEstimate:
    """Overall minimum across the k = 1..floor(n/2) sweep for the configured
    strategy (the coordinate strategy already sweeps every subset size)."""
    full = replace(cfg, k="all")
    if full.strategy == "coordinate-exhaustive":
        return minimize_coordinate(t, p, mode="sp")
    if full.strategy == "random-sample":
        return minimize_random(t, p, full)
    return minimize_riemannian(t, p, full)
