"""Embedding-based graph expansion: the edge/pair ratio over vertex maps into
l_p vectors or Schatten-p matrices, distortion audits, and the finite
distortion lower bound (expansion estimate divided by the metric ratio).

The estimators are upper bounds by construction: every reported value is the
exact (unsmoothed) ratio recomputed at the returned witness. Minimization
runs projected gradient descent on the quotient (the ratio is invariant under
translation and scaling, so iterates are recentered and rescaled to a unit
pair-average) from a mix of spectral, sweep-cut and random starting points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateEmbedding,
    InvalidExponent,
    InvalidParameters,
    NumericalFailure,
    ShapeMismatch,
)
from .graphs import MetricMatrix, RegularGraph, is_connected, shortest_path_metric, metric_ratio
from .linalg import substream

TARGET_LP = "vector-lp"
TARGET_SP = "matrix-sp"


@dataclass
class VertexEmbedding:
    """Images of the n vertices: 1-D arrays (vector-lp) or square matrices
    (matrix-sp), all of identical shape."""

    images: list
    target: str
    p: float

    def __post_init__(self):
        if self.target not in (TARGET_LP, TARGET_SP):
            raise InvalidParameters(f"unknown target {self.target!r}")
        self.p = float(self.p)
        if not np.isfinite(self.p) or self.p < 1:
            raise InvalidExponent(f"embedding exponent must lie in [1, inf), got {self.p}")
        imgs = [np.asarray(x) for x in self.images]
        if not imgs:
            raise InvalidParameters("embedding needs at least one image")
        want_ndim = 1 if self.target == TARGET_LP else 2
        shape = imgs[0].shape
        for x in imgs:
            if x.ndim != want_ndim or x.shape != shape:
                raise ShapeMismatch("images must all share one shape of the right kind")
            if x.size and not np.all(np.isfinite(x)):
                raise InvalidParameters("images must be finite")
        if self.target == TARGET_SP and shape[0] != shape[1]:
            raise ShapeMismatch("matrix images must be square")
        self.images = imgs

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def m(self) -> int:
        return self.images[0].shape[0]

    def pair_distance(self, i: int, j: int) -> float:
        diff = self.images[i] - self.images[j]
        if self.target == TARGET_LP:
            return float(np.sum(np.abs(diff) ** self.p) ** (1.0 / self.p))
        s = np.linalg.svd(diff, compute_uv=False)
        return float(np.sum(s**self.p) ** (1.0 / self.p))


def _pair_powers(f: VertexEmbedding) -> np.ndarray:
    """Matrix of ||f(i)-f(j)||^p for all ordered pairs."""
    n = f.n
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dp = f.pair_distance(i, j) ** f.p
            out[i, j] = out[j, i] = dp
    return out


def embedding_ratio(g: RegularGraph, f: VertexEmbedding) -> float:
    """((1/|E|) sum_E d_f^p / (1/n^2) sum_{i,j} d_f^p)^(1/p) with d_f the
    target-norm distance between images."""
    if f.n != g.n:
        raise ShapeMismatch(f"embedding has {f.n} images, graph has {g.n} vertices")
    dp = _pair_powers(f)
    upper = np.triu_indices(g.n, k=1)
    num = float((g.adjacency[upper] * dp[upper]).sum()) / g.edge_count()
    den = float(dp.sum()) / g.n**2
    if den <= 0:
        raise DegenerateEmbedding("all images coincide; ratio undefined")
    return (num / den) ** (1.0 / f.p)


# ---------------------------------------------------------------------------
# Distortion
# ---------------------------------------------------------------------------


@dataclass
class DistortionReport:
    """Distortion D = expansion * contraction; D = 1 means scaled isometry.

    ``infinite`` flags coincident images for metrically distinct points; the
    offending pair is reported rather than raised.
    """

    D: float
    expansion: float
    contraction: float
    expansion_pair: tuple | None
    contraction_pair: tuple | None
    infinite: bool = False
    offending_pair: tuple | None = None


def distortion(f: VertexEmbedding, rho: MetricMatrix) -> DistortionReport:
    if f.n != rho.n:
        raise ShapeMismatch(f"embedding has {f.n} images, metric {rho.n} points")
    expansion = 0.0
    contraction = 0.0
    exp_pair = None
    con_pair = None
    for i in range(f.n):
        for j in range(i + 1, f.n):
            r = rho.dist[i, j]
            if r <= 0:
                continue
            delta = f.pair_distance(i, j)
            if delta == 0.0:
                return DistortionReport(
                    D=float("inf"),
                    expansion=float("inf"),
                    contraction=float("inf"),
                    expansion_pair=None,
                    contraction_pair=None,
                    infinite=True,
                    offending_pair=(i, j),
                )
            if delta / r > expansion:
                expansion, exp_pair = delta / r, (i, j)
            if r / delta > contraction:
                contraction, con_pair = r / delta, (i, j)
    return DistortionReport(
        D=expansion * contraction,
        expansion=expansion,
        contraction=contraction,
        expansion_pair=exp_pair,
        contraction_pair=con_pair,
    )


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


@dataclass
class OptimizerConfig:
    restarts: int = 6
    max_iters: int = 300
    initial_step: float = 0.5
    backtrack_factor: float = 0.5
    grad_tol: float = 1e-9
    epsilon: float = 1e-10
    sweep_cuts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 0 or self.max_iters < 1:
            raise InvalidParameters("counts must be positive")
        if self.epsilon < 0:
            raise InvalidParameters("smoothing epsilon must be >= 0")


@dataclass
class EmbedEstimate:
    value: float
    witness: VertexEmbedding
    starts: int = 0
    iterations: int = 0


def _laplacian(g: RegularGraph) -> np.ndarray:
    a = ((g.adjacency + g.adjacency.T) / 2.0).astype(np.float64)
    return np.diag(a.sum(axis=1)) - a


def l2_expansion_oracle(g: RegularGraph) -> float:
    """Exact l2 value sqrt(n * lambda_2 / (2|E|)): the ratio minimum is a
    Rayleigh quotient of the Laplacian on centered vectors."""
    if not is_connected(g):
        raise InvalidParameters("l2 oracle needs a connected graph")
    lam = np.linalg.eigvalsh(_laplacian(g))
    return float(np.sqrt(g.n * lam[1] / (2.0 * g.edge_count())))


def _sweep_cut_sets(g: RegularGraph, count: int) -> list:
    """Best prefix cuts of the Fiedler order by exact l1 cut ratio."""
    lam, vec = np.linalg.eigh(_laplacian(g))
    order = np.argsort(vec[:, 1], kind="stable")
    a = g.adjacency
    n, d = g.n, g.d
    edges = g.edge_count()
    scored = []
    for t in range(1, n):
        s = sorted(order[:t].tolist())
        inside = int(a[np.ix_(s, s)].sum())
        boundary = d * t - inside
        value = Fraction(n * n * boundary, 2 * edges * t * (n - t))
        scored.append((value, s))
    scored.sort(key=lambda vs: (vs[0], vs[1]))
    return [s for _, s in scored[:count]]


def _lp_init_points(g: RegularGraph, m: int, cfg: OptimizerConfig) -> list:
    n = g.n
    inits = []
    lam, vec = np.linalg.eigh(_laplacian(g))
    spectral = np.zeros((n, m))
    take = min(m, n - 1)
    spectral[:, :take] = vec[:, 1 : 1 + take]
    inits.append(spectral)
    for s in _sweep_cut_sets(g, cfg.sweep_cuts):
        x = np.zeros((n, m))
        x[s, 0] = 1.0
        inits.append(x)
    for r in range(cfg.restarts):
        rng = substream(cfg.seed, 7, r)
        inits.append(rng.standard_normal((n, m)))
    return inits


def _exact_lp_ratio(g, x, p):
    f = VertexEmbedding([row.copy() for row in x], TARGET_LP, p)
    return embedding_ratio(g, f)


def _row_blocks(n: int, m: int):
    """Row blocks sized so the (block, n, m) difference tensor stays small."""
    block = max(1, (1 << 22) // max(1, n * m))
    for lo in range(0, n, block):
        yield lo, min(lo + block, n)


def _lp_parts(x, w_edges, p, eps, n2, edge_count):
    """Smoothed (num, den, grad_num, grad_den) for the vector objective."""
    n, m = x.shape
    num = 0.0
    den = 0.0
    gnum = np.zeros_like(x)
    gden = np.zeros_like(x)
    for lo, hi in _row_blocks(n, m):
        diff = x[lo:hi, None, :] - x[None, :, :]
        phi = (diff**2 + eps) ** (p / 2.0)
        t = phi.sum(axis=2)
        for i in range(lo, hi):
            t[i - lo, i] = 0.0
        psi = p * diff * (diff**2 + eps) ** (p / 2.0 - 1.0)
        num += float((w_edges[lo:hi] * t).sum())
        den += float(t.sum())
        gnum[lo:hi] = np.einsum("ij,ija->ia", w_edges[lo:hi], psi)
        gden[lo:hi] = 2.0 * psi.sum(axis=1)
    return num / (2.0 * edge_count), den / n2, gnum / edge_count, gden / n2


def _normalize_lp(x, p):
    x = x - x.mean(axis=0)
    n, m = x.shape
    total = 0.0
    for lo, hi in _row_blocks(n, m):
        total += float(np.sum(np.abs(x[lo:hi, None, :] - x[None, :, :]) ** p))
    den = total / n**2
    if den <= 0:
        return None
    return x * den ** (-1.0 / p)


def _descend_lp(g, x0, p, cfg):
    n = g.n
    w = g.adjacency.astype(np.float64).copy()
    np.fill_diagonal(w, 0.0)
    edge_count = float(g.edge_count())
    eps = cfg.epsilon
    x = _normalize_lp(x0.astype(np.float64), p)
    if x is None:
        return None, 0
    num, den, gnum, gden = _lp_parts(x, w, p, eps, n * n, edge_count)
    ratio = num / den
    iters = 0
    step = cfg.initial_step
    for _ in range(cfg.max_iters):
        grad = (gnum - ratio * gden) / den
        gnorm2 = float(np.sum(grad**2))
        if np.sqrt(gnorm2) <= cfg.grad_tol * max(1.0, ratio):
            break
        s = step
        accepted = False
        while s > 1e-14:
            x_try = _normalize_lp(x - s * grad, p)
            if x_try is None:
                s *= cfg.backtrack_factor
                continue
            num_t, den_t, gnum_t, gden_t = _lp_parts(x_try, w, p, eps, n * n, edge_count)
            ratio_t = num_t / den_t
            if not np.isfinite(ratio_t):
                raise NumericalFailure("non-finite embedding objective")
            if ratio_t <= ratio - 1e-4 * s * gnorm2:
                x, num, den, gnum, gden, ratio = x_try, num_t, den_t, gnum_t, gden_t, ratio_t
                step = min(2.0 * s, cfg.initial_step)
                accepted = True
                break
            s *= cfg.backtrack_factor
        if not accepted:
            break
        iters += 1
    return x, iters


def lp_expansion_estimate(
    g: RegularGraph, p: float, m: int, cfg: OptimizerConfig | None = None
) -> EmbedEstimate:
    """Upper bound on the l_p expansion via multi-restart projected gradient
    over maps [n] -> R^m (spectral, sweep-cut and Gaussian starts)."""
    cfg = cfg or OptimizerConfig()
    if m < 1:
        raise InvalidParameters("target dimension m must be >= 1")
    if not is_connected(g):
        raise InvalidParameters("estimator needs a connected graph")
    p = float(p)
    if p < 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    best_val = None
    best_x = None
    total_iters = 0
    starts = 0
    for x0 in _lp_init_points(g, m, cfg):
        x_init = _normalize_lp(x0.astype(np.float64), p)
        if x_init is None:
            continue
        starts += 1
        for cand in (x_init,):
            val = _exact_lp_ratio(g, cand, p)
            if best_val is None or val < best_val:
                best_val, best_x = val, cand
        x_fin, iters = _descend_lp(g, x_init, p, cfg)
        total_iters += iters
        if x_fin is not None:
            val = _exact_lp_ratio(g, x_fin, p)
            if val < best_val:
                best_val, best_x = val, x_fin
    if best_x is None:
        raise NumericalFailure("no usable starting point")
    witness = VertexEmbedding([row.copy() for row in best_x], TARGET_LP, p)
    return EmbedEstimate(best_val, witness, starts=starts, iterations=total_iters)


# ---------------------------------------------------------------------------
# Schatten-p target
# ---------------------------------------------------------------------------


def _exact_sp_ratio(g, x, p):
    f = VertexEmbedding([mat.copy() for mat in x], TARGET_SP, p)
    return embedding_ratio(g, f)


def _sp_parts(x, w_edges, p, eps, n2, edge_count):
    n, m = x.shape[0], x.shape[1]
    num = 0.0
    den = 0.0
    gnum = np.zeros_like(x)
    gden = np.zeros_like(x)
    for i in range(n):
        for j in range(i + 1, n):
            d_ij = x[i] - x[j]
            lam, u = np.linalg.eigh(d_ij @ d_ij.T)
            lam = np.clip(lam, 0.0, None)
            val = float(np.sum((lam + eps) ** (p / 2.0)))
            h = (u * (lam + eps) ** (p / 2.0 - 1.0)) @ u.T
            gd = p * (h @ d_ij)
            wght = float(w_edges[i, j])
            num += wght * val
            den += 2.0 * val
            gnum[i] += wght * gd
            gnum[j] -= wght * gd
            gden[i] += 2.0 * gd
            gden[j] -= 2.0 * gd
    return num / edge_count, den / n2, gnum / edge_count, gden / n2


def _normalize_sp(x, p):
    x = x - x.mean(axis=0)
    n = x.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s = np.linalg.svd(x[i] - x[j], compute_uv=False)
            total += 2.0 * float(np.sum(s**p))
    den = total / n**2
    if den <= 0:
        return None
    return x * den ** (-1.0 / p)


def _descend_sp(g, x0, p, cfg):
    n = g.n
    w = g.adjacency.astype(np.float64).copy()
    np.fill_diagonal(w, 0.0)
    edge_count = float(g.edge_count())
    eps = cfg.epsilon
    x = _normalize_sp(x0.astype(np.float64), p)
    if x is None:
        return None, 0
    num, den, gnum, gden = _sp_parts(x, w, p, eps, n * n, edge_count)
    ratio = num / den
    iters = 0
    step = cfg.initial_step
    for _ in range(cfg.max_iters):
        grad = (gnum - ratio * gden) / den
        gnorm2 = float(np.sum(grad**2))
        if np.sqrt(gnorm2) <= cfg.grad_tol * max(1.0, ratio):
            break
        s = step
        accepted = False
        while s > 1e-14:
            x_try = _normalize_sp(x - s * grad, p)
            if x_try is None:
                s *= cfg.backtrack_factor
                continue
            num_t, den_t, gnum_t, gden_t = _sp_parts(x_try, w, p, eps, n * n, edge_count)
            ratio_t = num_t / den_t
            if not np.isfinite(ratio_t):
                raise NumericalFailure("non-finite embedding objective")
            if ratio_t <= ratio - 1e-4 * s * gnorm2:
                x, num, den, gnum, gden, ratio = x_try, num_t, den_t, gnum_t, gden_t, ratio_t
                step = min(2.0 * s, cfg.initial_step)
                accepted = True
                break
            s *= cfg.backtrack_factor
        if not accepted:
            break
        iters += 1
    return x, iters


def sp_expansion_estimate(
    g: RegularGraph, p: float, m: int, cfg: OptimizerConfig | None = None
) -> EmbedEstimate:
    """Upper bound on the Schatten-p expansion over maps [n] -> m x m
    matrices.

    The diagonal lift of the l_p witness is always a starting point (l_p
    embeds isometrically into the Schatten-p class via diagonal matrices), so
    the estimate never exceeds the l_p estimate.
    """
    cfg = cfg or OptimizerConfig()
    if m < 1:
        raise InvalidParameters("target dimension m must be >= 1")
    if not is_connected(g):
        raise InvalidParameters("estimator needs a connected graph")
    p = float(p)
    if p < 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    lp_result = lp_expansion_estimate(g, p, m, cfg)
    n = g.n
    inits = []
    diag_lift = np.zeros((n, m, m))
    for i, row in enumerate(lp_result.witness.images):
        diag_lift[i][np.arange(m), np.arange(m)] = row
    inits.append(diag_lift)
    for r in range(cfg.restarts):
        rng = substream(cfg.seed, 11, r)
        inits.append(rng.standard_normal((n, m, m)))
    best_val = None
    best_x = None
    total_iters = 0
    starts = 0
    for x0 in inits:
        x_init = _normalize_sp(x0.astype(np.float64), p)
        if x_init is None:
            continue
        starts += 1
        val = _exact_sp_ratio(g, x_init, p)
        if best_val is None or val < best_val:
            best_val, best_x = val, x_init
        x_fin, iters = _descend_sp(g, x_init, p, cfg)
        total_iters += iters
        if x_fin is not None:
            val = _exact_sp_ratio(g, x_fin, p)
            if val < best_val:
                best_val, best_x = val, x_fin
    if best_x is None:
        raise NumericalFailure("no usable starting point")
    witness = VertexEmbedding([mat.copy() for mat in best_x], TARGET_SP, p)
    return EmbedEstimate(best_val, witness, starts=starts, iterations=total_iters)


def distortion_lower_bound(g: RegularGraph, p: float, h_est: float) -> float:
    """Finite distortion bound h_est / R_rho(G, shortest-path metric, p).

    Valid whenever h_est is a true lower bound on the l_p expansion (cut
    oracle at p = 1, Laplacian oracle at p = 2); heuristic otherwise.
    """
    r = metric_ratio(g, shortest_path_metric(g), p)
    return float(h_est) / r
