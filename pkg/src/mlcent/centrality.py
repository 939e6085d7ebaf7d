"""Walk-based centrality indices and rank-correlation sweeps.

Degree and eigenvector centrality are the two classical limits; between
them sit the parametric indices built from E_alpha(gamma A): subgraph
centrality (diagonal entries, closed-walk counts) and total communicability
(row sums, walk counts to everywhere).  Kendall tau-b compares the induced
rankings, and sweep_grid maps the correlation over an (alpha, gamma) grid
with per-cell overflow recorded as NaN, mirroring the admissible region.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import matfun
from .admissibility import mu_profile, require_admissible
from .errors import (
    AdmissibilityWarning,
    DisconnectedGraphWarning,
    MLConvergenceError,
    MLDomainError,
    MLOverflowError,
)
from .graphio import Graph, largest_component
from .mlkernel import DEFAULT_KBAR, MLParams

__all__ = [
    "Measure",
    "Baseline",
    "CentralityVector",
    "SweepGrid",
    "degree_centrality",
    "eigenvector_centrality",
    "ml_subgraph_centrality",
    "ml_total_communicability",
    "ml_communicability",
    "kendall_tau",
    "sweep_grid",
    "write_sweep_csv",
    "write_mu_csv",
    "write_centrality_csv",
]


class Measure(Enum):
    DEGREE = "degree"
    EIGENVECTOR = "eigenvector"
    ML_SUBGRAPH = "subgraph"
    ML_TOTAL_COMM = "total"


class Baseline(Enum):
    DEGREE = "degree"
    EIGENVECTOR = "eigenvector"


@dataclass(frozen=True)
class CentralityVector:
    scores: np.ndarray
    measure: Measure
    params: MLParams | None = None

    def ranking(self) -> np.ndarray:
        """Node indices from most to least central (ties by index)."""
        return np.lexsort((np.arange(len(self.scores)), -self.scores))


def degree_centrality(g: Graph) -> CentralityVector:
    return CentralityVector(g.degrees.astype(float), Measure.DEGREE)


def eigenvector_centrality(g: Graph, tol: float = 1e-10) -> CentralityVector:
    """Perron eigenvector of the largest connected component.

    Scores are nonnegative with unit 2-norm; nodes outside the largest
    component score zero (with a warning).  Power iteration on A + I; a
    dense eigensolve takes over if it stalls.
    """
    if g.m == 0:
        raise MLDomainError("eigenvector centrality requires at least one edge")
    mask = largest_component(g)
    if not mask.all():
        warnings.warn(
            "graph is disconnected; eigenvector centrality computed on the "
            "largest component, zeros elsewhere",
            DisconnectedGraphWarning,
            stacklevel=2,
        )
    idx = np.where(mask)[0]
    sub = g.adjacency[idx][:, idx]
    n_sub = sub.shape[0]
    x = np.ones(n_sub) / math.sqrt(n_sub)
    converged = False
    for _ in range(20000):
        y = sub @ x + x
        theta = float(x @ y)
        if np.linalg.norm(y - theta * x) <= tol * abs(theta):
            converged = True
            break
        x = y / np.linalg.norm(y)
    if not converged:
        # tiny spectral gap: fall back to the dense symmetric solver
        w, q = matfun.sym_eig(sub.toarray())
        x = q[:, -1]
    x = np.abs(x)
    x /= np.linalg.norm(x)
    scores = np.zeros(g.n)
    scores[idx] = x
    return CentralityVector(scores, Measure.EIGENVECTOR)


def _admissibility_warning(g: Graph, p: MLParams, rho: float):
    if rho == 0.0 or p.alpha == 0.0 or not (0.0 < p.alpha <= 1.0):
        return  # empty graph: every gamma is admissible
    report = require_admissible(p, rho)
    if report.admissible is False:
        warnings.warn(
            f"gamma={p.gamma:.6g} exceeds mu({p.alpha:.3g})={report.mu:.6g}; "
            "walk weights are not monotonically decreasing",
            AdmissibilityWarning,
            stacklevel=3,
        )


def _graph_rho(g: Graph, w: np.ndarray | None = None) -> float:
    if w is not None:
        return float(max(abs(w[0]), abs(w[-1])))
    if g.m == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvalsh(g.dense())).max())


def ml_subgraph_centrality(g: Graph, p: MLParams) -> CentralityVector:
    """Diagonal of E_alpha(gamma A): downweighted closed-walk counts.

    Every score is at least 1 (the empty walk).  If the evaluation
    overflows, the scores are all set to NaN so grid sweeps can record the
    cell instead of aborting.
    """
    w, q = matfun.sym_eig(g.dense())
    _admissibility_warning(g, p, _graph_rho(g, w))
    try:
        if p.alpha == 0.0:
            f = matfun.ml_matrix_dense(g.dense(), p)
            scores = np.diag(f).copy()
        else:
            f = matfun.ml_from_spectrum(w, q, p)
            scores = np.diag(f).copy()
    except MLOverflowError:
        scores = np.full(g.n, np.nan)
    return CentralityVector(scores, Measure.ML_SUBGRAPH, p)


def ml_total_communicability(g: Graph, p: MLParams, tol: float = 1e-10,
                             m_max: int = 100) -> CentralityVector:
    """Row sums E_alpha(gamma A) 1 via the Krylov action on the ones vector."""
    _admissibility_warning(g, p, _graph_rho(g))
    try:
        scores = matfun.ml_action_krylov(
            g.adjacency, np.ones(g.n), p, m_max=m_max, tol=tol
        )
    except MLOverflowError:
        scores = np.full(g.n, np.nan)
    return CentralityVector(np.asarray(scores), Measure.ML_TOTAL_COMM, p)


def ml_communicability(g: Graph, p: MLParams, i: int, j: int) -> float:
    """Off-diagonal entry E_alpha(gamma A)_{ij}: downweighted walk count
    between two distinct nodes."""
    if i == j:
        raise MLDomainError("communicability is defined for distinct nodes")
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise MLDomainError(f"node index out of range: ({i}, {j})")
    _admissibility_warning(g, p, _graph_rho(g))
    f = matfun.ml_matrix_dense(g.dense(), p)
    return float(f[i, j])


def _merge_count(y: np.ndarray) -> int:
    """Number of inversions in y (strict descents), by mergesort."""

    def rec(arr):
        n = len(arr)
        if n <= 1:
            return arr, 0
        left, a = rec(arr[: n // 2])
        right, b = rec(arr[n // 2:])
        merged = []
        inv = a + b
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                inv += len(left) - i
                merged.append(right[j])
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, inv

    return rec(list(y))[1]


def _tie_pair_count(v: np.ndarray) -> int:
    _, counts = np.unique(v, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def kendall_tau(x, y) -> float:
    """Tie-adjusted Kendall rank correlation (tau-b).

    Pairs are classified by sorting on (x, y) and counting inversions of y
    with a mergesort, so the cost is O(n log n) rather than O(n^2).

    Raises
    ------
    MLDomainError
        Vectors of different or insufficient length, or a constant vector
        (tau-b undefined: zero denominator).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise MLDomainError("kendall_tau requires two equal-length vectors")
    n = len(x)
    if n < 2:
        raise MLDomainError("kendall_tau requires length >= 2")
    if np.isnan(x).any() or np.isnan(y).any():
        return math.nan
    n0 = n * (n - 1) // 2
    n1 = _tie_pair_count(x)
    n2 = _tie_pair_count(y)
    if n1 == n0 or n2 == n0:
        raise MLDomainError("kendall_tau undefined for a constant vector")
    order = np.lexsort((y, x))
    ys = y[order]
    discordant = _merge_count(ys)
    # joint ties
    pairs = np.stack([x, y], axis=1)
    _, joint_counts = np.unique(pairs, axis=0, return_counts=True)
    n3 = int((joint_counts * (joint_counts - 1) // 2).sum())
    s = n0 - n1 - n2 + n3 - 2 * discordant
    return s / math.sqrt((n0 - n1) * (n0 - n2))


@dataclass(frozen=True)
class SweepGrid:
    """Kendall correlation of an ML measure against a classical baseline
    over an (alpha, gamma) grid; NaN cells mark overflowed evaluations."""

    alphas: np.ndarray
    gammas: np.ndarray
    tau: np.ndarray  # shape (len(alphas), len(gammas))
    baseline: Baseline
    measure: Measure
    mu_curve: np.ndarray


def sweep_grid(g: Graph, alphas, gammas, baseline: Baseline = Baseline.DEGREE,
               measure: Measure = Measure.ML_SUBGRAPH,
               kbar: int = DEFAULT_KBAR, krylov_m_max: int = 100) -> SweepGrid:
    """Correlation heatmap data over the (alpha, gamma) grid.

    Cells are independent; any overflow or domain failure becomes a NaN
    cell rather than an error, which traces out the non-representable
    region above the admissibility curve.
    """
    alphas = np.asarray(list(alphas), dtype=float)
    gammas = np.asarray(list(gammas), dtype=float)
    if alphas.size == 0 or gammas.size == 0:
        raise MLDomainError("sweep grids must be nonempty")
    if measure not in (Measure.ML_SUBGRAPH, Measure.ML_TOTAL_COMM):
        raise MLDomainError("sweep measure must be an ML measure")

    if baseline is Baseline.DEGREE:
        base_scores = degree_centrality(g).scores
    else:
        base_scores = eigenvector_centrality(g).scores

    w, q = matfun.sym_eig(g.dense())
    rho = _graph_rho(g, w)
    q2 = q * q  # row i holds q_{ik}^2, for fast subgraph diagonals

    tau = np.full((alphas.size, gammas.size), np.nan)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdmissibilityWarning)
        for ia, alpha in enumerate(alphas):
            for ig, gamma in enumerate(gammas):
                scores = _sweep_cell(
                    g, w, q2, float(alpha), float(gamma), measure, krylov_m_max
                )
                if scores is None or not np.all(np.isfinite(scores)):
                    continue
                try:
                    tau[ia, ig] = kendall_tau(scores, base_scores)
                except MLDomainError:
                    continue
    return SweepGrid(
        alphas=alphas,
        gammas=gammas,
        tau=tau,
        baseline=baseline,
        measure=measure,
        mu_curve=np.asarray(mu_profile(alphas, rho, kbar)),
    )


def _sweep_cell(g, w, q2, alpha, gamma, measure, krylov_m_max):
    try:
        p = MLParams(alpha, gamma=gamma)
    except MLDomainError:
        return None
    try:
        if measure is Measure.ML_SUBGRAPH:
            from .mlkernel import ml_scalar

            z = gamma * w
            if alpha == 0.0 and np.abs(z).max() >= 1.0:
                return None
            vals = np.empty_like(z)
            for k in np.argsort(-np.abs(z)):
                v = ml_scalar(float(z[k]), p, tol=1e-12)
                if not math.isfinite(v):
                    return None
                vals[k] = v
            return q2 @ vals
        scores = matfun.ml_action_krylov(
            g.adjacency, np.ones(g.n), p, m_max=krylov_m_max, tol=1e-10
        )
        return np.asarray(scores)
    except (MLOverflowError, MLDomainError, MLConvergenceError):
        return None


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return repr(float(x))


def write_sweep_csv(grid: SweepGrid, path, params_comment: str = "") -> None:
    """Emit one row per cell: alpha,gamma,tau,finite (row-major order).

    NaN cells serialize as the literal token 'nan' with finite=0.  The
    first line is a '#' comment recording the full parameters so the file
    is self-describing.
    """
    lines = [
        f"# mlcent sweep measure={grid.measure.value} baseline={grid.baseline.value}"
        + (f" {params_comment}" if params_comment else "")
    ]
    lines.append("alpha,gamma,tau,finite")
    for ia, alpha in enumerate(grid.alphas):
        for ig, gamma in enumerate(grid.gammas):
            t = grid.tau[ia, ig]
            finite = 0 if math.isnan(t) else 1
            lines.append(f"{_fmt(alpha)},{_fmt(gamma)},{_fmt(t)},{finite}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_mu_csv(grid: SweepGrid, path, params_comment: str = "") -> None:
    """Sidecar admissibility curve: alpha,mu."""
    lines = [
        "# mlcent mu-curve" + (f" {params_comment}" if params_comment else ""),
        "alpha,mu",
    ]
    for alpha, m in zip(grid.alphas, grid.mu_curve):
        lines.append(f"{_fmt(alpha)},{_fmt(m)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_centrality_csv(cv: CentralityVector, path, params_comment: str = "") -> None:
    lines = [
        f"# mlcent centrality measure={cv.measure.value}"
        + (f" {params_comment}" if params_comment else ""),
        "node,score",
    ]
    for i, s in enumerate(cv.scores):
        lines.append(f"{i},{_fmt(float(s))}")
    Path(path).write_text("\n".join(lines) + "\n")
