"""Dense and Krylov matrix-function machinery.

Symmetric eigendecompositions back the dense Mittag-Leffler matrix
function; a Lanczos projection with full reorthogonalization provides the
matrix-vector action E_{alpha,beta}(gamma A) v for sparse symmetric A; the
matrix exponential (Pade scaling and squaring) and the principal matrix
logarithm (inverse scaling and squaring with Denman-Beavers square roots)
support the temporal propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    MatrixLogBranchError,
    MLConvergenceError,
    MLDomainError,
    MLOverflowError,
)
from .mlkernel import MLParams, ml_scalar, reciprocal_gamma

__all__ = [
    "KrylovBasis",
    "sym_eig",
    "spectral_radius",
    "ml_from_spectrum",
    "ml_matrix_dense",
    "lanczos",
    "ml_action_krylov",
    "matrix_exp",
    "matrix_log_principal",
]


def _as_dense(a) -> np.ndarray:
    if sp.issparse(a):
        return a.toarray()
    return np.asarray(a, dtype=float)


def _check_square(a: np.ndarray, name: str = "matrix"):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MLDomainError(f"{name} must be square, got shape {a.shape}")


def _is_symmetric(a: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = np.abs(a).max() if a.size else 0.0
    if scale == 0.0:
        return True
    return float(np.abs(a - a.T).max()) <= rtol * max(1.0, scale)


def sym_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition A = Q diag(w) Q^T of a symmetric matrix.

    Returns eigenvalues in ascending order and the orthonormal eigenvector
    matrix.  Thin wrapper over LAPACK's symmetric solver with an explicit
    symmetry check.
    """
    dense = _as_dense(a)
    _check_square(dense)
    if not _is_symmetric(dense, rtol=1e-10):
        raise MLDomainError("sym_eig requires a symmetric matrix")
    try:
        w, q = np.linalg.eigh(dense)
    except np.linalg.LinAlgError as exc:  # iteration cap inside LAPACK
        raise MLConvergenceError(f"symmetric eigensolver failed: {exc}") from exc
    return w, q


def spectral_radius(a, tol: float = 1e-8, max_iter: int = 100000,
                    restarts: int = 3) -> float:
    """Dominant eigenvalue of a nonnegative matrix by power iteration.

    Iterates on A + I so that bipartite spectra (+/- rho pairs) still have
    a unique dominant eigenvalue, and restarts from a fresh positive vector
    instead of deflating when progress stalls.  Convergence is declared on
    the residual ||A x - rho x|| <= tol * (rho + 1).

    Raises
    ------
    MLDomainError
        Zero or negative input.
    MLConvergenceError
        Iteration cap reached (typical for a tiny spectral gap); callers
        may fall back to a dense eigendecomposition.
    """
    if sp.issparse(a):
        mat = a.tocsr()
        amax, amin = mat.max(), mat.min()
        nnz = mat.nnz
    else:
        mat = np.asarray(a, dtype=float)
        _check_square(mat)
        amax, amin = (mat.max(), mat.min()) if mat.size else (0.0, 0.0)
        nnz = np.count_nonzero(mat)
    if nnz == 0:
        raise MLDomainError("spectral radius of the zero matrix is undefined here")
    if amin < 0:
        raise MLDomainError("spectral_radius requires a nonnegative matrix")
    n = mat.shape[0]
    per_round = max(1, max_iter // (restarts + 1))
    x = np.ones(n) / math.sqrt(n)
    for attempt in range(restarts + 1):
        if attempt > 0:
            rng = np.random.default_rng(attempt)
            x = rng.random(n) + 0.5
            x /= np.linalg.norm(x)
        for _ in range(per_round):
            ax = mat @ x
            y = ax + x  # shifted iteration
            theta = float(x @ y)
            resid = float(np.linalg.norm(y - theta * x))
            if resid <= tol * abs(theta):
                return theta - 1.0
            ny = float(np.linalg.norm(y))
            if ny == 0.0:
                return 0.0  # nilpotent direction collapsed
            x = y / ny
    raise MLConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} steps "
        "(small spectral gap?)"
    )


def ml_from_spectrum(w: np.ndarray, q: np.ndarray, p: MLParams,
                     tol: float = 1e-12) -> np.ndarray:
    """Assemble E_{alpha,beta}(gamma A) from a precomputed eigendecomposition.

    Scalar values are evaluated at the largest argument first so an
    overflowing cell fails before any further work.
    """
    z = p.gamma * w
    order = np.argsort(-np.abs(z))
    vals = np.empty_like(z)
    for idx in order:
        v = ml_scalar(float(z[idx]), p, tol=tol)
        if not math.isfinite(v):
            raise MLOverflowError(
                f"E_alpha(gamma*lambda) overflows at lambda={w[idx]:.6g} "
                f"(alpha={p.alpha}, gamma={p.gamma})"
            )
        vals[idx] = v
    f = (q * vals) @ q.T
    return (f + f.T) / 2.0


def ml_matrix_dense(a, p: MLParams, tol: float = 1e-12, method: str = "auto") -> np.ndarray:
    """Dense Mittag-Leffler matrix function E_{alpha,beta}(gamma A).

    Symmetric inputs go through the eigendecomposition; anything else is
    summed as the truncated power series sum_r (gamma A)^r / Gamma(alpha r
    + beta), which is legitimate for alpha > 0 because the function is
    entire.  method forces "eig" or "series".

    Raises
    ------
    MLOverflowError
        Any required scalar value exceeds double precision (the heatmaps'
        NaN region).
    MLDomainError
        alpha = 0 with gamma * rho(A) >= 1.
    """
    dense = _as_dense(a)
    _check_square(dense)
    if not np.all(np.isfinite(dense)):
        raise MLDomainError("matrix entries must be finite")
    symmetric = _is_symmetric(dense)
    if method not in ("auto", "eig", "series"):
        raise MLDomainError(f"unknown method {method!r}")
    if method == "eig" and not symmetric:
        raise MLDomainError("eig path requires a symmetric matrix")

    if p.alpha == 0.0:
        # resolvent: series converges iff gamma*rho < 1; solve directly
        eigs = np.linalg.eigvals(dense)
        rho = float(np.abs(eigs).max()) if dense.size else 0.0
        if p.gamma * rho >= 1.0:
            raise MLDomainError(
                f"alpha=0 requires gamma*rho(A) < 1, got {p.gamma * rho:.6g}"
            )
        n = dense.shape[0]
        return np.linalg.solve(np.eye(n) - p.gamma * dense, np.eye(n))

    if symmetric and method in ("auto", "eig"):
        w, q = sym_eig(dense)
        return ml_from_spectrum(w, q, p, tol=tol)
    return _ml_matrix_series(dense, p, tol)


def _ml_matrix_series(a: np.ndarray, p: MLParams, tol: float) -> np.ndarray:
    n = a.shape[0]
    b = p.gamma * a
    power = np.eye(n)
    total = reciprocal_gamma(p.beta) * power
    quiet = 0
    prev_norm = math.inf
    for r in range(1, 20001):
        power = power @ b
        coeff = reciprocal_gamma(p.alpha * r + p.beta)
        term = coeff * power
        term_norm = float(np.abs(term).max())
        if not math.isfinite(term_norm):
            raise MLOverflowError("matrix power series overflowed")
        total += term
        scale = float(np.abs(total).max())
        # coefficients are non-monotone in general: require two consecutive
        # small decreasing terms before truncating
        if term_norm <= prev_norm and term_norm <= 0.125 * tol * max(scale, 1e-300):
            quiet += 1
            if quiet >= 2:
                if not np.all(np.isfinite(total)):
                    raise MLOverflowError("matrix series produced non-finite entries")
                return total
        else:
            quiet = 0
        prev_norm = term_norm
    raise MLConvergenceError("matrix power series did not settle within 20000 terms")


@dataclass(frozen=True)
class KrylovBasis:
    """Orthonormal Lanczos basis V and its tridiagonal projection."""

    v: np.ndarray       # n x m, orthonormal columns
    alphas: np.ndarray  # m diagonal entries
    betas: np.ndarray   # m-1 off-diagonal entries
    breakdown: bool

    @property
    def m(self) -> int:
        return self.v.shape[1]

    @property
    def t(self) -> np.ndarray:
        """Dense m x m symmetric tridiagonal projection V^T A V."""
        t = np.diag(self.alphas)
        if len(self.betas):
            t += np.diag(self.betas, 1) + np.diag(self.betas, -1)
        return t


def lanczos(a, v: np.ndarray, m_max: int, breakdown_tol: float = 1e-13) -> KrylovBasis:
    """Symmetric Lanczos with full reorthogonalization.

    Stops early on breakdown (invariant subspace found), in which case the
    projection is exact for any matrix function.
    """
    v = np.asarray(v, dtype=float)
    norm0 = float(np.linalg.norm(v))
    if norm0 == 0.0:
        raise MLDomainError("Lanczos start vector must be nonzero")
    n = v.shape[0]
    m_max = min(m_max, n)
    vs = np.zeros((n, m_max))
    alphas = np.zeros(m_max)
    betas = np.zeros(max(m_max - 1, 0))
    vs[:, 0] = v / norm0
    scale = _operator_scale(a)
    breakdown = False
    j = 0
    for j in range(m_max):
        w = a @ vs[:, j]
        if j > 0:
            w = w - betas[j - 1] * vs[:, j - 1]
        alphas[j] = float(vs[:, j] @ w)
        w = w - alphas[j] * vs[:, j]
        # full reorthogonalization: cheap at these subspace sizes and
        # removes the classical loss-of-orthogonality failure mode
        w = w - vs[:, : j + 1] @ (vs[:, : j + 1].T @ w)
        if j == m_max - 1:
            break
        beta = float(np.linalg.norm(w))
        if beta <= breakdown_tol * max(scale, 1.0):
            breakdown = True
            break
        betas[j] = beta
        vs[:, j + 1] = w / beta
    m = j + 1
    return KrylovBasis(
        v=vs[:, :m].copy(),
        alphas=alphas[:m].copy(),
        betas=betas[: max(m - 1, 0)].copy(),
        breakdown=breakdown,
    )


def _operator_scale(a) -> float:
    if sp.issparse(a):
        return float(np.abs(a).sum(axis=1).max()) if a.nnz else 0.0
    arr = np.asarray(a, dtype=float)
    return float(np.abs(arr).sum(axis=1).max()) if arr.size else 0.0


def ml_action_krylov(a, v: np.ndarray, p: MLParams, m_max: int = 100,
                     tol: float = 1e-10, return_info: bool = False):
    """Approximate E_{alpha,beta}(gamma A) v for symmetric A.

    The problem is projected on the Krylov subspace span{v, Av, ...}: with
    V_m an orthonormal basis and T_m = V_m^T A V_m, the iterate is
    ||v|| V_m E_{alpha,beta}(gamma T_m) e_1.  The subspace grows until two
    successive iterates differ by less than tol in a relative 2-norm sense,
    or until Lanczos breaks down (which makes the projection exact).

    Parameters
    ----------
    a : sparse or dense symmetric matrix
    v : start vector (nonzero)
    p : MLParams
    m_max : largest admissible subspace dimension (clipped to n)
    tol : relative stopping tolerance on successive iterates
    return_info : also return {"m": dimension used, "breakdown": bool}
    """
    v = np.asarray(v, dtype=float)
    norm0 = float(np.linalg.norm(v))
    if norm0 == 0.0:
        raise MLDomainError("ml_action_krylov requires a nonzero vector")
    n = v.shape[0]
    m_cap = min(m_max, n)

    basis = lanczos(a, v, m_cap)
    y_prev = None
    for m in range(1, basis.m + 1):
        t = np.diag(basis.alphas[:m])
        if m > 1:
            off = basis.betas[: m - 1]
            t += np.diag(off, 1) + np.diag(off, -1)
        f = ml_matrix_dense(t, p, tol=min(tol, 1e-12) * 1e-2, method="eig")
        y = norm0 * (basis.v[:, :m] @ f[:, 0])
        if not np.all(np.isfinite(y)):
            # scalar values fit in doubles but their combination does not
            raise MLOverflowError("Krylov iterate overflowed double precision")
        if y_prev is not None:
            # max-norm comparison: 2-norms of near-overflow iterates square
            # their entries and wrap to inf, silencing the test
            delta = float(np.abs(y - y_prev).max())
            if delta <= tol * max(float(np.abs(y).max()), 1e-300):
                info = {"m": m, "breakdown": False}
                return (y, info) if return_info else y
        y_prev = y
    if basis.breakdown or basis.m == n:
        info = {"m": basis.m, "breakdown": basis.breakdown}
        return (y_prev, info) if return_info else y_prev
    raise MLConvergenceError(
        f"Krylov iteration did not converge within m_max={m_max}"
    )


# Pade scaling-and-squaring tables (diagonal approximants of exp)
_PADE_ORDERS = (3, 5, 7, 9, 13)
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}


def _pade_uv(a: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    c = _PADE_COEFFS[order]
    eye = np.eye(n)
    if order < 13:
        powers = {0: eye, 2: a @ a}
        for k in range(4, order + 1, 2):
            powers[k] = powers[k - 2] @ powers[2]
        u = np.zeros_like(a)
        v = np.zeros_like(a)
        for k in range(1, order + 1, 2):  # odd coefficients build U
            u += c[k] * powers[k - 1]
        u = a @ u
        for k in range(0, order + 1, 2):  # even coefficients build V
            v += c[k] * powers[k]
        return u, v
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (c[13] * a6 + c[11] * a4 + c[9] * a2)
             + c[7] * a6 + c[5] * a4 + c[3] * a2 + c[1] * eye)
    v = (a6 @ (c[12] * a6 + c[10] * a4 + c[8] * a2)
         + c[6] * a6 + c[4] * a4 + c[2] * a2 + c[0] * eye)
    return u, v


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential by diagonal Pade approximants with scaling and
    squaring, order selected from the 1-norm."""
    dense = _as_dense(a)
    _check_square(dense)
    if not np.all(np.isfinite(dense)):
        raise MLDomainError("matrix_exp requires finite entries")
    norm1 = float(np.abs(dense).sum(axis=0).max()) if dense.size else 0.0
    squarings = 0
    scaled = dense
    for order in _PADE_ORDERS:
        if norm1 <= _PADE_THETA[order]:
            u, v = _pade_uv(scaled, order)
            break
    else:
        squarings = max(0, int(math.ceil(math.log2(norm1 / _PADE_THETA[13]))))
        scaled = dense / (2.0**squarings)
        u, v = _pade_uv(scaled, 13)
    try:
        f = np.linalg.solve(v - u, u + v)
    except np.linalg.LinAlgError as exc:
        raise MLConvergenceError(f"Pade solve failed: {exc}") from exc
    for _ in range(squarings):
        f = f @ f
    if not np.all(np.isfinite(f)):
        raise MLOverflowError("matrix exponential overflowed double precision")
    return f


def _sqrtm_denman_beavers(a: np.ndarray, max_iter: int = 60,
                          tol: float = 1e-14) -> np.ndarray:
    n = a.shape[0]
    y = a.copy()
    z = np.eye(n)
    for _ in range(max_iter):
        # determinant scaling accelerates the early iterations
        sign_y, logdet_y = np.linalg.slogdet(y)
        sign_z, logdet_z = np.linalg.slogdet(z)
        if sign_y != 0 and sign_z != 0:
            mu_scale = math.exp(-(logdet_y + logdet_z) / (2.0 * n))
            mu_scale = min(max(mu_scale, 1e-8), 1e8)
        else:
            mu_scale = 1.0
        y_s = mu_scale * y
        z_s = mu_scale * z
        try:
            y_next = 0.5 * (y_s + np.linalg.inv(z_s))
            z_next = 0.5 * (z_s + np.linalg.inv(y_s))
        except np.linalg.LinAlgError as exc:
            raise MLConvergenceError(f"square-root iteration broke down: {exc}") from exc
        delta = float(np.abs(y_next - y).max())
        y, z = y_next, z_next
        if delta <= tol * max(1.0, float(np.abs(y).max())):
            return y
    raise MLConvergenceError("Denman-Beavers iteration did not converge")


def _norm1(a: np.ndarray) -> float:
    return float(np.abs(a).sum(axis=0).max()) if a.size else 0.0


def _log_mercator(x: np.ndarray, tol: float = 1e-16) -> np.ndarray:
    # log(I + X); requires ||X||_1 < 1 (induced norm, so powers decay)
    total = np.zeros_like(x)
    power = x.copy()
    sign = 1.0
    for j in range(1, 200):
        term = (sign / j) * power
        total += term
        tn = float(np.abs(term).max())
        if tn <= tol * max(1.0, float(np.abs(total).max())):
            return total
        power = power @ x
        sign = -sign
    raise MLConvergenceError("matrix log series did not converge")


def matrix_log_principal(m, tol: float = 1e-11) -> np.ndarray:
    """Principal matrix logarithm by inverse scaling and squaring.

    Square roots are taken with the Denman-Beavers iteration until the
    argument is close enough to the identity for a short log series, then
    the result is scaled back by 2^k.  Symmetric positive definite inputs
    shortcut through the eigendecomposition.

    Raises
    ------
    MatrixLogBranchError
        Some eigenvalue lies on the closed negative real axis, so no
        principal determination exists.
    """
    dense = _as_dense(m)
    _check_square(dense)
    if not np.all(np.isfinite(dense)):
        raise MLDomainError("matrix_log_principal requires finite entries")
    n = dense.shape[0]
    scale = max(1.0, float(np.abs(dense).max()))
    eigs = np.linalg.eigvals(dense)
    on_negative_axis = (eigs.real <= 1e-13 * scale) & (np.abs(eigs.imag) <= 1e-12 * scale)
    if bool(on_negative_axis.any()):
        raise MatrixLogBranchError(
            "eigenvalue on the closed negative real axis; no principal logarithm"
        )
    if _is_symmetric(dense):
        w, q = sym_eig(dense)
        if w.min() <= 0.0:
            raise MatrixLogBranchError("symmetric input must be positive definite")
        return (q * np.log(w)) @ q.T
    x = dense
    eye = np.eye(n)
    k = 0
    # threshold in the induced 1-norm: submultiplicative, so the log series
    # is guaranteed to converge geometrically below it
    while _norm1(x - eye) > 0.25:
        if k >= 60:
            raise MLConvergenceError("inverse scaling and squaring stalled")
        x = _sqrtm_denman_beavers(x)
        k += 1
    return (2.0**k) * _log_mercator(x - eye)
