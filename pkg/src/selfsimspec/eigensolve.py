"""Self-contained symmetric eigensolvers tuned for graded matrices.

The matrices of this problem have entries spanning q^N, many orders of
magnitude, and the small eigenvalues carry the asymptotics that the rest
of the package verifies. Norm-based eigensolvers lose them; everything
here therefore works with relative thresholds:

* Sturm counts plus bisection with geometric midpoints for tridiagonals,
  with per-eigenvalue brackets isolated on a binary probe grid first so
  the iteration cap holds across the full dynamic range;
* cyclic Jacobi rotations with the relative threshold
  |a_pq| <= tol*sqrt(|a_pp*a_qq|) and Rutishauser diagonal updates for
  dense symmetric matrices, which attain high relative accuracy on graded
  positive definite inputs;
* a reverse (last-row-first) bidiagonal Cholesky for the pencil reduction,
  which keeps the reduced matrix graded-aligned where the forward
  factorization would destroy the small eigenvalues.

Iteration caps (120 bisection steps, 30 Jacobi sweeps, 50 inverse
iteration steps) are diagnostics, not tunables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateWeight,
    NonConvergence,
    NotPositiveDefinite,
    OutOfRange,
    RangeOverflow,
    ZeroEigenvalue,
)
from .operators import TridiagonalSymmetric

_PIVMIN = 1e-300
_MU_GUARD = 1e-290
_BISECT_CAP = 120
_SWEEP_CAP = 30
_INVIT_CAP = 50
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PencilProblem:
    """Generalized problem K y = lambda M y, K tridiagonal positive definite."""

    K: TridiagonalSymmetric
    M: np.ndarray
    order: int

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if len(M) != self.order or self.K.order != self.order:
            raise OutOfRange("pencil dimensions disagree")
        if np.any(M == 0.0):
            raise DegenerateWeight("mass matrix has a zero entry")
        object.__setattr__(self, "M", M)


@dataclass(frozen=True)
class EigenvalueList:
    """Ascending eigenvalues with the solver's own accuracy statement.

    residual_bound is relative: bracket width for bisection, off-diagonal
    Frobenius fraction for Jacobi. dropped counts reciprocal eigenvalues
    below the underflow guard that were excluded rather than inverted.
    """

    values: np.ndarray
    residual_bound: float
    method: str
    dropped: int = 0


def _off_squares(T: TridiagonalSymmetric) -> np.ndarray:
    off2 = T.offdiag * T.offdiag
    if not np.all(np.isfinite(off2)):
        raise RangeOverflow("squared off-diagonal overflows; reduce the order")
    return off2


def _sturm_counts(diag: np.ndarray, off2: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Eigenvalues strictly below each probe, by the LDL^T pivot signs."""
    xs = np.asarray(xs, dtype=float)
    cnt = np.zeros(xs.shape, dtype=np.int64)
    piv = diag[0] - xs
    cnt += piv < 0
    for i in range(1, len(diag)):
        small = np.abs(piv) < _PIVMIN
        if small.any():
            piv = np.where(small, np.where(piv < 0, -_PIVMIN, _PIVMIN), piv)
        piv = (diag[i] - xs) - off2[i - 1] / piv
        cnt += piv < 0
    return cnt


def sturm_count(T: TridiagonalSymmetric, x: float) -> int:
    """Number of eigenvalues of T strictly below x."""
    return int(_sturm_counts(T.diag, _off_squares(T), np.array([float(x)]))[0])


def _probe_grid(glo: float, ghi: float) -> np.ndarray:
    """Binary grid over the Gershgorin interval, refined toward zero.

    Halving toward zero from each endpoint isolates eigenvalues of either
    sign across the full dynamic range; brackets taken from this grid have
    bounded log-width, so geometric bisection needs ~45 steps regardless
    of magnitude.
    """
    probes = [glo, ghi]
    if ghi > 0.0:
        t = ghi
        floor = max(glo, _PIVMIN)
        while t / 2.0 > floor:
            t /= 2.0
            probes.append(t)
    if glo < 0.0:
        t = glo
        ceil = min(ghi, -_PIVMIN)
        while t / 2.0 < ceil:
            t /= 2.0
            probes.append(t)
    if glo < 0.0 < ghi:
        probes.append(0.0)
    return np.unique(np.asarray(probes))


def tridiag_eigs(
    T: TridiagonalSymmetric,
    index_range: tuple[int, int] | None = None,
    tol: float = 1e-13,
) -> EigenvalueList:
    """Eigenvalues lambda_k1..lambda_k2 (1-based, ascending) by bisection.

    Each eigenvalue is bracketed to relative width <= tol. Midpoints are
    geometric once the bracket has one sign, so the step count depends on
    the bracket's log-width, not its magnitude.
    """
    if tol < 4 * _EPS:
        raise OutOfRange(f"tol below 4*eps: {tol!r}")
    n = T.order
    if index_range is None:
        k1, k2 = 1, n
    else:
        k1, k2 = int(index_range[0]), int(index_range[1])
        if not 1 <= k1 <= k2 <= n:
            raise OutOfRange(f"index range {index_range!r} outside 1..{n}")
    diag = np.asarray(T.diag, dtype=float)
    off2 = _off_squares(T)
    rad = np.zeros(n)
    if n > 1:
        rad[:-1] += np.abs(T.offdiag)
        rad[1:] += np.abs(T.offdiag)
    glo = float(np.min(diag - rad))
    ghi = float(np.max(diag + rad))
    pad = 1e-10 * max(abs(glo), abs(ghi), 1.0)
    glo, ghi = glo - pad, ghi + pad

    probes = _probe_grid(glo, ghi)
    counts = _sturm_counts(diag, off2, probes)
    idxs = np.arange(k1, k2 + 1)
    los = np.empty(len(idxs))
    his = np.empty(len(idxs))
    for j, idx in enumerate(idxs):
        below = probes[counts < idx]
        above = probes[counts >= idx]
        los[j] = below[-1] if len(below) else glo
        his[j] = above[0] if len(above) else ghi

    active = np.ones(len(idxs), dtype=bool)
    for _ in range(_BISECT_CAP):
        if not active.any():
            break
        lo, hi = los[active], his[active]
        # geometric mean via separate roots: no spurious invalid/overflow
        # in the branches np.where discards
        geo = np.sqrt(np.abs(lo)) * np.sqrt(np.abs(hi))
        mid = np.where(lo > 0.0, geo, np.where(hi < 0.0, -geo, 0.5 * (lo + hi)))
        stuck = (mid <= lo) | (mid >= hi)
        mid = np.where(stuck, 0.5 * (lo + hi), mid)
        cnt = _sturm_counts(diag, off2, mid)
        go_down = cnt >= idxs[active]
        his[active] = np.where(go_down, mid, hi)
        los[active] = np.where(go_down, lo, mid)
        lo, hi = los[active], his[active]
        done = (hi - lo) <= tol * np.maximum(np.abs(lo), np.abs(hi)) + _PIVMIN
        done |= stuck
        sub = np.flatnonzero(active)
        active[sub[done]] = False
    if active.any():
        raise NonConvergence(f"bisection cap {_BISECT_CAP} reached")
    vals = 0.5 * (los + his)
    vals = np.maximum.accumulate(vals)  # enforce monotone output against roundoff
    return EigenvalueList(vals, residual_bound=tol, method="bisect")


def tridiag_cholesky(K: TridiagonalSymmetric) -> tuple[np.ndarray, np.ndarray]:
    """Lower bidiagonal L with L L^T = K: returns (diagonal, subdiagonal)."""
    d, e, n = K.diag, K.offdiag, K.order
    ld = np.empty(n)
    ls = np.empty(max(n - 1, 0))
    piv = float(d[0])
    if not piv > 0.0:
        raise NotPositiveDefinite(f"pivot {piv!r} at row 1")
    ld[0] = math.sqrt(piv)
    for i in range(1, n):
        ls[i - 1] = e[i - 1] / ld[i - 1]
        piv = float(d[i]) - ls[i - 1] * ls[i - 1]
        if not piv > 0.0:
            raise NotPositiveDefinite(f"pivot {piv!r} at row {i + 1}")
        ld[i] = math.sqrt(piv)
    return ld, ls


def _reverse_cholesky(K: TridiagonalSymmetric) -> tuple[np.ndarray, np.ndarray]:
    """Upper bidiagonal U with U U^T = K, eliminating from the last row up.

    On the geometrically graded stiffness matrices the forward factor
    mixes scales (the reduced pencil matrix then has a huge scaled
    condition number and the small eigenvalues lose ~8 digits); the
    reverse factor keeps row k scaled like q^k and the reduction stays
    accurate to machine precision. Returns (diagonal, superdiagonal).
    """
    d, e, n = K.diag, K.offdiag, K.order
    ud = np.empty(n)
    us = np.empty(max(n - 1, 0))
    piv = float(d[n - 1])
    if not piv > 0.0:
        raise NotPositiveDefinite(f"pivot {piv!r} at row {n}")
    ud[n - 1] = math.sqrt(piv)
    for i in range(n - 2, -1, -1):
        us[i] = e[i] / ud[i + 1]
        piv = float(d[i]) - us[i] * us[i]
        if not piv > 0.0:
            raise NotPositiveDefinite(f"pivot {piv!r} at row {i + 1}")
        ud[i] = math.sqrt(piv)
    return ud, us


def _upper_bidiag_inverse(ud: np.ndarray, us: np.ndarray) -> np.ndarray:
    """Dense inverse of the upper bidiagonal U, column by column."""
    n = len(ud)
    out = np.zeros((n, n))
    for j in range(n):
        out[j, j] = 1.0 / ud[j]
        for i in range(j - 1, -1, -1):
            out[i, j] = -us[i] * out[i + 1, j] / ud[i]
    return out


def _jacobi(S: np.ndarray, tol: float, want_vectors: bool):
    """Cyclic Jacobi with relative rotation threshold; returns (vals, vecs, off)."""
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n) if want_vectors else None
    rot_tol = max(1e-15, 4 * n * _EPS)
    fro = float(np.sqrt(np.sum(A * A)))
    for _ in range(_SWEEP_CAP):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= rot_tol * math.sqrt(abs(A[p, p] * A[q, q])):
                    continue
                rotated = True
                app, aqq = A[p, p], A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                # Rutishauser updates: exact rotation invariants on the 2x2 block
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                if want_vectors:
                    vp = V[:, p].copy()
                    vq = V[:, q].copy()
                    V[:, p] = c * vp - s * vq
                    V[:, q] = s * vp + c * vq
        off = A.copy()
        np.fill_diagonal(off, 0.0)
        off_fro = float(np.sqrt(np.sum(off * off)))
        if not rotated or off_fro <= tol * fro:
            break
    else:
        raise NonConvergence(f"Jacobi sweep cap {_SWEEP_CAP} reached")
    if off_fro > tol * fro and fro > 0.0:
        raise NonConvergence(f"off-diagonal norm {off_fro!r} above tol*|S| after convergence")
    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], (V[:, order] if want_vectors else None), off_fro


def dense_symmetric_eigs(S: np.ndarray, tol: float = 1e-13) -> EigenvalueList:
    """All eigenvalues of a dense symmetric matrix by cyclic Jacobi.

    Stops when the off-diagonal Frobenius norm falls below tol times the
    Frobenius norm of S (or when the relative rotation threshold leaves
    nothing to rotate, whichever is earlier). High relative accuracy on
    graded positive definite matrices is the point of this solver.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise OutOfRange(f"S must be square, got shape {S.shape}")
    scale = float(np.max(np.abs(S))) if S.size else 0.0
    if scale > 0.0 and float(np.max(np.abs(S - S.T))) > 1e-12 * scale:
        raise OutOfRange("S is not symmetric to 1e-12 relative")
    vals, _, off = _jacobi(0.5 * (S + S.T), tol, want_vectors=False)
    fro = float(np.sqrt(np.sum(S * S)))
    rel = off / fro if fro > 0.0 else 0.0
    return EigenvalueList(vals, residual_bound=rel, method="jacobi")


def pencil_eigenpairs(
    p: PencilProblem, tol: float = 1e-13
) -> tuple[np.ndarray, np.ndarray, EigenvalueList]:
    """Eigenvalues and eigenvectors of K y = lambda M y.

    Reduction: K = U U^T (reverse Cholesky), S = U^(-1) M U^(-T); then
    S z = mu z with mu = 1/lambda and y = U^(-T) z. Jacobi supplies z with
    componentwise accuracy, so the recovered y supports slope and form
    checks at relative accuracy. Returns (lambda ascending, y columns,
    EigenvalueList).
    """
    ud, us = _reverse_cholesky(p.K)
    Uinv = _upper_bidiag_inverse(ud, us)
    S = (Uinv * p.M) @ Uinv.T
    S = 0.5 * (S + S.T)
    mu, Z, off = _jacobi(S, tol, want_vectors=True)
    keep = np.abs(mu) >= _MU_GUARD
    dropped = int(np.sum(~keep))
    if not keep.any():
        raise ZeroEigenvalue("all reciprocal eigenvalues below the underflow guard")
    lam = 1.0 / mu[keep]
    Y = Uinv.T @ Z[:, keep]
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    Y = Y[:, order]
    Y = Y / np.linalg.norm(Y, axis=0)
    fro = float(np.sqrt(np.sum(S * S)))
    info = EigenvalueList(
        lam, residual_bound=(off / fro if fro > 0.0 else 0.0), method="pencil", dropped=dropped
    )
    return lam, Y, info


def solve_pencil(p: PencilProblem, tol: float = 1e-13) -> EigenvalueList:
    """All pencil eigenvalues, ascending; see pencil_eigenpairs."""
    return pencil_eigenpairs(p, tol)[2]


def _lu_factor(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partial-pivot LU in place; raises ZeroDivisionError on exact singularity."""
    LU = np.array(A, dtype=float)
    n = LU.shape[0]
    piv = np.arange(n)
    for k in range(n):
        j = k + int(np.argmax(np.abs(LU[k:, k])))
        if LU[j, k] == 0.0:
            raise ZeroDivisionError
        if j != k:
            LU[[k, j], :] = LU[[j, k], :]
            piv[[k, j]] = piv[[j, k]]
        LU[k + 1 :, k] /= LU[k, k]
        LU[k + 1 :, k + 1 :] -= np.outer(LU[k + 1 :, k], LU[k, k + 1 :])
    return LU, piv


def _lu_solve(LU: np.ndarray, piv: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = b[piv].astype(float)
    n = len(x)
    for k in range(1, n):
        x[k] -= LU[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - LU[k, k + 1 :] @ x[k + 1 :]) / LU[k, k]
    return x


def inverse_iteration(matrix, lam: float, tol: float = 1e-10) -> np.ndarray:
    """Unit eigenvector for an eigenvalue already known to accuracy ~tol.

    Accepts a TridiagonalSymmetric or a dense symmetric array. Returns v
    with ||(A - lam) v|| <= 10*tol*||A||; the sign is fixed so the largest
    component is positive.
    """
    A = matrix.dense() if isinstance(matrix, TridiagonalSymmetric) else np.asarray(matrix, dtype=float)
    n = A.shape[0]
    norm = float(np.max(np.sum(np.abs(A), axis=1)))
    shift = float(lam)
    v = np.full(n, 1.0 / math.sqrt(n))
    factored = None
    for _ in range(_INVIT_CAP):
        if factored is None:
            try:
                factored = _lu_factor(A - shift * np.eye(n))
            except ZeroDivisionError:
                # exact singularity: nudge the shift off the eigenvalue
                shift += 10.0 * _EPS * max(abs(shift), norm, 1.0)
                continue
        w = _lu_solve(*factored, v)
        wn = float(np.linalg.norm(w))
        if wn == 0.0 or not math.isfinite(wn):
            shift += 10.0 * _EPS * max(abs(shift), norm, 1.0)
            factored = None
            continue
        v = w / wn
        if v[int(np.argmax(np.abs(v)))] < 0.0:
            v = -v
        res = float(np.linalg.norm(A @ v - lam * v))
        if res <= 10.0 * tol * norm:
            return v
    raise NonConvergence(f"inverse iteration cap {_INVIT_CAP} reached")
