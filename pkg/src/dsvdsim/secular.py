"""Eigendecomposition of a rank-one modified diagonal matrix.

Local (per-node) building block of the decentralized SVD algorithms: every
network-wide update reduces to diagonalizing ``diag(lam) + rho z z^H`` in
each node. Roots of the secular function are found by rational-function
approximation; deflation handles negligible z components and (near-)equal
diagonal entries; ``unify_sort_order`` makes the final ordering identical
across nodes whose local copies differ by tiny consensus errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_TOL = 1e-12
DEFAULT_DEFLATION_TOL = 1e-12
DEFAULT_TIE_TOL = 1e-6
MAX_ITER = 50


class SecularConvergenceError(RuntimeError):
    """Root iteration hit the iteration cap; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class RankOneProblem:
    """Deflated input: strictly descending lambdas, nonzero z, nonzero rho."""

    lambdas: np.ndarray
    z: np.ndarray
    rho: float

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        z = np.asarray(self.z, dtype=complex)
        if lam.ndim != 1 or z.shape != lam.shape:
            raise ValueError("lambdas and z must be 1-d with equal length")
        if lam.size == 0:
            raise ValueError("empty problem")
        if np.any(np.diff(lam) >= 0):
            raise ValueError("lambdas must be strictly descending")
        if np.any(np.abs(z) == 0):
            raise ValueError("deflated problem must have nonzero z entries")
        if self.rho == 0:
            raise ValueError("rho must be nonzero")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "z", z)

    @property
    def size(self) -> int:
        return self.lambdas.size


@dataclass(frozen=True)
class RankOneEvd:
    """Result of a rank-one diagonal update: eigvals descending (canonical
    tie order), eigenvector matrix W, the applied sort permutation, and the
    per-root iteration counts of the secular solver."""

    eigvals: np.ndarray
    W: np.ndarray
    perm: np.ndarray
    iterations: np.ndarray


def solve_secular_root(problem: RankOneProblem, index: int, tol: float = DEFAULT_TOL,
                       with_iterations: bool = False):
    """The ``index``-th largest eigenvalue of diag(lambdas) + rho z z^H.

    ``index`` is 0-based. For rho > 0 the root lies between lambdas[index]
    and lambdas[index-1] (top interval capped at lambda_1 + rho z^H z); the
    rho < 0 case is solved through the spectrum negation mapping.
    """
    m = problem.size
    if not 0 <= index < m:
        raise ValueError(f"index {index} out of range for size {m}")
    lam = problem.lambdas
    w2 = np.abs(problem.z) ** 2
    rho = float(problem.rho)
    if rho < 0:
        lam = -lam[::-1]
        w2 = w2[::-1]
        rho = -rho
        j = m - 1 - index
    else:
        j = index
    delta = np.empty(m)
    if m == 1:
        root, niter, conv = lam[0] + rho * w2[0], 1, True
    else:
        root, niter, conv = _kernels._secular_root(lam, w2, rho, j, tol, MAX_ITER, delta)
    if not conv:
        raise SecularConvergenceError(
            f"secular root {index} did not converge within {MAX_ITER} iterations",
            last_iterate=root if problem.rho > 0 else -root)
    if problem.rho < 0:
        root = -root
    return (root, niter) if with_iterations else root


def rank_one_diag_evd(lambdas, z, rho: float, tol: float = DEFAULT_TOL,
                      deflation_tol: float = DEFAULT_DEFLATION_TOL,
                      tie_tol: float = DEFAULT_TIE_TOL) -> RankOneEvd:
    """Full EVD of diag(lambdas) + rho z z^H.

    ``lambdas`` must be descending up to ties; duplicates and negligible z
    entries are deflated before root finding. Output is sorted descending
    with the node-consistent canonical tie order.
    """
    lam = np.ascontiguousarray(lambdas, dtype=np.float64)
    zz = np.ascontiguousarray(z, dtype=np.complex128)
    if lam.ndim != 1 or zz.shape != lam.shape:
        raise ValueError("lambdas and z must be 1-d with equal length")
    if rho == 0:
        raise ValueError("rho must be nonzero")
    vals, W, niter, ok = _kernels.rank_one_evd_batch(
        lam[None, :], zz[None, :], np.array([float(rho)]), tol, deflation_tol,
        MAX_ITER)
    if not ok[0]:
        raise SecularConvergenceError("secular solver did not converge")
    svals, sW, perm = unify_sort_order(vals[0], W[0], tie_tol)
    return RankOneEvd(svals, sW, perm, niter[0][perm])


def unify_sort_order(eigvals, W=None, tie_tol: float = DEFAULT_TIE_TOL):
    """Descending sort with a tie rule every node resolves identically.

    Walking the value-sorted sequence, neighbours closer than ``tie_tol``
    are chained into one class, and each class is emitted in original-index
    order. Local copies of the same spectrum that differ by much less than
    ``tie_tol`` therefore produce the same permutation in every node.

    Returns (sorted eigvals, W with columns permuted, permutation).
    """
    v = np.asarray(eigvals, dtype=float)
    perm = _unify_perm(v[None, :], tie_tol)[0]
    sv = v[perm]
    if W is None:
        return sv, None, perm
    return sv, np.asarray(W)[:, perm], perm


def _unify_perm(vals: np.ndarray, tie_tol: float) -> np.ndarray:
    """Canonical permutations for a batch of spectra, shape (B, m)."""
    B, m = vals.shape
    order = np.argsort(-vals, axis=1, kind="stable")
    sv = np.take_along_axis(vals, order, axis=1)
    boundary = np.empty((B, m), dtype=np.int64)
    boundary[:, 0] = 1
    boundary[:, 1:] = (sv[:, :-1] - sv[:, 1:]) > tie_tol
    gid = np.cumsum(boundary, axis=1)
    key = gid * (m + 1) + order
    fix = np.argsort(key, axis=1, kind="stable")
    return np.take_along_axis(order, fix, axis=1)


def rank_one_update_batch(lams: np.ndarray, zs: np.ndarray, rho,
                          tol: float = DEFAULT_TOL,
                          deflation_tol: float = DEFAULT_DEFLATION_TOL,
                          tie_tol: float = DEFAULT_TIE_TOL):
    """Per-node batch of rank-one diagonal EVDs with canonical ordering.

    lams, zs: (B, m) stacked local copies; rho a scalar or per-problem
    array. Returns (eigvals (B, m), W (B, m, m), iterations (B, m)) already
    in unified descending order.
    """
    lams = np.ascontiguousarray(lams, dtype=np.float64)
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    rhos = np.broadcast_to(np.asarray(rho, dtype=np.float64), (lams.shape[0],))
    vals, W, niter, ok = _kernels.rank_one_evd_batch(
        lams, zs, np.ascontiguousarray(rhos), tol, deflation_tol, MAX_ITER)
    if not np.all(ok):
        bad = int(np.nonzero(~ok)[0][0])
        raise SecularConvergenceError(f"secular solver did not converge in problem {bad}")
    perms = _unify_perm(vals, tie_tol)
    vals = np.take_along_axis(vals, perms, axis=1)
    niter = np.take_along_axis(niter, perms, axis=1)
    W = np.take_along_axis(W, perms[:, None, :], axis=2)
    return vals, W, niter
