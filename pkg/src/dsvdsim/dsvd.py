"""Decentralized eigen- and singular-value decompositions.

All algorithms operate on per-node state and talk to the network only
through the consensus engine, so their communication cost is exactly what
the engine's ledger records:

* rank-one EVD updates for row-partitioned Gram accumulation, full and
  subspace-truncated (the truncated form augments the tracked basis with a
  representative direction orthonormal to it, so updates can leave the
  current range space);
* online SVD tracking of an implicit outer-product matrix sum x(t) y(t)^H,
  full and truncated;
* deflated power-method baselines for both settings.

State containers stack every node's local copy row-wise: ``eigvals[i]``
and ``sigma[i]`` are node i's local estimates, while ``u_rows[i]`` and
``vbreve_rows[i]`` are the single rows node i owns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import secular
from .consensus import ConsensusEngine, inner_product_consensus, sum_consensus

NEG_EIG_TOL = 1e-9       # tolerated eigenvalue negativity, relative to trace
RADICAND_TOL = 1e-9      # tolerated residual-norm negativity in truncation
ZERO_SIGMA_RTOL = 1e-12  # relative cutoff below which a singular value is 0


class DsvdError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# helpers


def centralized_svd_oracle(a: np.ndarray):
    """Dense SVD reference: returns (U, sigma, V) with descending sigma."""
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u, s, vh.conj().T


def canonical_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive.

    The algorithms leave a global phase per vector free; this convention
    makes cross-node and oracle comparisons deterministic.
    """
    v = np.array(vectors, dtype=complex, copy=True)
    if v.ndim == 1:
        v = v[:, None]
        squeeze = True
    else:
        squeeze = False
    for k in range(v.shape[1]):
        idx = int(np.argmax(np.abs(v[:, k])))
        a = v[idx, k]
        if np.abs(a) > 0:
            v[:, k] *= np.conj(a) / np.abs(a)
    return v[:, 0] if squeeze else v


def _sigma_from_eigvals(eigvals: np.ndarray) -> np.ndarray:
    """sqrt of Gram eigenvalues; small negatives (consensus noise) clamp
    to zero, anything worse is an error."""
    ev = np.atleast_2d(eigvals)
    trace = np.abs(ev).sum(axis=1, keepdims=True)
    if np.any(ev < -NEG_EIG_TOL * np.maximum(trace, 1.0)):
        raise DsvdError("negative Gram eigenvalue beyond the noise tolerance")
    out = np.sqrt(np.maximum(ev, 0.0))
    return out.reshape(np.shape(eigvals))


def _as_signal(x, n: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (n,):
        raise DsvdError(f"graph signal must have shape ({n},)")
    return x.astype(complex, copy=False)


# ---------------------------------------------------------------------------
# full-dimension rank-one EVD tracking


@dataclass
class EvdNodeState:
    """Per-node state of the rank-one EVD tracker, stacked over nodes.

    eigvals[i] is node i's local copy of all m eigenvalues; u_rows[i] is
    the row of the eigenvector matrix that node i owns (per-node storage
    stays O(m)).
    """

    eigvals: np.ndarray
    u_rows: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.u_rows.shape[0]

    @property
    def m(self) -> int:
        return self.u_rows.shape[1]


def init_evd_state(n_nodes: int, m: int | None = None) -> EvdNodeState:
    m = n_nodes if m is None else m
    return EvdNodeState(np.zeros((n_nodes, m)), np.eye(n_nodes, m, dtype=complex))


def _batched_rank_one(eigvals, zs, rho, uniform):
    """Solve the per-node local updates; one shared solve when the engine
    guarantees identical estimates at every node."""
    if uniform:
        vals, W, _ = secular.rank_one_update_batch(eigvals[:1], zs[:1], rho)
        return np.repeat(vals, eigvals.shape[0], axis=0), W[0]
    vals, W, _ = secular.rank_one_update_batch(eigvals, zs, rho)
    return vals, W


def _update_rows(rows, W):
    """rows[i] @ W[i] (or a shared W) for stacked per-node rows."""
    if W.ndim == 2:
        return rows @ W
    return np.einsum("nk,nkj->nj", rows, W)


def dra_evd_update(state: EvdNodeState, x, rho: float, engine: ConsensusEngine):
    """One rank-one update of the tracked EVD with the new sample x.

    Costs m consensus instances for the projection of x onto the tracked
    eigenbasis; the secular solve and the row update are node-local.
    """
    if rho == 0:
        raise DsvdError("rho must be nonzero")
    x = _as_signal(x, state.n_nodes)
    z = inner_product_consensus(engine, state.u_rows, x[:, None])[:, :, 0]
    vals, W = _batched_rank_one(state.eigvals, z, rho, engine.uniform)
    state.eigvals = vals
    state.u_rows = _update_rows(state.u_rows, W)
    return state


# ---------------------------------------------------------------------------
# SVD of a row-partitioned matrix


@dataclass
class Svd1Result:
    sigma: np.ndarray        # (n, m) per-node singular value estimates
    u_rows: np.ndarray       # (n, m) owned rows of U
    v: np.ndarray | None     # (n, T, k) per-node copies of right vectors
    v_columns: np.ndarray | None  # which singular-vector columns v holds


def dra_svd1(r_rows: np.ndarray, engine: ConsensusEngine,
             compute_right: bool = True) -> Svd1Result:
    """Rank-one-update SVD of a row-partitioned N x T matrix (N <= T).

    Feeds the T columns through the EVD tracker (each column is one
    network-wide rank-one update), then extracts singular values and, if
    requested, the right singular vectors.
    """
    r_rows = np.asarray(r_rows)
    n, t = r_rows.shape
    if n != engine.n_nodes:
        raise DsvdError("row count must equal the node count")
    if n > t:
        raise DsvdError("economy orientation requires N <= T")
    state = init_evd_state(n)
    for k in range(t):
        dra_evd_update(state, r_rows[:, k], 1.0, engine)
    sigma = _sigma_from_eigvals(state.eigvals)
    v = cols = None
    if compute_right:
        v, cols = right_singular_vectors(r_rows, state.u_rows, sigma, engine)
    return Svd1Result(sigma, state.u_rows, v, cols)


def right_singular_vectors(r_rows, u_rows, sigma, engine: ConsensusEngine,
                           columns=None):
    """Right singular vectors v_k = (R^H u_k) / sigma_k, all nodes.

    Costs T consensus instances per positive singular value. Columns whose
    singular value is (numerically) zero are not divided; they are filled
    by a node-local orthonormal completion of the computed columns, which
    is consistent across nodes because its inputs are.

    Returns (v, columns) where v[i] is node i's (T, k) copy.
    """
    r_rows = np.asarray(r_rows)
    n, t = r_rows.shape
    sigma = np.asarray(sigma)
    if columns is None:
        columns = np.arange(u_rows.shape[1])
    columns = np.asarray(columns, dtype=int)
    sig = sigma[:, columns]
    positive = sig.max(axis=0) > ZERO_SIGMA_RTOL * max(sigma.max(), 1e-300)
    v = np.zeros((n, t, len(columns)), dtype=complex)
    if np.any(positive):
        est = inner_product_consensus(engine, r_rows, u_rows[:, columns[positive]])
        v[:, :, positive] = est / sig[:, None, positive]
    if np.any(~positive):
        k_zero = np.nonzero(~positive)[0]
        for i in range(n):
            known = v[i][:, positive]
            q = np.linalg.qr(known, mode="complete")[0]
            v[i][:, k_zero] = q[:, known.shape[1]:known.shape[1] + len(k_zero)]
    return v, columns


# ---------------------------------------------------------------------------
# truncated tracking with a representative direction


@dataclass
class TruncatedEvdState:
    """Tracks only the d principal eigenpairs; the representative slot is
    rebuilt from each new sample and re-zeroed after the update."""

    eigvals: np.ndarray  # (n, d) nonnegative, descending
    u_rows: np.ndarray   # (n, d)

    @property
    def n_nodes(self) -> int:
        return self.u_rows.shape[0]

    @property
    def d(self) -> int:
        return self.u_rows.shape[1]


def init_truncated_state(n_nodes: int, d: int) -> TruncatedEvdState:
    if not 1 <= d < n_nodes:
        raise DsvdError("need 1 <= d < n_nodes")
    return TruncatedEvdState(np.zeros((n_nodes, d)),
                             np.eye(n_nodes, d, dtype=complex))


def _augmented_projection(u_rows, x, engine):
    """Projection of x onto [tracked basis, representative direction].

    Returns (z_aug, p_rows): the d+1 projection coefficients per node and
    each node's row of the representative unit vector. Costs d+1 instances
    (d for the basis projection, one for ||x||^2).
    """
    n, d = u_rows.shape
    z_d = inner_product_consensus(engine, u_rows, x[:, None])[:, :, 0]
    s = sum_consensus(engine, np.abs(x) ** 2).real
    rad = s - np.sum(np.abs(z_d) ** 2, axis=1)
    if np.any(rad < -RADICAND_TOL * np.maximum(s, 1.0)):
        raise DsvdError("residual norm went negative: consensus diverged")
    eta = np.sqrt(np.maximum(rad, 0.0))
    resid = x - np.einsum("nk,nk->n", u_rows, z_d)
    safe = eta > 1e-8 * np.sqrt(np.maximum(s, 1e-300))
    p_rows = np.where(safe, resid / np.where(safe, eta, 1.0), 0.0)
    z_aug = np.concatenate([z_d, np.where(safe, eta, 0.0)[:, None]], axis=1)
    return z_aug, p_rows


def dtra_evd_update(tstate: TruncatedEvdState, x, rho: float,
                    engine: ConsensusEngine):
    """Truncated rank-one update: project the sample onto the tracked basis
    plus the representative direction, solve the (d+1)-dimensional local
    problem, keep the d largest eigenpairs. Costs d+1 consensus instances.
    """
    if rho <= 0:
        raise DsvdError("truncated tracking assumes Gram-type updates (rho > 0)")
    x = _as_signal(x, tstate.n_nodes)
    d = tstate.d
    z_aug, p_rows = _augmented_projection(tstate.u_rows, x, engine)
    lam_aug = np.concatenate([tstate.eigvals, np.zeros((tstate.n_nodes, 1))], axis=1)
    vals, W = _batched_rank_one(lam_aug, z_aug, rho, engine.uniform)
    u_aug = np.concatenate([tstate.u_rows, p_rows[:, None]], axis=1)
    u_new = _update_rows(u_aug, W)
    tstate.eigvals = vals[:, :d]
    tstate.u_rows = u_new[:, :d]
    return tstate


def dtra_svd1(r_rows: np.ndarray, d: int, engine: ConsensusEngine,
              compute_right: bool = True) -> Svd1Result:
    """Truncated SVD of a row-partitioned matrix: (2d+1)T instances total
    with right vectors ((d+1) per update plus d columns at T each)."""
    r_rows = np.asarray(r_rows)
    n, t = r_rows.shape
    tstate = init_truncated_state(n, d)
    for k in range(t):
        dtra_evd_update(tstate, r_rows[:, k], 1.0, engine)
    sigma = _sigma_from_eigvals(tstate.eigvals)
    v = cols = None
    if compute_right:
        v, cols = right_singular_vectors(r_rows, tstate.u_rows, sigma, engine)
    return Svd1Result(sigma, tstate.u_rows, v, cols)


# ---------------------------------------------------------------------------
# online SVD of an implicit outer-product sum


@dataclass
class Svd2NodeState:
    """State of the outer-product SVD tracker: every node knows all
    singular values and owns one row each of U and of the scaled right
    matrix V_breve = V Sigma."""

    sigma: np.ndarray        # (n, m) per-node singular-value copies
    u_rows: np.ndarray       # (n, m)
    vbreve_rows: np.ndarray  # (n, m)

    @property
    def n_nodes(self) -> int:
        return self.u_rows.shape[0]

    def right_rows(self) -> np.ndarray:
        """Owned rows of V = V_breve Sigma^-1 (zero-sigma columns zeroed)."""
        scale = np.where(self.sigma > ZERO_SIGMA_RTOL * max(self.sigma.max(), 1e-300),
                         self.sigma, np.inf)
        return self.vbreve_rows / scale


def init_svd2_state(n_nodes: int) -> Svd2NodeState:
    return Svd2NodeState(np.zeros((n_nodes, n_nodes)),
                         np.eye(n_nodes, dtype=complex),
                         np.zeros((n_nodes, n_nodes), dtype=complex))


def _gamma_phi(beta):
    """Per-node eigendecomposition of [[beta, 1], [1, 0]]: two real
    eigenvalues (gamma1 > 0 > gamma2, det = -1) and unit eigenvectors."""
    disc = np.sqrt(beta * beta + 4.0)
    g1 = 0.5 * (beta + disc)
    g2 = 0.5 * (beta - disc)
    # eigenvector for gamma: (1, gamma - beta) normalized; the first
    # component never vanishes because disc > |beta|
    n1 = np.sqrt(1.0 + (g1 - beta) ** 2)
    n2 = np.sqrt(1.0 + (g2 - beta) ** 2)
    phi11, phi21 = 1.0 / n1, (g1 - beta) / n1
    phi12, phi22 = 1.0 / n2, (g2 - beta) / n2
    return g1, g2, phi11, phi21, phi12, phi22


def _scaled_right_projection(vbreve_rows, sigma, y, engine):
    """z_beta = V(t-1)^H y realized over the stored scaled rows with local
    rescaling; components of numerically zero singular values are zeroed."""
    raw = inner_product_consensus(engine, vbreve_rows, y[:, None])[:, :, 0]
    cutoff = ZERO_SIGMA_RTOL * max(sigma.max(), 1e-300)
    nz = sigma > cutoff
    return np.where(nz, raw / np.where(nz, sigma, 1.0), 0.0)


def dra_svd2_update(state: Svd2NodeState, x, y, engine: ConsensusEngine):
    """Track the SVD after appending the outer product x y^H.

    The Gram update splits into two consecutive rank-one modifications with
    opposite signs; the scaled right-vector rows update locally from the
    two local eigenvector matrices. Costs 4N+1 consensus instances.
    """
    n = state.n_nodes
    x = _as_signal(x, n)
    y = _as_signal(y, n)
    beta = sum_consensus(engine, np.abs(y) ** 2).real
    g1, g2, phi11, phi21, phi12, phi22 = _gamma_phi(beta)

    z_beta = _scaled_right_projection(state.vbreve_rows, state.sigma, y, engine)
    ytilde = np.einsum("nk,nk->n", state.u_rows, state.sigma * z_beta)
    q1 = phi11 * x + phi21 * ytilde
    q2 = phi12 * x + phi22 * ytilde

    z1 = inner_product_consensus(engine, state.u_rows, q1[:, None])[:, :, 0]
    lam1, w1 = _batched_rank_one(state.sigma ** 2, z1, g1 if not engine.uniform else g1[0],
                                 engine.uniform)
    u_mid = _update_rows(state.u_rows, w1)

    z2 = inner_product_consensus(engine, u_mid, q2[:, None])[:, :, 0]
    lam2, w2 = _batched_rank_one(lam1, z2, g2 if not engine.uniform else g2[0],
                                 engine.uniform)
    u_new = _update_rows(u_mid, w2)
    sigma_new = _sigma_from_eigvals(lam2)

    xbreve = inner_product_consensus(engine, u_new, x[:, None])[:, :, 0]
    # V_breve(t) = V_breve(t-1) Ubreve^H + y xbreve^H with
    # Ubreve = W''^H W'^H, so Ubreve^H = W' W''
    vb = _update_rows(_update_rows(state.vbreve_rows, w1), w2)
    vb += y[:, None] * np.conj(xbreve)

    state.sigma = sigma_new
    state.u_rows = u_new
    state.vbreve_rows = vb
    return state


@dataclass
class TruncatedSvd2State:
    """Truncated outer-product SVD tracker: d principal singular values,
    owned rows of the d tracked left and scaled-right vectors."""

    sigma: np.ndarray        # (n, d)
    u_rows: np.ndarray       # (n, d)
    vbreve_rows: np.ndarray  # (n, d)

    @property
    def n_nodes(self) -> int:
        return self.u_rows.shape[0]

    @property
    def d(self) -> int:
        return self.u_rows.shape[1]

    def right_rows(self) -> np.ndarray:
        scale = np.where(self.sigma > ZERO_SIGMA_RTOL * max(self.sigma.max(), 1e-300),
                         self.sigma, np.inf)
        return self.vbreve_rows / scale


def init_truncated_svd2_state(n_nodes: int, d: int) -> TruncatedSvd2State:
    if not 1 <= d < n_nodes:
        raise DsvdError("need 1 <= d < n_nodes")
    return TruncatedSvd2State(np.zeros((n_nodes, d)),
                              np.eye(n_nodes, d, dtype=complex),
                              np.zeros((n_nodes, d), dtype=complex))


def dtra_svd2_update(tstate: TruncatedSvd2State, x, y, engine: ConsensusEngine):
    """Truncated outer-product update in the augmented (d+1)-basis.

    Both rank-one applications and the left projection of x run in the
    augmented basis; everything the scaled right-row update needs from the
    augmented bases is reconstructed locally. Costs 4(d+1) instances.
    """
    n, d = tstate.u_rows.shape
    x = _as_signal(x, n)
    y = _as_signal(y, n)
    beta = sum_consensus(engine, np.abs(y) ** 2).real                      # 1
    g1, g2, phi11, phi21, phi12, phi22 = _gamma_phi(beta)

    z_beta = _scaled_right_projection(tstate.vbreve_rows, tstate.sigma, y,
                                      engine)                              # d
    szb = tstate.sigma * z_beta
    ytilde = np.einsum("nk,nk->n", tstate.u_rows, szb)
    q1 = phi11 * x + phi21 * ytilde
    q2 = phi12 * x + phi22 * ytilde

    # first rank-one update in basis B1 = [tracked U, p1]
    z1, p1 = _augmented_projection(tstate.u_rows, q1, engine)              # d+1
    lam_aug = np.concatenate([tstate.sigma ** 2, np.zeros((n, 1))], axis=1)
    lam1, w1 = _batched_rank_one(lam_aug, z1, g1 if not engine.uniform else g1[0],
                                 engine.uniform)
    u1_full = _update_rows(np.concatenate([tstate.u_rows, p1[:, None]], axis=1), w1)
    u1 = u1_full[:, :d]

    # second rank-one update in basis B2 = [truncated U', p2]
    z2, p2 = _augmented_projection(u1, q2, engine)                         # d+1
    lam1_aug = np.concatenate([lam1[:, :d], np.zeros((n, 1))], axis=1)
    lam2, w2 = _batched_rank_one(lam1_aug, z2, g2 if not engine.uniform else g2[0],
                                 engine.uniform)
    u2_full = _update_rows(np.concatenate([u1, p2[:, None]], axis=1), w2)
    sigma_full = _sigma_from_eigvals(lam2)

    xbreve = inner_product_consensus(engine, u2_full, x[:, None])[:, :, 0]  # d+1

    # scaled right-row update against the augmented previous basis B1
    # (whose representative direction carries a zero singular value):
    # Ubreve_aug = U_full(t)^H B1 = W''^H [ (W'[:, :d])^H ; p2^H B1 ]
    w1b = np.broadcast_to(w1, (n, d + 1, d + 1)) if w1.ndim == 2 else w1
    w2b = np.broadcast_to(w2, (n, d + 1, d + 1)) if w2.ndim == 2 else w2
    top = np.conj(w1b[:, :, :d]).transpose(0, 2, 1)        # (n, d, d+1)
    b1x = (z1 - phi21[:, None] * np.concatenate([szb, np.zeros((n, 1))], axis=1)) \
        / phi11[:, None]
    a_q2 = phi12[:, None] * b1x \
        + phi22[:, None] * np.concatenate([szb, np.zeros((n, 1))], axis=1)
    eta2 = z2[:, d].real
    safe = eta2 > 0
    num = np.conj(a_q2) - np.einsum("nk,nkj->nj", np.conj(z2[:, :d]), top)
    p2h_b1 = np.where(safe[:, None], num / np.where(safe, eta2, 1.0)[:, None], 0.0)
    b2h_b1 = np.concatenate([top, p2h_b1[:, None, :]], axis=1)  # (n, d+1, d+1)
    ubreve_aug = np.einsum("nkj,nkl->njl", np.conj(w2b), b2h_b1)
    vb_aug = np.concatenate([tstate.vbreve_rows, np.zeros((n, 1))], axis=1)
    vb_new = np.einsum("nk,njk->nj", vb_aug, np.conj(ubreve_aug))
    vb_new += y[:, None] * np.conj(xbreve)

    tstate.sigma = sigma_full[:, :d]
    tstate.u_rows = u2_full[:, :d]
    tstate.vbreve_rows = vb_new[:, :d]
    return tstate


# ---------------------------------------------------------------------------
# power-method baselines


@dataclass
class PmSvd1Result:
    sigma: np.ndarray    # (n, k) per-node singular-value estimates
    u_rows: np.ndarray   # (n, k) owned entries of the left vectors
    v: np.ndarray | None
    v_columns: np.ndarray | None


def dpm_svd1(r_rows: np.ndarray, p_iters: int, n_vectors: int,
             engine: ConsensusEngine, rng: np.random.Generator,
             stop_below: float | None = None,
             compute_right: bool = False) -> PmSvd1Result:
    """Deflated decentralized power method on the row Gram matrix.

    Each multiply consensus-projects the iterate onto the T data columns
    (T instances); deflation against previously found vectors costs one
    instance each; the iterate is normalized once per vector at the end
    (one instance), followed by one extra multiply and one instance for the
    eigenvalue. Between iterations the iterate is rescaled by 1/max|R^H u|,
    a quantity every node already shares, to keep the magnitude bounded
    without extra communication.

    ``stop_below`` drops a computed vector and stops early once its
    singular value falls at or below the threshold.
    """
    r_rows = np.asarray(r_rows)
    n, t = r_rows.shape
    if p_iters < 1 or not 1 <= n_vectors <= n:
        raise DsvdError("need p_iters >= 1 and 1 <= n_vectors <= n")
    complex_data = np.iscomplexobj(r_rows)
    u_cols = []
    sig_cols = []
    for _ in range(n_vectors):
        u = rng.standard_normal(n)
        if complex_data:
            u = u + 1j * rng.standard_normal(n)
        u = u.astype(complex)
        for _ in range(p_iters):
            proj = inner_product_consensus(engine, r_rows, u[:, None])[:, :, 0]
            u_next = np.einsum("nt,nt->n", r_rows, proj)
            for uq, _sq in u_cols:
                coef = sum_consensus(engine, np.conj(uq) * u_next)
                u_next = u_next - uq * coef
            scale = np.abs(proj).max(axis=1)
            u = u_next / np.maximum(scale, 1e-300)
        nrm2 = sum_consensus(engine, np.abs(u) ** 2).real
        u = u / np.sqrt(np.maximum(nrm2, 1e-300))
        proj = inner_product_consensus(engine, r_rows, u[:, None])[:, :, 0]
        u_next = np.einsum("nt,nt->n", r_rows, proj)
        lam = sum_consensus(engine, np.conj(u) * u_next).real
        sig = np.sqrt(np.maximum(lam, 0.0))
        if stop_below is not None and sig.max() <= stop_below:
            break
        u_cols.append((u, sig))
        sig_cols.append(sig)
    if not u_cols:
        empty = np.zeros((n, 0))
        return PmSvd1Result(empty, empty.astype(complex), None, None)
    sigma = np.stack(sig_cols, axis=1)
    u_rows = np.stack([u for u, _ in u_cols], axis=1)
    v = cols = None
    if compute_right:
        v, cols = right_singular_vectors(r_rows, u_rows, sigma, engine)
    return PmSvd1Result(sigma, u_rows, v, cols)


def dpm_svd2(x_rows: np.ndarray, y_rows: np.ndarray, p_iters: int, alpha: float,
             engine: ConsensusEngine, rng: np.random.Generator):
    """Damped interchanging power iteration for the dominant singular
    triplet of sum_t x(t) y(t)^H. Batch algorithm: both full sample rows
    stay available at the nodes. Costs P(2T+2) + 2T consensus instances.

    Returns per-node (sigma1, u1 entries, v1 entries).
    """
    x_rows = np.asarray(x_rows)
    y_rows = np.asarray(y_rows)
    n, t = x_rows.shape
    if y_rows.shape != (n, t):
        raise DsvdError("sample blocks must have identical shapes")
    if not 0 < alpha < 1:
        raise DsvdError("need 0 < alpha < 1")
    u = (rng.standard_normal(n) + 1j * rng.standard_normal(n)).astype(complex)
    v = (rng.standard_normal(n) + 1j * rng.standard_normal(n)).astype(complex)
    if not (np.iscomplexobj(x_rows) or np.iscomplexobj(y_rows)):
        u, v = u.real.astype(complex), v.real.astype(complex)
    for _ in range(p_iters):
        vhat = inner_product_consensus(engine, y_rows, v[:, None])[:, :, 0]
        uhat = inner_product_consensus(engine, x_rows, u[:, None])[:, :, 0]
        u_new = np.einsum("nt,nt->n", x_rows, vhat) + alpha * u
        v_new = np.einsum("nt,nt->n", y_rows, uhat) + alpha * v
        nu = sum_consensus(engine, np.abs(u_new) ** 2).real
        nv = sum_consensus(engine, np.abs(v_new) ** 2).real
        u = u_new / np.sqrt(np.maximum(nu, 1e-300))
        v = v_new / np.sqrt(np.maximum(nv, 1e-300))
    uhat = inner_product_consensus(engine, x_rows, u[:, None])[:, :, 0]
    vhat = inner_product_consensus(engine, y_rows, v[:, None])[:, :, 0]
    sigma1 = np.abs(np.einsum("nt,nt->n", np.conj(uhat), vhat))
    return sigma1, u, v
