"""Application pipelines built on the decentralized SVD algorithms.

Sensor localization: complete a partially observed Euclidean distance
matrix by decentralized singular value thresholding, recover coordinates
with node-local classical MDS, and align them to anchor positions with a
consensus-assisted orthogonal Procrustes step.

Passive radar: simulate reference/surveillance snapshot streams, run the
cross-correlation detector on the empirical cross-covariance through a
chosen SVD backend, and estimate ROC curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsvd, secular
from .consensus import ConsensusEngine, inner_product_consensus, sum_consensus


class AppError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Euclidean distance matrices


def edm_from_coords(coords: np.ndarray) -> np.ndarray:
    """Squared-distance matrix of the h x N coordinate matrix."""
    x = np.asarray(coords, dtype=float)
    if not np.all(np.isfinite(x)):
        raise AppError("coordinates must be finite")
    gram = x.T @ x
    d = np.diag(gram)
    r = d[:, None] - 2.0 * gram + d[None, :]
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 0.0)
    return np.maximum(r, 0.0)


@dataclass
class EdmProblem:
    coords: np.ndarray       # (h, n) true positions
    edm: np.ndarray          # (n, n) squared distances
    mask: np.ndarray         # (n, n) bool, observed entries (symmetric)
    anchors: np.ndarray      # indices of anchor nodes


def make_edm_problem(coords, mask, n_anchors: int, rng) -> EdmProblem:
    coords = np.asarray(coords, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    n = coords.shape[1]
    h = coords.shape[0]
    if n_anchors < h + 1:
        raise AppError("need at least h+1 anchors")
    anchors = np.sort(rng.choice(n, size=n_anchors, replace=False))
    return EdmProblem(coords, edm_from_coords(coords), mask, anchors)


# ---------------------------------------------------------------------------
# decentralized singular value thresholding


@dataclass
class SvtConfig:
    tau: float
    mu: float
    max_iter: int

    def __post_init__(self):
        if self.tau <= 0 or self.mu <= 0 or self.max_iter < 1:
            raise AppError("need tau > 0, mu > 0 and max_iter >= 1")


@dataclass
class SvtResult:
    rtilde_rows: np.ndarray   # (n, n) completed-matrix rows (node i owns row i)
    sigma: np.ndarray         # (n, k) per-node singular values (final shrinkage)
    u_rows: np.ndarray        # (n, k) owned rows of U
    v: np.ndarray             # (n, n_cols, k) per-node right-vector copies
    v_columns: np.ndarray     # column indices carried by v


def _svt_backend_svd(r_rows, engine, backend, params, tau, rng):
    """One distributed SVD for the shrinkage step; right vectors are only
    requested for components that survive the threshold."""
    if backend == "dra_svd1":
        res = dsvd.dra_svd1(r_rows, engine, compute_right=False)
        sigma, u_rows = res.sigma, res.u_rows
    elif backend == "dtra_evd":
        res = dsvd.dtra_svd1(r_rows, params["d"], engine, compute_right=False)
        sigma, u_rows = res.sigma, res.u_rows
    elif backend == "dpm_svd1":
        res = dsvd.dpm_svd1(r_rows, params["p_iters"], r_rows.shape[0], engine,
                            rng, stop_below=tau)
        sigma, u_rows = res.sigma, res.u_rows
        if sigma.shape[1] == 0:
            return sigma, u_rows, np.zeros((r_rows.shape[0], r_rows.shape[1], 0)), \
                np.array([], dtype=int)
    else:
        raise AppError(f"unknown SVT backend {backend!r}")
    above = np.nonzero(sigma.max(axis=0) > tau)[0]
    v, cols = dsvd.right_singular_vectors(r_rows, u_rows, sigma, engine,
                                          columns=above)
    return sigma, u_rows, v, cols


def d_svt(masked_rows: np.ndarray, mask_rows: np.ndarray, cfg: SvtConfig,
          engine: ConsensusEngine, svd_backend: str = "dra_svd1",
          backend_params: dict | None = None,
          rng: np.random.Generator | None = None) -> SvtResult:
    """Low-rank completion by iterating shrink-then-correct on the rows.

    Each node keeps one row of the iterate; the shrinkage step runs the
    configured distributed SVD, multiplies its row of U into the right
    vectors as they arrive, and the data-consistency correction is purely
    local.
    """
    masked_rows = np.asarray(masked_rows, dtype=float)
    mask_rows = np.asarray(mask_rows, dtype=bool)
    n = masked_rows.shape[0]
    if masked_rows.shape != mask_rows.shape:
        raise AppError("data and mask shapes differ")
    params = backend_params or {}
    rng = rng if rng is not None else np.random.default_rng(0)
    r = np.zeros_like(masked_rows)
    rtilde = np.zeros_like(masked_rows)
    sigma = u_rows = v = cols = None
    for _ in range(cfg.max_iter):
        sigma, u_rows, v, cols = _svt_backend_svd(r, engine, svd_backend,
                                                  params, cfg.tau, rng)
        if len(cols):
            w = np.maximum(sigma[:, cols] - cfg.tau, 0.0)     # (n, k)
            # node i's row of the shrunk matrix: sum_k w_k U[i,k] v_k^T
            rtilde = np.einsum("nk,nk,ntk->nt", w, u_rows[:, cols].real, v.real)
        else:
            rtilde = np.zeros_like(masked_rows)
        if not np.all(np.isfinite(rtilde)):
            raise AppError("SVT iterate diverged")
        r = r + cfg.mu * (masked_rows - rtilde * mask_rows)
    return SvtResult(rtilde, sigma, u_rows, v, cols)


# ---------------------------------------------------------------------------
# node-local classical MDS with sign disambiguation


def symmetric_sign_factors(u_vectors: np.ndarray, v_vectors: np.ndarray,
                           floor: float = 1e-12) -> np.ndarray:
    """Relative signs between matched left/right singular vectors of a real
    symmetric matrix (u_k = delta_k v_k with delta in {-1, +1}).

    The sign is read off the largest-magnitude entry pair; entries where
    both factors fall below ``floor`` are skipped in favour of the next
    largest. Every node extracts the same value because the entrywise
    ratios agree up to consensus noise.
    """
    u = np.atleast_2d(np.asarray(u_vectors, dtype=float).T).T
    v = np.atleast_2d(np.asarray(v_vectors, dtype=float).T).T
    if u.shape != v.shape:
        raise AppError("left/right vector blocks must match")
    deltas = np.empty(u.shape[1])
    for k in range(u.shape[1]):
        order = np.argsort(-np.abs(v[:, k]), kind="stable")
        for idx in order:
            if abs(u[idx, k]) > floor and abs(v[idx, k]) > floor:
                deltas[k] = 1.0 if u[idx, k] * v[idx, k] > 0 else -1.0
                break
        else:
            deltas[k] = 1.0
    return deltas


def local_mds(sigma: np.ndarray, deltas: np.ndarray, v_vectors: np.ndarray,
              tau: float, h: int) -> np.ndarray:
    """Coordinates (up to rigid transform) from the thresholded spectrum.

    Builds the double-centered Gram matrix as a sum of rank-one terms over
    the surviving components (u_k = delta_k v_k) and diagonalizes it with
    the same rank-one update kernel the network algorithms use - this step
    is node-local, no communication. Returns an h x N coordinate estimate.
    """
    sigma = np.asarray(sigma, dtype=float)
    v = np.asarray(v_vectors)
    n = v.shape[0]
    lam = np.zeros(n)
    basis = np.eye(n, dtype=complex)
    for k in range(v.shape[1]):
        w = max(sigma[k] - tau, 0.0)
        if w == 0.0:
            continue
        u_k = (deltas[k] * v[:, k]).astype(complex)
        u_centered = u_k - u_k.mean()
        rho = -0.5 * deltas[k] * w
        if rho == 0.0 or np.linalg.norm(u_centered) == 0.0:
            continue
        z = basis.conj().T @ u_centered
        vals, W, _ = secular.rank_one_update_batch(lam[None, :], z[None, :], rho)
        lam = vals[0]
        basis = basis @ W[0]
    if np.sum(lam > 0) < h:
        raise AppError(f"Gram matrix has fewer than {h} positive eigenvalues")
    coords = np.sqrt(lam[:h])[:, None] * basis[:, :h].real.T
    return coords


# ---------------------------------------------------------------------------
# anchor alignment


@dataclass
class ProcrustesResult:
    q: np.ndarray             # h x h orthogonal transform
    est_centroid: np.ndarray
    true_centroid: np.ndarray
    aligned: np.ndarray       # h x N aligned coordinate estimate


def procrustes_align(est_coords: np.ndarray, true_anchor_coords: np.ndarray,
                     anchors: np.ndarray, engine: ConsensusEngine) -> ProcrustesResult:
    """Rigid alignment of the estimate onto the anchors.

    Anchor centroids are obtained by scalar consensus over zero-padded
    coordinate signals (2h instances), the h x h correlation matrix by one
    consensus per entry (h^2 instances); its SVD and the final transform
    are applied locally at every node.
    """
    est = np.asarray(est_coords, dtype=float)
    h, n = est.shape
    anchors = np.asarray(anchors, dtype=int)
    xa_true = np.asarray(true_anchor_coords, dtype=float)
    if xa_true.shape != (h, len(anchors)):
        raise AppError("anchor coordinate block has the wrong shape")
    na = len(anchors)
    if na < h + 1:
        raise AppError("need at least h+1 anchors")

    pad_est = np.zeros((n, h))
    pad_true = np.zeros((n, h))
    pad_est[anchors] = est[:, anchors].T
    pad_true[anchors] = xa_true.T
    cent_est = np.empty(h)
    cent_true = np.empty(h)
    for k in range(h):
        cent_est[k] = sum_consensus(engine, pad_est[:, k]).real[0] / na
        cent_true[k] = sum_consensus(engine, pad_true[:, k]).real[0] / na

    cen_est = np.zeros((n, h))
    cen_true = np.zeros((n, h))
    cen_est[anchors] = (est[:, anchors] - cent_est[:, None]).T
    cen_true[anchors] = (xa_true - cent_true[:, None]).T
    c = inner_product_consensus(engine, cen_est, cen_true)[0].real  # (h, h)

    k_mat, s, m_mat = np.linalg.svd(c)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise AppError("degenerate anchor configuration")
    q = m_mat.T @ k_mat.T
    aligned = q @ (est - cent_est[:, None]) + cent_true[:, None]
    return ProcrustesResult(q, cent_est, cent_true, aligned)


def localization_errors(rtilde, r_true, x_est, x_true):
    """Relative Frobenius errors of the completed EDM and the aligned
    coordinates."""
    eps_r = np.linalg.norm(rtilde - r_true) / np.linalg.norm(r_true)
    eps_x = np.linalg.norm(x_est - x_true) / np.linalg.norm(x_true)
    return eps_r, eps_x


def run_localization_trial(problem: EdmProblem, cfg: SvtConfig,
                           engine: ConsensusEngine, svd_backend: str,
                           backend_params: dict | None = None,
                           rng: np.random.Generator | None = None):
    """Full pipeline on one scene: SVT completion, node-local MDS at the
    first node, anchor Procrustes. Returns (eps_r, eps_x, instances)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    start = engine.ledger.instances
    masked = problem.edm * problem.mask
    svt = d_svt(masked, problem.mask, cfg, engine, svd_backend,
                backend_params, rng)
    if len(svt.v_columns) == 0:
        raise AppError("no components survived the threshold")
    h = problem.coords.shape[0]
    node = 0
    sig = svt.sigma[node, svt.v_columns]
    v_node = svt.v[node].real
    deltas = symmetric_sign_factors(svt.u_rows[:, svt.v_columns].real, v_node)
    x_est = local_mds(sig, deltas, v_node, cfg.tau, h)
    aligned = procrustes_align(x_est, problem.coords[:, problem.anchors],
                               problem.anchors, engine)
    eps_r, eps_x = localization_errors(svt.rtilde_rows, problem.edm,
                                       aligned.aligned, problem.coords)
    return eps_r, eps_x, engine.ledger.instances - start


# ---------------------------------------------------------------------------
# passive radar detection


@dataclass
class RadarScenario:
    """One channel realization of the passive radar model."""

    h_ref: np.ndarray      # (n, L) reference-channel gains
    h_sur: np.ndarray      # (n, L) surveillance-channel gains
    xi: int                # 1 when the target is present
    t_snapshots: int
    noise_var: float = 1.0

    @property
    def n_nodes(self) -> int:
        return self.h_ref.shape[0]

    @property
    def n_illuminators(self) -> int:
        return self.h_ref.shape[1]


def make_radar_scenario(n: int, l_illum: int, t_snapshots: int, snr_db: float,
                        xi: int, rng: np.random.Generator) -> RadarScenario:
    """Draw channel matrices scaled so that per-node signal power over unit
    noise matches the requested SNR."""
    if xi not in (0, 1):
        raise AppError("xi must be 0 or 1")
    snr = 10.0 ** (snr_db / 10.0)
    scale = np.sqrt(snr / l_illum)
    shape = (n, l_illum)
    h_ref = scale * _cn(rng, shape)
    h_sur = scale * _cn(rng, shape)
    return RadarScenario(h_ref, h_sur, xi, t_snapshots)


def _cn(rng, shape):
    """Standard circular complex Gaussian samples (unit total variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def radar_simulate(scenario: RadarScenario, rng: np.random.Generator):
    """Per-node snapshot streams (surveillance, reference), each (n, T)."""
    n, t = scenario.n_nodes, scenario.t_snapshots
    kappa = _cn(rng, (scenario.n_illuminators, t))
    nstd = np.sqrt(scenario.noise_var)
    ref = scenario.h_ref @ kappa + nstd * _cn(rng, (n, t))
    sur = scenario.xi * (scenario.h_sur @ kappa) + scenario.h_ref @ kappa \
        + nstd * _cn(rng, (n, t))
    return sur, ref


@dataclass
class DetectorOutput:
    statistic: float
    threshold: float
    decision: bool


def cross_correlation_detect(sur_rows: np.ndarray, ref_rows: np.ndarray,
                             engine: ConsensusEngine | None,
                             svd_backend: str = "dra_svd2",
                             backend_params: dict | None = None,
                             threshold: float = 0.0,
                             rng: np.random.Generator | None = None) -> DetectorOutput:
    """Energy of the empirical cross-covariance between the surveillance
    and reference streams, computed through the chosen SVD backend.

    The statistic is the sum of squared singular values of
    (1/T) sum_t s(t) r(t)^H; the 1/T normalization is applied as a
    deterministic post-scale of the singular values. The power-method
    backend uses only the dominant singular value.
    """
    sur_rows = np.asarray(sur_rows)
    ref_rows = np.asarray(ref_rows)
    n, t = sur_rows.shape
    params = backend_params or {}
    if svd_backend == "centralized":
        r_sr = (sur_rows @ ref_rows.conj().T) / t
        _, s, _ = dsvd.centralized_svd_oracle(r_sr)
        stat = float(np.sum(s ** 2))
    elif svd_backend == "dra_svd2":
        state = dsvd.init_svd2_state(n)
        for k in range(t):
            dsvd.dra_svd2_update(state, sur_rows[:, k], ref_rows[:, k], engine)
        stat = float(np.sum((state.sigma[0] / t) ** 2))
    elif svd_backend == "dtra_svd2":
        tstate = dsvd.init_truncated_svd2_state(n, params["d"])
        for k in range(t):
            dsvd.dtra_svd2_update(tstate, sur_rows[:, k], ref_rows[:, k], engine)
        stat = float(np.sum((tstate.sigma[0] / t) ** 2))
    elif svd_backend == "dpm_svd2":
        rng = rng if rng is not None else np.random.default_rng(0)
        s1, _, _ = dsvd.dpm_svd2(sur_rows, ref_rows, params["p_iters"],
                                 params["alpha"], engine, rng)
        stat = float((s1[0] / t) ** 2)
    else:
        raise AppError(f"unknown detector backend {svd_backend!r}")
    return DetectorOutput(stat, threshold, stat > threshold)


def roc_curve(h0_stats, h1_stats, grid_size: int = 100):
    """Empirical (P_fa, P_d) pairs over a threshold sweep of the pooled
    statistic range. Thresholds ascend, so both rates are non-increasing
    along the returned list."""
    h0 = np.asarray(h0_stats, dtype=float)
    h1 = np.asarray(h1_stats, dtype=float)
    if len(h0) < 100 or len(h1) < 100:
        raise AppError("need at least 100 statistics per hypothesis")
    pooled = np.concatenate([h0, h1])
    lo, hi = pooled.min(), pooled.max()
    pad = 1e-12 * max(abs(hi), 1.0)
    thresholds = np.linspace(lo - pad, hi + pad, grid_size)
    rows = [(float(eta), float(np.mean(h0 > eta)), float(np.mean(h1 > eta)))
            for eta in thresholds]
    return rows


def roc_auc(rows) -> float:
    """Trapezoidal area under the (P_fa, P_d) curve."""
    pfa = np.array([r[1] for r in rows])
    pd = np.array([r[2] for r in rows])
    order = np.argsort(pfa)
    pfa = np.concatenate([[0.0], pfa[order], [1.0]])
    pd = np.concatenate([[0.0], pd[order], [1.0]])
    return float(np.trapezoid(pd, pfa))
