"""Compiled kernels for the rank-one diagonal eigenvalue update.

The update diagonalizes ``diag(lam) + rho * z z^H``. Eigenvalues are the
zeros of the secular function f(x) = 1 + rho * sum_k |z_k|^2 / (lam_k - x),
one per interlacing interval, found by an osculatory rational-approximation
iteration with a bisection safeguard. Eigenvectors are formed from update
weights recomputed off the converged roots (Gu/Eisenstat style) so the
output stays numerically orthogonal even for clustered spectra.

Everything here assumes nothing about ordering consistency across callers;
ambiguity between near-equal eigenvalues is resolved separately (see
``secular.unify_sort_order``).
"""

import numpy as np
from numba import njit

MAX_ITER = 50
EPS = 2.220446049250313e-16


@njit(cache=True)
def _stable_argsort_desc(v):
    n = v.shape[0]
    idx = np.arange(n)
    for i in range(1, n):
        ki = idx[i]
        key = v[ki]
        j = i
        while j > 0 and v[idx[j - 1]] < key:
            idx[j] = idx[j - 1]
            j -= 1
        idx[j] = ki
    return idx


@njit(cache=True)
def _secular_root(d, w, rho, j, tol, maxit, delta):
    """Root j (0-based) of the secular function for descending poles d,
    weights w > 0 and rho > 0. The root lies in (d[j], d[j-1]), where the
    virtual upper end for j = 0 is d[0] + rho * sum(w).

    Writes d - root into ``delta`` (maintained incrementally so that pole
    gaps survive cancellation) and returns (root, n_iterations, converged).
    ``n_iterations`` counts applied updates larger than the tolerance; the
    final sub-tolerance correction is the termination check and, like the
    informed initial guess, is not counted.
    """
    K = d.shape[0]
    wsum = 0.0
    for k in range(K):
        wsum += w[k]
    if j == 0:
        lo = d[0]
        hi = d[0] + rho * wsum
    else:
        lo = d[j]
        hi = d[j - 1]
    floor = 32.0 * EPS * max(abs(lo), abs(hi))

    # Initial guess: evaluate f once at the midpoint, lump every pole except
    # the two bracketing ones into a constant, and solve that two-pole
    # problem exactly. Much tighter start than the bare midpoint when the
    # root hugs one end of the interval.
    mid = 0.5 * (lo + hi)
    fmid = 1.0
    for k in range(K):
        dk = d[k] - mid
        if dk == 0.0:
            fmid = np.inf
            break
        fmid += rho * w[k] / dk
    if np.isfinite(fmid):
        if fmid < 0.0:
            lo = mid
        else:
            hi = mid
        if j == 0:
            pu, pl = 0, 1  # pole above the anchor gap, pole below
        else:
            pu, pl = j - 1, j
        dgap = d[pu] - d[pl]
        wu = rho * w[pu]
        wl = rho * w[pl]
        c = fmid - wu / (d[pu] - mid) - wl / (d[pl] - mid)
        if j == 0 or fmid < 0.0:
            # anchor at the upper pole of the pair: x = d[pu] + tau, tau > 0
            # for j == 0, tau in (-dgap/2, 0) otherwise
            a2 = c
            b2 = wu + wl - c * dgap
            c2 = -wu * dgap
        else:
            # anchor at the lower pole: x = d[pl] + tau, tau in (0, dgap/2]
            a2 = c
            b2 = c * dgap + wu + wl
            c2 = wl * dgap
        disc = b2 * b2 - 4.0 * a2 * c2
        if disc < 0.0:
            disc = 0.0
        sq = np.sqrt(disc)
        if b2 >= 0.0:
            t1 = b2 + sq
        else:
            t1 = b2 - sq
        anchor = d[pu] if (j == 0 or fmid < 0.0) else d[pl]
        cand = lo + 0.25 * (hi - lo)  # fallback inside the live bracket
        if a2 != 0.0:
            r1 = t1 / (2.0 * a2)
            if lo < anchor + r1 < hi:
                cand = anchor + r1
        if t1 != 0.0:
            r2 = 2.0 * c2 / t1
            if lo < anchor + r2 < hi:
                cand = anchor + r2
        # when the lumped constant dwarfs the bracketing poles the two-pole
        # guess is unreliable (it hugs a pole); pull it toward the midpoint
        pole_scale = 2.0 * (wu + wl) / dgap
        trust = pole_scale / (pole_scale + abs(c))
        mu = trust * cand + (1.0 - trust) * 0.5 * (lo + hi)
    else:
        mu = 0.5 * (lo + hi)
    for k in range(K):
        delta[k] = d[k] - mu
    niter = 0
    for _ in range(maxit):
        if delta[j] == 0.0 or (j > 0 and delta[j - 1] == 0.0):
            # iterate landed on a pole: bisect away from it
            mu_new = 0.5 * (lo + hi)
        else:
            psi = 0.0
            dpsi = 0.0
            for k in range(j):
                t = w[k] / delta[k]
                psi += t
                dpsi += t / delta[k]
            phi = 0.0
            dphi = 0.0
            for k in range(j, K):
                t = w[k] / delta[k]
                phi += t
                dphi += t / delta[k]
            psi *= rho
            dpsi *= rho
            phi *= rho
            dphi *= rho
            f = 1.0 + psi + phi
            if f < 0.0:
                lo = mu
            else:
                hi = mu
            if j == 0:
                db = delta[0]
                c = 1.0 + phi - dphi * db
                s = dphi * db * db
                if c > 0.0:
                    eta = db + s / c
                else:
                    eta = hi - lo  # no admissible step: force bisection
            else:
                da = delta[j - 1]
                db = delta[j]
                q = dpsi * da * da
                p = psi - dpsi * da
                s = dphi * db * db
                r = phi - dphi * db
                c = 1.0 + p + r
                a2 = c
                b2 = c * (da + db) + q + s
                c2 = c * da * db + q * db + s * da
                if a2 == 0.0:
                    if b2 != 0.0:
                        eta = c2 / b2
                    else:
                        eta = hi - lo
                else:
                    disc = b2 * b2 - 4.0 * a2 * c2
                    if disc < 0.0:
                        disc = 0.0
                    sq = np.sqrt(disc)
                    if b2 >= 0.0:
                        t1 = b2 + sq
                    else:
                        t1 = b2 - sq
                    r1 = t1 / (2.0 * a2)
                    if t1 != 0.0:
                        r2 = 2.0 * c2 / t1
                    else:
                        r2 = r1
                    if db < r2 < da:
                        eta = r2
                    elif db < r1 < da:
                        eta = r1
                    else:
                        eta = hi - lo
            # a sufficiently small proposed step means convergence even if it
            # lands exactly on the bracket edge (exact for two-pole problems)
            if abs(eta) <= tol * max(1.0, abs(mu)) or abs(eta) <= floor:
                mu += eta
                for k in range(K):
                    delta[k] -= eta
                return mu, niter, True
            mu_new = mu + eta
            if not (lo < mu_new < hi):
                mu_new = 0.5 * (lo + hi)
        eta_eff = mu_new - mu
        mu = mu_new
        for k in range(K):
            delta[k] -= eta_eff
        ae = abs(eta_eff)
        if ae <= tol * max(1.0, abs(mu)) or ae <= floor:
            return mu, niter, True
        niter += 1
    return mu, niter, False


@njit(cache=True)
def _rank_one_evd(lam, z, rho, conv_tol, deflate_tol, maxit, vals, W, niter):
    """EVD of diag(lam) + rho z z^H, written into vals/W/niter.

    Output slot k corresponds to input slot k: deflated eigenpairs keep
    their slot, and the root bracketed below the k-th retained pole lands
    in that pole's slot. Returns False if any root failed to converge.
    """
    m = lam.shape[0]
    flip = rho < 0.0
    lam_w = np.empty(m)
    z_w = np.empty(m, np.complex128)
    if flip:
        for k in range(m):
            lam_w[k] = -lam[m - 1 - k]
            z_w[k] = z[m - 1 - k]
        rho_w = -rho
    else:
        for k in range(m):
            lam_w[k] = lam[k]
            z_w[k] = z[k]
        rho_w = rho

    order = _stable_argsort_desc(lam_w)
    lam_s = np.empty(m)
    z_s = np.empty(m, np.complex128)
    for k in range(m):
        lam_s[k] = lam_w[order[k]]
        z_s[k] = z_w[order[k]]

    # deflation 1: negligible z components keep their eigenpair untouched
    znorm2 = 0.0
    for k in range(m):
        znorm2 += z_s[k].real * z_s[k].real + z_s[k].imag * z_s[k].imag
    ztol = deflate_tol * np.sqrt(znorm2)
    retained = np.ones(m, np.bool_)
    for k in range(m):
        if abs(z_s[k]) <= ztol:
            retained[k] = False
            z_s[k] = 0.0

    # deflation 2: rotate together retained entries with (near-)equal poles
    span = abs(lam_s[0])
    if m > 0 and abs(lam_s[m - 1]) > span:
        span = abs(lam_s[m - 1])
    scale = span + rho_w * znorm2
    gtol = deflate_tol * max(scale, 1e-300)
    rot_i = np.empty(m, np.int64)
    rot_j = np.empty(m, np.int64)
    rot_a = np.empty(m, np.complex128)
    rot_b = np.empty(m, np.complex128)
    nrot = 0
    acc = -1
    for k in range(m):
        if not retained[k]:
            continue
        if acc >= 0 and lam_s[acc] - lam_s[k] <= gtol:
            a = z_s[acc]
            b = z_s[k]
            r = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
            rot_i[nrot] = acc
            rot_j[nrot] = k
            rot_a[nrot] = a / r
            rot_b[nrot] = b / r
            nrot += 1
            z_s[acc] = r
            z_s[k] = 0.0
            retained[k] = False
        else:
            acc = k

    idx = np.empty(m, np.int64)
    K = 0
    for k in range(m):
        if retained[k]:
            idx[K] = k
            K += 1

    vals_s = np.empty(m)
    nit_s = np.zeros(m, np.int64)
    Ws = np.zeros((m, m), np.complex128)
    for k in range(m):
        vals_s[k] = lam_s[k]
    ok = True

    if K > 0:
        d = np.empty(K)
        w2 = np.empty(K)
        for a_ in range(K):
            d[a_] = lam_s[idx[a_]]
            w2[a_] = abs(z_s[idx[a_]]) ** 2
        mus = np.empty(K)
        dmat = np.empty((K, K))
        if K == 1:
            mus[0] = d[0] + rho_w * w2[0]
            dmat[0, 0] = -rho_w * w2[0]
            nit_s[idx[0]] = 1
        else:
            for jr in range(K):
                mu, nit, conv = _secular_root(d, w2, rho_w, jr, conv_tol, maxit, dmat[jr])
                mus[jr] = mu
                nit_s[idx[jr]] = nit
                if not conv:
                    ok = False
        # recompute update weights from the roots so eigenvectors built from
        # them are orthogonal to working precision
        zhat = np.empty(K, np.complex128)
        for k in range(K):
            prod = -dmat[k, k] / rho_w
            for jr in range(K):
                if jr == k:
                    continue
                prod *= (-dmat[jr, k]) / (d[jr] - d[k])
            if prod < 0.0:
                prod = 0.0
            az = abs(z_s[idx[k]])
            if az > 0.0:
                zhat[k] = np.sqrt(prod) * (z_s[idx[k]] / az)
            else:
                zhat[k] = np.sqrt(prod)
        for jr in range(K):
            hit_pole = -1
            for k in range(K):
                if dmat[jr, k] == 0.0:
                    hit_pole = k
                    break
            if hit_pole >= 0:
                Ws[idx[hit_pole], idx[jr]] = 1.0
            else:
                nrm = 0.0
                for k in range(K):
                    wv = zhat[k] / dmat[jr, k]
                    Ws[idx[k], idx[jr]] = wv
                    nrm += wv.real * wv.real + wv.imag * wv.imag
                nrm = np.sqrt(nrm)
                if nrm > 0.0:
                    for k in range(K):
                        Ws[idx[k], idx[jr]] /= nrm
                else:
                    Ws[idx[jr], idx[jr]] = 1.0
            vals_s[idx[jr]] = mus[jr]

    for k in range(m):
        if not retained[k]:
            Ws[k, k] = 1.0

    # undo the deflation rotations (most recent first)
    for rr in range(nrot - 1, -1, -1):
        i_ = rot_i[rr]
        j_ = rot_j[rr]
        a = rot_a[rr]
        b = rot_b[rr]
        for col in range(m):
            ri = Ws[i_, col]
            rj = Ws[j_, col]
            Ws[i_, col] = a * ri - np.conj(b) * rj
            Ws[j_, col] = b * ri + np.conj(a) * rj

    # undo internal sorting, then the negation mapping
    if flip:
        for cc in range(m):
            oc = order[cc]
            vals[m - 1 - oc] = -vals_s[cc]
            niter[m - 1 - oc] = nit_s[cc]
        for rr in range(m):
            orr = order[rr]
            for cc in range(m):
                W[m - 1 - orr, m - 1 - order[cc]] = Ws[rr, cc]
    else:
        for cc in range(m):
            oc = order[cc]
            vals[oc] = vals_s[cc]
            niter[oc] = nit_s[cc]
        for rr in range(m):
            orr = order[rr]
            for cc in range(m):
                W[orr, order[cc]] = Ws[rr, cc]
    return ok


@njit(cache=True)
def rank_one_evd_batch(lams, zs, rhos, conv_tol, deflate_tol, maxit):
    """EVD of diag(lams[b]) + rhos[b] zs[b] zs[b]^H for every problem b."""
    B, m = lams.shape
    vals = np.empty((B, m))
    W = np.empty((B, m, m), np.complex128)
    niter = np.zeros((B, m), np.int64)
    ok = np.ones(B, np.bool_)
    for b in range(B):
        ok[b] = _rank_one_evd(lams[b], zs[b], rhos[b], conv_tol, deflate_tol,
                              maxit, vals[b], W[b], niter[b])
    return vals, W, niter, ok
