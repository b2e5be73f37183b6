"""Hot numerical kernels.

Everything here is written in a numba-compatible subset of NumPy and compiled
with ``@njit`` when the numba backend is active (see :mod:`eigenpath.backend`);
with ``EIGENPATH_NUMBA=0`` the very same source runs as plain NumPy.  Higher
level modules wrap these kernels with validation and error translation.

Conventions: matrices are C-contiguous ``complex128``; ``w`` arguments are
unit vectors; a "frame" is the Householder unitary ``U`` with ``U e1 = w`` and
``M = U* B U`` its conjugated matrix, so the reduced operator of ``(B, z, w)``
is ``M[1:, 1:] - z I``.
"""

import numpy as np

from .backend import njit

# Singular values below RANK_RCOND * sigma_max count as zero.
RANK_RCOND = 1e-13

# Status codes for path_follow_chunk.
RUNNING = 0
DONE = 1
ILL_POSED = 2
NO_PROGRESS = 3


@njit(cache=True, nogil=True)
def householder_unitary(w):
    """Unitary ``U`` with ``U e1 = w/||w||``: one reflector plus a phase fix.

    Deterministic for fixed ``w`` and continuous wherever ``w[0] != 0``.
    """
    n = w.shape[0]
    nrm = np.sqrt(np.sum(np.abs(w) ** 2))
    x = w / nrm
    a0 = x[0]
    if np.abs(a0) > 0.0:
        gamma = -a0 / np.abs(a0)
    else:
        gamma = -(1.0 + 0.0j)
    u = x.copy()
    u[0] = u[0] - gamma
    uu = np.sum(np.abs(u) ** 2)
    c = -2.0 / uu
    U = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        ui = c * u[i]
        for j in range(n):
            U[i, j] = ui * np.conj(u[j])
        U[i, i] += 1.0
    for i in range(n):
        U[i, 0] *= gamma
    return U


@njit(cache=True, nogil=True)
def _adjoint(U):
    n = U.shape[0]
    UH = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            UH[i, j] = np.conj(U[j, i])
    return UH


@njit(cache=True, nogil=True)
def frame_matrix(B, w):
    """Return ``(U, M)`` with ``M = U* B U`` in the Householder frame of ``w``."""
    U = householder_unitary(w)
    M = _adjoint(U) @ (B @ U)
    return U, M


@njit(cache=True, nogil=True)
def frame_conjugated(B, w):
    """``M = U* B U`` in the Householder frame of ``w`` without materializing
    ``U``: with U = R diag(gamma, 1, ..) and R = I - (2/uu) u u*, the
    conjugation is two rank-one updates around B plus a phase fix of the
    first row and column.

    Returns ``(M, u, cfac, gamma)``; a frame-coordinate vector ``(0, xf)``
    maps back to ambient coordinates as ``z - cfac * (u* z) u`` with
    ``z = (0, xf)`` (the diagonal phase only touches component 0).
    """
    n = w.shape[0]
    nrm = np.sqrt(np.sum(np.abs(w) ** 2))
    x = w / nrm
    a0 = x[0]
    if np.abs(a0) > 0.0:
        gamma = -a0 / np.abs(a0)
    else:
        gamma = -(1.0 + 0.0j)
    u = x.copy()
    u[0] = u[0] - gamma
    uu = np.sum(np.abs(u) ** 2)
    cfac = 2.0 / uu
    Bu = B @ u
    uhB = np.conj(u) @ B
    uhBu = np.dot(np.conj(u), Bu)
    M = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        cui = cfac * u[i]
        for j in range(n):
            cuj = cfac * np.conj(u[j])
            M[i, j] = B[i, j] - cui * uhB[j] - Bu[i] * cuj + cui * uhBu * cuj
    cg = np.conj(gamma)
    for j in range(1, n):
        M[0, j] *= cg
    for i in range(1, n):
        M[i, 0] *= gamma
    return M, u, cfac, gamma


@njit(cache=True, nogil=True)
def reduced_block(M, zeta):
    """The (n-1) x (n-1) reduced operator in frame coordinates."""
    n = M.shape[0]
    block = M[1:, 1:].copy()
    for i in range(n - 1):
        block[i, i] = block[i, i] - zeta
    return block


@njit(cache=True, nogil=True)
def lu_factor(A):
    """Complex LU with partial pivoting, LAPACK-style (row swaps applied to
    the full rows, pivots as successive transpositions).  A zero pivot is
    left in place; subsequent solves then produce inf/nan instead of raising.
    """
    m = A.shape[0]
    LU = A.copy()
    piv = np.empty(m, dtype=np.int64)
    for k in range(m):
        p = k
        big = np.abs(LU[k, k])
        for i in range(k + 1, m):
            a = np.abs(LU[i, k])
            if a > big:
                big = a
                p = i
        piv[k] = p
        if p != k:
            for j in range(m):
                tmp = LU[k, j]
                LU[k, j] = LU[p, j]
                LU[p, j] = tmp
        pivval = LU[k, k]
        if pivval != 0.0:
            inv = 1.0 / pivval
            for i in range(k + 1, m):
                lik = LU[i, k] * inv
                LU[i, k] = lik
                for j in range(k + 1, m):
                    LU[i, j] -= lik * LU[k, j]
    return LU, piv


@njit(cache=True, nogil=True)
def lu_solve(LU, piv, b):
    """Solve with factors from :func:`lu_factor` (right-hand side copied)."""
    m = b.shape[0]
    x = b.copy()
    for k in range(m):
        p = piv[k]
        if p != k:
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
    for k in range(m):
        xk = x[k]
        for i in range(k + 1, m):
            x[i] -= LU[i, k] * xk
    for k in range(m - 1, -1, -1):
        xk = x[k]
        for j in range(k + 1, m):
            xk -= LU[k, j] * x[j]
        x[k] = xk / LU[k, k]
    return x


@njit(cache=True, nogil=True)
def inverse_norm_window(LU, piv):
    """Certified bounds ``lo <= ||A^{-1}||_2 <= up`` from LU factors.

    With ``X = A^{-1}`` (columns via solves) and the Hermitian ``H = X* X``,
    ``up`` comes from norm bounds on ``H^2`` (Frobenius and row-sum, both
    certified and quartically tight in the singular-value ratios), ``lo``
    from Rayleigh quotients of ``H^2`` sharpened by power steps.  Returns
    ``(lo, up, ok)`` with ``ok`` true when ``up <= sqrt(3) * lo``, the window
    the step controller's condition estimate must satisfy.
    """
    m = LU.shape[0]
    X = np.empty((m, m), dtype=np.complex128)
    e = np.zeros(m, dtype=np.complex128)
    best = -1.0
    jbest = 0
    for j in range(m):
        e[j] = 1.0
        x = lu_solve(LU, piv, e)
        e[j] = 0.0
        nj2 = np.sum(np.abs(x) ** 2)
        for i in range(m):
            X[i, j] = x[i]
        if nj2 > best:
            best = nj2
            jbest = j
    if not np.isfinite(best) or best <= 0.0:
        return 0.0, np.inf, False
    H = _adjoint(X) @ X
    H2 = H @ H
    f2 = 0.0
    maxrow = 0.0
    for i in range(m):
        row = 0.0
        for j in range(m):
            a = np.abs(H2[i, j])
            row += a
            f2 += a * a
        if row > maxrow:
            maxrow = row
    base = min(np.sqrt(f2), maxrow)  # certified >= ||H^2||_2 = ||A^{-1}||^4
    if not np.isfinite(base) or base <= 0.0:
        return 0.0, np.inf, False
    up = base**0.25
    lo = np.sqrt(best)  # ||A^{-1} e_j|| for a unit vector e_j
    sqrt3 = np.sqrt(3.0)
    y = X[:, jbest].copy()
    y = y / np.sqrt(best)
    for _ in range(8):
        if up <= sqrt3 * lo:
            return lo, up, True
        z = H2 @ y
        q = 0.0
        for i in range(m):
            q += (np.conj(y[i]) * z[i]).real
        if q > 0.0 and q**0.25 > lo:
            lo = q**0.25
        nz = np.sqrt(np.sum(np.abs(z) ** 2))
        if not np.isfinite(nz) or nz == 0.0:
            break
        if nz**0.25 > lo:
            lo = nz**0.25
        y = z / nz
    return lo, up, up <= sqrt3 * lo


@njit(cache=True, nogil=True)
def block_singular_range(block):
    """(sigma_min, sigma_max) of a square block.

    Fast route: eigenvalues of the Gram matrix, exact to ~1e-10 relative as
    long as the squared condition stays below 1e6; otherwise (and whenever
    near rank deficiency) falls back to a full SVD.
    """
    m = block.shape[0]
    G = _adjoint(block) @ block
    ev = np.linalg.eigvalsh(G)
    lmin = ev[0]
    lmax = ev[m - 1]
    if lmax > 0.0 and lmin > 1e-6 * lmax:
        return np.sqrt(lmin), np.sqrt(lmax)
    _u, sv, _vh = np.linalg.svd(block)
    return sv[m - 1], sv[0]


@njit(cache=True, nogil=True)
def newton_core(B, zeta, w):
    """One Newton update of ``(zeta, w)`` for the matrix ``B``.

    Returns ``(zeta_next, w_next, lambda_dot, v_dot, beta)`` where ``v_dot``
    lies in ``w``-perp and the next ``w`` is renormalized to unit length.
    No singularity guard: an exactly singular reduced block yields non-finite
    output (callers check or pre-validate).
    """
    n = w.shape[0]
    M, u, cfac, _gamma = frame_conjugated(B, w)
    block = reduced_block(M, zeta)
    LU, piv = lu_factor(block)
    vdotf = lu_solve(LU, piv, M[1:, 0].copy())
    lamdot = zeta - M[0, 0] + np.dot(M[0, 1:].copy(), vdotf)
    z = np.zeros(n, dtype=np.complex128)
    z[1:] = vdotf
    t = np.dot(np.conj(u[1:]), vdotf)
    vdot = z - (cfac * t) * u
    wn = w - vdot
    wn = wn / np.sqrt(np.sum(np.abs(wn) ** 2))
    beta = np.sqrt(np.abs(lamdot) ** 2 + np.sum(np.abs(vdotf) ** 2))
    return zeta - lamdot, wn, lamdot, vdot, beta


@njit(cache=True, nogil=True)
def step_controller(B, Adot, zeta, w, c1, cu):
    """Step-length controller at ``(B, zeta, w)`` with unit tangent ``Adot``.

    Returns ``(ds, r, phi, beta, status)`` where ``r`` is the condition
    estimate in the certified window ``[mu, sqrt(3) mu]`` (Frobenius/power
    bounds on the inverse block, exact singular values as fallback), ``phi``
    the directional sensitivity and ``beta`` the Newton step length.  ``ds``
    is ``min(s', s'')`` with ``s' = c1/r`` and ``s''`` solving the linear
    certified-advance equation.
    """
    n = w.shape[0]
    M, u, cfac, gamma = frame_conjugated(B, w)
    block = reduced_block(M, zeta)
    LU, piv = lu_factor(block)
    lo, up, ok = inverse_norm_window(LU, piv)
    if ok and up * RANK_RCOND * np.sqrt(np.sum(np.abs(block) ** 2)) < 1.0:
        r = up
    else:
        smin, smax = block_singular_range(block)
        if smin <= RANK_RCOND * smax or smax == 0.0:
            return 0.0, np.inf, 0.0, 0.0, ILL_POSED
        r = 1.0 / smin
    sprime = c1 / r
    # y = U* (Adot w): reflector then the phase fix on component 0
    q = Adot @ w
    y = q - (cfac * np.dot(np.conj(u), q)) * u
    y[0] = y[0] * np.conj(gamma)
    vdotf = lu_solve(LU, piv, M[1:, 0].copy())
    lamdot = zeta - M[0, 0] + np.dot(M[0, 1:].copy(), vdotf)
    beta = np.sqrt(np.abs(lamdot) ** 2 + np.sum(np.abs(vdotf) ** 2))
    wdotf = lu_solve(LU, piv, y[1:].copy())
    zdot = -y[0] + np.dot(M[0, 1:].copy(), wdotf)
    phi = np.sqrt(np.abs(zdot) ** 2 + np.sum(np.abs(wdotf) ** 2))
    num = (1.0 - 3.0 * c1) * cu / r - beta - 1.5 * np.sqrt(3.0) * c1 * c1 / r
    if num <= 0.0:
        return 0.0, r, phi, beta, NO_PROGRESS
    if phi > 0.0:
        ssecond = num / phi
    else:
        ssecond = np.inf
    ds = min(sprime, ssecond)
    return ds, r, phi, beta, RUNNING


@njit(cache=True, nogil=True)
def _arc_point(A0h, W, s, out):
    n = A0h.shape[0]
    cs = np.cos(s)
    sn = np.sin(s)
    for i in range(n):
        for j in range(n):
            out[i, j] = A0h[i, j] * cs + W[i, j] * sn


@njit(cache=True, nogil=True)
def _arc_tangent(A0h, W, s, out):
    n = A0h.shape[0]
    cs = np.cos(s)
    sn = np.sin(s)
    for i in range(n):
        for j in range(n):
            out[i, j] = -A0h[i, j] * sn + W[i, j] * cs


@njit(cache=True, nogil=True)
def path_follow_chunk(
    A0h,
    W,
    alpha,
    s0,
    zeta0,
    w0,
    c1,
    cu,
    max_chunk,
    out_s,
    out_ds,
    out_r,
    out_phi,
    out_beta,
    out_zeta,
    out_prenorm,
):
    """Advance up to ``max_chunk`` homotopy steps along the arc.

    Per step: tangent at the current point, controller step, advance the
    parameter (capped at ``alpha``), three Newton iterations at the *new*
    point, then rescale ``zeta`` onto the unit disk if it escaped.  Trace
    columns are filled for the steps actually taken.

    Returns ``(steps_taken, s, zeta, w, status)``.
    """
    n = w0.shape[0]
    s = s0
    zeta = zeta0
    w = w0.copy()
    B = np.empty((n, n), dtype=np.complex128)
    Adot = np.empty((n, n), dtype=np.complex128)
    k = 0
    status = RUNNING
    while k < max_chunk:
        _arc_point(A0h, W, s, B)
        _arc_tangent(A0h, W, s, Adot)
        ds, r, phi, beta, st = step_controller(B, Adot, zeta, w, c1, cu)
        if st != RUNNING:
            status = st
            break
        s_next = min(alpha, s + ds)
        if s_next <= s:
            status = NO_PROGRESS
            break
        _arc_point(A0h, W, s_next, B)
        for _ in range(3):
            zeta, w, _ld, _vd, _b = newton_core(B, zeta, w)
        if not (np.isfinite(zeta.real) and np.isfinite(zeta.imag) and np.all(np.isfinite(w.real)) and np.all(np.isfinite(w.imag))):
            status = ILL_POSED
            break
        pre = np.abs(zeta)
        if pre > 1.0:
            zeta = zeta / pre
        out_s[k] = s_next
        out_ds[k] = ds
        out_r[k] = r
        out_phi[k] = phi
        out_beta[k] = beta
        out_zeta[k] = zeta
        out_prenorm[k] = pre
        s = s_next
        k += 1
        if s >= alpha:
            status = DONE
            break
    return k, s, zeta, w, status


# ---------------------------------------------------------------------------
# Reference eigensolver kernels (oracle route: Hessenberg -> characteristic
# polynomial -> Aberth-Ehrlich -> inverse iteration).
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def hessenberg_form(A):
    """Upper Hessenberg form of ``A`` by unitary similarity.

    Entries below the first subdiagonal are zeroed exactly so the
    characteristic-polynomial recurrence sees a clean Hessenberg matrix.
    """
    n = A.shape[0]
    H = A.copy()
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        nx = np.sqrt(np.sum(np.abs(x) ** 2))
        if nx == 0.0:
            continue
        a0 = x[0]
        if np.abs(a0) > 0.0:
            gamma = -a0 / np.abs(a0)
        else:
            gamma = -(1.0 + 0.0j)
        u = x.copy()
        u[0] = u[0] - gamma * nx
        uu = np.sum(np.abs(u) ** 2)
        if uu == 0.0:
            continue
        m = n - k - 1
        P = np.eye(n).astype(np.complex128)
        P[k + 1 :, k + 1 :] -= (2.0 / uu) * (
            u.reshape(m, 1) * np.conj(u).reshape(1, m)
        )
        H = P @ (H @ P)
    for i in range(2, n):
        for j in range(i - 1):
            H[i, j] = 0.0
    return H


@njit(cache=True, nogil=True)
def charpoly_hessenberg(H):
    """Monic characteristic polynomial det(x I - H) of an upper Hessenberg
    matrix, as ascending coefficients ``c[0] + c[1] x + ... + c[n] x^n``.

    Uses the leading-principal-minor recurrence: chi_k picks up chi_{k-1}
    times (x - h_kk) minus contributions weighted by products of subdiagonal
    entries.
    """
    n = H.shape[0]
    polys = np.zeros((n + 1, n + 1), dtype=np.complex128)
    polys[0, 0] = 1.0
    for k in range(1, n + 1):
        pk = np.zeros(n + 1, dtype=np.complex128)
        pk[1 : k + 1] += polys[k - 1, 0:k]
        pk[0:k] -= H[k - 1, k - 1] * polys[k - 1, 0:k]
        prod = 1.0 + 0.0j
        for m in range(1, k):
            prod *= H[k - m, k - m - 1]
            pk[0 : k - m] -= H[k - m - 1, k - 1] * prod * polys[k - m - 1, 0 : k - m]
        polys[k, :] = pk
    return polys[n, :].copy()


@njit(cache=True, nogil=True)
def polyval_deriv(c, z):
    """Horner evaluation of p(z) and p'(z) for ascending coefficients."""
    n = c.shape[0] - 1
    p = c[n]
    dp = 0.0 + 0.0j
    for i in range(n - 1, -1, -1):
        dp = dp * z + p
        p = p * z + c[i]
    return p, dp


@njit(cache=True, nogil=True)
def aberth_initial(c):
    """Initial root guesses on a circle inside the Cauchy bound."""
    n = c.shape[0] - 1
    center = -c[n - 1] / n
    maxc = 0.0
    for j in range(n):
        a = np.abs(c[j])
        if a > maxc:
            maxc = a
    radius = 1.0 + maxc
    z = np.empty(n, dtype=np.complex128)
    for j in range(n):
        ang = 2.0 * np.pi * j / n + 0.4
        z[j] = center + radius * (np.cos(ang) + 1j * np.sin(ang))
    return z


@njit(cache=True, nogil=True)
def aberth_sweeps(c, z, max_sweeps, tol):
    """Aberth-Ehrlich simultaneous iteration, Gauss-Seidel style, in place.

    Returns ``(sweeps_used, converged)``; convergence is relative correction
    size below ``tol`` for every root in a sweep.
    """
    n = z.shape[0]
    for sweep in range(max_sweeps):
        delta_max = 0.0
        for i in range(n):
            p, dp = polyval_deriv(c, z[i])
            if p == 0.0:
                continue
            if dp == 0.0:
                z[i] = z[i] + (1e-8 + 1e-8j) * (1.0 + np.abs(z[i]))
                delta_max = 1.0
                continue
            N = p / dp
            S = 0.0 + 0.0j
            for j in range(n):
                if j != i:
                    d = z[i] - z[j]
                    if d == 0.0:
                        d = (1e-30 + 0.0j)
                    S += 1.0 / d
            den = 1.0 - N * S
            if den == 0.0:
                wstep = N
            else:
                wstep = N / den
            z[i] = z[i] - wstep
            rel = np.abs(wstep) / (1.0 + np.abs(z[i]))
            if rel > delta_max:
                delta_max = rel
        if delta_max < tol:
            return sweep + 1, True
    return max_sweeps, False


@njit(cache=True, nogil=True)
def inverse_iteration(A, lam, max_rounds, target_resid):
    """Eigenvector for an accurate eigenvalue estimate.

    Repeated shifted solves with renormalization; the shift is updated to the
    Rayleigh quotient after each round.  A tiny fixed complex offset keeps the
    shifted matrix nonsingular on exactly-diagonal inputs.

    Returns ``(v, lam_polished, residual)``.
    """
    n = A.shape[0]
    scale = np.sqrt(np.sum(np.abs(A) ** 2))
    if scale == 0.0:
        scale = 1.0
    offset = (0.6 + 0.8j) * 1e-13 * scale
    b = np.empty(n, dtype=np.complex128)
    for i in range(n):
        b[i] = 1.0 + 0.25 * (i + 1.0) / n + (0.1j * ((i * 7) % n + 1.0)) / n
    b = b / np.sqrt(np.sum(np.abs(b) ** 2))
    lam_c = lam
    v = b
    resid = np.inf
    for _ in range(max_rounds):
        Ms = A.copy()
        for i in range(n):
            Ms[i, i] = Ms[i, i] - (lam_c + offset)
        LU, piv = lu_factor(Ms)
        v = lu_solve(LU, piv, b)
        v = v / np.sqrt(np.sum(np.abs(v) ** 2))
        Av = A @ v
        lam_c = np.sum(np.conj(v) * Av)
        resid = np.sqrt(np.sum(np.abs(Av - lam_c * v) ** 2))
        if resid <= target_resid:
            break
        b = v
    return v, lam_c, resid


@njit(cache=True, nogil=True)
def eig_point(A0h, W, s, warm, max_sweeps, tol):
    """Eigenvalues of the arc point at parameter ``s``, warm-started from a
    nearby root vector.  Returns ``(roots, converged)``."""
    n = A0h.shape[0]
    B = np.empty((n, n), dtype=np.complex128)
    _arc_point(A0h, W, s, B)
    H = hessenberg_form(B)
    c = charpoly_hessenberg(H)
    z = warm.copy()
    _sw, conv = aberth_sweeps(c, z, max_sweeps, tol)
    return z, conv


@njit(cache=True, nogil=True)
def arc_lambda_nodes(A0h, W, sgrid, max_sweeps, tol):
    """All eigenvalues of ``B_s`` at each node of ``sgrid``, by warm-started
    Aberth on the Hessenberg characteristic polynomial.

    Warm starting from the previous node keeps a stable index correspondence
    along the arc.  Returns ``(lams, fail_node)`` with ``fail_node = -1`` on
    success and the first non-converged node index otherwise.
    """
    m = sgrid.shape[0]
    n = A0h.shape[0]
    lams = np.empty((m, n), dtype=np.complex128)
    for j in range(m):
        cs = np.cos(sgrid[j])
        sn = np.sin(sgrid[j])
        B = A0h * cs + W * sn
        H = hessenberg_form(B)
        c = charpoly_hessenberg(H)
        if j == 0:
            z = aberth_initial(c)
        else:
            z = lams[j - 1].copy()
        _sw, conv = aberth_sweeps(c, z, max_sweeps, tol)
        if not conv:
            return lams, j
        lams[j] = z
    return lams, -1
