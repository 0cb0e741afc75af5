"""Compiled right-hand sides and steppers.

State vectors are packed as one complex128 array
``y = [x (N), v (N), l (N*N row-major), rho (N*N row-major), V (N*N row-major)]``;
x and v keep a zero imaginary part throughout. V holds the instantaneous
eigenvectors (columns) in the fixed basis, carried by parallel transport
dV/dt = -lam_dot V g_full. The gas and rho never read V except to express the
fixed-basis noise rate in the eigenbasis, e_eig = V^dagger e V.

Status codes returned by the kernels: 0 ok, 1 degenerate levels (strict
mode), 2 substep budget exhausted.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

OK = 0
DEGENERATE = 1
SUBSTEP_BUDGET = 2

WINDOW_FULL = 0
WINDOW_INDEX = 1
WINDOW_ENERGY = 2

MAX_SUBSTEPS = 1_000_000


@njit(cache=True, error_model="numpy", inline="always")
def schedule_at(code, a, b, log_scale, t):
    """(lambda, dlambda/dt) for schedule kind code 0=log, 1=linear, 2=constant."""
    if code == 0:
        c = a * log_scale
        return c * math.log(b * t), c / t
    if code == 1:
        return a * t, a
    return a, 0.0


@njit(cache=True, error_model="numpy", inline="always")
def inverse_gaps(x, floor, strict, inv):
    """inv[m, n] = 1/(x_m - x_n) off the diagonal, 0 on it.

    Gaps below ``floor`` either abort (strict) or are clamped to +-floor with
    the sign of the ascending-rank ordering kept.
    """
    n = x.shape[0]
    for m in range(n):
        inv[m, m] = 0.0
        for k in range(m + 1, n):
            d = x[m] - x[k]
            if abs(d) < floor:
                if strict:
                    return DEGENERATE, m, k
                if d > 0.0:
                    d = floor
                else:
                    d = -floor
            inv[m, k] = 1.0 / d
            inv[k, m] = -inv[m, k]
    return OK, -1, -1


@njit(cache=True, error_model="numpy", inline="always")
def level_rates(x, v, l, inv, e, noisy, dx, dv, dl):
    """d/dlambda of (x, v, l); adds the noise-rate terms when ``noisy``."""
    n = x.shape[0]
    for m in range(n):
        acc = 0.0
        for k in range(n):
            if k != m:
                w = inv[m, k]
                acc += 2.0 * (l[m, k].real ** 2 + l[m, k].imag ** 2) * w * w * w
        dx[m] = v[m]
        dv[m] = acc
    for m in range(n):
        dl[m, m] = 0.0
        for k in range(m + 1, n):
            acc = 0.0j
            for j in range(n):
                if j != m and j != k:
                    a = inv[m, j]
                    b = inv[j, k]
                    acc += l[m, j] * l[j, k] * (a * a - b * b)
            dl[m, k] = acc
    if noisy:
        for m in range(n):
            acc = 0.0
            for k in range(n):
                if k != m:
                    w = inv[m, k]
                    acc += 2.0 * (l[m, k] * e[k, m]).real * w * w
            dx[m] = dx[m] + e[m, m].real
            dv[m] = dv[m] + acc
        for m in range(n):
            for k in range(m + 1, n):
                acc = 0.0j
                for j in range(n):
                    if j != m and j != k:
                        acc += (l[m, j] * e[j, k] - e[m, j] * l[j, k]) * inv[m, j] * inv[k, j]
                gap = 1.0 / inv[m, k]
                extra = gap * acc - e[m, k] * (v[m] - v[k]) + l[m, k] * (e[m, m].real - e[k, k].real) * inv[m, k]
                dl[m, k] = dl[m, k] + extra
    for m in range(n):
        for k in range(m + 1, n):
            dl[k, m] = -dl[m, k].conjugate()


@njit(cache=True, error_model="numpy", inline="always")
def window_mask(x, mode, eps, mask):
    n = x.shape[0]
    for a in range(n):
        for b in range(n):
            if mode == WINDOW_FULL:
                mask[a, b] = 1.0
            elif mode == WINDOW_INDEX:
                mask[a, b] = 1.0 if abs(a - b) <= eps else 0.0
            else:
                mask[a, b] = 1.0 if abs(x[a] - x[b]) <= eps else 0.0


@njit(cache=True, error_model="numpy", inline="always")
def coupling(l, inv, e, noisy, mask, g):
    """g[u, n] = l_un/(x_u-x_n)^2 (+ e_un/(x_u-x_n)), masked; anti-Hermitian."""
    n = l.shape[0]
    for u in range(n):
        g[u, u] = 0.0
        for k in range(n):
            if k != u:
                w = inv[u, k]
                val = l[u, k] * w * w
                if noisy:
                    val = val + e[u, k] * w
                g[u, k] = val * mask[u, k]


@njit(cache=True, error_model="numpy", inline="always")
def rho_rates(x, rho, g, lam_dot, sign, mode, eps, drop_far, out):
    """d rho/dt = lam_dot * sign * (g rho - rho g) - i [diag(x), rho].

    Upper triangle is computed and mirrored; diagonal uses pairwise real
    fluxes so occupations stay real.
    """
    n = x.shape[0]
    s = lam_dot * sign
    for u in range(n):
        out[u, u] = 0.0
    for u in range(n):
        for k in range(u + 1, n):
            # flux into u from k: g_uk rho_ku - rho_uk g_ku = 2 Re(g_uk rho_ku)
            f = 2.0 * (g[u, k] * rho[k, u]).real
            out[u, u] = out[u, u] + f
            out[k, k] = out[k, k] - f
    for u in range(n):
        out[u, u] = s * out[u, u]
    for u in range(n):
        for w in range(u + 1, n):
            acc = 0.0j
            for k in range(n):
                acc += g[u, k] * rho[k, w] - rho[u, k] * g[k, w]
            val = s * acc - 1j * (x[u] - x[w]) * rho[u, w]
            if drop_far and mode == WINDOW_INDEX and (w - u) > eps:
                val = 0.0j
            out[u, w] = val
            out[w, u] = val.conjugate()


@njit(cache=True, error_model="numpy")
def state_size(n):
    return 2 * n + 3 * n * n


@njit(cache=True, error_model="numpy")
def make_work(n):
    """Scratch arrays for one trajectory, reused by every stage evaluation."""
    size = state_size(n)
    real_v = (np.empty(n), np.empty(n), np.empty(n), np.empty(n))  # x, v, dx, dv
    real_m = (np.empty((n, n)), np.empty((n, n)), np.ones((n, n)))  # inv, mask, full
    cm = (np.empty((n, n), dtype=np.complex128), np.empty((n, n), dtype=np.complex128),
          np.empty((n, n), dtype=np.complex128), np.zeros((n, n), dtype=np.complex128),
          np.empty((n, n), dtype=np.complex128), np.empty((n, n), dtype=np.complex128),
          np.empty((n, n), dtype=np.complex128), np.empty((n, n), dtype=np.complex128),
          np.empty((n, n), dtype=np.complex128))  # l, rho, vec, ee, dl, g_full, g, drho, tmp
    stages = (np.empty(size, dtype=np.complex128), np.empty(size, dtype=np.complex128),
              np.empty(size, dtype=np.complex128), np.empty(size, dtype=np.complex128),
              np.empty(size, dtype=np.complex128), np.empty(size, dtype=np.complex128),
              np.empty(size, dtype=np.complex128))  # k1..k4, tmp, cur, nxt
    return real_v, real_m, cm, stages


@njit(cache=True, error_model="numpy", inline="always")
def unpack(y, n, x, v, l, rho, vec):
    for i in range(n):
        x[i] = y[i].real
        v[i] = y[n + i].real
    base = 2 * n
    nn = n * n
    for i in range(n):
        for j in range(n):
            l[i, j] = y[base + i * n + j]
            rho[i, j] = y[base + nn + i * n + j]
            vec[i, j] = y[base + 2 * nn + i * n + j]


@njit(cache=True, error_model="numpy", inline="always")
def eigenbasis_rate(vec, e, tmp, out):
    """out = V^dagger e V, Hermitian by construction."""
    n = vec.shape[0]
    for i in range(n):
        for j in range(n):
            acc = 0.0j
            for k in range(n):
                acc += e[i, k] * vec[k, j]
            tmp[i, j] = acc
    for i in range(n):
        acc = 0.0
        for k in range(n):
            acc += (vec[k, i].conjugate() * tmp[k, i]).real
        out[i, i] = acc
        for j in range(i + 1, n):
            acc = 0.0j
            for k in range(n):
                acc += vec[k, i].conjugate() * tmp[k, j]
            out[i, j] = acc
            out[j, i] = acc.conjugate()


@njit(cache=True, error_model="numpy")
def coupled_rates(t, y, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, out):
    """Packed d y/dt at time t; ``e`` is the noise rate in the fixed basis."""
    code, a, b, log_scale = sched
    lam, lam_dot = schedule_at(code, a, b, log_scale, t)
    x, v, dx, dv = work[0]
    inv, mask, full = work[1]
    l, rho, vec, ee, dl, g_full, g, drho, tmp = work[2]
    unpack(y, n, x, v, l, rho, vec)
    status, i, j = inverse_gaps(x, floor, strict, inv)
    if status != OK:
        return status
    if noisy:
        eigenbasis_rate(vec, e, tmp, ee)
    level_rates(x, v, l, inv, ee, noisy, dx, dv, dl)
    coupling(l, inv, ee, noisy, full, g_full)
    if mode == WINDOW_FULL:
        rho_rates(x, rho, g_full, lam_dot, sign, mode, eps, drop_far, drho)
    else:
        window_mask(x, mode, eps, mask)
        coupling(l, inv, ee, noisy, mask, g)
        rho_rates(x, rho, g, lam_dot, sign, mode, eps, drop_far, drho)
    for k in range(n):
        out[k] = lam_dot * dx[k]
        out[n + k] = lam_dot * dv[k]
    base = 2 * n
    nn = n * n
    for p in range(n):
        for q in range(n):
            out[base + p * n + q] = lam_dot * dl[p, q]
            out[base + nn + p * n + q] = drho[p, q]
            acc = 0.0j
            for k in range(n):
                acc += vec[p, k] * g_full[k, q]
            out[base + 2 * nn + p * n + q] = -lam_dot * acc
    return OK


@njit(cache=True, error_model="numpy", inline="always")
def rate_from_work(n, lam_dot, work):
    """Fastest rate in the coupling for the state last passed to
    ``coupled_rates``: |lambda_dot| times the larger of |g_un| (eigenbasis
    rotation) and |d(x_u - x_n)/dlambda| / |x_u - x_n| (gap change)."""
    x, v, dx, dv = work[0]
    inv, mask, full = work[1]
    l, rho, vec, ee, dl, g_full, g, drho, tmp = work[2]
    best = 0.0
    for u in range(n):
        for k in range(n):
            if k != u:
                r = abs(g_full[u, k])
                q = abs((dx[u] - dx[k]) * inv[u, k])
                if q > r:
                    r = q
                if r > best:
                    best = r
    return abs(lam_dot) * best


@njit(cache=True, error_model="numpy", inline="always")
def hermitize_rho(y, n):
    """Symmetrise the packed rho in place; returns the largest change."""
    base = 2 * n + n * n
    change = 0.0
    for i in range(n):
        for j in range(i, n):
            a = y[base + i * n + j]
            b = y[base + j * n + i]
            h = 0.5 * (a + b.conjugate())
            c = abs(h - a)
            if c > change:
                change = c
            y[base + i * n + j] = h
            y[base + j * n + i] = h.conjugate()
    return change


@njit(cache=True, error_model="numpy")
def rk4_advance(t, h, y, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, y_out,
                have_k1=False):
    """Classical RK4; with ``have_k1`` the first stage already sits in work."""
    size = y.shape[0]
    k1, k2, k3, k4, tmp, _, _ = work[3]
    if not have_k1:
        st = coupled_rates(t, y, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, k1)
        if st != OK:
            return st
    half = 0.5 * h
    for i in range(size):
        tmp[i] = y[i] + half * k1[i]
    st = coupled_rates(t + half, tmp, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, k2)
    if st != OK:
        return st
    for i in range(size):
        tmp[i] = y[i] + half * k2[i]
    st = coupled_rates(t + half, tmp, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, k3)
    if st != OK:
        return st
    for i in range(size):
        tmp[i] = y[i] + h * k3[i]
    st = coupled_rates(t + h, tmp, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, k4)
    if st != OK:
        return st
    sixth = h / 6.0
    for i in range(size):
        y_out[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return OK


@njit(cache=True, error_model="numpy")
def euler_advance(t, h, y, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, y_out,
                  have_k1=False):
    size = y.shape[0]
    k1 = work[3][0]
    if not have_k1:
        st = coupled_rates(t, y, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far, work, k1)
        if st != OK:
            return st
    for i in range(size):
        y_out[i] = y[i] + h * k1[i]
    return OK


@njit(cache=True, error_model="numpy")
def advance_step(method, t, t_next, y, n, sched, e, noisy, floor, strict, sign, mode, eps,
                 drop_far, max_rotation, work, y_out):
    """One grid step [t, t_next], split into substeps when the coupling would
    turn by more than ``max_rotation`` within one (0 disables this).

    Returns (status, substeps, max hermitization change).
    """
    size = y.shape[0]
    cur, nxt = work[3][5], work[3][6]
    for i in range(size):
        cur[i] = y[i]
    tc = t
    count = 0
    herm = 0.0
    code, a, b, log_scale = sched
    while True:
        h = t_next - tc
        have_k1 = False
        if max_rotation > 0.0:
            st = coupled_rates(tc, cur, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far,
                               work, work[3][0])
            if st != OK:
                return st, count, herm
            have_k1 = True
            lam, lam_dot = schedule_at(code, a, b, log_scale, tc)
            r = rate_from_work(n, lam_dot, work)
            if r * h > max_rotation:
                h = max_rotation / r
        if method == 0:
            st = rk4_advance(tc, h, cur, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far,
                             work, nxt, have_k1)
        else:
            st = euler_advance(tc, h, cur, n, sched, e, noisy, floor, strict, sign, mode, eps, drop_far,
                               work, nxt, have_k1)
        if st != OK:
            return st, count, herm
        c = hermitize_rho(nxt, n)
        if c > herm:
            herm = c
        count += 1
        last = tc + h >= t_next
        tc = t_next if last else tc + h
        for i in range(size):
            cur[i] = nxt[i]
        if last:
            break
        if count >= MAX_SUBSTEPS:
            return SUBSTEP_BUDGET, count, herm
    for i in range(size):
        y_out[i] = cur[i]
    return OK, count, herm


@njit(cache=True, error_model="numpy")
def run_loop(method, t0, dt, n_steps, t_end, y0, n, sched, increments, dlams, noisy, floor, strict,
             sign, mode, eps, drop_far, max_rotation, stride, rec_t, rec_y):
    """Integrate n_steps grid steps, recording every ``stride`` steps.

    Returns (status, failure time, recorded count, total substeps, max
    hermitization change).
    """
    size = y0.shape[0]
    y = y0.copy()
    nxt = np.empty(size, dtype=np.complex128)
    work = make_work(n)
    e = np.zeros((n, n), dtype=np.complex128)
    rec_t[0] = t0
    for i in range(size):
        rec_y[0, i] = y[i]
    rec = 1
    total = 0
    herm = 0.0
    for k in range(n_steps):
        t = t0 + k * dt
        t_next = t_end if k == n_steps - 1 else t0 + (k + 1) * dt
        if noisy:
            for i in range(n):
                for j in range(n):
                    e[i, j] = increments[k, i, j] / dlams[k]
        st, count, hc = advance_step(method, t, t_next, y, n, sched, e, noisy, floor, strict, sign,
                                     mode, eps, drop_far, max_rotation, work, nxt)
        if st != OK:
            return st, t, rec, total, herm
        total += count
        if hc > herm:
            herm = hc
        for i in range(size):
            y[i] = nxt[i]
        if (k + 1) % stride == 0 or k == n_steps - 1:
            rec_t[rec] = t_next
            for i in range(size):
                rec_y[rec, i] = y[i]
            rec += 1
    return OK, t_end, rec, total, herm
