"""Compiled RK4 steppers for the discretized amplitude equations.

Amplitudes are stored with continuum normalization: B_k and C_pq carry the
same values as the functions of detuning they sample, and every sum over
modes is multiplied by the mode spacing ``w``.  This is the same system as
discrete amplitudes with coupling g*sqrt(w).
"""

import numba as nb
import numpy as np


@nb.njit(cache=True)
def rk4_single(alpha, beta, detuning, g, w, dt, nsteps):
    """d alpha/dt = -i g w sum(beta); d beta/dt = -i D beta - i g alpha.

    ``alpha`` is a length-1 array; both arrays are updated in place.
    """
    n = detuning.shape[0]
    kb = np.empty((4, n), np.complex128)
    ka = np.empty(4, np.complex128)
    bs = np.empty(n, np.complex128)
    coef = (0.0, 0.5, 0.5, 1.0)
    a0 = alpha[0]
    for _ in range(nsteps):
        for st in range(4):
            c = coef[st] * dt
            if st == 0:
                a_s = a0
                for k in range(n):
                    bs[k] = beta[k]
            else:
                a_s = a0 + c * ka[st - 1]
                for k in range(n):
                    bs[k] = beta[k] + c * kb[st - 1, k]
            tot = 0j
            for k in range(n):
                tot += bs[k]
                kb[st, k] = -1j * (detuning[k] * bs[k] + g * a_s)
            ka[st] = -1j * g * w * tot
        a0 += dt / 6.0 * (ka[0] + 2 * ka[1] + 2 * ka[2] + ka[3])
        for k in range(n):
            beta[k] += dt / 6.0 * (kb[0, k] + 2 * kb[1, k] + 2 * kb[2, k] + kb[3, k])
    alpha[0] = a0


@nb.njit(cache=True)
def rk4_two(a, b, c, detuning, u, g, w, dt, nsteps):
    """Two-excitation amplitude equations, updated in place.

    dA/dt    = -i U A - i sqrt2 g w sum_k B_k
    dB_k/dt  = -i D_k B_k - i sqrt2 g A - i g w sum_p C_pk
    dC_pq/dt = -i (D_p + D_q) C_pq - i g (B_p + B_q)

    ``a`` is a length-1 array.  C is advanced as a full matrix, so its
    symmetry is preserved by the dynamics rather than imposed.
    """
    n = detuning.shape[0]
    s2 = np.sqrt(2.0)
    kc = np.zeros((n, n), np.complex128)
    cacc = np.empty((n, n), np.complex128)
    bs = np.empty(n, np.complex128)
    kb = np.zeros(n, np.complex128)
    bacc = np.empty(n, np.complex128)
    col = np.empty(n, np.complex128)
    coef = (0.0, 0.5, 0.5, 1.0)
    wgt = (1.0, 2.0, 2.0, 1.0)
    a0 = a[0]
    for _ in range(nsteps):
        ka = 0j
        aacc = 0j
        for k in range(n):
            bacc[k] = 0j
        for st in range(4):
            h = coef[st] * dt
            a_s = a0 + h * ka
            for k in range(n):
                bs[k] = b[k] + h * kb[k]
                col[k] = 0j
            for p in range(n):
                bp = bs[p]
                dp = detuning[p]
                for q in range(n):
                    y = c[p, q] + h * kc[p, q]
                    col[q] += y
                    k_new = -1j * ((dp + detuning[q]) * y + g * (bp + bs[q]))
                    kc[p, q] = k_new
                    if st == 0:
                        cacc[p, q] = k_new
                    else:
                        cacc[p, q] += wgt[st] * k_new
            sb = 0j
            for k in range(n):
                sb += bs[k]
            ka_new = -1j * (u * a_s + s2 * g * w * sb)
            for k in range(n):
                kb[k] = -1j * (detuning[k] * bs[k] + s2 * g * a_s + g * w * col[k])
                bacc[k] += wgt[st] * kb[k]
            ka = ka_new
            aacc += wgt[st] * ka
        a0 += dt / 6.0 * aacc
        for k in range(n):
            b[k] += dt / 6.0 * bacc[k]
        for p in range(n):
            for q in range(n):
                c[p, q] += dt / 6.0 * cacc[p, q]
    a[0] = a0


@nb.njit(cache=True)
def _column_moments(c, l, mu):
    """mu[m, k] = sum_p (l_p + l_k)^m c[p, k] for m = 0..3."""
    n = c.shape[0]
    for m in range(4):
        for k in range(n):
            mu[m, k] = 0j
    for p in range(n):
        lp = l[p]
        for k in range(n):
            x = c[p, k]
            lk = lp + l[k]
            mu[0, k] += x
            x = x * lk
            mu[1, k] += x
            x = x * lk
            mu[2, k] += x
            x = x * lk
            mu[3, k] += x


@nb.njit(cache=True, fastmath=True)
def rk4_two_fused(a, b, c, detuning, u, g, w, dt, nsteps):
    """Same classical RK4 step as :func:`rk4_two`, one pass over C per step.

    The C equation is diagonal in (p, q) apart from the forcing
    -i g (B_p + B_q).  Every RK4 stage value of C is therefore a polynomial
    (degree <= 3) in L_pq = -i(D_p + D_q) acting on C, plus polynomials in L
    acting on the stage forcings.  The column sums that drive B follow from
    the column moments sum_p L_pk^m C_pk and from O(n) sums over the stage
    B vectors, so all four B/A stages are resolved first and C is then
    advanced entry by entry with the stage arithmetic done in registers.
    """
    n = detuning.shape[0]
    s2 = np.sqrt(2.0)
    l = np.empty(n, np.complex128)
    for k in range(n):
        l[k] = -1j * detuning[k]
    lam1 = 0j
    lam2 = 0j
    for k in range(n):
        lam1 += l[k]
        lam2 += l[k] * l[k]
    # Lam[m, k] = sum_p (l_p + l_k)^m
    big = np.empty((3, n), np.complex128)
    for k in range(n):
        big[0, k] = n
        big[1, k] = n * l[k] + lam1
        big[2, k] = n * l[k] * l[k] + 2 * l[k] * lam1 + lam2
    mu = np.empty((4, n), np.complex128)
    _column_moments(c, l, mu)
    newmu = np.empty((4, n), np.complex128)
    bst = np.empty((4, n), np.complex128)
    gf = np.empty((4, n), np.complex128)
    beta = np.empty((4, 3), np.complex128)
    kb = np.zeros(n, np.complex128)
    bacc = np.empty(n, np.complex128)
    col = np.empty(n, np.complex128)
    ha = 0.5 * dt
    hs = (0.0, ha, ha, dt)
    wgt = (1.0, 2.0, 2.0, 1.0)
    a0 = a[0]

    for _ in range(nsteps):
        ka = 0j
        aacc = 0j
        for k in range(n):
            bacc[k] = 0j
        for st in range(4):
            h = hs[st]
            a_s = a0 + h * ka
            b0 = 0j
            b1 = 0j
            b2 = 0j
            for k in range(n):
                v = b[k] + h * kb[k]
                bst[st, k] = v
                gf[st, k] = -1j * g * v
                b0 += v
                b1 += l[k] * v
                b2 += l[k] * l[k] * v
            beta[st, 0] = b0
            beta[st, 1] = b1
            beta[st, 2] = b2
            for k in range(n):
                lk = l[k]
                # nu_m^r[k] = sum_p L_pk^m F_r[p, k]
                if st == 0:
                    col[k] = mu[0, k]
                else:
                    nu00 = -1j * g * (beta[0, 0] + bst[0, k] * big[0, k])
                    if st == 1:
                        col[k] = mu[0, k] + ha * mu[1, k] + ha * nu00
                    else:
                        nu10 = -1j * g * (beta[0, 1] + lk * beta[0, 0] + bst[0, k] * big[1, k])
                        nu01 = -1j * g * (beta[1, 0] + bst[1, k] * big[0, k])
                        if st == 2:
                            col[k] = (mu[0, k] + ha * mu[1, k] + ha * ha * mu[2, k]
                                      + ha * ha * nu10 + ha * nu01)
                        else:
                            nu20 = -1j * g * (beta[0, 2] + 2 * lk * beta[0, 1]
                                              + lk * lk * beta[0, 0] + bst[0, k] * big[2, k])
                            nu11 = -1j * g * (beta[1, 1] + lk * beta[1, 0] + bst[1, k] * big[1, k])
                            nu02 = -1j * g * (beta[2, 0] + bst[2, k] * big[0, k])
                            col[k] = (mu[0, k] + dt * mu[1, k] + dt * ha * mu[2, k]
                                      + dt * ha * ha * mu[3, k] + dt * ha * ha * nu20
                                      + dt * ha * nu11 + dt * nu02)
            ka_new = -1j * (u * a_s + s2 * g * w * b0)
            for k in range(n):
                kb[k] = -1j * (detuning[k] * bst[st, k] + s2 * g * a_s + g * w * col[k])
                bacc[k] += wgt[st] * kb[k]
            ka = ka_new
            aacc += wgt[st] * ka
        a0 += dt / 6.0 * aacc
        for k in range(n):
            b[k] += dt / 6.0 * bacc[k]
            for m in range(4):
                newmu[m, k] = 0j
        for p in range(n):
            lp = l[p]
            f0p = gf[0, p]
            f1p = gf[1, p]
            f2p = gf[2, p]
            f3p = gf[3, p]
            for q in range(n):
                lq = lp + l[q]
                y = c[p, q]
                k1 = lq * y + (f0p + gf[0, q])
                k2 = lq * (y + ha * k1) + (f1p + gf[1, q])
                k3 = lq * (y + ha * k2) + (f2p + gf[2, q])
                k4 = lq * (y + dt * k3) + (f3p + gf[3, q])
                x = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                c[p, q] = x
                newmu[0, q] += x
                x = x * lq
                newmu[1, q] += x
                x = x * lq
                newmu[2, q] += x
                x = x * lq
                newmu[3, q] += x
        for m in range(4):
            for k in range(n):
                mu[m, k] = newmu[m, k]
    a[0] = a0
