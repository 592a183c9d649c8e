"""Numba-accelerated network kernels (default backend).

Same contracts as ``_kernels_numpy``; see that module for the shape and
layout conventions.  Matrix products go through ``np.dot`` (BLAS), the
activation/jet chains are fused elementwise loops.  Hessian components are
kept as separate contiguous arrays so every ``np.dot`` sees C-contiguous
operands.  No fastmath: accumulation order is fixed, results are
deterministic for a given build.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_NOPT = {"cache": True}


@njit(**_NOPT)
def _sigmoid_scalar(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(**_NOPT)
def _add_bias(Z, b):
    n, w = Z.shape
    for i in range(n):
        for u in range(w):
            Z[i, u] += b[u]


@njit(**_NOPT)
def _atb(A, B):
    # A.T @ B with contiguous copy of the transpose for BLAS
    return np.dot(np.ascontiguousarray(A.T), B)


@njit(**_NOPT)
def forward(Wts, bs, X):
    a = X
    L = len(Wts)
    for l in range(L - 1):
        z = np.dot(a, Wts[l])
        _add_bias(z, bs[l])
        n, w = z.shape
        for i in range(n):
            for u in range(w):
                z[i, u] = _sigmoid_scalar(z[i, u])
        a = z
    out = np.dot(a, Wts[L - 1])
    _add_bias(out, bs[L - 1])
    return out


@njit(**_NOPT)
def _first_layer_jets2(Wt, b, X):
    n = X.shape[0]
    w = Wt.shape[1]
    z = np.dot(X, Wt)
    gz0 = np.empty((n, w))
    gz1 = np.empty((n, w))
    hz0 = np.zeros((n, w))
    hz1 = np.zeros((n, w))
    hz2 = np.zeros((n, w))
    for i in range(n):
        for u in range(w):
            z[i, u] += b[u]
            gz0[i, u] = Wt[0, u]
            gz1[i, u] = Wt[1, u]
    return z, gz0, gz1, hz0, hz1, hz2


@njit(**_NOPT)
def _act2_inplace(z, gz0, gz1, hz0, hz1, hz2):
    # overwrite pre-activation jets with post-activation jets
    n, w = z.shape
    for i in range(n):
        for u in range(w):
            s = _sigmoid_scalar(z[i, u])
            s1 = s * (1.0 - s)
            s2 = s1 * (1.0 - 2.0 * s)
            g0 = gz0[i, u]
            g1 = gz1[i, u]
            z[i, u] = s
            gz0[i, u] = s1 * g0
            gz1[i, u] = s1 * g1
            hz0[i, u] = s2 * (g0 * g0) + s1 * hz0[i, u]
            hz1[i, u] = s2 * (g0 * g1) + s1 * hz1[i, u]
            hz2[i, u] = s2 * (g1 * g1) + s1 * hz2[i, u]


@njit(**_NOPT)
def _pack2(v0, v1):
    n, w = v0.shape
    out = np.empty((n, w, 2))
    for i in range(n):
        for u in range(w):
            out[i, u, 0] = v0[i, u]
            out[i, u, 1] = v1[i, u]
    return out


@njit(**_NOPT)
def _pack3(v0, v1, v2):
    n, w = v0.shape
    out = np.empty((n, w, 3))
    for i in range(n):
        for u in range(w):
            out[i, u, 0] = v0[i, u]
            out[i, u, 1] = v1[i, u]
            out[i, u, 2] = v2[i, u]
    return out


@njit(**_NOPT)
def _unpack2(arr):
    return np.ascontiguousarray(arr[:, :, 0]), np.ascontiguousarray(arr[:, :, 1])


@njit(**_NOPT)
def _unpack3(arr):
    return (
        np.ascontiguousarray(arr[:, :, 0]),
        np.ascontiguousarray(arr[:, :, 1]),
        np.ascontiguousarray(arr[:, :, 2]),
    )


@njit(**_NOPT)
def jet2(Wts, bs, X):
    L = len(Wts)
    if L == 1:
        # affine net: constant gradient, zero hessian
        Wt = Wts[0]
        n = X.shape[0]
        w = Wt.shape[1]
        v = np.dot(X, Wt)
        _add_bias(v, bs[0])
        g = np.empty((n, w, 2))
        h = np.zeros((n, w, 3))
        for i in range(n):
            for u in range(w):
                g[i, u, 0] = Wt[0, u]
                g[i, u, 1] = Wt[1, u]
        return v, g, h
    a, g0, g1, h0, h1, h2 = _first_layer_jets2(Wts[0], bs[0], X)
    _act2_inplace(a, g0, g1, h0, h1, h2)
    for l in range(1, L - 1):
        Wt, b = Wts[l], bs[l]
        z = np.dot(a, Wt)
        _add_bias(z, b)
        g0, g1 = np.dot(g0, Wt), np.dot(g1, Wt)
        h0, h1, h2 = np.dot(h0, Wt), np.dot(h1, Wt), np.dot(h2, Wt)
        a = z
        _act2_inplace(a, g0, g1, h0, h1, h2)
    Wt, b = Wts[L - 1], bs[L - 1]
    v = np.dot(a, Wt)
    _add_bias(v, b)
    return (
        v,
        _pack2(np.dot(g0, Wt), np.dot(g1, Wt)),
        _pack3(np.dot(h0, Wt), np.dot(h1, Wt), np.dot(h2, Wt)),
    )


@njit(**_NOPT)
def jet1(Wts, bs, X):
    L = len(Wts)
    if L == 1:
        Wt = Wts[0]
        n = X.shape[0]
        w = Wt.shape[1]
        v = np.dot(X, Wt)
        _add_bias(v, bs[0])
        g = np.empty((n, w, 2))
        for i in range(n):
            for u in range(w):
                g[i, u, 0] = Wt[0, u]
                g[i, u, 1] = Wt[1, u]
        return v, g
    Wt, b = Wts[0], bs[0]
    n = X.shape[0]
    w = Wt.shape[1]
    a = np.dot(X, Wt)
    g0 = np.empty((n, w))
    g1 = np.empty((n, w))
    for i in range(n):
        for u in range(w):
            s = _sigmoid_scalar(a[i, u] + b[u])
            s1 = s * (1.0 - s)
            a[i, u] = s
            g0[i, u] = s1 * Wt[0, u]
            g1[i, u] = s1 * Wt[1, u]
    for l in range(1, L - 1):
        Wt, b = Wts[l], bs[l]
        z = np.dot(a, Wt)
        g0, g1 = np.dot(g0, Wt), np.dot(g1, Wt)
        nw = z.shape[1]
        for i in range(n):
            for u in range(nw):
                s = _sigmoid_scalar(z[i, u] + b[u])
                s1 = s * (1.0 - s)
                z[i, u] = s
                g0[i, u] = s1 * g0[i, u]
                g1[i, u] = s1 * g1[i, u]
        a = z
    Wt, b = Wts[L - 1], bs[L - 1]
    v = np.dot(a, Wt)
    _add_bias(v, b)
    return v, _pack2(np.dot(g0, Wt), np.dot(g1, Wt))


@njit(**_NOPT)
def _param_sizes(Wts, bs):
    p = 0
    for l in range(len(Wts)):
        p += Wts[l].shape[0] * Wts[l].shape[1] + bs[l].shape[0]
    return p


@njit(**_NOPT)
def _store_layer_grad(dtheta, off, dW, db):
    # dW is (fan_out, fan_in) row-major in the flat layout, then bias
    w, wp = dW.shape
    for u in range(w):
        for v in range(wp):
            dtheta[off] = dW[u, v]
            off += 1
    for u in range(w):
        dtheta[off] = db[u]
        off += 1
    return off


@njit(**_NOPT)
def _col_sum(A):
    n, w = A.shape
    out = np.zeros(w)
    for i in range(n):
        for u in range(w):
            out[u] += A[i, u]
    return out


@njit(**_NOPT)
def vjp0(Wts, bs, X, bar_v):
    L = len(Wts)
    n = X.shape[0]
    # forward, caching post-activations
    acts = [X]
    a = X
    for l in range(L - 1):
        z = np.dot(a, Wts[l])
        b = bs[l]
        w = z.shape[1]
        for i in range(n):
            for u in range(w):
                z[i, u] = _sigmoid_scalar(z[i, u] + b[u])
        acts.append(z)
        a = z
    dtheta = np.empty(_param_sizes(Wts, bs))
    offs = np.empty(L, dtype=np.int64)
    off = 0
    for l in range(L):
        offs[l] = off
        off += Wts[l].shape[0] * Wts[l].shape[1] + bs[l].shape[0]
    bar_a = bar_v
    for l in range(L - 1, -1, -1):
        dW = _atb(bar_a, acts[l])
        _store_layer_grad(dtheta, offs[l], dW, _col_sum(bar_a))
        if l > 0:
            W = np.ascontiguousarray(Wts[l].T)
            nxt = np.dot(bar_a, W)
            s = acts[l]
            w = s.shape[1]
            for i in range(n):
                for u in range(w):
                    sv = s[i, u]
                    nxt[i, u] *= sv * (1.0 - sv)
            bar_a = nxt
    return dtheta


@njit(**_NOPT)
def vjp1(Wts, bs, X, bar_v, bar_g):
    L = len(Wts)
    n = X.shape[0]
    a = X
    in_a = [X]
    in_g0 = [np.empty((0, 0))]
    in_g1 = [np.empty((0, 0))]
    cache_s = [np.empty((0, 0))]
    cache_gz0 = [np.empty((0, 0))]
    cache_gz1 = [np.empty((0, 0))]
    g0 = np.empty((0, 0))
    g1 = np.empty((0, 0))
    for l in range(L - 1):
        Wt, b = Wts[l], bs[l]
        w = Wt.shape[1]
        z = np.dot(a, Wt)
        if l == 0:
            gz0 = np.empty((n, w))
            gz1 = np.empty((n, w))
            for i in range(n):
                for u in range(w):
                    gz0[i, u] = Wt[0, u]
                    gz1[i, u] = Wt[1, u]
        else:
            gz0 = np.dot(g0, Wt)
            gz1 = np.dot(g1, Wt)
        s = np.empty((n, w))
        ag0 = np.empty((n, w))
        ag1 = np.empty((n, w))
        for i in range(n):
            for u in range(w):
                sv = _sigmoid_scalar(z[i, u] + b[u])
                s1 = sv * (1.0 - sv)
                s[i, u] = sv
                ag0[i, u] = s1 * gz0[i, u]
                ag1[i, u] = s1 * gz1[i, u]
        cache_s.append(s)
        cache_gz0.append(gz0)
        cache_gz1.append(gz1)
        a, g0, g1 = s, ag0, ag1
        in_a.append(a)
        in_g0.append(g0)
        in_g1.append(g1)
    dtheta = np.empty(_param_sizes(Wts, bs))
    offs = np.empty(L, dtype=np.int64)
    off = 0
    for l in range(L):
        offs[l] = off
        off += Wts[l].shape[0] * Wts[l].shape[1] + bs[l].shape[0]
    bar_a = bar_v
    bg0, bg1 = _unpack2(bar_g)
    for l in range(L - 1, -1, -1):
        dW = _atb(bar_a, in_a[l])
        if l > 0:
            dW += _atb(bg0, in_g0[l]) + _atb(bg1, in_g1[l])
        else:
            # input jets are the identity: gradient adjoints land on W columns
            w, wp = dW.shape
            c0 = _col_sum(bg0)
            c1 = _col_sum(bg1)
            for u in range(w):
                dW[u, 0] += c0[u]
                dW[u, 1] += c1[u]
        _store_layer_grad(dtheta, offs[l], dW, _col_sum(bar_a))
        if l > 0:
            W = np.ascontiguousarray(Wts[l].T)
            pa = np.dot(bar_a, W)
            pg0 = np.dot(bg0, W)
            pg1 = np.dot(bg1, W)
            s = cache_s[l]
            gz0 = cache_gz0[l]
            gz1 = cache_gz1[l]
            w = s.shape[1]
            for i in range(n):
                for u in range(w):
                    sv = s[i, u]
                    s1 = sv * (1.0 - sv)
                    s2 = s1 * (1.0 - 2.0 * sv)
                    bz = pa[i, u] * s1 + pg0[i, u] * (s2 * gz0[i, u]) + pg1[i, u] * (s2 * gz1[i, u])
                    pa[i, u] = bz
                    pg0[i, u] *= s1
                    pg1[i, u] *= s1
            bar_a, bg0, bg1 = pa, pg0, pg1
    return dtheta


@njit(**_NOPT)
def vjp2(Wts, bs, X, bar_v, bar_g, bar_h):
    L = len(Wts)
    n = X.shape[0]
    a = X
    empty = np.empty((0, 0))
    in_a = [X]
    in_g0 = [empty]
    in_g1 = [empty]
    in_h0 = [empty]
    in_h1 = [empty]
    in_h2 = [empty]
    cache_s = [empty]
    cache_gz0 = [empty]
    cache_gz1 = [empty]
    cache_hz0 = [empty]
    cache_hz1 = [empty]
    cache_hz2 = [empty]
    g0 = empty
    g1 = empty
    h0 = empty
    h1 = empty
    h2 = empty
    for l in range(L - 1):
        Wt, b = Wts[l], bs[l]
        w = Wt.shape[1]
        z = np.dot(a, Wt)
        _add_bias(z, b)
        if l == 0:
            gz0 = np.empty((n, w))
            gz1 = np.empty((n, w))
            hz0 = np.zeros((n, w))
            hz1 = np.zeros((n, w))
            hz2 = np.zeros((n, w))
            for i in range(n):
                for u in range(w):
                    gz0[i, u] = Wt[0, u]
                    gz1[i, u] = Wt[1, u]
        else:
            gz0 = np.dot(g0, Wt)
            gz1 = np.dot(g1, Wt)
            hz0 = np.dot(h0, Wt)
            hz1 = np.dot(h1, Wt)
            hz2 = np.dot(h2, Wt)
        s = np.empty((n, w))
        ag0 = np.empty((n, w))
        ag1 = np.empty((n, w))
        ah0 = np.empty((n, w))
        ah1 = np.empty((n, w))
        ah2 = np.empty((n, w))
        for i in range(n):
            for u in range(w):
                sv = _sigmoid_scalar(z[i, u])
                s1 = sv * (1.0 - sv)
                s2 = s1 * (1.0 - 2.0 * sv)
                gg0 = gz0[i, u]
                gg1 = gz1[i, u]
                s[i, u] = sv
                ag0[i, u] = s1 * gg0
                ag1[i, u] = s1 * gg1
                ah0[i, u] = s2 * (gg0 * gg0) + s1 * hz0[i, u]
                ah1[i, u] = s2 * (gg0 * gg1) + s1 * hz1[i, u]
                ah2[i, u] = s2 * (gg1 * gg1) + s1 * hz2[i, u]
        cache_s.append(s)
        cache_gz0.append(gz0)
        cache_gz1.append(gz1)
        cache_hz0.append(hz0)
        cache_hz1.append(hz1)
        cache_hz2.append(hz2)
        a, g0, g1, h0, h1, h2 = s, ag0, ag1, ah0, ah1, ah2
        in_a.append(a)
        in_g0.append(g0)
        in_g1.append(g1)
        in_h0.append(h0)
        in_h1.append(h1)
        in_h2.append(h2)
    dtheta = np.empty(_param_sizes(Wts, bs))
    offs = np.empty(L, dtype=np.int64)
    off = 0
    for l in range(L):
        offs[l] = off
        off += Wts[l].shape[0] * Wts[l].shape[1] + bs[l].shape[0]
    bar_a = bar_v
    bg0, bg1 = _unpack2(bar_g)
    bh0, bh1, bh2 = _unpack3(bar_h)
    for l in range(L - 1, -1, -1):
        dW = _atb(bar_a, in_a[l])
        if l > 0:
            dW += _atb(bg0, in_g0[l]) + _atb(bg1, in_g1[l])
            dW += _atb(bh0, in_h0[l]) + _atb(bh1, in_h1[l]) + _atb(bh2, in_h2[l])
        else:
            w = dW.shape[0]
            c0 = _col_sum(bg0)
            c1 = _col_sum(bg1)
            for u in range(w):
                dW[u, 0] += c0[u]
                dW[u, 1] += c1[u]
            # input hessian seeds are zero: no weight contribution
        _store_layer_grad(dtheta, offs[l], dW, _col_sum(bar_a))
        if l > 0:
            W = np.ascontiguousarray(Wts[l].T)
            pa = np.dot(bar_a, W)
            pg0 = np.dot(bg0, W)
            pg1 = np.dot(bg1, W)
            ph0 = np.dot(bh0, W)
            ph1 = np.dot(bh1, W)
            ph2 = np.dot(bh2, W)
            s = cache_s[l]
            gz0 = cache_gz0[l]
            gz1 = cache_gz1[l]
            hz0 = cache_hz0[l]
            hz1 = cache_hz1[l]
            hz2 = cache_hz2[l]
            w = s.shape[1]
            for i in range(n):
                for u in range(w):
                    sv = s[i, u]
                    s1 = sv * (1.0 - sv)
                    s2 = s1 * (1.0 - 2.0 * sv)
                    s3 = s1 * (1.0 - 6.0 * s1)
                    gg0 = gz0[i, u]
                    gg1 = gz1[i, u]
                    a0 = pa[i, u]
                    q0 = pg0[i, u]
                    q1 = pg1[i, u]
                    r0 = ph0[i, u]
                    r1 = ph1[i, u]
                    r2 = ph2[i, u]
                    bz = (
                        a0 * s1
                        + q0 * (s2 * gg0)
                        + q1 * (s2 * gg1)
                        + r0 * (s3 * (gg0 * gg0) + s2 * hz0[i, u])
                        + r1 * (s3 * (gg0 * gg1) + s2 * hz1[i, u])
                        + r2 * (s3 * (gg1 * gg1) + s2 * hz2[i, u])
                    )
                    pa[i, u] = bz
                    pg0[i, u] = q0 * s1 + 2.0 * s2 * gg0 * r0 + s2 * gg1 * r1
                    pg1[i, u] = q1 * s1 + 2.0 * s2 * gg1 * r2 + s2 * gg0 * r1
                    ph0[i, u] = r0 * s1
                    ph1[i, u] = r1 * s1
                    ph2[i, u] = r2 * s1
            bar_a, bg0, bg1, bh0, bh1, bh2 = pa, pg0, pg1, ph0, ph1, ph2
    return dtheta
