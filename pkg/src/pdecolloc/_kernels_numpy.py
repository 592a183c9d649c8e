"""Pure-NumPy network kernels (fallback backend).

All kernels operate on batches of points and on per-layer transposed
weights ``Wt`` of shape ``(fan_in, fan_out)`` plus biases ``b`` of shape
``(fan_out,)``.  Spatial jets are restricted to two input dimensions;
Hessians use the compact symmetric layout ``[xx, xy, yy]``.

Shapes: ``X (N, d)``, values ``(N, out)``, gradients ``(N, out, 2)``,
Hessians ``(N, out, 3)``.  The flat parameter-gradient layout matches the
parameter vector: per layer, the weight matrix ``(fan_out, fan_in)`` in
row-major order followed by the bias vector.
"""

from __future__ import annotations

import numpy as np


def _sigmoid(z):
    # branch on sign to avoid overflow in exp
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _seed_jets(X):
    n, d = X.shape
    g = np.zeros((n, d, 2))
    g[:, 0, 0] = 1.0
    g[:, 1, 1] = 1.0
    h = np.zeros((n, d, 3))
    return g, h


def forward(Wts, bs, X):
    a = X
    for l in range(len(Wts) - 1):
        a = _sigmoid(a @ Wts[l] + bs[l])
    return a @ Wts[-1] + bs[-1]


def _affine_jets(Wt, b, a, g, h):
    z = a @ Wt + b
    gz = np.stack([g[:, :, 0] @ Wt, g[:, :, 1] @ Wt], axis=2)
    hz = np.stack([h[:, :, 0] @ Wt, h[:, :, 1] @ Wt, h[:, :, 2] @ Wt], axis=2)
    return z, gz, hz


def _act_jets(z, gz, hz):
    s = _sigmoid(z)
    s1 = s * (1.0 - s)
    s2 = s1 * (1.0 - 2.0 * s)
    g0, g1 = gz[:, :, 0], gz[:, :, 1]
    ag = s1[:, :, None] * gz
    ah = np.empty_like(hz)
    ah[:, :, 0] = s2 * (g0 * g0) + s1 * hz[:, :, 0]
    ah[:, :, 1] = s2 * (g0 * g1) + s1 * hz[:, :, 1]
    ah[:, :, 2] = s2 * (g1 * g1) + s1 * hz[:, :, 2]
    return s, ag, ah


def jet2(Wts, bs, X):
    a = X
    g, h = _seed_jets(X)
    for l in range(len(Wts) - 1):
        z, gz, hz = _affine_jets(Wts[l], bs[l], a, g, h)
        a, g, h = _act_jets(z, gz, hz)
    return _affine_jets(Wts[-1], bs[-1], a, g, h)


def jet1(Wts, bs, X):
    a = X
    g, _ = _seed_jets(X)
    for l in range(len(Wts) - 1):
        Wt, b = Wts[l], bs[l]
        z = a @ Wt + b
        gz = np.stack([g[:, :, 0] @ Wt, g[:, :, 1] @ Wt], axis=2)
        s = _sigmoid(z)
        s1 = s * (1.0 - s)
        a = s
        g = s1[:, :, None] * gz
    Wt, b = Wts[-1], bs[-1]
    v = a @ Wt + b
    gv = np.stack([g[:, :, 0] @ Wt, g[:, :, 1] @ Wt], axis=2)
    return v, gv


def _flat_grads(grads):
    parts = []
    for dW, db in grads:
        parts.append(dW.ravel())
        parts.append(db)
    return np.concatenate(parts)


def vjp0(Wts, bs, X, bar_v):
    """Parameter gradient of sum_n bar_v[n]·value[n] (values only)."""
    L = len(Wts)
    acts = [X]
    a = X
    for l in range(L - 1):
        a = _sigmoid(a @ Wts[l] + bs[l])
        acts.append(a)
    grads = [None] * L
    bar_a = bar_v
    for l in range(L - 1, -1, -1):
        grads[l] = (bar_a.T @ acts[l], bar_a.sum(axis=0))
        if l > 0:
            s = acts[l]
            bar_a = (bar_a @ Wts[l].T) * (s * (1.0 - s))
    return _flat_grads(grads)


def vjp1(Wts, bs, X, bar_v, bar_g):
    """Parameter gradient of Σ bar_v·value + Σ bar_g·grad."""
    L = len(Wts)
    a = X
    g, _ = _seed_jets(X)
    inputs = [(a, g)]
    caches = []
    for l in range(L - 1):
        Wt, b = Wts[l], bs[l]
        z = a @ Wt + b
        gz = np.stack([g[:, :, 0] @ Wt, g[:, :, 1] @ Wt], axis=2)
        s = _sigmoid(z)
        s1 = s * (1.0 - s)
        a = s
        g = s1[:, :, None] * gz
        caches.append((s, gz))
        inputs.append((a, g))
    grads = [None] * L
    bar_a, bar_gp = bar_v, bar_g
    for l in range(L - 1, -1, -1):
        a_p, g_p = inputs[l]
        dW = bar_a.T @ a_p + bar_gp[:, :, 0].T @ g_p[:, :, 0] + bar_gp[:, :, 1].T @ g_p[:, :, 1]
        grads[l] = (dW, bar_a.sum(axis=0))
        if l > 0:
            W = Wts[l].T
            bar_a = bar_a @ W
            bar_gp = np.stack([bar_gp[:, :, 0] @ W, bar_gp[:, :, 1] @ W], axis=2)
            s, gz = caches[l - 1]
            s1 = s * (1.0 - s)
            s2 = s1 * (1.0 - 2.0 * s)
            bz = bar_a * s1 + bar_gp[:, :, 0] * (s2 * gz[:, :, 0]) + bar_gp[:, :, 1] * (s2 * gz[:, :, 1])
            bar_gp = s1[:, :, None] * bar_gp
            bar_a = bz
    return _flat_grads(grads)


def vjp2(Wts, bs, X, bar_v, bar_g, bar_h):
    """Parameter gradient of Σ bar_v·value + Σ bar_g·grad + Σ bar_h·hess."""
    L = len(Wts)
    a = X
    g, h = _seed_jets(X)
    inputs = [(a, g, h)]
    caches = []
    for l in range(L - 1):
        z, gz, hz = _affine_jets(Wts[l], bs[l], a, g, h)
        s, ag, ah = _act_jets(z, gz, hz)
        a, g, h = s, ag, ah
        caches.append((s, gz, hz))
        inputs.append((a, g, h))
    grads = [None] * L
    bar_a, bar_gp, bar_hp = bar_v, bar_g, bar_h
    for l in range(L - 1, -1, -1):
        a_p, g_p, h_p = inputs[l]
        dW = bar_a.T @ a_p
        for i in range(2):
            dW += bar_gp[:, :, i].T @ g_p[:, :, i]
        for c in range(3):
            dW += bar_hp[:, :, c].T @ h_p[:, :, c]
        grads[l] = (dW, bar_a.sum(axis=0))
        if l > 0:
            W = Wts[l].T
            bar_a = bar_a @ W
            bar_gp = np.stack([bar_gp[:, :, 0] @ W, bar_gp[:, :, 1] @ W], axis=2)
            bar_hp = np.stack([bar_hp[:, :, c] @ W for c in range(3)], axis=2)
            s, gz, hz = caches[l - 1]
            s1 = s * (1.0 - s)
            s2 = s1 * (1.0 - 2.0 * s)
            s3 = s1 * (1.0 - 6.0 * s1)
            g0, g1 = gz[:, :, 0], gz[:, :, 1]
            bh0, bh1, bh2 = bar_hp[:, :, 0], bar_hp[:, :, 1], bar_hp[:, :, 2]
            bz = (
                bar_a * s1
                + bar_gp[:, :, 0] * (s2 * g0)
                + bar_gp[:, :, 1] * (s2 * g1)
                + bh0 * (s3 * (g0 * g0) + s2 * hz[:, :, 0])
                + bh1 * (s3 * (g0 * g1) + s2 * hz[:, :, 1])
                + bh2 * (s3 * (g1 * g1) + s2 * hz[:, :, 2])
            )
            bgz0 = bar_gp[:, :, 0] * s1 + 2.0 * s2 * g0 * bh0 + s2 * g1 * bh1
            bgz1 = bar_gp[:, :, 1] * s1 + 2.0 * s2 * g1 * bh2 + s2 * g0 * bh1
            bar_gp = np.stack([bgz0, bgz1], axis=2)
            bar_hp = s1[:, :, None] * bar_hp
            bar_a = bz
    return _flat_grads(grads)
