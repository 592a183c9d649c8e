"""Multilayer perceptrons with analytic spatial jets and parameter gradients.

A network is described by a :class:`NetworkSpec`; its learnable state is a
single flat float64 vector ``theta`` with a fixed layout: for each layer,
the weight matrix ``W`` of shape ``(fan_out, fan_in)`` in row-major order,
followed by the bias vector, layer by layer from input to output.  Hidden
layers apply the logistic sigmoid; the output layer is affine.

Spatial derivatives (gradient and Hessian of outputs with respect to the
two input coordinates) are propagated analytically through the layers, and
parameter gradients of scalar losses are obtained by reverse accumulation
through the same recursions.  No numerical differencing anywhere; the test
suite verifies every derivative against central differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .rng import Xoshiro256PP


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture: dims, hidden widths, activation (sigmoid only)."""

    input_dim: int
    output_dim: int
    hidden_widths: tuple[int, ...]
    activation: str = "sigmoid"

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("input_dim and output_dim must be >= 1")
        if any(w < 1 for w in self.hidden_widths):
            raise ValueError("hidden widths must be >= 1")
        if self.activation != "sigmoid":
            raise ValueError(f"unsupported activation {self.activation!r}")

    def layer_shapes(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per affine layer, input to output."""
        dims = (self.input_dim, *self.hidden_widths, self.output_dim)
        return [(dims[i], dims[i + 1]) for i in range(len(dims) - 1)]


def param_count(spec: NetworkSpec) -> int:
    """Total learnable parameters: sum of fan_in*fan_out + fan_out."""
    return sum(fi * fo + fo for fi, fo in spec.layer_shapes())


def init_xavier(spec: NetworkSpec, seed: int) -> np.ndarray:
    """Xavier-uniform weights U(+-sqrt(6/(fan_in+fan_out))), zero biases.

    Weights are drawn in flat-layout order (row-major per layer) from the
    package PRNG, so (spec, seed) fully determines the vector bit-for-bit.
    """
    rng = Xoshiro256PP(seed)
    theta = np.zeros(param_count(spec))
    off = 0
    for fi, fo in spec.layer_shapes():
        bound = np.sqrt(6.0 / (fi + fo))
        for k in range(fi * fo):
            theta[off + k] = rng.uniform(-bound, bound)
        off += fi * fo + fo  # biases stay zero
    return theta


def unpack(spec: NetworkSpec, theta: np.ndarray):
    """Split theta into transposed weights and biases for the kernels."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1 or theta.size != param_count(spec):
        raise ValueError(
            f"theta has size {theta.size}, spec needs {param_count(spec)}"
        )
    Wts, bs = [], []
    off = 0
    for fi, fo in spec.layer_shapes():
        W = theta[off : off + fi * fo].reshape(fo, fi)
        off += fi * fo
        b = np.ascontiguousarray(theta[off : off + fo])
        off += fo
        Wts.append(np.ascontiguousarray(W.T))
        bs.append(b)
    return tuple(Wts), tuple(bs)


def _check_points(spec: NetworkSpec, X: np.ndarray, need_jets: bool) -> np.ndarray:
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if X.ndim != 2 or X.shape[1] != spec.input_dim:
        raise ValueError(f"points have shape {X.shape}, expected (*, {spec.input_dim})")
    if need_jets and spec.input_dim != 2:
        raise ValueError("spatial jets are implemented for input_dim == 2 only")
    return X


@dataclass(frozen=True)
class EvalJet:
    """Network outputs with spatial first and second derivatives at a point.

    ``hessian[k]`` is symmetric by construction: the off-diagonal entry is
    computed once and mirrored.
    """

    value: np.ndarray  # (out,)
    grad: np.ndarray  # (out, 2)
    hessian: np.ndarray  # (out, 2, 2)

    def laplacian(self) -> np.ndarray:
        return self.hessian[:, 0, 0] + self.hessian[:, 1, 1]


def forward(spec: NetworkSpec, theta: np.ndarray, x) -> np.ndarray:
    """Evaluate the network at one point; returns the output vector."""
    X = _check_points(spec, x, need_jets=False)
    Wts, bs = unpack(spec, theta)
    return kernels().forward(Wts, bs, X)[0]


def forward_batch(spec: NetworkSpec, theta: np.ndarray, X) -> np.ndarray:
    X = _check_points(spec, X, need_jets=False)
    Wts, bs = unpack(spec, theta)
    return kernels().forward(Wts, bs, X)


def hess_expand(Hc: np.ndarray) -> np.ndarray:
    """Compact symmetric [xx, xy, yy] -> full (..., 2, 2) matrices."""
    out = np.empty(Hc.shape[:-1] + (2, 2))
    out[..., 0, 0] = Hc[..., 0]
    out[..., 0, 1] = Hc[..., 1]
    out[..., 1, 0] = Hc[..., 1]
    out[..., 1, 1] = Hc[..., 2]
    return out


def forward_jet(spec: NetworkSpec, theta: np.ndarray, x) -> EvalJet:
    """Value, spatial gradient, and spatial Hessian at one point."""
    X = _check_points(spec, x, need_jets=True)
    Wts, bs = unpack(spec, theta)
    V, G, Hc = kernels().jet2(Wts, bs, X)
    return EvalJet(value=V[0], grad=G[0], hessian=hess_expand(Hc[0]))


def jet_batch(spec: NetworkSpec, theta: np.ndarray, X, order: int = 2):
    """Batched jets in compact form.

    order 0 -> values (N, out); order 1 -> (values, grads (N, out, 2));
    order 2 -> (values, grads, hessians (N, out, 3) as [xx, xy, yy]).
    """
    X = _check_points(spec, X, need_jets=order > 0)
    Wts, bs = unpack(spec, theta)
    k = kernels()
    if order == 0:
        return k.forward(Wts, bs, X)
    if order == 1:
        return k.jet1(Wts, bs, X)
    if order == 2:
        return k.jet2(Wts, bs, X)
    raise ValueError(f"order must be 0, 1 or 2, got {order}")


def vjp_batch(spec: NetworkSpec, theta: np.ndarray, X, bar_value, bar_grad=None, bar_hess=None) -> np.ndarray:
    """Parameter gradient of Σ_n <adjoints, jet components at X[n]>.

    ``bar_hess`` uses the compact layout; its xy entry is the adjoint of
    the single stored off-diagonal component.
    """
    need_jets = bar_grad is not None or bar_hess is not None
    X = _check_points(spec, X, need_jets=need_jets)
    Wts, bs = unpack(spec, theta)
    bar_value = np.ascontiguousarray(bar_value, dtype=np.float64)
    k = kernels()
    if bar_hess is not None:
        if bar_grad is None:
            bar_grad = np.zeros(bar_value.shape + (2,))
        return k.vjp2(
            Wts,
            bs,
            X,
            bar_value,
            np.ascontiguousarray(bar_grad, dtype=np.float64),
            np.ascontiguousarray(bar_hess, dtype=np.float64),
        )
    if bar_grad is not None:
        return k.vjp1(Wts, bs, X, bar_value, np.ascontiguousarray(bar_grad, dtype=np.float64))
    return k.vjp0(Wts, bs, X, bar_value)


def loss_gradient(loss, theta: np.ndarray) -> np.ndarray:
    """Gradient of a scalar loss at theta.

    ``loss`` is any object exposing ``value_and_grad(theta)``; the loss
    objects assembled in :mod:`pdecolloc.problems` use the reverse
    accumulation above.  Raises FloatingPointError if the loss is not
    finite at theta.
    """
    value, grad = loss.value_and_grad(np.asarray(theta, dtype=np.float64))
    if not np.isfinite(value):
        raise FloatingPointError(f"loss is not finite at theta: {value}")
    return grad


@dataclass
class QuadraticLoss:
    """||theta||^2 test hook bypassing the network machinery."""

    def value_and_grad(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        return float(theta @ theta), 2.0 * theta
