"""Differentiable operations on Tensors.

Every op validates shapes up front, computes the forward value with numpy,
and wires a backward closure that accumulates into the parents' grads.
Reduction order inside each op is fixed, so identical inputs give
bit-identical outputs across runs.

Only the operations the ladder models need are provided; there is no
general broadcasting (the one exception is the per-channel bias inside
``conv2d``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from videoladder.errors import ShapeError
from videoladder.engine.tensor import Tensor, make_output


def _accum(t: Tensor, g: np.ndarray) -> None:
    if t.requires_grad:
        t.accumulate_grad(g)


def _as_pair(v) -> tuple[int, int]:
    if isinstance(v, int):
        return (v, v)
    a, b = v
    return (int(a), int(b))


# ---------------------------------------------------------------------------
# elementwise suite
# ---------------------------------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"add requires identical shapes, got {a.shape} and {b.shape}")
    out_data = a.data + b.data

    def backward(g):
        _accum(a, g)
        _accum(b, g)

    return make_output(out_data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    """Hadamard product; shapes must match exactly."""
    if a.shape != b.shape:
        raise ShapeError(f"mul requires identical shapes, got {a.shape} and {b.shape}")
    out_data = a.data * b.data

    def backward(g):
        _accum(a, g * b.data)
        _accum(b, g * a.data)

    return make_output(out_data, (a, b), backward)


def scale(a: Tensor, s: float) -> Tensor:
    """Multiply by a python scalar constant."""
    s = float(s)
    out_data = a.data * s

    def backward(g):
        _accum(a, g * s)

    return make_output(out_data, (a,), backward)


def sigmoid(x: Tensor) -> Tensor:
    # tanh form is overflow-free for large |x|
    y = 0.5 * (np.tanh(0.5 * x.data) + 1.0)

    def backward(g):
        _accum(x, g * y * (1.0 - y))

    return make_output(y, (x,), backward)


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)

    def backward(g):
        _accum(x, g * (1.0 - y * y))

    return make_output(y, (x,), backward)


def leaky_relu(x: Tensor, slope: float = 0.01) -> Tensor:
    slope = float(slope)
    mask = x.data > 0
    y = np.where(mask, x.data, slope * x.data)

    def backward(g):
        _accum(x, np.where(mask, g, slope * g))

    return make_output(y.astype(x.dtype, copy=False), (x,), backward)


def concat(tensors, axis: int = 1) -> Tensor:
    """Concatenate along ``axis``; all other extents must agree."""
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat of zero tensors")
    ref = tensors[0].shape
    for t in tensors[1:]:
        if len(t.shape) != len(ref) or any(
            t.shape[d] != ref[d] for d in range(len(ref)) if d != axis
        ):
            raise ShapeError(
                f"concat along axis {axis} requires matching extents elsewhere, "
                f"got {[t.shape for t in tensors]}"
            )
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            idx = [slice(None)] * g.ndim
            idx[axis] = slice(lo, hi)
            _accum(t, np.ascontiguousarray(g[tuple(idx)]))

    return make_output(out_data, tensors, backward)


def concat_channels(*tensors: Tensor) -> Tensor:
    """Channel-wise concatenation of NCHW maps, first argument's channels first."""
    for t in tensors:
        if t.data.ndim != 4:
            raise ShapeError(f"concat_channels expects 4-D maps, got {t.shape}")
    return concat(tensors, axis=1)


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice along one axis (the inverse of concat)."""
    if start < 0 or start + length > x.shape[axis]:
        raise ShapeError(
            f"narrow [{start}:{start + length}] out of range for axis {axis} of {x.shape}"
        )
    idx = [slice(None)] * x.data.ndim
    idx[axis] = slice(start, start + length)
    idx = tuple(idx)
    out_data = np.ascontiguousarray(x.data[idx])

    def backward(g):
        if x.requires_grad:
            gx = np.zeros_like(x.data)
            gx[idx] = g
            x.accumulate_grad(gx)

    return make_output(out_data, (x,), backward)


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------


def sum_all(x: Tensor) -> Tensor:
    out_data = np.asarray(x.data.sum(), dtype=x.dtype)

    def backward(g):
        _accum(x, np.full_like(x.data, g.reshape(())))

    return make_output(out_data, (x,), backward)


def mean_all(x: Tensor) -> Tensor:
    n = x.data.size
    out_data = np.asarray(x.data.mean(), dtype=x.dtype)

    def backward(g):
        _accum(x, np.full_like(x.data, g.reshape(()) / n))

    return make_output(out_data, (x,), backward)


# ---------------------------------------------------------------------------
# convolution and resampling
# ---------------------------------------------------------------------------


def same_padding(size: int, kernel: int, stride: int, dilation: int) -> tuple[int, int]:
    """Zero padding so the output extent is ceil(size / stride)."""
    out = math.ceil(size / stride)
    effective = (kernel - 1) * dilation + 1
    total = max((out - 1) * stride + effective - size, 0)
    return total // 2, total - total // 2


def _conv_geometry(x_shape, k_shape, stride, dilation, padding):
    n, cin, h, w = x_shape
    cout, kcin, kh, kw = k_shape
    if cin != kcin:
        raise ShapeError(
            f"conv2d input has {cin} channels but kernel expects {kcin}"
        )
    if kh < 1 or kw < 1:
        raise ShapeError(f"kernel extents must be >= 1, got ({kh}, {kw})")
    sh, sw = stride
    dh, dw = dilation
    if min(sh, sw) < 1 or min(dh, dw) < 1:
        raise ShapeError(f"stride {stride} and dilation {dilation} must be >= 1")
    if padding == "same":
        pt, pb = same_padding(h, kh, sh, dh)
        pl, pr = same_padding(w, kw, sw, dw)
    else:
        (pt, pb), (pl, pr) = padding
    eff_h = (kh - 1) * dh + 1
    eff_w = (kw - 1) * dw + 1
    h_out = (h + pt + pb - eff_h) // sh + 1
    w_out = (w + pl + pr - eff_w) // sw + 1
    if h_out < 1 or w_out < 1:
        raise ShapeError(
            f"conv2d produces empty spatial output {h_out}x{w_out} for input "
            f"{h}x{w}, kernel {kh}x{kw}, stride {stride}, dilation {dilation}"
        )
    return (pt, pb, pl, pr), (h_out, w_out)


def _im2col(xp: np.ndarray, kh, kw, stride, dilation, out_hw):
    """(N, C*kh*kw, Hout*Wout) patch matrix of the padded input."""
    n, c, hp, wp = xp.shape
    sh, sw = stride
    dh, dw = dilation
    ho, wo = out_hw
    sn, sc, sy, sx = xp.strides
    view = np.lib.stride_tricks.as_strided(
        xp,
        shape=(n, c, kh, kw, ho, wo),
        strides=(sn, sc, dh * sy, dw * sx, sh * sy, sw * sx),
        writeable=False,
    )
    return view.reshape(n, c * kh * kw, ho * wo)


def conv2d(
    x: Tensor,
    kernel: Tensor,
    bias: Tensor | None = None,
    stride=(1, 1),
    dilation=(1, 1),
    padding="same",
) -> Tensor:
    """2-D cross-correlation over NCHW maps with stride, dilation and zero
    padding ("same" keeps the extent at ceil(size/stride)).

    Differentiable w.r.t. input, kernel and bias. Bias, when given, is one
    value per output channel (the only broadcast in the engine).
    """
    if x.data.ndim != 4:
        raise ShapeError(f"conv2d input must be 4-D NCHW, got {x.shape}")
    if kernel.data.ndim != 4:
        raise ShapeError(f"conv2d kernel must be 4-D (Cout,Cin,kh,kw), got {kernel.shape}")
    stride = _as_pair(stride)
    dilation = _as_pair(dilation)
    (pt, pb, pl, pr), (ho, wo) = _conv_geometry(
        x.shape, kernel.shape, stride, dilation, padding
    )
    cout, cin, kh, kw = kernel.shape
    n = x.shape[0]
    if bias is not None and bias.shape != (cout,):
        raise ShapeError(f"bias must have shape ({cout},), got {bias.shape}")

    def pad_input(arr):
        if pt or pb or pl or pr:
            return np.pad(arr, ((0, 0), (0, 0), (pt, pb), (pl, pr)))
        return arr

    xp = pad_input(x.data)
    cols = _im2col(xp, kh, kw, stride, dilation, (ho, wo))
    kmat = kernel.data.reshape(cout, cin * kh * kw)
    out = np.matmul(kmat, cols).reshape(n, cout, ho, wo)
    if bias is not None:
        out += bias.data[None, :, None, None]

    parents = (x, kernel) if bias is None else (x, kernel, bias)

    def backward(g):
        if bias is not None and bias.requires_grad:
            bias.accumulate_grad(g.sum(axis=(0, 2, 3)))
        if kernel.requires_grad:
            cols_b = _im2col(pad_input(x.data), kh, kw, stride, dilation, (ho, wo))
            g_r = g.reshape(n, cout, ho * wo)
            gk = np.matmul(g_r, cols_b.transpose(0, 2, 1)).sum(axis=0)
            kernel.accumulate_grad(gk.reshape(kernel.shape))
        if x.requires_grad:
            hp = x.shape[2] + pt + pb
            wp = x.shape[3] + pl + pr
            gxp = np.zeros((n, cin, hp, wp), dtype=g.dtype)
            sh, sw = stride
            dh, dw = dilation
            for i in range(kh):
                ys = slice(i * dh, i * dh + sh * ho, sh)
                for j in range(kw):
                    xs = slice(j * dw, j * dw + sw * wo, sw)
                    contrib = np.tensordot(g, kernel.data[:, :, i, j], axes=([1], [0]))
                    gxp[:, :, ys, xs] += contrib.transpose(0, 3, 1, 2)
            x.accumulate_grad(
                np.ascontiguousarray(
                    gxp[:, :, pt : pt + x.shape[2], pl : pl + x.shape[3]]
                )
            )

    return make_output(out, parents, backward)


def upsample_nearest(x: Tensor, factor: int) -> Tensor:
    """Nearest-neighbour upsampling of NCHW maps by an integer factor.

    Backward sums each input position's factor^2 output gradients.
    """
    if x.data.ndim != 4:
        raise ShapeError(f"upsample expects 4-D maps, got {x.shape}")
    if not isinstance(factor, int) or isinstance(factor, bool):
        raise ShapeError(f"upsample factor must be an integer, got {factor!r}")
    if factor < 1:
        raise ShapeError(f"upsample factor must be >= 1, got {factor}")
    n, c, h, w = x.shape
    out_data = np.repeat(np.repeat(x.data, factor, axis=2), factor, axis=3)

    def backward(g):
        _accum(x, g.reshape(n, c, h, factor, w, factor).sum(axis=(3, 5)))

    return make_output(out_data, (x,), backward)


# ---------------------------------------------------------------------------
# batch normalization
# ---------------------------------------------------------------------------


@dataclass
class RunningStats:
    """Per-channel running mean/variance updated by exponential moving average.

    ``initialized`` flips after the first training batch; eval mode before
    that raises instead of silently passing values through.
    """

    mean: np.ndarray
    var: np.ndarray
    momentum: float = 0.99
    initialized: bool = False

    @staticmethod
    def create(channels: int, momentum: float = 0.99, dtype=np.float32) -> "RunningStats":
        return RunningStats(
            mean=np.zeros(channels, dtype=dtype),
            var=np.ones(channels, dtype=dtype),
            momentum=momentum,
        )

    def update(self, batch_mean: np.ndarray, batch_var: np.ndarray) -> None:
        m = self.momentum
        self.mean = (m * self.mean + (1.0 - m) * batch_mean).astype(self.mean.dtype)
        self.var = (m * self.var + (1.0 - m) * batch_var).astype(self.var.dtype)
        self.initialized = True


def batch_norm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    stats: RunningStats,
    training: bool,
    eps: float = 1e-5,
) -> Tensor:
    """Per-channel normalization of NCHW maps.

    Training mode normalizes with batch statistics over (N, H, W) and updates
    ``stats`` as a side effect; eval mode uses the running statistics and
    requires them to exist.
    """
    if x.data.ndim != 4:
        raise ShapeError(f"batch_norm expects 4-D maps, got {x.shape}")
    n, c, h, w = x.shape
    if gamma.shape != (c,) or beta.shape != (c,):
        raise ShapeError(
            f"scale/shift must have shape ({c},), got {gamma.shape} and {beta.shape}"
        )
    if training:
        if n * h * w < 2:
            raise ShapeError(
                f"batch_norm training needs N*H*W >= 2, got {n}*{h}*{w}"
            )
        mean = x.data.mean(axis=(0, 2, 3))
        var = x.data.var(axis=(0, 2, 3))
        stats.update(mean, var)
    else:
        if not stats.initialized:
            raise RuntimeError(
                "batch_norm eval mode before any running statistics exist; "
                "run at least one training batch or load a checkpoint"
            )
        mean = stats.mean.astype(x.dtype)
        var = stats.var.astype(x.dtype)

    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mean[None, :, None, None]) * inv_std[None, :, None, None]
    out = gamma.data[None, :, None, None] * xhat + beta.data[None, :, None, None]

    def backward(g):
        _accum(beta, g.sum(axis=(0, 2, 3)))
        _accum(gamma, (g * xhat).sum(axis=(0, 2, 3)))
        if x.requires_grad:
            scale_f = gamma.data * inv_std
            if training:
                g_mean = g.mean(axis=(0, 2, 3))
                gx_mean = (g * xhat).mean(axis=(0, 2, 3))
                gx = scale_f[None, :, None, None] * (
                    g
                    - g_mean[None, :, None, None]
                    - xhat * gx_mean[None, :, None, None]
                )
            else:
                gx = scale_f[None, :, None, None] * g
            x.accumulate_grad(gx.astype(x.dtype, copy=False))

    return make_output(out.astype(x.dtype, copy=False), (x, gamma, beta), backward)


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------

BCE_EPS = 1e-7


def bce_per_item(pred: Tensor, target: Tensor) -> Tensor:
    """Pixel-summed binary cross-entropy per batch item.

    Grayscale targets in [0, 1] are read as Bernoulli probabilities;
    predictions are clamped to [BCE_EPS, 1 - BCE_EPS] before the logs
    (clamped entries get zero gradient). Output shape (N,).
    """
    if pred.shape != target.shape:
        raise ShapeError(
            f"prediction shape {pred.shape} does not match target {target.shape}"
        )
    t = target.data
    if t.min() < 0.0 or t.max() > 1.0:
        raise ValueError(
            f"targets must lie in [0, 1], got range [{t.min()}, {t.max()}]"
        )
    lo, hi = BCE_EPS, 1.0 - BCE_EPS
    inside = (pred.data >= lo) & (pred.data <= hi)
    p = np.clip(pred.data, lo, hi)
    n = pred.shape[0]
    losses = -(t * np.log(p) + (1.0 - t) * np.log1p(-p))
    out = losses.reshape(n, -1).sum(axis=1).astype(pred.dtype)

    def backward(g):
        if pred.requires_grad:
            gp = (p - t) / (p * (1.0 - p))
            gp = np.where(inside, gp, 0.0)
            gp *= g.reshape((n,) + (1,) * (pred.data.ndim - 1))
            pred.accumulate_grad(gp.astype(pred.dtype, copy=False))

    return make_output(out, (pred, target), backward)
