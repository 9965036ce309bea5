"""Finite-difference gradient verification.

The numerical side only ever calls the forward function, so it stays
independent of the backward implementation it is checking. Central
differences with step 1e-4 in double precision resolve relative errors
well below the 1e-5 acceptance threshold.
"""

from __future__ import annotations

import numpy as np

from videoladder.engine.tensor import Tensor


def numerical_gradient(forward, tensor: Tensor, step: float = 1e-4) -> np.ndarray:
    """d forward() / d tensor by central differences, one element at a time.

    ``forward`` takes no arguments and must return a scalar float; it is
    expected to read ``tensor.data`` afresh on every call.
    """
    base = tensor.data
    grad = np.zeros_like(base, dtype=np.float64)
    flat = base.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        f_plus = forward()
        flat[i] = orig - step
        f_minus = forward()
        flat[i] = orig
        gflat[i] = (f_plus - f_minus) / (2.0 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max |a - n| / max(1, |a|, |n|) over elements."""
    a = np.asarray(analytic, dtype=np.float64)
    b = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / denom))


def check_gradients(build_loss, tensors: dict[str, Tensor], step: float = 1e-4) -> dict[str, float]:
    """Compare analytic grads of ``build_loss()`` against central differences.

    ``build_loss`` constructs the graph from the current tensor values and
    returns the scalar loss Tensor. Returns the max relative error per input.
    """
    for t in tensors.values():
        t.zero_grad()
    loss = build_loss()
    loss.backward()
    analytic = {
        name: (np.zeros_like(t.data) if t.grad is None else t.grad.copy())
        for name, t in tensors.items()
    }

    def forward_value():
        from videoladder.engine.tensor import no_grad

        with no_grad():
            return build_loss().item()

    errors = {}
    for name, t in tensors.items():
        numeric = numerical_gradient(forward_value, t, step=step)
        errors[name] = relative_error(analytic[name], numeric)
    return errors
