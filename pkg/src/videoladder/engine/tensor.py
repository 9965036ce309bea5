"""Dense tensors with reverse-mode automatic differentiation.

A Tensor wraps a numpy array (float32 by default, float64 for gradient
checking) plus an optional gradient accumulator and a reference to the
operation that produced it. Calling ``backward()`` on a scalar walks the
graph once in reverse topological order.
"""

from __future__ import annotations

import threading

import numpy as np

from videoladder.errors import ShapeError

_state = threading.local()


def grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


class no_grad:
    """Context manager that disables graph construction within the block."""

    def __enter__(self):
        self._prev = grad_enabled()
        _state.grad_enabled = False
        return self

    def __exit__(self, *exc):
        _state.grad_enabled = self._prev
        return False


class Tensor:
    """N-dimensional array node in the autodiff graph.

    Values are immutable by convention once produced by an op; parameter
    updates happen only through the optimizer's dedicated update phase.
    ``grad`` is allocated lazily on first accumulation and keeps the same
    shape and dtype as ``data``. Repeated ``backward()`` calls accumulate
    into existing grads; call ``zero_grad`` (or the module-level helper)
    between optimizer steps.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data)
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        elif arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float32)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def zeros(shape, dtype=np.float32, requires_grad: bool = False) -> "Tensor":
        return Tensor(np.zeros(shape, dtype=dtype), requires_grad=requires_grad)

    # -- basic properties ------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() on tensor of shape {self.data.shape}")
        return float(self.data.reshape(()))

    def detach(self) -> "Tensor":
        """Same values, cut off from the graph. Shares the underlying array."""
        return Tensor(self.data, requires_grad=False)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"

    # -- gradient plumbing -----------------------------------------------------

    def accumulate_grad(self, g: np.ndarray) -> None:
        if g.shape != self.data.shape:
            raise ShapeError(
                f"gradient shape {g.shape} does not match value shape {self.data.shape}"
            )
        if self.grad is None:
            self.grad = g.astype(self.data.dtype, copy=True)
        else:
            self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        """Populate ``grad`` of every reachable tensor with d(self)/d(tensor).

        Only valid on scalars (single-element tensors). Each graph node is
        visited exactly once, in reverse topological order.
        """
        if self.data.size != 1:
            raise ShapeError(
                f"backward() requires a scalar loss, got shape {self.data.shape}"
            )
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))

        self.accumulate_grad(np.ones_like(self.data))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- operator sugar (thin wrappers over engine.ops) -------------------------

    def __add__(self, other):
        from videoladder.engine import ops

        return ops.add(self, other)

    def __mul__(self, other):
        from videoladder.engine import ops

        if isinstance(other, (int, float)):
            return ops.scale(self, float(other))
        return ops.mul(self, other)

    __rmul__ = __mul__

    def sum(self):
        from videoladder.engine import ops

        return ops.sum_all(self)

    def mean(self):
        from videoladder.engine import ops

        return ops.mean_all(self)


class Parameter(Tensor):
    """Trainable tensor. ``name`` is the hierarchical path assigned when the
    owning model is assembled (e.g. ``encoder.level2.conv.kernel``)."""

    __slots__ = ("name",)

    def __init__(self, data, name: str = "", dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)
        self.name = name

    def __repr__(self):
        return f"Parameter(name={self.name!r}, shape={self.data.shape})"


def make_output(data: np.ndarray, parents, backward_fn) -> Tensor:
    """Wrap an op result, wiring the graph only when grads are wanted."""
    out = Tensor(data)
    if grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out
