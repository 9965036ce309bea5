"""Lightweight parameter container hierarchy.

Modules track Parameters and child modules by attribute assignment, yielding
hierarchical dotted names for checkpointing and the ``describe`` listing.
Batch-norm running statistics live in RunningStats attributes and are found
by ``running_stats_entries``.
"""

from __future__ import annotations

from typing import Iterator

from videoladder.errors import ConfigError
from videoladder.engine.ops import RunningStats
from videoladder.engine.tensor import Parameter


class Module:
    def __init__(self):
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_children", {})
        object.__setattr__(self, "training", True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._params[name] = value
        elif isinstance(value, Module):
            self._children[name] = value
        object.__setattr__(self, name, value)

    # -- traversal --------------------------------------------------------------

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        for name, p in self._params.items():
            yield (f"{prefix}{name}", p)
        for name, child in self._children.items():
            yield from child.named_parameters(prefix=f"{prefix}{name}.")

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def modules(self) -> Iterator["Module"]:
        yield self
        for child in self._children.values():
            yield from child.modules()

    # -- bookkeeping ------------------------------------------------------------

    def assign_names(self, prefix: str = "") -> None:
        """Stamp hierarchical names onto Parameters and check uniqueness."""
        seen = set()
        for name, p in self.named_parameters(prefix):
            if name in seen:
                raise ConfigError(f"duplicate parameter name {name!r}")
            seen.add(name)
            p.name = name

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def zero_grads(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def train(self) -> "Module":
        for m in self.modules():
            object.__setattr__(m, "training", True)
        return self

    def eval(self) -> "Module":
        for m in self.modules():
            object.__setattr__(m, "training", False)
        return self


class ModuleList(Module):
    """Sequence of child modules indexed by position."""

    def __init__(self, items=()):
        super().__init__()
        object.__setattr__(self, "_items", [])
        for item in items:
            self.append(item)

    def append(self, module: Module) -> None:
        self._children[str(len(self._items))] = module
        self._items.append(module)

    def __getitem__(self, i: int) -> Module:
        return self._items[i]

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)


def running_stats_entries(module: Module) -> list[tuple[str, RunningStats]]:
    """RunningStats objects owned by any submodule, with dotted paths."""
    out = []

    def visit(m: Module, prefix: str):
        for attr, value in vars(m).items():
            if isinstance(value, RunningStats):
                out.append((f"{prefix}{attr}", value))
        for name, child in m._children.items():
            visit(child, f"{prefix}{name}.")

    visit(module, "")
    return out
