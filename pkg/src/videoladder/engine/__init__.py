from videoladder.engine.tensor import Tensor, Parameter, no_grad, grad_enabled
from videoladder.engine.module import Module, ModuleList, running_stats_entries
from videoladder.engine.ops import (
    add,
    mul,
    scale,
    sigmoid,
    tanh,
    leaky_relu,
    concat,
    concat_channels,
    narrow,
    sum_all,
    mean_all,
    conv2d,
    upsample_nearest,
    batch_norm,
    bce_per_item,
    same_padding,
    RunningStats,
    BCE_EPS,
)
from videoladder.engine.gradcheck import (
    numerical_gradient,
    relative_error,
    check_gradients,
)
from videoladder.engine import checkpoint

__all__ = [
    "Tensor",
    "Parameter",
    "no_grad",
    "grad_enabled",
    "Module",
    "ModuleList",
    "running_stats_entries",
    "add",
    "mul",
    "scale",
    "sigmoid",
    "tanh",
    "leaky_relu",
    "concat",
    "concat_channels",
    "narrow",
    "sum_all",
    "mean_all",
    "conv2d",
    "upsample_nearest",
    "batch_norm",
    "bce_per_item",
    "same_padding",
    "RunningStats",
    "BCE_EPS",
    "numerical_gradient",
    "relative_error",
    "check_gradients",
    "checkpoint",
]
