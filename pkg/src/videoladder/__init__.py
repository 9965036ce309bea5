"""Ladder-style convolutional LSTM networks for next-frame video prediction,
built on a self-contained numpy autodiff engine."""

__version__ = "0.1.0"

from videoladder.engine import Tensor, Parameter, no_grad
from videoladder.estimator import VideoLadderPredictor

__all__ = ["Tensor", "Parameter", "no_grad", "VideoLadderPredictor", "__version__"]
