"""Trainer that turns triangle soups into analysis-suitable neural
implicit representations (signed-distance MLPs exported as INRW files).

The package is self-contained: it has its own OBJ/STL readers and its
own closest-point oracle, and it talks to the solver side only through
files (OBJ/STL in, INRW out).
"""

from .errors import EmptySoup, FormatError, NonFiniteLoss, NoPointsInBand
from .soup import TriangleSoup, load_obj, load_stl, rescale_soup, icosphere
from .network import NetworkConfig, SdfNet, desk_preset
from .sampling import SamplingConfig, TrainSamples, sample_hybrid
from .losses import LossConfig, loss_terms
from .train import TrainConfig, train
from .inrw import export_inrw, load_inrw_numpy
from .evaluate import nmse_delta

__all__ = [
    "EmptySoup", "FormatError", "NonFiniteLoss", "NoPointsInBand",
    "TriangleSoup", "load_obj", "load_stl", "rescale_soup", "icosphere",
    "NetworkConfig", "SdfNet", "desk_preset",
    "SamplingConfig", "TrainSamples", "sample_hybrid",
    "LossConfig", "loss_terms",
    "TrainConfig", "train",
    "export_inrw", "load_inrw_numpy",
    "nmse_delta",
]
