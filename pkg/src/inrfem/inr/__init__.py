from .model import InrModel, MlpLayer, load_inrw, save_inrw
from .cache import GradientCache

__all__ = ["InrModel", "MlpLayer", "load_inrw", "save_inrw", "GradientCache"]
