"""The decorrelation regularizer."""
from .decorr_def import CLAMP_DELTA, DecorrLoss, VarianceTerm, decorr_grad, decorr_loss

__all__ = ["CLAMP_DELTA", "DecorrLoss", "VarianceTerm", "decorr_grad", "decorr_loss"]
