from .adam import AdamState, adam_step, init_adam
from .backend import active_backend
from .layers import ELU, Conv2D, Dense, Dropout, Flatten, Identity, LayerSpec
from .modelio import load_network, save_network
from .network import Network, backward, loss_and_grads
from .ops import conv2d_forward, dense_forward, dropout, elu, mse_loss

__all__ = [
    "AdamState",
    "Conv2D",
    "Dense",
    "Dropout",
    "ELU",
    "Flatten",
    "Identity",
    "LayerSpec",
    "Network",
    "active_backend",
    "adam_step",
    "backward",
    "conv2d_forward",
    "dense_forward",
    "dropout",
    "elu",
    "init_adam",
    "load_network",
    "loss_and_grads",
    "mse_loss",
    "save_network",
]
