from .layers import (Conv2D, ReLU, BatchNorm, MaxPool, Flatten, Dense,
                     Sigmoid, Softmax, NnError, set_dtype, get_dtype)
from .network import (Network, build_custom_cnn, build_dense_ann,
                      network_from_specs)
from .train import (TrainConfig, Checkpoint, train, evaluate, one_hot,
                    cross_entropy, cross_entropy_grad,
                    SGD, SGD_MOMENTUM, ADAM)
from .gradcheck import gradient_check
from .checkpoint_io import save_checkpoint, load_checkpoint

__all__ = [
    "Conv2D", "ReLU", "BatchNorm", "MaxPool", "Flatten", "Dense",
    "Sigmoid", "Softmax", "NnError", "set_dtype", "get_dtype",
    "Network", "build_custom_cnn", "build_dense_ann", "network_from_specs",
    "TrainConfig", "Checkpoint", "train", "evaluate", "one_hot",
    "cross_entropy", "cross_entropy_grad", "SGD", "SGD_MOMENTUM", "ADAM",
    "gradient_check", "save_checkpoint", "load_checkpoint",
]
