"""Cross-entropy training loop with seeded shuffling, three optimizers, and
best-validation checkpointing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .layers import NnError, get_dtype
from .network import Network

LOG_CLAMP = 1e-12

SGD = "SGD"
SGD_MOMENTUM = "SGDMomentum"
ADAM = "Adam"


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = ADAM
    monitor_epochs: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise NnError("epochs, batch_size, learning_rate must be positive")
        if self.monitor_epochs < 1 or self.monitor_epochs > self.epochs:
            raise NnError("monitor_epochs must be in [1, epochs]")
        if self.optimizer not in (SGD, SGD_MOMENTUM, ADAM):
            raise NnError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class Checkpoint:
    weights: list
    epoch: int
    val_accuracy: float
    history: dict = field(default_factory=dict)


def one_hot(labels, n_classes=2):
    y = np.asarray(labels, dtype=np.int64)
    out = np.zeros((y.size, n_classes), dtype=get_dtype())
    out[np.arange(y.size), y] = 1.0
    return out


def cross_entropy(probs, onehot):
    p = np.clip(probs, LOG_CLAMP, None)
    return float(-(onehot * np.log(p)).sum() / probs.shape[0])


def cross_entropy_grad(probs, onehot):
    p = np.clip(probs, LOG_CLAMP, None)
    return -(onehot / p) / probs.shape[0]


class _Optimizer:
    def __init__(self, params, lr):
        self.params = params
        self.lr = lr

    def step(self, grads):
        raise NotImplementedError


class _Sgd(_Optimizer):
    def step(self, grads):
        for p, g in zip(self.params, grads):
            p -= self.lr * g


class _SgdMomentum(_Optimizer):
    beta = 0.9

    def __init__(self, params, lr):
        super().__init__(params, lr)
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads):
        for p, g, v in zip(self.params, grads, self.v):
            v *= self.beta
            v += g
            p -= self.lr * v


class _Adam(_Optimizer):
    beta1, beta2, eps = 0.9, 0.999, 1e-8

    def __init__(self, params, lr):
        super().__init__(params, lr)
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


_OPTIMIZERS = {SGD: _Sgd, SGD_MOMENTUM: _SgdMomentum, ADAM: _Adam}


def evaluate(net: Network, x, labels):
    """(mean loss, accuracy, positive-class scores) on a dataset."""
    probs = net.forward(x, training=False)
    onehot = one_hot(labels)
    loss = cross_entropy(probs, onehot)
    preds = probs.argmax(axis=1)
    acc = float(np.mean(preds == np.asarray(labels)))
    return loss, acc, probs[:, 1]


def train(net: Network, train_x, train_y, val_x, val_y,
          config: TrainConfig | None = None, verbose=False) -> Checkpoint:
    """Mini-batch backpropagation; returns the snapshot from the epoch with
    the highest validation accuracy (ties resolved to the earliest epoch)."""
    config = config or TrainConfig()
    train_y = np.asarray(train_y, dtype=np.int64)
    val_y = np.asarray(val_y, dtype=np.int64)
    if train_y.size == 0 or val_y.size == 0:
        raise NnError("train and validation sets must be non-empty")
    if np.unique(train_y).size < 2:
        raise NnError("training set must contain both classes")
    train_x = np.asarray(train_x, dtype=get_dtype())
    rng = np.random.default_rng(config.seed)
    opt = _OPTIMIZERS[config.optimizer](net.params(), config.learning_rate)

    history = {"train_loss": [], "train_acc": [], "val_loss": [], "val_acc": []}
    best: Checkpoint | None = None
    n = train_y.size
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        epoch_correct = 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb = train_x[idx]
            yb = one_hot(train_y[idx])
            probs = net.forward(xb, training=True)
            loss = cross_entropy(probs, yb)
            if not np.isfinite(loss):
                raise NnError(
                    f"NaN loss at epoch {epoch}, batch {start // config.batch_size}"
                )
            net.backward(cross_entropy_grad(probs, yb))
            opt.step(net.grads())
            epoch_loss += loss * idx.size
            epoch_correct += int((probs.argmax(axis=1) == train_y[idx]).sum())
        val_loss, val_acc, _ = evaluate(net, val_x, val_y)
        history["train_loss"].append(epoch_loss / n)
        history["train_acc"].append(epoch_correct / n)
        history["val_loss"].append(val_loss)
        history["val_acc"].append(val_acc)
        if best is None or val_acc > best.val_accuracy:
            best = Checkpoint(net.get_weights(), epoch, val_acc)
        if verbose:
            print(f"epoch {epoch:3d}  loss {epoch_loss / n:.4f}  "
                  f"train_acc {epoch_correct / n:.3f}  val_acc {val_acc:.3f}")
    best.history = history
    return best
