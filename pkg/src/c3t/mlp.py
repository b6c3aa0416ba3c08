"""From-scratch fully connected decoder network with Adam training.

A five-hidden-layer perceptron with hyperbolic tangent on every neuron
(including the scalar output, which pins the estimate inside (-1, 1))
regresses the source symbol from channel-output features.  Training is
plain mini-batch gradient descent on mean squared error with the Adam
update rule and a multiplicative learning-rate decay per step.  Everything
is NumPy; gradients are exact backpropagation, checked against central
finite differences in the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import ChannelSpec, FeatureMode, awgn_channel, encode, features_for
from .errors import TrainingError
from .profiles import CodeProfile

LEARNING_RATE_RANGE = (1e-6, 1e-4)


@dataclass(frozen=True)
class MlpArchitecture:
    """Widths of the decoder network: input, five hidden layers, output."""

    input_width: int
    hidden: tuple
    output_width: int = 1

    def __post_init__(self):
        hidden = tuple(int(h) for h in self.hidden)
        object.__setattr__(self, "hidden", hidden)
        if len(hidden) != 5:
            raise ValueError(f"expected 5 hidden widths, got {len(hidden)}")
        if min(hidden) < 1 or self.input_width < 1 or self.output_width < 1:
            raise ValueError("layer widths must be positive")
        mid = len(hidden) // 2
        rising = all(a <= b for a, b in zip(hidden[: mid + 1], hidden[1 : mid + 1]))
        falling = all(a >= b for a, b in zip(hidden[mid:], hidden[mid + 1 :]))
        if not (rising and falling):
            raise ValueError(
                "hidden widths must increase to the middle layer then decrease"
            )

    @property
    def widths(self):
        return (self.input_width, *self.hidden, self.output_width)


def default_architecture(n: int, feature_mode: FeatureMode) -> MlpArchitecture:
    """Width pattern [4n, 8n, 16n, 8n, 4n], floored at 8 per layer."""
    feature_mode = FeatureMode(feature_mode)
    input_width = n // 2 if feature_mode == FeatureMode.ANGLES_ONLY else n
    hidden = tuple(max(8, k * n) for k in (4, 8, 16, 8, 4))
    return MlpArchitecture(input_width=input_width, hidden=hidden)


@dataclass(frozen=True)
class TrainingConfig:
    """Dataset and optimizer settings for one training run.

    The learning rate is validated against the working range
    [1e-6, 1e-4]; pass ``allow_lr_outside_range=True`` to override.
    """

    learning_rate: float = 1e-4
    adam_decay: float = 1e-6
    epochs: int = 60
    examples_per_snr: int = 15000
    train_snrs_db: tuple = (-5.0, 0.0, 5.0, 10.0)
    batch_size: int = 128
    seed: int = 0
    allow_lr_outside_range: bool = False

    def __post_init__(self):
        lo, hi = LEARNING_RATE_RANGE
        if not self.allow_lr_outside_range and not lo <= self.learning_rate <= hi:
            raise ValueError(
                f"learning rate {self.learning_rate} outside [{lo}, {hi}]; "
                "set allow_lr_outside_range=True to override"
            )
        if self.epochs < 1 or self.examples_per_snr < 1 or self.batch_size < 1:
            raise ValueError("epochs, examples_per_snr, batch_size must be >= 1")


def generate_training_set(
    profile: CodeProfile,
    config: TrainingConfig,
    feature_mode: FeatureMode,
    rng: np.random.Generator,
):
    """Simulated (features, symbol) pairs across the training SNR levels.

    ``examples_per_snr`` sources are drawn uniformly from [-1, 1] for each
    SNR, encoded, passed through the channel, and featurized; blocks are
    concatenated in SNR order.  Deterministic given the generator state.
    """
    feature_mode = FeatureMode(feature_mode)
    blocks_x, blocks_t = [], []
    for snr_db in config.train_snrs_db:
        spec = ChannelSpec.for_profile(profile, snr_db)
        s = rng.uniform(-1.0, 1.0, config.examples_per_snr)
        y = awgn_channel(encode(profile, s), spec, rng)
        blocks_x.append(features_for(profile, y, feature_mode))
        blocks_t.append(s)
    return np.concatenate(blocks_x, axis=0), np.concatenate(blocks_t)


# ---------------------------------------------------------------------------
# network core


def init_weights(arch: MlpArchitecture, rng: np.random.Generator):
    """Per-layer uniform init scaled by 1/sqrt(fan_in)."""
    weights = []
    widths = arch.widths
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        w = rng.uniform(-bound, bound, (fan_in, fan_out))
        b = rng.uniform(-bound, bound, fan_out)
        weights.append((w, b))
    return weights


def _forward_cache(weights, x):
    activations = [x]
    a = x
    for w, b in weights:
        a = np.tanh(a @ w + b)
        activations.append(a)
    return activations


def mlp_forward(weights, features):
    """Decoder output for features of shape (..., input_width); in (-1, 1)."""
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[-1] != weights[0][0].shape[0]:
        raise ValueError(
            f"feature width {x.shape[-1]} does not match network input "
            f"{weights[0][0].shape[0]}"
        )
    out = _forward_cache(weights, x)[-1][:, 0]
    return float(out[0]) if np.ndim(features) == 1 else out


def mlp_loss_and_grads(weights, x, targets):
    """Mean squared error and exact gradients for one batch."""
    acts = _forward_cache(weights, x)
    out = acts[-1][:, 0]
    err = out - targets
    batch = x.shape[0]
    loss = float(np.mean(err * err))

    grads = [None] * len(weights)
    # d loss / d preactivation of the output layer
    delta = (2.0 * err / batch)[:, None] * (1.0 - acts[-1] ** 2)
    for layer in range(len(weights) - 1, -1, -1):
        a_prev = acts[layer]
        grads[layer] = (a_prev.T @ delta, delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ weights[layer][0].T) * (1.0 - a_prev**2)
    return loss, grads


def mlp_train(arch: MlpArchitecture, dataset, config: TrainingConfig):
    """Train on (features, targets); returns (weights, per-epoch losses).

    Adam with bias correction; the learning rate decays as
    lr / (1 + decay * step).  Raises :class:`TrainingError` if the loss
    goes non-finite.
    """
    x, targets = dataset
    x = np.asarray(x, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if x.size == 0:
        raise ValueError("training set is empty")
    if x.shape[-1] != arch.input_width:
        raise ValueError(
            f"dataset width {x.shape[-1]} does not match architecture input "
            f"{arch.input_width}"
        )
    seed_seq = np.random.SeedSequence(config.seed)
    init_rng, shuffle_rng = (np.random.default_rng(s) for s in seed_seq.spawn(2))
    weights = init_weights(arch, init_rng)

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m_state = [(np.zeros_like(w), np.zeros_like(b)) for w, b in weights]
    v_state = [(np.zeros_like(w), np.zeros_like(b)) for w, b in weights]

    count = x.shape[0]
    step = 0
    epoch_losses = []
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(count)
        epoch_loss = 0.0
        for start in range(0, count, config.batch_size):
            batch_idx = order[start : start + config.batch_size]
            loss, grads = mlp_loss_and_grads(weights, x[batch_idx], targets[batch_idx])
            epoch_loss += loss * batch_idx.size
            step += 1
            lr = config.learning_rate / (1.0 + config.adam_decay * step)
            new_weights = []
            for layer, ((w, b), (gw, gb)) in enumerate(zip(weights, grads)):
                mw, mb = m_state[layer]
                vw, vb = v_state[layer]
                mw = beta1 * mw + (1 - beta1) * gw
                mb = beta1 * mb + (1 - beta1) * gb
                vw = beta2 * vw + (1 - beta2) * gw * gw
                vb = beta2 * vb + (1 - beta2) * gb * gb
                m_state[layer] = (mw, mb)
                v_state[layer] = (vw, vb)
                corr1 = 1.0 - beta1**step
                corr2 = 1.0 - beta2**step
                w = w - lr * (mw / corr1) / (np.sqrt(vw / corr2) + eps)
                b = b - lr * (mb / corr1) / (np.sqrt(vb / corr2) + eps)
                new_weights.append((w, b))
            weights = new_weights
        epoch_loss /= count
        if not math.isfinite(epoch_loss):
            raise TrainingError(
                f"training diverged at epoch {epoch} "
                f"(learning rate {config.learning_rate})",
                epoch=epoch,
                learning_rate=config.learning_rate,
            )
        epoch_losses.append(epoch_loss)
    return weights, epoch_losses


# ---------------------------------------------------------------------------
# persistence


def save_weights(
    path,
    arch: MlpArchitecture,
    weights,
    feature_mode: FeatureMode,
    config: TrainingConfig,
    epoch_losses,
):
    """Weights JSON: architecture, flat weight arrays, training metadata."""
    doc = {
        "architecture": {
            "input_width": arch.input_width,
            "hidden": list(arch.hidden),
            "output_width": arch.output_width,
            "activation": "tanh",
        },
        "feature_mode": FeatureMode(feature_mode).value,
        "layers": [
            {
                "shape": list(w.shape),
                "weights": w.ravel().tolist(),
                "bias": b.tolist(),
            }
            for w, b in weights
        ],
        "training": {
            "learning_rate": config.learning_rate,
            "adam_decay": config.adam_decay,
            "epochs": config.epochs,
            "examples_per_snr": config.examples_per_snr,
            "train_snrs_db": list(config.train_snrs_db),
            "batch_size": config.batch_size,
            "seed": config.seed,
            "epoch_losses": list(epoch_losses),
        },
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_weights(path):
    """Returns (architecture, weights, feature_mode)."""
    doc = json.loads(Path(path).read_text())
    arch_doc = doc["architecture"]
    arch = MlpArchitecture(
        input_width=arch_doc["input_width"],
        hidden=tuple(arch_doc["hidden"]),
        output_width=arch_doc.get("output_width", 1),
    )
    weights = []
    for layer in doc["layers"]:
        shape = tuple(layer["shape"])
        w = np.array(layer["weights"], dtype=float).reshape(shape)
        b = np.array(layer["bias"], dtype=float)
        weights.append((w, b))
    return arch, weights, FeatureMode(doc["feature_mode"])
