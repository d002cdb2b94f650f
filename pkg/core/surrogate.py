# core/surrogate.py
"""
POD-NN surrogate: tanh multilayer perceptrons mapping a parameter y in
[-1, 1]^J to the real and imaginary parts of the centered reduced
coefficients, trained with Adam on the mean squared error.

Layer widths are l_0 = J, l_1 = ... = l_{D-1} = H and l_D = 2L, i.e. D
affine maps with tanh between them; D = 1 is a single affine map.
Output layout is (Re c_1..Re c_L, Im c_1..Im c_L).
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from core.errors import ArgumentError, TrainingError
from core.pod import project, reconstruct
from core.stage_interface import timed

logger = logging.getLogger(__name__)


@dataclass
class MlpParams:
    """Weights W_k (out, in) and biases b_k (out,) of every affine layer."""

    weights: list
    biases: list

    def __post_init__(self):
        self.weights = [np.ascontiguousarray(W) for W in self.weights]
        self.biases = [np.ascontiguousarray(b) for b in self.biases]
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ArgumentError("MLP needs the same positive number of weight matrices and bias vectors")
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape[0] != b.shape[0]:
                raise ArgumentError(f"Layer {k}: weight shape {W.shape} does not match bias shape {b.shape}")
            if k > 0 and W.shape[1] != self.weights[k - 1].shape[0]:
                raise ArgumentError(f"Layer {k}: input width {W.shape[1]} != previous output width {self.weights[k - 1].shape[0]}")

    @property
    def widths(self):
        return [self.weights[0].shape[1]] + [W.shape[0] for W in self.weights]

    @property
    def depth(self):
        return len(self.weights)

    def arrays(self):
        return self.weights + self.biases

    def is_finite(self):
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def map(self, fn, *others):
        """Apply fn entry-wise across this and other parameter sets of identical shape."""
        weights = [fn(W, *(o.weights[k] for o in others)) for k, W in enumerate(self.weights)]
        biases = [fn(b, *(o.biases[k] for o in others)) for k, b in enumerate(self.biases)]
        return MlpParams(weights, biases)


@dataclass
class TrainConfig:
    learning_rate: float = 5e-4
    beta1: float = 0.8
    beta2: float = 0.9
    epsilon: float = 1e-8
    epochs: int = 4000
    batch_size: int = None
    seed: int = 0
    lr_decay: float = 1.0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ArgumentError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ArgumentError(f"Adam betas must lie in (0, 1), got {self.beta1}, {self.beta2}")
        if not self.epsilon > 0:
            raise ArgumentError(f"epsilon must be positive, got {self.epsilon}")
        if not isinstance(self.epochs, (int, np.integer)) or self.epochs < 1:
            raise ArgumentError(f"epochs must be a positive integer, got {self.epochs}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ArgumentError(f"batch_size must be positive, got {self.batch_size}")
        if not 0 < self.lr_decay <= 1:
            raise ArgumentError(f"lr_decay must lie in (0, 1], got {self.lr_decay}")

    def to_dict(self):
        return asdict(self)


@dataclass
class TrainingSet:
    """Inputs y^(i) (N, J) and targets (Re c, Im c) (N, 2L)."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ArgumentError(f"{self.inputs.shape[0]} inputs but {self.targets.shape[0]} targets")

    def __len__(self):
        return self.inputs.shape[0]

    @classmethod
    def from_snapshots(cls, points, snapshots, basis):
        """Targets from projecting every snapshot onto the basis used at inference."""
        coefficients = project(snapshots, basis).T
        return cls(np.asarray(points, dtype=float), split_complex(coefficients))


def split_complex(c):
    c = np.asarray(c)
    return np.concatenate([c.real, c.imag], axis=-1)


def merge_complex(values):
    values = np.asarray(values)
    L = values.shape[-1] // 2
    return values[..., :L] + 1j * values[..., L:]


def layer_widths(J, depth, width, outputs):
    if depth < 1:
        raise ArgumentError(f"Network depth D must be at least 1, got {depth}")
    return [J] + [width] * (depth - 1) + [outputs]


def init_params(widths, seed=0):
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases from a seeded Philox stream."""
    rng = np.random.Generator(np.random.Philox(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpParams(weights, biases)


def zero_params(widths):
    return MlpParams(
        [np.zeros((fan_out, fan_in)) for fan_in, fan_out in zip(widths[:-1], widths[1:])],
        [np.zeros(fan_out) for fan_out in widths[1:]],
    )


def _activations(theta, X):
    acts = [X]
    last = theta.depth - 1
    for k, (W, b) in enumerate(zip(theta.weights, theta.biases)):
        z = acts[-1] @ W.T + b
        acts.append(np.tanh(z) if k < last else z)
    return acts


def forward(theta, y):
    """Affine-tanh alternation with an affine output layer; accepts one point or a batch."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    X = y[None, :] if single else y
    if X.shape[1] != theta.widths[0]:
        raise ArgumentError(f"Network expects {theta.widths[0]} inputs, got {X.shape[1]}")
    out = _activations(theta, X)[-1]
    return out[0] if single else out


def mse_loss(theta, training_set):
    """Mean over samples of the squared 2-norm of target - prediction."""
    residual = training_set.targets - forward(theta, training_set.inputs)
    return float(np.sum(residual ** 2) / len(training_set))


def gradient(theta, inputs, targets):
    """Reverse-mode gradient of the mean squared error with respect to every W_k and b_k."""
    acts = _activations(theta, inputs)
    delta = 2.0 * (acts[-1] - targets) / inputs.shape[0]
    grad_w = [None] * theta.depth
    grad_b = [None] * theta.depth
    for k in range(theta.depth - 1, -1, -1):
        grad_w[k] = delta.T @ acts[k]
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ theta.weights[k]) * (1.0 - acts[k] ** 2)
    return MlpParams(grad_w, grad_b)


@dataclass
class AdamState:
    m: MlpParams
    v: MlpParams
    step: int = 0

    @classmethod
    def zeros_like(cls, theta):
        return cls(theta.map(np.zeros_like), theta.map(np.zeros_like), 0)


def adam_step(theta, grad, state, config, learning_rate=None):
    """One bias-corrected Adam update; returns (theta, state)."""
    lr = config.learning_rate if learning_rate is None else learning_rate
    b1, b2, eps = config.beta1, config.beta2, config.epsilon
    step = state.step + 1
    m = state.m.map(lambda m_, g: b1 * m_ + (1.0 - b1) * g, grad)
    v = state.v.map(lambda v_, g: b2 * v_ + (1.0 - b2) * g * g, grad)
    c1 = 1.0 - b1 ** step
    c2 = 1.0 - b2 ** step
    theta = theta.map(lambda p, m_, v_: p - lr * (m_ / c1) / (np.sqrt(v_ / c2) + eps), m, v)
    return theta, AdamState(m, v, step)


@dataclass
class TrainResult:
    params: MlpParams
    history: np.ndarray = field(repr=False)


def train(training_set, depth, width, config, seed=None):
    """
    Adam on the MSE loss for config.epochs epochs.

    history[0] is the initial loss and history[e] the loss after epoch e.
    Full batch unless config.batch_size is set.
    """
    seed = config.seed if seed is None else seed
    widths = layer_widths(training_set.inputs.shape[1], depth, width, training_set.targets.shape[1])
    theta = init_params(widths, seed)
    state = AdamState.zeros_like(theta)
    n = len(training_set)
    batch = n if config.batch_size is None else min(config.batch_size, n)
    shuffle = np.random.Generator(np.random.Philox(seed + 1))

    history = np.empty(config.epochs + 1)
    history[0] = mse_loss(theta, training_set)
    for epoch in range(1, config.epochs + 1):
        lr = config.learning_rate * config.lr_decay ** (epoch - 1)
        order = np.arange(n) if batch == n else shuffle.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            grad = gradient(theta, training_set.inputs[idx], training_set.targets[idx])
            theta, state = adam_step(theta, grad, state, config, lr)
        history[epoch] = mse_loss(theta, training_set)
        if not np.isfinite(history[epoch]):
            raise TrainingError(f"Training loss became non-finite at epoch {epoch}", epoch=epoch)

    logger.debug(f"Trained {widths} network: loss {history[0]:.4e} -> {history[-1]:.4e}")
    return TrainResult(theta, history)


class Surrogate:
    """
    One or several MLPs emitting the 2L real outputs, with optional target
    standardization. With separate networks, network k predicts (Re c_k, Im c_k).
    """

    def __init__(self, networks, L, target_mean=None, target_scale=None):
        self.networks = networks
        self.L = L
        self.target_mean = np.zeros(2 * L) if target_mean is None else np.asarray(target_mean, dtype=float)
        self.target_scale = np.ones(2 * L) if target_scale is None else np.asarray(target_scale, dtype=float)

    @property
    def separate(self):
        return len(self.networks) > 1

    def _columns(self, k):
        return [k, self.L + k] if self.separate else list(range(2 * self.L))

    def forward(self, y):
        y = np.asarray(y, dtype=float)
        single = y.ndim == 1
        X = y[None, :] if single else y
        out = np.zeros((X.shape[0], 2 * self.L))
        for k, theta in enumerate(self.networks):
            out[:, self._columns(k)] = forward(theta, X)
        out = out * self.target_scale + self.target_mean
        return out[0] if single else out

    def coefficients(self, y):
        """Complex reduced coefficients alpha + i beta."""
        return merge_complex(self.forward(y))


def train_surrogate(training_set, depth, width, config, separate=False, standardize=False):
    """Train the POD-NN for L = targets / 2 coefficients; returns (Surrogate, loss histories)."""
    L = training_set.targets.shape[1] // 2
    if L == 0:
        return Surrogate([], 0), []

    targets = training_set.targets
    mean, scale = None, None
    if standardize:
        mean = targets.mean(axis=0)
        scale = targets.std(axis=0)
        scale[scale == 0.0] = 1.0
        targets = (targets - mean) / scale

    if separate:
        jobs = [TrainingSet(training_set.inputs, targets[:, [k, L + k]]) for k in range(L)]
    else:
        jobs = [TrainingSet(training_set.inputs, targets)]

    with timed(f"Surrogate training L={L}"):
        results = [train(job, depth, width, config, seed=config.seed + k) for k, job in enumerate(jobs)]
    for k, result in enumerate(results):
        logger.info(f"Network {k + 1}/{len(results)} (L={L}): final loss {result.history[-1]:.4e}")
    return Surrogate([r.params for r in results], L, mean, scale), [r.history for r in results]


def predict_solution(surrogate, y, basis):
    """Lift the surrogate coefficients: u = V (alpha + i beta) + mean."""
    if surrogate.L != basis.L:
        raise ArgumentError(f"Surrogate predicts {surrogate.L} coefficients but the basis has {basis.L} columns")
    if surrogate.L == 0:
        return basis.mean.copy()
    coefficients = surrogate.coefficients(y)
    return reconstruct(coefficients if coefficients.ndim == 1 else coefficients.T, basis)
