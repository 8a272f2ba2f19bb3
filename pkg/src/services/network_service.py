"""
Feed-forward lip-sync network in numpy: initialization, forward and backward
passes, mini-batch SGD training, gradient checking and model files.

Every hidden layer is linear -> batch norm -> tanh. Inverted dropout sits
between the last hidden layer and the linear output layer in train mode.
Arrays are float64 and batches are row-major: inputs (B, D), outputs (B, O).
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.metrics import mean_squared_error

from src.config import settings
from src.models.lipsync_model import FrameWindowing, HiddenLayer, MlpParameters, TrainingConfig
from src.utils.exceptions import InvalidShapeError, NumericError, TrainingError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

BN_EPSILON = 1e-5
MODEL_FORMAT_VERSION = 1

# Central differences at epsilon 1e-4 carry about 1e-9 of truncation error.
GRAD_CHECK_ATOL = 1e-7
GRAD_CHECK_FLOOR = 1e-8

TRAIN = "train"
INFER = "infer"


def init_parameters(
    inventory: Sequence[str],
    windowing: Optional[FrameWindowing] = None,
    hidden_sizes: Optional[Sequence[int]] = None,
    seed: int = 0,
    include_prosody: bool = False,
) -> MlpParameters:
    """
    Seeded fan-in uniform initialization, U(-sqrt(3 / fan_in), sqrt(3 / fan_in)).

    Biases and batch-norm shifts start at zero, scales at one, running
    statistics at mean 0 and variance 1.
    """
    windowing = windowing or FrameWindowing()
    hidden_sizes = list(settings.LIPSYNC_HIDDEN_SIZES if hidden_sizes is None else hidden_sizes)
    rng = np.random.default_rng(seed)

    def uniform(fan_in: int, fan_out: int) -> np.ndarray:
        limit = np.sqrt(3.0 / fan_in)
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    fan_in = windowing.input_window * len(inventory)
    hidden = []
    for width in hidden_sizes:
        hidden.append(HiddenLayer(
            weight=uniform(fan_in, width),
            bias=np.zeros(width),
            gamma=np.ones(width),
            beta=np.zeros(width),
            running_mean=np.zeros(width),
            running_var=np.ones(width),
        ))
        fan_in = width

    params = MlpParameters(
        hidden=hidden,
        output_weight=uniform(fan_in, windowing.output_size),
        output_bias=np.zeros(windowing.output_size),
        inventory=tuple(inventory),
        windowing=windowing,
        include_prosody=include_prosody,
    )
    params.validate()
    logger.info(f"Initialized network with layer sizes {params.layer_sizes}")
    return params


@dataclass
class _LayerCache:
    inputs: np.ndarray
    normalized: np.ndarray
    inv_std: np.ndarray
    activation: np.ndarray
    batch_mean: np.ndarray
    batch_var: np.ndarray


@dataclass
class ForwardCache:
    layers: List[_LayerCache]
    dropout_mask: Optional[np.ndarray]
    last_hidden: np.ndarray


def _as_batch(params: MlpParameters, inputs: np.ndarray) -> np.ndarray:
    batch = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if batch.ndim != 2 or batch.shape[1] != params.input_size:
        raise InvalidShapeError(f"expected inputs of width {params.input_size}, got shape {np.shape(inputs)}")
    return batch


def forward_with_cache(
    params: MlpParameters,
    inputs: np.ndarray,
    mode: str = INFER,
    dropout_p: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[np.ndarray, ForwardCache]:
    if mode not in (TRAIN, INFER):
        raise ValueError(f"mode must be '{TRAIN}' or '{INFER}', got {mode!r}")
    activations = _as_batch(params, inputs)
    caches = []
    for layer in params.hidden:
        z = activations @ layer.weight + layer.bias
        if mode == TRAIN:
            mean, var = z.mean(axis=0), z.var(axis=0)
        else:
            mean, var = layer.running_mean, layer.running_var
        inv_std = 1.0 / np.sqrt(var + BN_EPSILON)
        normalized = (z - mean) * inv_std
        out = np.tanh(layer.gamma * normalized + layer.beta)
        caches.append(_LayerCache(activations, normalized, inv_std, out, mean, var))
        activations = out

    mask = None
    if mode == TRAIN and dropout_p > 0.0:
        if rng is None:
            raise ValueError("train-mode dropout needs an rng")
        mask = (rng.random(activations.shape) >= dropout_p) / (1.0 - dropout_p)
        activations = activations * mask

    outputs = activations @ params.output_weight + params.output_bias
    if not np.all(np.isfinite(outputs)):
        raise NumericError("forward pass produced non-finite values")
    return outputs, ForwardCache(caches, mask, activations)


def forward(
    params: MlpParameters,
    inputs: np.ndarray,
    mode: str = INFER,
    dropout_p: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """
    Run the network on one input vector or a batch of them.

    Args:
        params: Network parameters
        inputs: (D,) or (B, D) one-hot windows
        mode: "train" uses batch statistics and dropout, "infer" running statistics
        dropout_p: Dropout probability (train mode only)
        rng: Generator for the dropout mask

    Returns:
        (B, output_window * num_blendshapes) outputs, frame-major per row
    """
    outputs, _ = forward_with_cache(params, inputs, mode, dropout_p, rng)
    return outputs


def loss_and_gradient(outputs: np.ndarray, targets: np.ndarray) -> Tuple[float, np.ndarray]:
    """Squared error summed over the whole output window, averaged over batch rows."""
    batch = outputs.shape[0]
    error = outputs - targets
    return float(np.sum(error ** 2) / batch), 2.0 * error / batch


def backward(params: MlpParameters, cache: ForwardCache, d_outputs: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradients of every trainable array, keyed like MlpParameters.trainable()."""
    grads: Dict[str, np.ndarray] = {
        "output.weight": cache.last_hidden.T @ d_outputs,
        "output.bias": d_outputs.sum(axis=0),
    }
    d_act = d_outputs @ params.output_weight.T
    if cache.dropout_mask is not None:
        d_act = d_act * cache.dropout_mask

    batch = d_outputs.shape[0]
    for i in reversed(range(len(params.hidden))):
        layer, c = params.hidden[i], cache.layers[i]
        d_pre = d_act * (1.0 - c.activation ** 2)
        grads[f"hidden.{i}.gamma"] = np.sum(d_pre * c.normalized, axis=0)
        grads[f"hidden.{i}.beta"] = d_pre.sum(axis=0)
        d_norm = d_pre * layer.gamma
        d_z = (c.inv_std / batch) * (
            batch * d_norm - d_norm.sum(axis=0) - c.normalized * np.sum(d_norm * c.normalized, axis=0)
        )
        grads[f"hidden.{i}.weight"] = c.inputs.T @ d_z
        grads[f"hidden.{i}.bias"] = d_z.sum(axis=0)
        d_act = d_z @ layer.weight.T
    return grads


def _update_running_stats(params: MlpParameters, cache: ForwardCache, momentum: float) -> None:
    for layer, c in zip(params.hidden, cache.layers):
        layer.running_mean[...] = momentum * layer.running_mean + (1.0 - momentum) * c.batch_mean
        layer.running_var[...] = momentum * layer.running_var + (1.0 - momentum) * c.batch_var


def _batches(n: int, batch_size: int, rng: np.random.Generator):
    """Endless shuffled mini-batches; a short final batch is dropped."""
    if n <= batch_size:
        while True:
            yield rng.permutation(n)
    while True:
        order = rng.permutation(n)
        for start in range(0, n - batch_size + 1, batch_size):
            yield order[start:start + batch_size]


def train(
    params: MlpParameters,
    inputs: np.ndarray,
    targets: np.ndarray,
    config: Optional[TrainingConfig] = None,
) -> Tuple[MlpParameters, List[float]]:
    """
    Mini-batch SGD on the lip-sync objective.

    Args:
        params: Starting parameters (not modified)
        inputs: (N, D) one-hot windows
        targets: (N, output_window * num_blendshapes) blendshape targets
        config: Training settings; shuffling and dropout use config.rng_seed

    Returns:
        Trained parameters and the batch loss of every step

    Raises:
        TrainingError: the loss became non-finite
    """
    config = config or TrainingConfig()
    params.validate()
    inputs = _as_batch(params, inputs)
    targets = np.asarray(targets, dtype=np.float64)
    if len(inputs) == 0:
        raise InvalidShapeError("the training set is empty")
    if targets.shape != (len(inputs), params.windowing.output_size):
        raise InvalidShapeError(f"targets must have shape ({len(inputs)}, {params.windowing.output_size})")
    if not np.all(np.isfinite(targets)):
        raise InvalidShapeError("targets contain non-finite values")

    trained = params.copy()
    rng = np.random.default_rng(config.rng_seed)
    batches = _batches(len(inputs), config.batch_size, rng)
    trace: List[float] = []
    logger.info(f"Training for {config.steps} steps on {len(inputs)} windows")

    for step in range(config.steps):
        index = next(batches)
        try:
            outputs, cache = forward_with_cache(trained, inputs[index], TRAIN, config.dropout_p, rng)
        except NumericError:
            raise TrainingError(step, float("nan"))
        loss, d_outputs = loss_and_gradient(outputs, targets[index])
        if not np.isfinite(loss):
            raise TrainingError(step, loss)
        trace.append(loss)

        grads = backward(trained, cache, d_outputs)
        for name, array in trained.trainable():
            array -= config.learning_rate * grads[name]
        _update_running_stats(trained, cache, config.bn_momentum)

        if (step + 1) % config.log_every == 0:
            logger.info(f"step {step + 1}/{config.steps} loss={loss:.6f}")
    return trained, trace


def evaluate_mse(params: MlpParameters, inputs: np.ndarray, targets: np.ndarray) -> float:
    """Per-element mean squared error in infer mode."""
    outputs = forward(params, inputs, INFER)
    return float(mean_squared_error(np.asarray(targets, dtype=np.float64), outputs))


def grad_check(
    params: MlpParameters,
    inputs: np.ndarray,
    targets: np.ndarray,
    epsilon: float = 1e-4,
) -> float:
    """
    Compare backprop gradients with central differences for every trainable value.

    Runs in train mode with batch statistics and no dropout. A value whose
    analytic and numeric gradients differ by at most GRAD_CHECK_ATOL counts as
    exact; otherwise its error is |a - n| / max(|a|, |n|, 1e-8).

    Returns:
        The largest relative error

    Raises:
        InvalidShapeError: degenerate parameters
    """
    params.validate()
    params = params.copy()
    inputs = _as_batch(params, inputs)
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))

    def loss_at() -> float:
        outputs, _ = forward_with_cache(params, inputs, TRAIN)
        return loss_and_gradient(outputs, targets)[0]

    outputs, cache = forward_with_cache(params, inputs, TRAIN)
    analytic = backward(params, cache, loss_and_gradient(outputs, targets)[1])

    worst = 0.0
    for name, array in params.trainable():
        flat = array.reshape(-1)
        grad = analytic[name].reshape(-1)
        for k in range(flat.size):
            original = flat[k]
            flat[k] = original + epsilon
            plus = loss_at()
            flat[k] = original - epsilon
            minus = loss_at()
            flat[k] = original
            numeric = (plus - minus) / (2.0 * epsilon)
            difference = abs(grad[k] - numeric)
            if difference <= GRAD_CHECK_ATOL:
                continue
            worst = max(worst, difference / max(abs(grad[k]), abs(numeric), GRAD_CHECK_FLOOR))
    logger.info(f"Gradient check max relative error {worst:.3e}")
    return worst


def save_model(params: MlpParameters, path: Union[str, Path]) -> None:
    """Versioned .npz: a JSON header plus every parameter array."""
    header = {
        "version": MODEL_FORMAT_VERSION,
        "layer_sizes": params.layer_sizes,
        "inventory": list(params.inventory),
        "windowing": params.windowing.model_dump(),
        "include_prosody": params.include_prosody,
    }
    with open(path, "wb") as handle:
        np.savez(handle, header=np.array(json.dumps(header, sort_keys=True)), **params.arrays())


def load_model(path: Union[str, Path]) -> MlpParameters:
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("version") != MODEL_FORMAT_VERSION:
            raise InvalidShapeError(f"unsupported model format version {header.get('version')}")
        hidden_count = len(header["layer_sizes"]) - 2
        hidden = [
            HiddenLayer(**{
                name: data[f"hidden.{i}.{name}"].astype(np.float64)
                for name in (*HiddenLayer.TRAINABLE, *HiddenLayer.STATISTICS)
            })
            for i in range(hidden_count)
        ]
        params = MlpParameters(
            hidden=hidden,
            output_weight=data["output.weight"].astype(np.float64),
            output_bias=data["output.bias"].astype(np.float64),
            inventory=tuple(header["inventory"]),
            windowing=FrameWindowing(**header["windowing"]),
            include_prosody=bool(header["include_prosody"]),
        )
    params.validate()
    logger.info(f"Loaded model {path} with layer sizes {params.layer_sizes}")
    return params
