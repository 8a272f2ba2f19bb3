"""
Lip-sync network parameters, training settings and animation output.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import settings
from src.utils.exceptions import InvalidShapeError


class FrameWindowing(BaseModel):
    model_config = ConfigDict(frozen=True)

    input_window: int = Field(default=11, ge=1)
    output_window: int = Field(default=5, ge=1)
    num_blendshapes: int = Field(default=32, ge=1)

    @field_validator("input_window", "output_window")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("window lengths must be odd")
        return value

    @property
    def input_radius(self) -> int:
        return self.input_window // 2

    @property
    def output_radius(self) -> int:
        return self.output_window // 2

    @property
    def output_size(self) -> int:
        return self.output_window * self.num_blendshapes


class TrainingConfig(BaseModel):
    """Mini-batch SGD settings; every random draw comes from rng_seed."""

    model_config = ConfigDict(frozen=True)

    batch_size: int = Field(default=settings.TRAINING_DEFAULTS["batch_size"], ge=1)
    # Zero is allowed and only moves the batch-norm running statistics
    learning_rate: float = Field(default=settings.TRAINING_DEFAULTS["learning_rate"], ge=0.0)
    steps: int = Field(default=settings.TRAINING_DEFAULTS["steps"], ge=0)
    dropout_p: float = Field(default=settings.TRAINING_DEFAULTS["dropout_p"], ge=0.0, lt=1.0)
    bn_momentum: float = Field(default=settings.TRAINING_DEFAULTS["bn_momentum"], ge=0.0, le=1.0)
    rng_seed: int = 0
    log_every: int = Field(default=100, ge=1)


@dataclass
class HiddenLayer:
    """linear -> batch norm -> tanh. Weights are (fan_in, fan_out)."""

    weight: np.ndarray
    bias: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray

    TRAINABLE = ("weight", "bias", "gamma", "beta")
    STATISTICS = ("running_mean", "running_var")


_LAYER_ARRAYS = HiddenLayer.TRAINABLE + HiddenLayer.STATISTICS


@dataclass
class MlpParameters:
    hidden: List[HiddenLayer]
    output_weight: np.ndarray
    output_bias: np.ndarray
    inventory: Tuple[str, ...]
    windowing: FrameWindowing = field(default_factory=FrameWindowing)
    include_prosody: bool = False

    @property
    def input_size(self) -> int:
        return self.windowing.input_window * len(self.inventory)

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_size] + [h.weight.shape[1] for h in self.hidden] + [self.output_weight.shape[1]]

    def trainable(self) -> Iterator[Tuple[str, np.ndarray]]:
        """(name, array) of every trained array; arrays are live references."""
        for i, layer in enumerate(self.hidden):
            for name in HiddenLayer.TRAINABLE:
                yield f"hidden.{i}.{name}", getattr(layer, name)
        yield "output.weight", self.output_weight
        yield "output.bias", self.output_bias

    def arrays(self) -> Dict[str, np.ndarray]:
        named = dict(self.trainable())
        for i, layer in enumerate(self.hidden):
            for name in HiddenLayer.STATISTICS:
                named[f"hidden.{i}.{name}"] = getattr(layer, name)
        return named

    def validate(self) -> None:
        """
        Raises:
            InvalidShapeError: empty layers, broken dimension chain, bad statistics
        """
        if not self.hidden:
            raise InvalidShapeError("the network needs at least one hidden layer")
        fan_in = self.input_size
        for i, layer in enumerate(self.hidden):
            if layer.weight.ndim != 2 or layer.weight.size == 0:
                raise InvalidShapeError(f"hidden layer {i} has an empty or non-matrix weight")
            if layer.weight.shape[0] != fan_in:
                raise InvalidShapeError(
                    f"hidden layer {i} expects {layer.weight.shape[0]} inputs, gets {fan_in}"
                )
            width = layer.weight.shape[1]
            for name in ("bias", "gamma", "beta", "running_mean", "running_var"):
                if getattr(layer, name).shape != (width,):
                    raise InvalidShapeError(f"hidden layer {i} {name} must have shape ({width},)")
            if np.any(layer.running_var <= 0):
                raise InvalidShapeError(f"hidden layer {i} has non-positive running variance")
            fan_in = width
        if self.output_weight.shape != (fan_in, self.windowing.output_size):
            raise InvalidShapeError(
                f"output weight must be ({fan_in}, {self.windowing.output_size}), "
                f"got {self.output_weight.shape}"
            )
        if self.output_bias.shape != (self.windowing.output_size,):
            raise InvalidShapeError("output bias does not match the output size")
        if not all(np.all(np.isfinite(a)) for a in self.arrays().values()):
            raise InvalidShapeError("parameters contain non-finite values")

    def copy(self) -> "MlpParameters":
        return MlpParameters(
            hidden=[
                HiddenLayer(**{name: getattr(layer, name).copy() for name in _LAYER_ARRAYS})
                for layer in self.hidden
            ],
            output_weight=self.output_weight.copy(),
            output_bias=self.output_bias.copy(),
            inventory=self.inventory,
            windowing=self.windowing,
            include_prosody=self.include_prosody,
        )


@dataclass
class WindowDataset:
    """Training pairs: input-window phoneme ids (N, input_window) and targets (N, output_window * K)."""

    window_ids: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.window_ids.ndim != 2 or self.targets.ndim != 2:
            raise InvalidShapeError("dataset arrays must be 2-D")
        if len(self.window_ids) != len(self.targets):
            raise InvalidShapeError("window ids and targets have different lengths")

    def __len__(self) -> int:
        return len(self.window_ids)


class BlendshapeAnimation(BaseModel):
    model_config = ConfigDict(frozen=True)

    fps: float = Field(..., gt=0)
    num_blendshapes: int = Field(default=32, ge=1)
    frames: List[List[float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _bounded(self) -> "BlendshapeAnimation":
        for index, frame in enumerate(self.frames):
            if len(frame) != self.num_blendshapes:
                raise ValueError(f"frame {index} has {len(frame)} weights, expected {self.num_blendshapes}")
            if any(not (0.0 <= w <= 1.0) for w in frame):
                raise ValueError(f"frame {index} has a weight outside [0, 1]")
        return self

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.frames, dtype=float).reshape(len(self.frames), self.num_blendshapes)
