from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.models.lipsync_model import BlendshapeAnimation, FrameWindowing, MlpParameters, WindowDataset
from src.models.phoneme_model import PhonemeTimeline
from src.services.network_service import INFER, forward
from src.services.phoneme_service import timeline_to_frames
from src.utils.exceptions import InvalidShapeError, InventoryMismatchError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SIL_ID = 0


def window_ids(frame_ids: Sequence[int], width: int) -> np.ndarray:
    """(T, width) ids of the frames centred on each t; positions off either end read SIL."""
    ids = np.asarray(frame_ids, dtype=np.int64).reshape(-1)
    radius = width // 2
    padded = np.concatenate([np.full(radius, SIL_ID), ids, np.full(radius, SIL_ID)])
    return padded[np.arange(len(ids))[:, None] + np.arange(width)[None, :]]


def one_hot_from_window_ids(ids: np.ndarray, inventory_size: int) -> np.ndarray:
    """Position-major concatenation: slot 0 occupies columns [0, P), slot 1 [P, 2P), ..."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= inventory_size):
        raise InvalidShapeError(f"phoneme ids must lie in [0, {inventory_size})")
    width = ids.shape[1] if ids.ndim == 2 else 1
    return np.eye(inventory_size)[ids].reshape(len(ids), width * inventory_size)


def one_hot_windows(
    frame_ids: Sequence[int], inventory_size: int, windowing: Optional[FrameWindowing] = None
) -> np.ndarray:
    """
    Sliding one-hot input windows, one row per frame.

    Args:
        frame_ids: Phoneme id of every video frame
        inventory_size: P, the number of phoneme symbols (SIL is id 0)
        windowing: Window lengths (default 11 in / 5 out)

    Returns:
        (T, input_window * P) float array
    """
    windowing = windowing or FrameWindowing()
    ids = window_ids(frame_ids, windowing.input_window)
    return one_hot_from_window_ids(ids, inventory_size)


def blend_windows(
    window_predictions: np.ndarray, frame_count: int, windowing: Optional[FrameWindowing] = None
) -> np.ndarray:
    """
    Frame-wise mean of overlapping output windows, clamped to [0, 1].

    Row j of window t predicts frame t - output_radius + j. Edge frames are
    averaged over the windows that reach them.

    Returns:
        (frame_count, num_blendshapes) weights
    """
    windowing = windowing or FrameWindowing()
    k = windowing.num_blendshapes
    predictions = np.asarray(window_predictions, dtype=np.float64).reshape(frame_count, windowing.output_window, k)

    sums = np.zeros((frame_count, k))
    counts = np.zeros(frame_count)
    windows = np.arange(frame_count)
    for row in range(windowing.output_window):
        frames = windows - windowing.output_radius + row
        valid = (frames >= 0) & (frames < frame_count)
        sums[frames[valid]] += predictions[valid, row]
        counts[frames[valid]] += 1
    if frame_count == 0:
        return sums
    return np.clip(sums / counts[:, None], 0.0, 1.0)


def synthesize_animation(params: MlpParameters, timeline: PhonemeTimeline, fps: float) -> BlendshapeAnimation:
    """
    Per-frame blendshape weights for a phoneme timeline.

    Raises:
        InventoryMismatchError: the timeline's inventory is not the model's
    """
    if tuple(timeline.inventory) != tuple(params.inventory):
        raise InventoryMismatchError(
            f"timeline inventory has {len(timeline.inventory)} symbols, model expects {len(params.inventory)}"
        )
    windowing = params.windowing
    ids = timeline_to_frames(timeline, fps)
    if not ids:
        return BlendshapeAnimation(fps=fps, num_blendshapes=windowing.num_blendshapes, frames=[])

    inputs = one_hot_windows(ids, len(params.inventory), windowing)
    predictions = forward(params, inputs, INFER)
    frames = blend_windows(predictions, len(ids), windowing)
    logger.info(f"Synthesized {len(ids)} animation frames at {fps} fps")
    return BlendshapeAnimation(fps=fps, num_blendshapes=windowing.num_blendshapes, frames=frames.tolist())


def make_synthetic_dataset(
    inventory_size: int,
    windowing: Optional[FrameWindowing] = None,
    num_sequences: int = 200,
    seed: int = 0,
    noise_std: float = 0.01,
) -> Tuple[WindowDataset, np.ndarray]:
    """
    Phoneme frame sequences with a fixed pose per phoneme plus seeded noise.

    SIL's pose is all zeros; every other phoneme gets a pose drawn from
    U(0.1, 0.9). Each sequence opens and closes with silence long enough to
    produce all-SIL input windows.

    Returns:
        The dataset and the (P, num_blendshapes) pose table
    """
    if inventory_size < 2:
        raise InvalidShapeError("the synthetic task needs SIL and at least one phoneme")
    windowing = windowing or FrameWindowing()
    rng = np.random.default_rng(seed)
    poses = rng.uniform(0.1, 0.9, size=(inventory_size, windowing.num_blendshapes))
    poses[SIL_ID] = 0.0

    all_inputs, all_targets = [], []
    for _ in range(num_sequences):
        frames = [SIL_ID] * int(rng.integers(windowing.input_radius + 1, windowing.input_radius + 5))
        for _ in range(int(rng.integers(3, 10))):
            frames += [int(rng.integers(0, inventory_size))] * int(rng.integers(1, 6))
        frames += [SIL_ID] * int(rng.integers(windowing.input_radius + 1, windowing.input_radius + 5))

        out_ids = window_ids(frames, windowing.output_window)
        targets = poses[out_ids].reshape(len(frames), windowing.output_size)
        targets = targets + rng.normal(0.0, noise_std, size=targets.shape)
        all_inputs.append(window_ids(frames, windowing.input_window))
        all_targets.append(targets)

    dataset = WindowDataset(np.concatenate(all_inputs), np.concatenate(all_targets))
    logger.info(f"Generated synthetic dataset with {len(dataset)} windows")
    return dataset, poses


def dataset_inputs(dataset: WindowDataset, inventory_size: int) -> np.ndarray:
    return one_hot_from_window_ids(dataset.window_ids, inventory_size)


def save_dataset(dataset: WindowDataset, path: Union[str, Path]) -> None:
    """One line per pair: input-window ids, TAB, target values."""
    with open(path, "w", encoding="utf-8") as handle:
        for ids, target in zip(dataset.window_ids, dataset.targets):
            handle.write(" ".join(str(int(i)) for i in ids))
            handle.write("\t")
            handle.write(" ".join(repr(float(v)) for v in target))
            handle.write("\n")


def load_dataset(path: Union[str, Path], windowing: Optional[FrameWindowing] = None) -> WindowDataset:
    windowing = windowing or FrameWindowing()
    ids, targets = [], []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise InvalidShapeError(f"{path}:{line_no}: expected ids<TAB>targets")
            row_ids = [int(v) for v in fields[0].split()]
            row_targets = [float(v) for v in fields[1].split()]
            if len(row_ids) != windowing.input_window or len(row_targets) != windowing.output_size:
                raise InvalidShapeError(
                    f"{path}:{line_no}: expected {windowing.input_window} ids and "
                    f"{windowing.output_size} targets"
                )
            ids.append(row_ids)
            targets.append(row_targets)
    return WindowDataset(
        np.asarray(ids, dtype=np.int64).reshape(-1, windowing.input_window),
        np.asarray(targets, dtype=np.float64).reshape(-1, windowing.output_size),
    )


def save_animation(animation: BlendshapeAnimation, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            f"fps={animation.fps!r} num_blendshapes={animation.num_blendshapes} "
            f"frame_count={animation.frame_count}\n"
        )
        for frame in animation.frames:
            handle.write(" ".join(f"{w:.6f}" for w in frame) + "\n")


def load_animation(path: Union[str, Path]) -> BlendshapeAnimation:
    with open(path, encoding="utf-8") as handle:
        header = dict(item.split("=", 1) for item in handle.readline().split())
        frames = [[float(v) for v in line.split()] for line in handle if line.strip()]
    if int(header["frame_count"]) != len(frames):
        raise InvalidShapeError(f"{path}: header says {header['frame_count']} frames, found {len(frames)}")
    return BlendshapeAnimation(
        fps=float(header["fps"]), num_blendshapes=int(header["num_blendshapes"]), frames=frames
    )
