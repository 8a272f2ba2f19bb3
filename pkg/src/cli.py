"""
newsbot command line.

    newsbot run --config data/pipeline.env
    newsbot generate | summarize | translate | phonemize | animate ...
    newsbot train-lipsync | grad-check ...

Exit codes: 0 success, 2 invalid configuration or usage, 3 stage failure.
"""
import argparse
import sys
from typing import List, Optional

import numpy as np

from src.config import settings
from src.config.pipeline_config import load_pipeline_config, parse_importance
from src.models.lipsync_model import FrameWindowing, TrainingConfig
from src.services import pipeline_service
from src.services.lipsync_service import dataset_inputs, load_dataset, make_synthetic_dataset, save_dataset
from src.services.network_service import evaluate_mse, grad_check, init_parameters, save_model, train
from src.services.phoneme_service import load_lexicon
from src.utils.exceptions import NewsbotException, PipelineConfigError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STAGE_FAILURE = 3

GRAD_CHECK_TOLERANCE = 1e-5


def positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}")
    return number


def positive_float(value: str) -> float:
    number = float(value)
    if number <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {number}")
    return number


def int_list(value: str) -> List[int]:
    try:
        return [positive_int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newsbot", description="Robot sports reporter pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run every stage and write a run bundle")
    run.add_argument("--config", "-c", required=True, help="KEY=value config file")
    run.add_argument("--seed", type=int)
    run.add_argument("--run-id")
    run.add_argument("--output-dir")
    run.add_argument("--fps", type=positive_float)
    run.add_argument("--budget", type=positive_int)
    run.add_argument("--top-k", type=positive_int)
    run.add_argument("--summary-mode", choices=["soccer", "labels"])
    run.add_argument("--translate-scope", choices=["summary", "article"])
    run.add_argument("--model")
    run.add_argument("--importance", help="Category=weight pairs, comma-separated")

    gen = sub.add_parser("generate", help="Generate an article from match events")
    gen.add_argument("--events", required=True)
    gen.add_argument("--templates", required=True)
    gen.add_argument("--home", required=True)
    gen.add_argument("--away", required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--history")
    gen.add_argument("--blowout-threshold", type=positive_int)
    gen.add_argument("--out", required=True)

    summ = sub.add_parser("summarize", help="Extract a summary from an article")
    summ.add_argument("--article", required=True)
    summ.add_argument("--events", required=True)
    summ.add_argument("--out", required=True)
    summ.add_argument("--labels")
    summ.add_argument("--mode", choices=["soccer", "labels"], default="soccer")
    summ.add_argument("--budget", type=positive_int, default=settings.SUMMARY_BUDGET)
    summ.add_argument("--top-k", type=positive_int, default=settings.SUMMARY_TOP_K)
    summ.add_argument("--importance", help="Category=weight pairs, comma-separated")
    summ.add_argument("--reference", default="")

    tr = sub.add_parser("translate", help="Translate an article with glossary masking")
    tr.add_argument("--input", required=True)
    tr.add_argument("--glossary", required=True)
    tr.add_argument("--dictionary", help="Phrase table; identity backend when omitted")
    tr.add_argument("--src", default="zh")
    tr.add_argument("--tgt", default="en")
    tr.add_argument("--out", required=True)

    ph = sub.add_parser("phonemize", help="Convert an article to a phoneme timeline")
    ph.add_argument("--input", required=True)
    ph.add_argument("--lexicon", required=True)
    ph.add_argument("--language", default="en")
    ph.add_argument("--policy", choices=["error", "skip"], default="error")
    ph.add_argument("--duration", type=positive_float, default=settings.DEFAULT_PHONEME_DURATION_S)
    ph.add_argument("--pause", type=float, default=0.0)
    ph.add_argument("--include-prosody", action="store_true")
    ph.add_argument("--out", required=True)

    an = sub.add_parser("animate", help="Predict blendshape animation for a timeline")
    an.add_argument("--timeline", required=True)
    an.add_argument("--model", required=True, help="Model written by train-lipsync")
    an.add_argument("--fps", type=positive_float, default=settings.DEFAULT_FPS)
    an.add_argument("--out", required=True)

    tl = sub.add_parser("train-lipsync", help="Train the lip-sync network")
    tl.add_argument("--lexicon", required=True, help="Lexicon that defines the phoneme inventory")
    tl.add_argument("--language", default="en")
    tl.add_argument("--include-prosody", action="store_true")
    tl.add_argument("--dataset", help="Dataset file; a synthetic dataset is generated when omitted")
    tl.add_argument("--save-dataset", help="Write the training pairs used")
    tl.add_argument("--sequences", type=positive_int, default=200)
    tl.add_argument("--hidden", type=int_list, default=settings.LIPSYNC_HIDDEN_SIZES)
    tl.add_argument("--steps", type=int, default=settings.TRAINING_DEFAULTS["steps"])
    tl.add_argument("--batch-size", type=positive_int, default=settings.TRAINING_DEFAULTS["batch_size"])
    tl.add_argument("--learning-rate", type=float, default=settings.TRAINING_DEFAULTS["learning_rate"])
    tl.add_argument("--dropout", type=float, default=settings.TRAINING_DEFAULTS["dropout_p"])
    tl.add_argument("--seed", type=int, default=0)
    tl.add_argument("--out", required=True)

    gc = sub.add_parser("grad-check", help="Check backprop against finite differences")
    gc.add_argument("--seed", type=int, default=0)
    gc.add_argument("--epsilon", type=positive_float, default=1e-4)
    gc.add_argument("--batch", type=positive_int, default=4)
    return parser


def _cmd_run(args) -> int:
    overrides = {
        "seed": args.seed,
        "run_id": args.run_id,
        "output_dir": args.output_dir,
        "fps": args.fps,
        "budget": args.budget,
        "top_k": args.top_k,
        "summary_mode": args.summary_mode,
        "translate_scope": args.translate_scope,
        "model": args.model,
        "importance": args.importance,
    }
    config = load_pipeline_config(args.config, overrides)
    bundle = pipeline_service.run_pipeline(config)
    print(f"Run written to {bundle.run_dir}")
    for sentence in bundle.translation.texts:
        print(f"  {sentence}")
    print(f"{bundle.animation.frame_count} animation frames at {config.fps} fps")
    return EXIT_OK


def _cmd_generate(args) -> int:
    article = pipeline_service.run_generate(
        args.events, args.templates, args.home, args.away, args.seed, args.out,
        args.history, args.blowout_threshold,
    )
    print(f"Wrote {len(article.sentences)} sentences to {args.out}")
    return EXIT_OK


def _cmd_summarize(args) -> int:
    importance = None
    if args.importance:
        importance = parse_importance(args.importance)
    summary = pipeline_service.run_summarize(
        args.article, args.events, args.out, args.labels, args.mode,
        args.budget, args.top_k, importance, args.reference,
    )
    print(f"Kept {len(summary.sentences)} sentences in {args.out}")
    return EXIT_OK


def _cmd_translate(args) -> int:
    translated = pipeline_service.run_translate(
        args.input, args.glossary, args.out, args.src, args.tgt, args.dictionary
    )
    for sentence in translated.texts:
        print(sentence)
    return EXIT_OK


def _cmd_phonemize(args) -> int:
    timeline = pipeline_service.run_phonemize(
        args.input, args.lexicon, args.language, args.out, args.policy,
        args.duration, args.pause, args.include_prosody,
    )
    print(f"Wrote {len(timeline.segments)} segments ({timeline.total_duration:.3f}s) to {args.out}")
    return EXIT_OK


def _cmd_animate(args) -> int:
    animation = pipeline_service.run_animate(args.timeline, args.out, args.fps, args.model)
    print(f"Wrote {animation.frame_count} frames to {args.out}")
    return EXIT_OK


def _cmd_train_lipsync(args) -> int:
    inventory = load_lexicon(args.lexicon, args.language).inventory(args.include_prosody)
    windowing = FrameWindowing()
    if args.dataset:
        dataset = load_dataset(args.dataset, windowing)
    else:
        dataset, _ = make_synthetic_dataset(len(inventory), windowing, args.sequences, args.seed)
    if args.save_dataset:
        save_dataset(dataset, args.save_dataset)

    config = TrainingConfig(
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        steps=args.steps,
        dropout_p=args.dropout,
        rng_seed=args.seed,
    )
    inputs = dataset_inputs(dataset, len(inventory))
    params = init_parameters(inventory, windowing, args.hidden, args.seed, args.include_prosody)
    params, trace = train(params, inputs, dataset.targets, config)
    save_model(params, args.out)
    mse = evaluate_mse(params, inputs, dataset.targets)
    print(f"Trained {config.steps} steps, final batch loss {trace[-1] if trace else float('nan'):.6f}, MSE {mse:.6f}")
    print(f"Model written to {args.out}")
    return EXIT_OK


def _cmd_grad_check(args) -> int:
    windowing = FrameWindowing(input_window=3, output_window=3, num_blendshapes=2)
    inventory = ("SIL", "A", "B")
    params = init_parameters(inventory, windowing, hidden_sizes=[5, 4], seed=args.seed)
    rng = np.random.default_rng(args.seed)
    inputs = rng.normal(size=(args.batch, params.input_size))
    targets = rng.uniform(0.0, 1.0, size=(args.batch, windowing.output_size))
    error = grad_check(params, inputs, targets, args.epsilon)
    print(f"max relative error {error:.3e}")
    return EXIT_OK if error < GRAD_CHECK_TOLERANCE else EXIT_STAGE_FAILURE


COMMANDS = {
    "run": _cmd_run,
    "generate": _cmd_generate,
    "summarize": _cmd_summarize,
    "translate": _cmd_translate,
    "phonemize": _cmd_phonemize,
    "animate": _cmd_animate,
    "train-lipsync": _cmd_train_lipsync,
    "grad-check": _cmd_grad_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PipelineConfigError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except FileNotFoundError as e:
        logger.error(f"Input not found: {e}")
        return EXIT_USAGE
    except (NewsbotException, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_STAGE_FAILURE


if __name__ == "__main__":
    sys.exit(main())
