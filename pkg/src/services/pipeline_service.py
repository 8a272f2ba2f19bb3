"""
End-to-end newsbot run: generate -> summarize -> translate -> phonemize -> animate.

Each stage reads the previous stage's file and writes its own, so the stage
subcommands of the CLI and run_pipeline produce the same files. Only
timings.json varies between otherwise identical runs.
"""
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Mapping, Optional, Union

from src.config import settings
from src.config.pipeline_config import PipelineConfig, file_sha256
from src.dsl.bank import load_bank
from src.models.article_model import Article
from src.models.lipsync_model import BlendshapeAnimation
from src.models.phoneme_model import PhonemeTimeline, UnknownTokenPolicy
from src.services.event_service import load_events, load_history, normalize_facts
from src.services.lipsync_service import save_animation, synthesize_animation
from src.services.network_service import load_model
from src.services.news_service import generate_article, load_article, save_article
from src.services.phoneme_service import load_lexicon, load_timeline, save_timeline, text_to_phonemes
from src.services.summarization_service import (
    HeuristicScorer,
    ImportanceTable,
    SelectionRule,
    label_sentences,
    save_labels,
    soccer_labels,
    split_sentences,
    summarize_labeled,
    summarize_soccer,
)
from src.services.translation_service import (
    IdentityBackend,
    load_glossary,
    load_phrase_table,
    translate_article,
)
from src.utils.exceptions import MissingModelError, NewsbotException, StageError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]

STAGES = ("generate", "summarize", "translate", "phonemize", "animate")

OUTPUT_FILES = {
    "article": "article.tsv",
    "summary": "summary.tsv",
    "labels": "summary_labels.tsv",
    "translation": "translation.tsv",
    "timeline": "timeline.tsv",
    "animation": "animation.txt",
}
MANIFEST_FILE = "manifest.json"
TIMINGS_FILE = "timings.json"


def run_generate(
    events_path: PathLike,
    templates_path: PathLike,
    home: str,
    away: str,
    seed: int,
    out_path: PathLike,
    history_path: Optional[PathLike] = None,
    blowout_threshold: Optional[int] = None,
) -> Article:
    events = load_events(events_path)
    history = load_history(history_path) if history_path else []
    facts = normalize_facts(events, home, away, history)
    article = generate_article(events, facts, load_bank(templates_path), seed, blowout_threshold)
    save_article(article, out_path)
    return article


def run_summarize(
    article_path: PathLike,
    events_path: PathLike,
    out_path: PathLike,
    labels_path: Optional[PathLike] = None,
    mode: str = "soccer",
    budget: int = settings.SUMMARY_BUDGET,
    top_k: int = settings.SUMMARY_TOP_K,
    importance: Optional[Mapping[str, float]] = None,
    reference: str = "",
) -> Article:
    """
    Summarize a generated article.

    ``soccer`` keeps the most important in-match events (within budget) and the
    result; ``labels`` scores every sentence and keeps the top_k.
    """
    article = load_article(article_path)
    if mode == "soccer":
        events = load_events(events_path)
        table = ImportanceTable().with_overrides(importance or {})
        summary = summarize_soccer(events, article, table, budget)
        labels = soccer_labels(events, article, table, budget)
    elif mode == "labels":
        labels = label_sentences(split_sentences(article), HeuristicScorer(reference), SelectionRule(top_k=top_k))
        summary = summarize_labeled(article, labels)
    else:
        raise ValueError(f"unknown summary mode {mode!r}")
    save_article(summary, out_path)
    if labels_path:
        save_labels(labels, labels_path)
    return summary


def run_translate(
    in_path: PathLike,
    glossary_path: PathLike,
    out_path: PathLike,
    src: str,
    tgt: str,
    dictionary_path: Optional[PathLike] = None,
) -> Article:
    glossary = load_glossary(glossary_path)
    backend = load_phrase_table(dictionary_path) if dictionary_path else IdentityBackend()
    translated = translate_article(load_article(in_path), glossary, backend, src, tgt)
    save_article(translated, out_path)
    return translated


def article_speech_text(article: Article, language: str) -> str:
    separator = " " if language in settings.SPACED_LANGUAGES else ""
    return separator.join(article.texts)


def run_phonemize(
    in_path: PathLike,
    lexicon_path: PathLike,
    language: str,
    out_path: PathLike,
    policy: Union[str, UnknownTokenPolicy] = UnknownTokenPolicy.ERROR,
    default_duration_s: Optional[float] = None,
    pause_duration_s: float = 0.0,
    include_prosody: bool = False,
) -> PhonemeTimeline:
    lexicon = load_lexicon(lexicon_path, language)
    text = article_speech_text(load_article(in_path), language)
    timeline = text_to_phonemes(
        text, language, lexicon,
        default_duration_s=default_duration_s,
        policy=policy,
        pause_duration_s=pause_duration_s,
        include_prosody=include_prosody,
    )
    save_timeline(timeline, out_path)
    return timeline


def run_animate(
    timeline_path: PathLike,
    out_path: PathLike,
    fps: float,
    model_path: Optional[PathLike],
) -> BlendshapeAnimation:
    """Animate a saved timeline with a trained lip-sync model (see ``train-lipsync``)."""
    if not model_path:
        raise MissingModelError("no lip-sync model configured; train one with train-lipsync and set MODEL")
    timeline = load_timeline(timeline_path)
    params = load_model(model_path)
    animation = synthesize_animation(params, timeline, fps)
    save_animation(animation, out_path)
    return animation


@dataclass
class OutputBundle:
    run_dir: Path
    article: Article
    summary: Article
    translation: Article
    timeline: PhonemeTimeline
    animation: BlendshapeAnimation
    manifest: Dict


def _stage_runners(config: PipelineConfig, paths: Dict[str, Path]) -> Dict[str, Callable[[], object]]:
    translate_source = paths["summary"] if config.translate_scope == "summary" else paths["article"]
    return {
        "generate": lambda: run_generate(
            config.events, config.templates, config.home, config.away, config.seed,
            paths["article"], config.history, config.blowout_threshold,
        ),
        "summarize": lambda: run_summarize(
            paths["article"], config.events, paths["summary"], paths["labels"],
            config.summary_mode, config.budget, config.top_k, config.importance,
            reference=f"{config.home} {config.away}",
        ),
        "translate": lambda: run_translate(
            translate_source, config.glossary, paths["translation"],
            config.src_language, config.tgt_language, config.dictionary,
        ),
        "phonemize": lambda: run_phonemize(
            paths["translation"], config.lexicon, config.tgt_language, paths["timeline"],
            config.unknown_token_policy, config.phoneme_duration_s,
            config.pause_duration_s, config.include_prosody,
        ),
        "animate": lambda: run_animate(paths["timeline"], paths["animation"], config.fps, config.model),
    }


def build_manifest(config: PipelineConfig, paths: Mapping[str, Path]) -> Dict:
    return {
        "run_id": config.run_id,
        "seed": config.seed,
        "config_sha256": config.config_hash(),
        "stages": list(STAGES),
        "inputs": {
            name: {"file": path.name, "sha256": file_sha256(path)}
            for name, path in config.input_paths().items()
        },
        "outputs": {
            name: {"file": path.name, "sha256": file_sha256(path)}
            for name, path in paths.items()
            if path.exists()
        },
    }


def _write_json(data: Dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")


def run_pipeline(config: PipelineConfig) -> OutputBundle:
    """
    Run every stage in order and write the bundle under config.run_dir.

    Args:
        config: Validated run configuration

    Returns:
        The in-memory results plus the manifest

    Raises:
        StageError: a stage failed; files of the stages before it are kept,
            files left by an earlier run under the same run_id are not
    """
    run_dir = config.run_dir
    run_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: run_dir / filename for name, filename in OUTPUT_FILES.items()}
    for stale in [*paths.values(), run_dir / MANIFEST_FILE, run_dir / TIMINGS_FILE]:
        if stale.exists():
            logger.info(f"Removing {stale} from an earlier run")
            stale.unlink()
    runners = _stage_runners(config, paths)

    results: Dict[str, object] = {}
    timings: Dict[str, float] = {}
    logger.info(f"Starting run '{config.run_id}' in {run_dir}")
    for stage in STAGES:
        started = time.perf_counter()
        logger.info(f"Stage {stage} started")
        try:
            results[stage] = runners[stage]()
        except (NewsbotException, ValueError, OSError) as e:
            logger.error(f"Stage {stage} failed: {e}")
            raise StageError(stage, e) from e
        finally:
            timings[stage] = round(time.perf_counter() - started, 6)
        logger.info(f"Stage {stage} finished in {timings[stage]:.3f}s")

    manifest = build_manifest(config, paths)
    _write_json(manifest, run_dir / MANIFEST_FILE)
    _write_json(timings, run_dir / TIMINGS_FILE)
    logger.info(f"Run '{config.run_id}' complete")
    return OutputBundle(
        run_dir=run_dir,
        article=results["generate"],
        summary=results["summarize"],
        translation=results["translate"],
        timeline=results["phonemize"],
        animation=results["animate"],
        manifest=manifest,
    )
