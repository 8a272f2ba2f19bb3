import json
import runpy
import sys

import pytest

from src.cli import EXIT_OK, EXIT_STAGE_FAILURE, EXIT_USAGE, main
from src.config import settings
from src.config.pipeline_config import load_pipeline_config, parse_importance
from src.models.article_model import Section
from src.services.news_service import load_article
from src.services.pipeline_service import MANIFEST_FILE, OUTPUT_FILES, TIMINGS_FILE, run_pipeline
from src.utils.exceptions import MissingModelError, PipelineConfigError, StageError

EXPECTED_TRANSLATION = [
    "In the 23rd minute, Espanyol Didac scored a goal.",
    "In the 35th minute, Alavés Mubarak received a yellow card.",
    "Full time: Espanyol beat Alavés, final score 1-0.",
]


@pytest.fixture
def run_config(workspace):
    return load_pipeline_config(workspace / "pipeline.env")


def test_end_to_end_bundle(run_config):
    config = run_config
    bundle = run_pipeline(config)
    assert bundle.run_dir == config.output_dir / "espanyol-alaves"
    assert bundle.translation.texts == EXPECTED_TRANSLATION
    assert [s.section for s in bundle.summary.sentences] == [Section.IN_MATCH, Section.IN_MATCH, Section.POST_MATCH]
    assert bundle.article.in_section(Section.PRE_MATCH)
    for filename in [*OUTPUT_FILES.values(), MANIFEST_FILE, TIMINGS_FILE]:
        assert (bundle.run_dir / filename).is_file(), filename

    assert bundle.timeline.total_duration > 0
    expected_frames = int(bundle.timeline.total_duration * config.fps + 0.5)
    assert abs(bundle.animation.frame_count - expected_frames) <= 1
    assert bundle.animation.num_blendshapes == 32

    manifest = json.loads((bundle.run_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest == bundle.manifest
    assert manifest["seed"] == 42
    assert manifest["stages"] == ["generate", "summarize", "translate", "phonemize", "animate"]
    assert set(manifest["outputs"]) == set(OUTPUT_FILES)
    assert "timings" not in manifest
    timings = json.loads((bundle.run_dir / TIMINGS_FILE).read_text(encoding="utf-8"))
    assert sorted(timings) == sorted(manifest["stages"])


def test_runs_are_reproducible(workspace):
    first = run_pipeline(load_pipeline_config(workspace / "pipeline.env", {"run_id": "first"}))
    second = run_pipeline(load_pipeline_config(workspace / "pipeline.env", {"run_id": "second"}))
    for filename in OUTPUT_FILES.values():
        assert (first.run_dir / filename).read_bytes() == (second.run_dir / filename).read_bytes(), filename

    a, b = dict(first.manifest), dict(second.manifest)
    assert a.pop("run_id") == "first"
    assert b.pop("run_id") == "second"
    assert a == b


def test_config_hash_ignores_locations(workspace, tmp_path):
    base = load_pipeline_config(workspace / "pipeline.env")
    moved = load_pipeline_config(workspace / "pipeline.env", {"run_id": "elsewhere", "output_dir": str(tmp_path / "x")})
    reseeded = load_pipeline_config(workspace / "pipeline.env", {"seed": 7})
    assert base.config_hash() == moved.config_hash()
    assert base.config_hash() != reseeded.config_hash()


def test_overrides_beat_file_values(workspace):
    config = load_pipeline_config(workspace / "pipeline.env", {"seed": 5, "budget": None, "importance": "Score=1,Foul=9"})
    assert config.seed == 5
    assert config.budget == 3
    assert config.importance == {"Score": 1.0, "Foul": 9.0}


def test_environment_fills_missing_settings(workspace, monkeypatch):
    monkeypatch.setenv("NEWSBOT_TOP_K", "2")
    monkeypatch.setenv("NEWSBOT_SEED", "99")
    config = load_pipeline_config(workspace / "pipeline.env")
    assert config.top_k == 2
    assert config.seed == 42


def test_missing_glossary(workspace):
    (workspace / "glossary.tsv").unlink()
    with pytest.raises(PipelineConfigError) as ctx:
        load_pipeline_config(workspace / "pipeline.env")
    assert "glossary" in str(ctx.value)


def test_missing_config_file(tmp_path):
    with pytest.raises(PipelineConfigError):
        load_pipeline_config(tmp_path / "absent.env")


@pytest.mark.parametrize("overrides", [
    {"seed": -1},
    {"fps": 0},
    {"budget": 0},
    {"summary_mode": "abstractive"},
    {"home": "阿拉维斯"},
    {"run_id": "../escape"},
    {"importance": "Penalty=3"},
    {"colour": "blue"},
])
def test_invalid_settings(workspace, overrides):
    with pytest.raises(PipelineConfigError):
        load_pipeline_config(workspace / "pipeline.env", overrides)


def test_parse_importance_accepts_category_spellings():
    assert parse_importance("Yellow Card=2, score=4") == {"YellowCard": 2.0, "Score": 4.0}
    with pytest.raises(ValueError):
        parse_importance("Score")


def test_empty_events_still_report_result(workspace):
    config = load_pipeline_config(workspace / "pipeline.env", {"events": str(workspace / "events_empty.csv")})
    bundle = run_pipeline(config)
    assert bundle.article.in_section(Section.IN_MATCH) == []
    assert bundle.translation.texts == ["Full time: Espanyol and Alavés drew 0-0."]


def test_article_scope_translates_every_sentence(workspace):
    config = load_pipeline_config(workspace / "pipeline.env", {"translate_scope": "article"})
    bundle = run_pipeline(config)
    assert len(bundle.translation.sentences) == len(bundle.article.sentences)


def test_stage_failure_keeps_earlier_outputs(workspace):
    (workspace / "lexicon_small.tsv").write_text("goal\tG OW1 L\n", encoding="utf-8")
    config = load_pipeline_config(workspace / "pipeline.env", {
        "lexicon": str(workspace / "lexicon_small.tsv"),
        "unknown_token_policy": "error",
    })
    with pytest.raises(StageError) as ctx:
        run_pipeline(config)
    assert ctx.value.stage == "phonemize"
    assert (config.run_dir / OUTPUT_FILES["translation"]).is_file()
    assert not (config.run_dir / MANIFEST_FILE).exists()


def test_failed_rerun_leaves_no_earlier_outputs(workspace):
    first = run_pipeline(load_pipeline_config(workspace / "pipeline.env"))
    assert (first.run_dir / MANIFEST_FILE).is_file()

    (workspace / "lexicon_small.tsv").write_text("goal\tG OW1 L\n", encoding="utf-8")
    config = load_pipeline_config(workspace / "pipeline.env", {
        "lexicon": str(workspace / "lexicon_small.tsv"),
        "unknown_token_policy": "error",
    })
    assert config.run_dir == first.run_dir
    with pytest.raises(StageError):
        run_pipeline(config)
    for name in ("article", "summary", "labels", "translation"):
        assert (config.run_dir / OUTPUT_FILES[name]).is_file(), name
    for filename in (OUTPUT_FILES["timeline"], OUTPUT_FILES["animation"], MANIFEST_FILE, TIMINGS_FILE):
        assert not (config.run_dir / filename).exists(), filename


def _without_model(workspace):
    config_file = workspace / "pipeline.env"
    lines = config_file.read_text(encoding="utf-8").splitlines()
    config_file.write_text("\n".join(l for l in lines if not l.startswith("MODEL=")) + "\n", encoding="utf-8")
    return config_file


def test_run_without_model_fails_at_animate(workspace):
    config = load_pipeline_config(_without_model(workspace))
    assert config.model is None
    with pytest.raises(StageError) as ctx:
        run_pipeline(config)
    assert ctx.value.stage == "animate"
    assert isinstance(ctx.value.cause, MissingModelError)
    assert (config.run_dir / OUTPUT_FILES["timeline"]).is_file()
    assert not (config.run_dir / OUTPUT_FILES["animation"]).exists()
    assert not (config.run_dir / MANIFEST_FILE).exists()


def test_cli_run_without_model(workspace):
    assert main(["run", "--config", str(_without_model(workspace))]) == EXIT_STAGE_FAILURE


def test_missing_model_file(workspace):
    (workspace / "lipsync.npz").unlink()
    with pytest.raises(PipelineConfigError) as ctx:
        load_pipeline_config(workspace / "pipeline.env")
    assert "model" in str(ctx.value)


def test_cli_animate_requires_model(tmp_path):
    with pytest.raises(SystemExit) as ctx:
        main(["animate", "--timeline", str(tmp_path / "timeline.tsv"), "--out", str(tmp_path / "a.txt")])
    assert ctx.value.code == 2


def test_stage_commands_match_full_run(workspace, tmp_path):
    config = load_pipeline_config(workspace / "pipeline.env")
    bundle = run_pipeline(config)

    out = tmp_path / "stages"
    out.mkdir()
    steps = [
        ["generate", "--events", str(config.events), "--templates", str(config.templates),
         "--home", config.home, "--away", config.away, "--seed", "42",
         "--history", str(config.history), "--out", str(out / "article.tsv")],
        ["summarize", "--article", str(out / "article.tsv"), "--events", str(config.events),
         "--budget", "3", "--labels", str(out / "summary_labels.tsv"), "--out", str(out / "summary.tsv")],
        ["translate", "--input", str(out / "summary.tsv"), "--glossary", str(config.glossary),
         "--dictionary", str(config.dictionary), "--src", "zh", "--tgt", "en", "--out", str(out / "translation.tsv")],
        ["phonemize", "--input", str(out / "translation.tsv"), "--lexicon", str(config.lexicon),
         "--language", "en", "--policy", "skip", "--duration", str(settings.DEFAULT_PHONEME_DURATION_S),
         "--pause", str(settings.PAUSE_DURATION_S), "--out", str(out / "timeline.tsv")],
        ["animate", "--timeline", str(out / "timeline.tsv"), "--fps", "25", "--model", str(config.model),
         "--out", str(out / "animation.txt")],
    ]
    for argv in steps:
        assert main(argv) == EXIT_OK, argv[0]
    for filename in OUTPUT_FILES.values():
        assert (out / filename).read_bytes() == (bundle.run_dir / filename).read_bytes(), filename
    assert load_article(out / "translation.tsv").texts == EXPECTED_TRANSLATION


def test_cli_run(workspace, capsys):
    assert main(["run", "--config", str(workspace / "pipeline.env"), "--run-id", "cli"]) == EXIT_OK
    printed = capsys.readouterr().out
    assert EXPECTED_TRANSLATION[0] in printed


def test_cli_missing_config(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.env")]) == EXIT_USAGE


def test_cli_missing_input_file(tmp_path, data_dir):
    argv = ["translate", "--input", str(tmp_path / "absent.tsv"), "--glossary", str(data_dir / "glossary.tsv"),
            "--out", str(tmp_path / "out.tsv")]
    assert main(argv) == EXIT_USAGE


def test_cli_stage_failure(workspace):
    (workspace / "lexicon_small.tsv").write_text("goal\tG OW1 L\n", encoding="utf-8")
    argv = ["run", "--config", str(workspace / "pipeline.env")]
    assert main(argv) == EXIT_OK
    translation = workspace.parent / "runs" / "espanyol-alaves" / "translation.tsv"
    failing = ["phonemize", "--input", str(translation), "--lexicon", str(workspace / "lexicon_small.tsv"),
               "--out", str(workspace / "timeline.tsv")]
    assert main(failing) == EXIT_STAGE_FAILURE


def test_cli_rejects_zero_budget(tmp_path):
    with pytest.raises(SystemExit) as ctx:
        main(["summarize", "--article", "a", "--events", "e", "--out", "o", "--budget", "0"])
    assert ctx.value.code == 2


def test_cli_grad_check():
    assert main(["grad-check", "--seed", "1"]) == EXIT_OK


def test_module_entry_point(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["newsbot", "grad-check", "--seed", "2"])
    with pytest.raises(SystemExit) as ctx:
        runpy.run_module("src.cli", run_name="__main__")
    assert ctx.value.code == EXIT_OK


def test_cli_train_then_animate_with_model(workspace, tmp_path):
    model = tmp_path / "lipsync.npz"
    argv = ["train-lipsync", "--lexicon", str(workspace / "lexicon_en.tsv"), "--sequences", "10",
            "--hidden", "16,16", "--steps", "20", "--batch-size", "32", "--learning-rate", "0.01",
            "--dropout", "0.0", "--save-dataset", str(tmp_path / "pairs.txt"), "--out", str(model)]
    assert main(argv) == EXIT_OK
    assert (tmp_path / "pairs.txt").is_file()

    bundle = run_pipeline(load_pipeline_config(workspace / "pipeline.env", {"model": str(model)}))
    assert bundle.animation.frame_count > 0
    assert bundle.manifest["inputs"]["model"]["file"] == "lipsync.npz"
