import shutil
from pathlib import Path

import pytest

from src.dsl.bank import load_bank
from src.models.lipsync_model import FrameWindowing, TrainingConfig
from src.services.event_service import load_events, normalize_facts
from src.services.lipsync_service import dataset_inputs, make_synthetic_dataset
from src.services.network_service import init_parameters, save_model, train
from src.services.phoneme_service import load_lexicon
from src.services.translation_service import load_glossary, load_phrase_table

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

HOME_ZH, AWAY_ZH = "西班牙人", "阿拉维斯"
HOME_EN, AWAY_EN = "Espanyol", "Alavés"


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def zh_events():
    return load_events(DATA_DIR / "events_zh.csv")


@pytest.fixture
def en_events():
    return load_events(DATA_DIR / "events_en.csv")


@pytest.fixture
def zh_bank():
    return load_bank(DATA_DIR / "templates_zh.txt")


@pytest.fixture
def en_bank():
    return load_bank(DATA_DIR / "templates_en.txt")


@pytest.fixture
def zh_facts(zh_events):
    return normalize_facts(zh_events, HOME_ZH, AWAY_ZH)


@pytest.fixture
def en_facts(en_events):
    return normalize_facts(en_events, HOME_EN, AWAY_EN)


@pytest.fixture
def glossary():
    return load_glossary(DATA_DIR / "glossary.tsv")


@pytest.fixture
def phrase_backend():
    return load_phrase_table(DATA_DIR / "phrase_table_zh_en.tsv")


@pytest.fixture(scope="session")
def small_model(tmp_path_factory):
    """A quickly trained lip-sync model over the English lexicon's inventory."""
    inventory = load_lexicon(DATA_DIR / "lexicon_en.tsv", "en").inventory(False)
    windowing = FrameWindowing()
    dataset, _ = make_synthetic_dataset(len(inventory), windowing, num_sequences=10, seed=0)
    params = init_parameters(inventory, windowing, hidden_sizes=[16, 16], seed=0)
    config = TrainingConfig(batch_size=32, learning_rate=0.01, steps=20, dropout_p=0.0, rng_seed=0)
    params, _ = train(params, dataset_inputs(dataset, len(inventory)), dataset.targets, config)
    path = tmp_path_factory.mktemp("model") / "lipsync.npz"
    save_model(params, path)
    return path


@pytest.fixture
def workspace(tmp_path, small_model):
    """A copy of the data directory whose pipeline.env writes runs under tmp_path."""
    target = tmp_path / "data"
    shutil.copytree(DATA_DIR, target)
    shutil.copyfile(small_model, target / "lipsync.npz")
    config = target / "pipeline.env"
    lines = [l for l in config.read_text(encoding="utf-8").splitlines() if not l.startswith("OUTPUT_DIR=")]
    lines.append(f"OUTPUT_DIR={tmp_path / 'runs'}")
    config.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target
