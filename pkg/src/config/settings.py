import os
from dotenv import load_dotenv

# Load environment variables from a .env file
load_dotenv()


def _csv(name: str, default: str) -> list:
    return [item.strip() for item in os.getenv(name, default).split(",") if item.strip()]


# Application Settings
APP_NAME = "Newsbot Robot Reporter"
DEBUG = os.getenv("DEBUG", "False").lower() in ("true", "1")
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DATA_DIR = os.getenv("DATA_DIR", os.path.join(BASE_DIR, "data"))
OUTPUT_DIR = os.getenv("OUTPUT_DIR", os.path.join(BASE_DIR, "runs"))

# /pipeline/run only reads and writes below this directory
API_ROOT_DIR = os.getenv("API_ROOT_DIR", BASE_DIR)

# Default resources for the HTTP API
DEFAULT_TEMPLATE_BANK = os.getenv("DEFAULT_TEMPLATE_BANK", os.path.join(DATA_DIR, "templates_zh.txt"))
DEFAULT_GLOSSARY = os.getenv("DEFAULT_GLOSSARY", os.path.join(DATA_DIR, "glossary.tsv"))
DEFAULT_PHRASE_TABLE = os.getenv("DEFAULT_PHRASE_TABLE", os.path.join(DATA_DIR, "phrase_table_zh_en.tsv"))

# News generation
BLOWOUT_THRESHOLD = int(os.getenv("BLOWOUT_THRESHOLD", "3"))
INMATCH_CATEGORIES = _csv("INMATCH_CATEGORIES", "Score,YellowCard,RedCard,Substitution")
PREMATCH_MAX_RECORDS = int(os.getenv("PREMATCH_MAX_RECORDS", "3"))

# Summarization
SUMMARY_TOP_K = int(os.getenv("SUMMARY_TOP_K", "3"))
SUMMARY_BUDGET = int(os.getenv("SUMMARY_BUDGET", "3"))
SCORER_WEIGHTS = {
    "position": float(os.getenv("SCORER_POSITION_WEIGHT", "0.5")),
    "length": float(os.getenv("SCORER_LENGTH_WEIGHT", "0.2")),
    "keyword": float(os.getenv("SCORER_KEYWORD_WEIGHT", "0.3")),
}

# Translation
PLACEHOLDER_PREFIX = os.getenv("PLACEHOLDER_PREFIX", "⟨NE")
PLACEHOLDER_SUFFIX = os.getenv("PLACEHOLDER_SUFFIX", "⟩")
SPACED_LANGUAGES = _csv("SPACED_LANGUAGES", "en")

# Phoneme timeline
DEFAULT_FPS = float(os.getenv("DEFAULT_FPS", "25"))
DEFAULT_PHONEME_DURATION_S = float(os.getenv("DEFAULT_PHONEME_DURATION_S", "0.08"))
PAUSE_DURATION_S = float(os.getenv("PAUSE_DURATION_S", "0.15"))

# Lip-sync network
LIPSYNC_HIDDEN_SIZES = [int(h) for h in _csv("LIPSYNC_HIDDEN_SIZES", "2048,2048,2048")]
TRAINING_DEFAULTS = {
    "batch_size": int(os.getenv("TRAIN_BATCH_SIZE", "128")),
    "learning_rate": float(os.getenv("TRAIN_LEARNING_RATE", "1e-3")),
    "steps": int(os.getenv("TRAIN_STEPS", "8000")),
    "dropout_p": float(os.getenv("TRAIN_DROPOUT", "0.5")),
    "bn_momentum": float(os.getenv("TRAIN_BN_MOMENTUM", "0.9")),
}

