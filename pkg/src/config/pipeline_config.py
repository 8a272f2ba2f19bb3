"""
Run configuration for the newsbot pipeline.

Values are taken, highest priority first, from CLI flags, the config file
(``KEY=value`` lines), ``NEWSBOT_*`` environment variables and the defaults
below. Relative paths in a config file are resolved against the file's
directory.
"""
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Union

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.config import settings
from src.models.event_model import EventCategory, lookup_category
from src.models.phoneme_model import UnknownTokenPolicy
from src.utils.exceptions import PipelineConfigError

INPUT_FIELDS = ("events", "history", "templates", "glossary", "dictionary", "lexicon", "model")


def parse_importance(value: Any) -> Dict[str, float]:
    """Importance overrides from ``Score=5,Foul=2`` or a mapping, keyed by category value."""
    if isinstance(value, str):
        pairs = {}
        for item in filter(None, (p.strip() for p in value.split(","))):
            name, sep, weight = item.partition("=")
            if not sep:
                raise ValueError(f"importance override {item!r} is not Category=weight")
            pairs[name.strip()] = float(weight)
        value = pairs
    normalized = {}
    for name, weight in dict(value).items():
        category = lookup_category(name) or (EventCategory.OTHER if name.lower() == "other" else None)
        if category is None:
            raise ValueError(f"unknown event category {name!r} in importance overrides")
        if float(weight) < 0:
            raise ValueError(f"importance of {name} must be >= 0")
        normalized[category.value] = float(weight)
    return normalized


class PipelineConfig(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="NEWSBOT_", frozen=True, extra="forbid")

    # Inputs
    events: Path
    history: Optional[Path] = None
    templates: Path
    glossary: Path
    dictionary: Optional[Path] = None
    lexicon: Path
    model: Optional[Path] = None

    # Match
    home: str
    away: str

    # Languages and rendering
    src_language: str = "zh"
    tgt_language: str = "en"
    fps: float = Field(default=settings.DEFAULT_FPS, gt=0)
    seed: int = Field(..., ge=0)

    # Summarization
    summary_mode: Literal["soccer", "labels"] = "soccer"
    budget: int = Field(default=settings.SUMMARY_BUDGET, ge=1)
    top_k: int = Field(default=settings.SUMMARY_TOP_K, ge=1)
    importance: Dict[str, float] = Field(default_factory=dict)
    blowout_threshold: int = Field(default=settings.BLOWOUT_THRESHOLD, ge=1)

    # Translation and speech
    translate_scope: Literal["summary", "article"] = "summary"
    unknown_token_policy: UnknownTokenPolicy = UnknownTokenPolicy.SKIP
    phoneme_duration_s: float = Field(default=settings.DEFAULT_PHONEME_DURATION_S, gt=0)
    pause_duration_s: float = Field(default=settings.PAUSE_DURATION_S, ge=0)
    include_prosody: bool = False

    # Output
    run_id: str = "run"
    output_dir: Path = Path(settings.OUTPUT_DIR)

    @field_validator("importance", mode="before")
    @classmethod
    def _parse_importance(cls, value: Any) -> Any:
        return parse_importance(value)

    @field_validator("run_id")
    @classmethod
    def _run_id(cls, value: str) -> str:
        if not value or any(ch in value for ch in "/\\") or value in (".", ".."):
            raise ValueError("run_id must be a plain directory name")
        return value

    @model_validator(mode="after")
    def _inputs_exist(self) -> "PipelineConfig":
        if self.home.strip() == self.away.strip():
            raise ValueError("home and away teams must differ")
        for name in INPUT_FIELDS:
            path = getattr(self, name)
            if path is not None and not path.is_file():
                raise ValueError(f"{name} file not found: {path}")
        return self

    @property
    def run_dir(self) -> Path:
        return self.output_dir / self.run_id

    def input_paths(self) -> Dict[str, Path]:
        return {name: getattr(self, name) for name in INPUT_FIELDS if getattr(self, name) is not None}

    def config_hash(self) -> str:
        """
        sha256 of the settings that determine the outputs. Input files enter by
        content hash, so moving the inputs does not change it.
        """
        payload = self.model_dump(mode="json", exclude={"output_dir", "run_id", *INPUT_FIELDS})
        payload["inputs"] = {name: file_sha256(path) for name, path in self.input_paths().items()}
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _normalize_key(key: str) -> str:
    key = key.strip().lower()
    prefix = PipelineConfig.model_config["env_prefix"].lower()
    return key[len(prefix):] if key.startswith(prefix) else key


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """``KEY=value`` pairs, relative input/output paths resolved against the file's directory."""
    path = Path(path)
    if not path.is_file():
        raise PipelineConfigError(f"config file not found: {path}")
    base = path.parent
    values: Dict[str, str] = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            continue
        key = _normalize_key(key)
        if key in (*INPUT_FIELDS, "output_dir") and value and not Path(value).is_absolute():
            value = str(base / value)
        values[key] = value
    return values


def load_pipeline_config(
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> PipelineConfig:
    """
    Build and validate the run configuration.

    Args:
        config_file: Optional ``KEY=value`` config file
        overrides: Values from CLI flags; None entries are ignored

    Raises:
        PipelineConfigError: missing or invalid settings, missing input files
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(read_config_file(config_file))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return PipelineConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise PipelineConfigError(f"invalid pipeline configuration: {problems}") from e
