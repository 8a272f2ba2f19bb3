"""
Glossaries and placeholder-masked text for entity-aware translation.
"""
import re
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import settings


class EntityKind(str, Enum):
    TEAM = "Team"
    PLAYER = "Player"
    OTHER = "Other"


class GlossaryEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    source_term: str
    target_term: str
    kind: EntityKind = EntityKind.OTHER

    @field_validator("source_term", "target_term")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("glossary terms must be non-empty")
        return value


class Glossary(BaseModel):
    """Source-language entity names and their fixed target-language forms."""

    model_config = ConfigDict(frozen=True)

    entries: List[GlossaryEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_terms(self) -> "Glossary":
        seen = set()
        for entry in self.entries:
            if entry.source_term in seen:
                raise ValueError(f"duplicate glossary term {entry.source_term!r}")
            seen.add(entry.source_term)
        return self

    def lookup(self, source_term: str) -> Optional[GlossaryEntry]:
        for entry in self.entries:
            if entry.source_term == source_term:
                return entry
        return None

    def __len__(self) -> int:
        return len(self.entries)


class PlaceholderFormat(BaseModel):
    """Surface form of a placeholder: prefix + id + suffix, e.g. ⟨NE1⟩."""

    model_config = ConfigDict(frozen=True)

    prefix: str = settings.PLACEHOLDER_PREFIX
    suffix: str = settings.PLACEHOLDER_SUFFIX

    @model_validator(mode="after")
    def _distinct(self) -> "PlaceholderFormat":
        if not self.prefix or not self.suffix:
            raise ValueError("placeholder prefix and suffix must be non-empty")
        return self

    def render(self, placeholder_id: int) -> str:
        return f"{self.prefix}{placeholder_id}{self.suffix}"

    @property
    def pattern(self) -> "re.Pattern[str]":
        return re.compile(f"{re.escape(self.prefix)}(\\d+){re.escape(self.suffix)}")

    def find_ids(self, text: str) -> List[int]:
        """Placeholder ids in order of appearance, repeats included."""
        return [int(m.group(1)) for m in self.pattern.finditer(text)]


class MaskedText(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    mapping: Dict[int, GlossaryEntry] = Field(default_factory=dict)
    placeholder_format: PlaceholderFormat = Field(default_factory=PlaceholderFormat)

    @model_validator(mode="after")
    def _placeholders_match_mapping(self) -> "MaskedText":
        first_seen: List[int] = []
        for pid in self.placeholder_format.find_ids(self.text):
            if pid not in first_seen:
                first_seen.append(pid)
        if set(first_seen) != set(self.mapping):
            raise ValueError(
                f"placeholders {sorted(first_seen)} do not match mapping ids {sorted(self.mapping)}"
            )
        if first_seen != list(range(1, len(first_seen) + 1)):
            raise ValueError("placeholders must be numbered 1..n in order of first occurrence")
        return self
