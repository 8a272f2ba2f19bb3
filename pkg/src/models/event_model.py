"""
Match event records and the key-value facts derived from them.
"""
import re
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class EventCategory(str, Enum):
    SCORE = "Score"
    YELLOW_CARD = "YellowCard"
    RED_CARD = "RedCard"
    FOUL = "Foul"
    SUBSTITUTION = "Substitution"
    OTHER = "Other"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @property
    def bank_key(self) -> str:
        """Template bank section for this category."""
        return _BANK_KEYS[self]


_DISPLAY_NAMES = {
    EventCategory.SCORE: "Score",
    EventCategory.YELLOW_CARD: "Yellow Card",
    EventCategory.RED_CARD: "Red Card",
    EventCategory.FOUL: "Foul",
    EventCategory.SUBSTITUTION: "Substitution",
    EventCategory.OTHER: "Other",
}

_BANK_KEYS = {
    EventCategory.SCORE: "score",
    EventCategory.YELLOW_CARD: "yellow_card",
    EventCategory.RED_CARD: "red_card",
    EventCategory.FOUL: "foul",
    EventCategory.SUBSTITUTION: "substitution",
    EventCategory.OTHER: "other",
}

# Normalized spellings (lowercase, no spaces/underscores/hyphens)
_CATEGORY_ALIASES = {
    "score": EventCategory.SCORE,
    "goal": EventCategory.SCORE,
    "yellowcard": EventCategory.YELLOW_CARD,
    "redcard": EventCategory.RED_CARD,
    "foul": EventCategory.FOUL,
    "substitution": EventCategory.SUBSTITUTION,
}


def normalize_category_tag(tag: str) -> str:
    return re.sub(r"[\s_\-]+", "", tag).lower()


def lookup_category(tag: str) -> Optional[EventCategory]:
    """Known category for a raw tag, or None when the tag is not in the vocabulary."""
    return _CATEGORY_ALIASES.get(normalize_category_tag(tag))


class EventRecord(BaseModel):
    """One timestamped match event."""

    model_config = ConfigDict(frozen=True)

    time_minute: int = Field(..., ge=0)
    category: EventCategory
    player: str
    team: str
    attributes: Dict[str, str] = Field(default_factory=dict)
    # Raw tag, only meaningful for EventCategory.OTHER
    other_tag: Optional[str] = None

    @field_validator("player", "team")
    @classmethod
    def _non_empty(cls, value: str) -> str:
        value = value.strip()
        if not value:
            raise ValueError("must be non-empty")
        return value

    @field_validator("attributes")
    @classmethod
    def _attribute_keys(cls, value: Dict[str, str]) -> Dict[str, str]:
        for key, item in value.items():
            if not key or any(ch in key for ch in ";="):
                raise ValueError(f"invalid attribute key {key!r}")
            if ";" in item:
                raise ValueError(f"attribute value for {key!r} may not contain ';'")
        return value

    @model_validator(mode="after")
    def _other_tag(self) -> "EventRecord":
        if self.category is EventCategory.OTHER:
            if not self.other_tag or not self.other_tag.strip():
                raise ValueError("Other events need a raw tag")
            if lookup_category(self.other_tag) is not None:
                raise ValueError(f"tag {self.other_tag!r} names a known category")
        elif self.other_tag is not None:
            raise ValueError("only Other events carry a raw tag")
        return self

    @property
    def category_label(self) -> str:
        if self.category is EventCategory.OTHER:
            return self.other_tag
        return self.category.display_name


class HistoryRecord(BaseModel):
    """A prior head-to-head result, passed through to pre-match templates."""

    model_config = ConfigDict(frozen=True)

    home_team: str
    away_team: str
    home_goals: int = Field(..., ge=0)
    away_goals: int = Field(..., ge=0)
    date: str = ""

    @property
    def score(self) -> str:
        return f"{self.home_goals}-{self.away_goals}"


class MatchFacts(BaseModel):
    """Normalized key-value facts of one match."""

    model_config = ConfigDict(frozen=True)

    home_team: str
    away_team: str
    home_goals: int = Field(..., ge=0)
    away_goals: int = Field(..., ge=0)
    winning_team: Optional[str] = None
    losing_team: Optional[str] = None
    winning_score: Optional[str] = None
    score_diff: int = Field(..., ge=0)
    history: List[HistoryRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def _result_consistency(self) -> "MatchFacts":
        diff = abs(self.home_goals - self.away_goals)
        if self.score_diff != diff:
            raise ValueError("score_diff must equal the goal difference")
        if diff == 0:
            if self.winning_team or self.losing_team or self.winning_score:
                raise ValueError("a draw has no winning or losing team")
        else:
            teams = {self.home_team, self.away_team}
            if self.winning_team not in teams or self.losing_team not in teams - {self.winning_team}:
                raise ValueError("winning and losing team must be the two match teams")
        return self

    @property
    def is_draw(self) -> bool:
        return self.winning_team is None
