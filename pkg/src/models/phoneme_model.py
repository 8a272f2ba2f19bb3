"""
Phoneme segments, timelines and pronunciation lexicons.

Prosody is carried as a suffix on lexicon symbols and split off on load:

    en  stress digit 0/1/2      AO1   -> AO  + "1"
    zh  tone digit 1-5          ma3   -> ma  + "3"
    ja  mora accent _H/_L       ka_H  -> ka  + "H"
"""
import re
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SIL = "SIL"


class UnknownTokenPolicy(str, Enum):
    ERROR = "error"
    SKIP = "skip"


_PROSODY_RULES = {
    "en": (re.compile(r"^(.+?)([012])$"), {"0", "1", "2"}),
    "zh": (re.compile(r"^(.+?)([1-5])$"), {"1", "2", "3", "4", "5"}),
    "ja": (re.compile(r"^(.+?)_([HL])$"), {"H", "L"}),
}


def prosody_tags(language: str) -> set:
    rule = _PROSODY_RULES.get(language)
    return set(rule[1]) if rule else set()


def split_prosody(symbol: str, language: str) -> Tuple[str, Optional[str]]:
    """Base phoneme and prosody tag of a lexicon symbol."""
    rule = _PROSODY_RULES.get(language)
    if rule is None:
        return symbol, None
    match = rule[0].match(symbol)
    if not match:
        return symbol, None
    return match.group(1), match.group(2)


class PhonemeSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    phoneme: str
    duration_s: float = Field(..., gt=0)
    prosody: Optional[str] = None


class PhonemeTimeline(BaseModel):
    """Phoneme segments in speaking order over an inventory with SIL at index 0."""

    model_config = ConfigDict(frozen=True)

    language: str
    segments: List[PhonemeSegment] = Field(default_factory=list)
    inventory: Tuple[str, ...] = (SIL,)

    @field_validator("inventory")
    @classmethod
    def _inventory(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if not value or value[0] != SIL:
            raise ValueError(f"inventory must start with {SIL}")
        if len(set(value)) != len(value):
            raise ValueError("inventory has duplicate symbols")
        return value

    @model_validator(mode="after")
    def _segments_in_inventory(self) -> "PhonemeTimeline":
        known = set(self.inventory)
        tags = prosody_tags(self.language)
        for index, segment in enumerate(self.segments):
            if segment.phoneme not in known:
                raise ValueError(f"segment {index}: phoneme {segment.phoneme!r} is not in the inventory")
            if segment.prosody is not None and segment.prosody not in tags:
                raise ValueError(
                    f"segment {index}: prosody {segment.prosody!r} is not valid for language {self.language!r}"
                )
        return self

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration_s for s in self.segments))

    def concat(self, other: "PhonemeTimeline") -> "PhonemeTimeline":
        if other.inventory != self.inventory or other.language != self.language:
            raise ValueError("cannot concatenate timelines with different inventories")
        return PhonemeTimeline(
            language=self.language, segments=[*self.segments, *other.segments], inventory=self.inventory
        )


class Lexicon(BaseModel):
    """Casefolded word -> pronunciation symbols (with prosody suffixes)."""

    model_config = ConfigDict(frozen=True)

    language: str
    entries: Dict[str, Tuple[str, ...]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _non_empty_pronunciations(self) -> "Lexicon":
        for word, symbols in self.entries.items():
            if not word or not symbols:
                raise ValueError(f"lexicon entry {word!r} has no pronunciation")
            if SIL in (split_prosody(s, self.language)[0] for s in symbols):
                raise ValueError(f"lexicon entry {word!r} uses the reserved symbol {SIL}")
        return self

    @property
    def max_word_length(self) -> int:
        return max((len(w) for w in self.entries), default=0)

    def pronunciation(self, word: str) -> Optional[Tuple[str, ...]]:
        return self.entries.get(word.casefold())

    def inventory(self, include_prosody: bool = False) -> Tuple[str, ...]:
        """SIL followed by the sorted distinct symbols of the lexicon."""
        symbols = set()
        for pronunciation in self.entries.values():
            for symbol in pronunciation:
                symbols.add(symbol if include_prosody else split_prosody(symbol, self.language)[0])
        return (SIL, *sorted(symbols))


def segments_from_pairs(pairs: Sequence[Tuple[str, float]]) -> List[PhonemeSegment]:
    return [PhonemeSegment(phoneme=p, duration_s=d) for p, d in pairs]
