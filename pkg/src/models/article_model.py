"""
Generated articles: ordered sentences tagged with section and source event.
"""
from enum import Enum
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Section(str, Enum):
    PRE_MATCH = "PreMatch"
    IN_MATCH = "InMatch"
    POST_MATCH = "PostMatch"

    @property
    def order(self) -> int:
        return _SECTION_ORDER[self]


_SECTION_ORDER = {Section.PRE_MATCH: 0, Section.IN_MATCH: 1, Section.POST_MATCH: 2}


class Sentence(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    section: Section
    source_event_index: Optional[int] = Field(default=None, ge=0)


class Article(BaseModel):
    """Sentences in PreMatch* InMatch* PostMatch* order."""

    model_config = ConfigDict(frozen=True)

    sentences: List[Sentence] = Field(default_factory=list)

    @model_validator(mode="after")
    def _section_order(self) -> "Article":
        last = 0
        for index, sentence in enumerate(self.sentences):
            if sentence.section.order < last:
                raise ValueError(f"sentence {index} ({sentence.section.value}) is out of section order")
            last = sentence.section.order
            if sentence.section is Section.IN_MATCH and sentence.source_event_index is None:
                raise ValueError(f"in-match sentence {index} has no source event")
        return self

    def check_event_links(self, event_count: int) -> None:
        """Raise ValueError when an in-match sentence links outside the event list."""
        for index, sentence in enumerate(self.sentences):
            link = sentence.source_event_index
            if sentence.section is Section.IN_MATCH and (link is None or link >= event_count):
                raise ValueError(f"sentence {index} links to event {link}, but there are {event_count} events")

    def in_section(self, section: Section) -> List[Sentence]:
        return [s for s in self.sentences if s.section is section]

    @property
    def texts(self) -> List[str]:
        return [s.text for s in self.sentences]

    @classmethod
    def from_sentences(cls, sentences: Sequence[Sentence]) -> "Article":
        return cls(sentences=list(sentences))
