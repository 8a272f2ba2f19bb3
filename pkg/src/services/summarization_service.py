import re
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Protocol, Sequence, Set, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import cosine_similarity

from src.config import settings
from src.models.article_model import Article, Section
from src.models.event_model import EventCategory, EventRecord
from src.utils.exceptions import SummarizationError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

# Sentence-final punctuation, kept with the sentence it closes
_SENTENCE_END = re.compile(r"[^。！？.!?]*[。！？.!?]+|[^。！？.!?]+$")


class SentenceLabels(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels: List[int]
    scores: List[float]

    @model_validator(mode="after")
    def _aligned(self) -> "SentenceLabels":
        if len(self.labels) != len(self.scores):
            raise ValueError("labels and scores must have the same length")
        if any(label not in (0, 1) for label in self.labels):
            raise ValueError("labels must be 0 or 1")
        return self

    @property
    def selected(self) -> List[int]:
        return [i for i, label in enumerate(self.labels) if label == 1]


class SelectionRule(BaseModel):
    """Either keep the top_k scores or every score >= threshold."""

    model_config = ConfigDict(frozen=True)

    top_k: Optional[int] = Field(default=None, ge=0)
    threshold: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _exactly_one(self) -> "SelectionRule":
        if (self.top_k is None) == (self.threshold is None):
            raise ValueError("set exactly one of top_k or threshold")
        return self


DEFAULT_IMPORTANCE: Dict[str, float] = {
    EventCategory.SCORE.value: 5.0,
    EventCategory.RED_CARD.value: 4.0,
    EventCategory.YELLOW_CARD.value: 3.0,
    EventCategory.SUBSTITUTION.value: 2.0,
    EventCategory.FOUL.value: 1.0,
    EventCategory.OTHER.value: 0.0,
}


class ImportanceTable(BaseModel):
    """Importance weight per event category."""

    model_config = ConfigDict(frozen=True)

    weights: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_IMPORTANCE))

    @model_validator(mode="after")
    def _valid_weights(self) -> "ImportanceTable":
        for category, weight in self.weights.items():
            EventCategory(category)
            if weight < 0:
                raise ValueError(f"importance of {category} must be >= 0")
        return self

    def weight(self, category: EventCategory) -> float:
        return self.weights.get(category.value, 0.0)

    def with_overrides(self, overrides: Mapping[str, float]) -> "ImportanceTable":
        return ImportanceTable(weights={**self.weights, **overrides})


class SentenceScorer(Protocol):
    """Scores each sentence in [0, 1]; implementations must be reentrant."""

    def score(self, sentences: Sequence[str]) -> Sequence[float]:
        ...


class HeuristicScorer:
    """
    Weighted mix of a position prior (earlier is higher), a length prior and
    TF-IDF similarity to a reference text such as the title or match facts.
    """

    def __init__(self, reference: str = "", weights: Optional[Mapping[str, float]] = None):
        self.reference = reference
        self.weights = dict(weights or settings.SCORER_WEIGHTS)
        if sum(self.weights.values()) <= 0:
            raise SummarizationError("scorer weights must sum to a positive value")

    def score(self, sentences: Sequence[str]) -> List[float]:
        n = len(sentences)
        if n == 0:
            return []
        position = np.array([1.0 - i / n for i in range(n)])
        lengths = np.array([len(s) for s in sentences], dtype=float)
        length = lengths / lengths.max() if lengths.max() > 0 else np.zeros(n)
        keyword = self._keyword_overlap(sentences)

        total = sum(self.weights.values())
        combined = (
            self.weights.get("position", 0.0) * position
            + self.weights.get("length", 0.0) * length
            + self.weights.get("keyword", 0.0) * keyword
        ) / total
        return [float(v) for v in np.clip(combined, 0.0, 1.0)]

    def _keyword_overlap(self, sentences: Sequence[str]) -> np.ndarray:
        if not self.reference.strip():
            return np.zeros(len(sentences))
        try:
            # Character n-grams work for unsegmented Chinese as well
            vectorizer = TfidfVectorizer(analyzer="char_wb", ngram_range=(1, 2))
            vectors = vectorizer.fit_transform([self.reference, *sentences])
            return cosine_similarity(vectors[1:], vectors[0:1]).ravel()
        except ValueError as e:
            logger.warning(f"TF-IDF vectorization failed: {e}. Using fallback character overlap.")
            return np.array([self._simple_overlap(s) for s in sentences])

    def _simple_overlap(self, sentence: str) -> float:
        ref = set(self.reference.replace(" ", ""))
        chars = set(sentence.replace(" ", ""))
        if not ref or not chars:
            return 0.0
        return len(ref & chars) / max(len(ref), len(chars))


def split_text(text: str) -> List[str]:
    """Split raw text after sentence-final punctuation, keeping the delimiter."""
    pieces = [m.group().strip() for m in _SENTENCE_END.finditer(text)]
    return [p for p in pieces if p]


def split_sentences(source: Union[Article, str]) -> List[str]:
    """
    Sentences of an article or of raw report text.

    Article records are already sentence-granular and are returned as-is;
    raw text is split on 。！？.!? with the delimiter kept.
    """
    if isinstance(source, Article):
        return source.texts
    return split_text(source)


def label_sentences(
    sentences: Sequence[str], scorer: SentenceScorer, rule: SelectionRule
) -> SentenceLabels:
    """
    Turn scorer output into 0-1 labels.

    Args:
        sentences: Candidate sentences
        scorer: Scorer returning one value in [0, 1] per sentence
        rule: top-k (ties go to the earlier sentence) or threshold selection

    Returns:
        SentenceLabels aligned with the input
    """
    scores = [float(s) for s in scorer.score(sentences)]
    if len(scores) != len(sentences):
        raise SummarizationError(f"scorer returned {len(scores)} scores for {len(sentences)} sentences")
    bad = [s for s in scores if not (0.0 <= s <= 1.0)]
    if bad:
        raise SummarizationError(f"scorer output outside [0, 1]: {bad[0]}")

    labels = [0] * len(scores)
    if rule.top_k is not None:
        ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
        for i in ranked[:rule.top_k]:
            labels[i] = 1
    else:
        labels = [1 if s >= rule.threshold else 0 for s in scores]
    return SentenceLabels(labels=labels, scores=scores)


def summarize_labeled(article: Article, labels: SentenceLabels) -> Article:
    return Article.from_sentences([s for s, label in zip(article.sentences, labels.labels) if label])


def _soccer_selection(
    events: Sequence[EventRecord], article: Article, table: ImportanceTable, budget: int
) -> Set[int]:
    if budget < 1:
        raise SummarizationError(f"budget must be >= 1, got {budget}")
    candidates = []
    for position, sentence in enumerate(article.sentences):
        if sentence.section is Section.IN_MATCH:
            if sentence.source_event_index >= len(events):
                raise SummarizationError(
                    f"sentence {position} links to event {sentence.source_event_index}, "
                    f"but there are {len(events)} events"
                )
            event = events[sentence.source_event_index]
            candidates.append((-table.weight(event.category), event.time_minute, position))
    keep = {position for _, _, position in sorted(candidates)[:budget]}
    keep.update(i for i, s in enumerate(article.sentences) if s.section is Section.POST_MATCH)
    return keep


def summarize_soccer(
    events: Sequence[EventRecord],
    article: Article,
    table: ImportanceTable,
    budget: int,
) -> Article:
    """
    Commentary-to-summary selection for soccer articles.

    Keeps the ``budget`` in-match sentences whose events rank highest by
    (importance desc, minute asc) plus every post-match sentence, in the
    original order. A budget above the candidate count keeps all candidates.
    """
    keep = _soccer_selection(events, article, table, budget)
    kept = [s for i, s in enumerate(article.sentences) if i in keep]
    logger.info(f"Soccer summary keeps {len(kept)} of {len(article.sentences)} sentences")
    return Article.from_sentences(kept)


def soccer_labels(
    events: Sequence[EventRecord],
    article: Article,
    table: ImportanceTable,
    budget: int,
) -> SentenceLabels:
    """Labels sidecar for summarize_soccer; in-match scores are normalized importance."""
    keep = _soccer_selection(events, article, table, budget)
    max_weight = max(table.weights.values(), default=0.0) or 1.0
    scores: List[float] = []
    for sentence in article.sentences:
        if sentence.section is Section.IN_MATCH:
            scores.append(table.weight(events[sentence.source_event_index].category) / max_weight)
        else:
            scores.append(1.0 if sentence.section is Section.POST_MATCH else 0.0)
    labels = [int(i in keep) for i in range(len(article.sentences))]
    return SentenceLabels(labels=labels, scores=scores)


def save_labels(labels: SentenceLabels, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("index\tlabel\tscore\n")
        for index, (label, score) in enumerate(zip(labels.labels, labels.scores)):
            handle.write(f"{index}\t{label}\t{score:.6f}\n")


def load_labels(path: Union[str, Path]) -> SentenceLabels:
    labels, scores = [], []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            fields = line.rstrip("\n").split("\t")
            if fields[0] == "index" or len(fields) < 3:
                continue
            labels.append(int(fields[1]))
            scores.append(float(fields[2]))
    return SentenceLabels(labels=labels, scores=scores)
