import re
import unicodedata
from collections import Counter
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Protocol, Tuple, Union

from src.config import settings
from src.models.article_model import Article, Sentence
from src.models.translation_model import (
    EntityKind,
    Glossary,
    GlossaryEntry,
    MaskedText,
    PlaceholderFormat,
)
from src.utils.exceptions import GlossaryError, PlaceholderIntegrityError, UnknownPlaceholderError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class TranslationBackend(Protocol):
    """Machine translation engine; must copy placeholder tokens verbatim."""

    def translate(self, text: str, src: str, tgt: str) -> str:
        ...


class IdentityBackend:
    """Returns its input. Reentrant."""

    def translate(self, text: str, src: str, tgt: str) -> str:
        return text


def _term_pattern(glossary: Glossary, fmt: PlaceholderFormat) -> "re.Pattern[str]":
    # Placeholders come first so they are consumed whole and never re-masked;
    # longer terms before shorter ones gives longest-match-first.
    terms = sorted({e.source_term for e in glossary.entries}, key=lambda t: (-len(t), t))
    alternatives = [fmt.pattern.pattern] + [re.escape(t) for t in terms]
    return re.compile("|".join(alternatives))


def mask_entities(
    text: Union[str, MaskedText],
    glossary: Glossary,
    placeholder_format: Optional[PlaceholderFormat] = None,
) -> MaskedText:
    """
    Replace glossary terms with numbered placeholders.

    Matching is exact-string, leftmost and longest-first, without overlaps.
    Repeated mentions of a term reuse its id. Passing an already masked text
    keeps its placeholders and numbering, so masking is idempotent.

    Args:
        text: Raw source text, or a MaskedText to extend
        glossary: Entity glossary
        placeholder_format: Placeholder surface form (defaults from settings)

    Returns:
        MaskedText with ids numbered 1..n by first occurrence
    """
    if isinstance(text, MaskedText):
        fmt = text.placeholder_format
        mapping: Dict[int, GlossaryEntry] = dict(text.mapping)
        source = text.text
    else:
        fmt = placeholder_format or PlaceholderFormat()
        mapping = {}
        source = text
        stray = fmt.find_ids(source)
        if stray:
            raise GlossaryError(f"text already contains placeholder {fmt.render(stray[0])}")

    if not glossary.entries:
        return MaskedText(text=source, mapping=mapping, placeholder_format=fmt)

    ids_by_term = {entry.source_term: pid for pid, entry in mapping.items()}
    terms = {entry.source_term: entry for entry in glossary.entries}

    def replace(match: "re.Match[str]") -> str:
        if match.group(1) is not None:
            return match.group(0)
        term = match.group(0)
        if term not in ids_by_term:
            pid = len(mapping) + 1
            ids_by_term[term] = pid
            mapping[pid] = terms[term]
        return fmt.render(ids_by_term[term])

    masked = _term_pattern(glossary, fmt).sub(replace, source)
    logger.debug(f"Masked {len(mapping)} entities")
    return MaskedText(text=masked, mapping=mapping, placeholder_format=fmt)


def translate_masked(masked: MaskedText, backend: TranslationBackend, src: str, tgt: str) -> str:
    """
    Run the backend on masked text and check that every placeholder survived.

    Raises:
        PlaceholderIntegrityError: a placeholder was dropped, duplicated or invented
    """
    fmt = masked.placeholder_format
    output = backend.translate(masked.text, src, tgt)
    before = Counter(fmt.find_ids(masked.text))
    after = Counter(fmt.find_ids(output))
    if before != after:
        missing = [pid for pid in before if after[pid] < before[pid]]
        extra = [pid for pid in after if after[pid] > before[pid]]
        logger.error(f"Backend broke placeholders: missing={sorted(missing)} extra={sorted(extra)}")
        raise PlaceholderIntegrityError(missing, extra)
    return output


def unmask(
    translated: str,
    mapping: Mapping[int, GlossaryEntry],
    entity_separator: str = "",
    placeholder_format: Optional[PlaceholderFormat] = None,
) -> str:
    """
    Put each entity's target form back in place of its placeholder.

    Args:
        translated: Backend output still holding placeholders
        mapping: Placeholder id to glossary entry
        entity_separator: Inserted between two directly adjacent entities
        placeholder_format: Placeholder surface form (defaults from settings)

    Returns:
        Text without placeholders
    """
    fmt = placeholder_format or PlaceholderFormat()
    pieces: List[str] = []
    last_end = 0
    previous_end = None
    for match in fmt.pattern.finditer(translated):
        pid = int(match.group(1))
        if pid not in mapping:
            raise UnknownPlaceholderError(pid)
        pieces.append(translated[last_end:match.start()])
        if previous_end == match.start():
            pieces.append(entity_separator)
        pieces.append(mapping[pid].target_term)
        last_end = previous_end = match.end()
    pieces.append(translated[last_end:])
    return "".join(pieces)


def entity_separator_for(tgt: str) -> str:
    return " " if tgt in settings.SPACED_LANGUAGES else ""


def translate_text(
    text: str,
    glossary: Glossary,
    backend: TranslationBackend,
    src: str,
    tgt: str,
    placeholder_format: Optional[PlaceholderFormat] = None,
) -> str:
    """Mask glossary entities, translate, then restore the target-language names."""
    masked = mask_entities(text, glossary, placeholder_format)
    translated = translate_masked(masked, backend, src, tgt)
    return unmask(translated, masked.mapping, entity_separator_for(tgt), masked.placeholder_format)


def translate_article(
    article: Article,
    glossary: Glossary,
    backend: TranslationBackend,
    src: str,
    tgt: str,
) -> Article:
    """Translate sentence by sentence, keeping sections and event links."""
    sentences = [
        Sentence(
            text=translate_text(s.text, glossary, backend, src, tgt),
            section=s.section,
            source_event_index=s.source_event_index,
        )
        for s in article.sentences
    ]
    logger.info(f"Translated {len(sentences)} sentences {src}->{tgt}")
    return Article.from_sentences(sentences)


# Closing and inline punctuation attaches to the left; opening punctuation to the right
_NO_SPACE_BEFORE = {"Po", "Pe", "Pf"}
_NO_SPACE_AFTER = {"Ps", "Pi"}


class DictionaryBackend:
    """
    Phrase-table backend: longest source phrase wins, placeholders are kept
    as atomic tokens, and unmatched characters pass through unchanged.

    Reentrant; the phrase table is not modified after construction.
    """

    def __init__(
        self,
        phrases: Mapping[str, str],
        placeholder_format: Optional[PlaceholderFormat] = None,
        spaced_languages: Optional[List[str]] = None,
    ):
        self.phrases = dict(phrases)
        self.placeholder_format = placeholder_format or PlaceholderFormat()
        self.spaced_languages = list(spaced_languages or settings.SPACED_LANGUAGES)
        sources = sorted(self.phrases, key=lambda p: (-len(p), p))
        alternatives = [self.placeholder_format.pattern.pattern] + [re.escape(p) for p in sources]
        self._pattern = re.compile("|".join(alternatives))

    def segment(self, text: str) -> List[Tuple[str, str]]:
        """Split text into (kind, surface) pairs; kind is placeholder, phrase or raw."""
        segments: List[Tuple[str, str]] = []
        last = 0
        for match in self._pattern.finditer(text):
            if match.start() > last:
                segments.append(("raw", text[last:match.start()]))
            if match.group(1) is not None:
                segments.append(("placeholder", match.group(0)))
            else:
                segments.append(("phrase", self.phrases[match.group(0)]))
            last = match.end()
        if last < len(text):
            segments.append(("raw", text[last:]))
        return segments

    def translate(self, text: str, src: str, tgt: str) -> str:
        segments = self.segment(text)
        if tgt not in self.spaced_languages:
            return "".join(surface for _, surface in segments)

        out = ""
        previous_kind = None
        for kind, surface in segments:
            if out and surface and _needs_space(out, surface, previous_kind, kind):
                out += " "
            out += surface
            previous_kind = kind
        return out


def _needs_space(left: str, right: str, left_kind: str, right_kind: str) -> bool:
    if left_kind == "placeholder" and right_kind == "placeholder":
        return False
    if left[-1].isspace() or right[0].isspace():
        return False
    if unicodedata.category(right[0]) in _NO_SPACE_BEFORE:
        return False
    if unicodedata.category(left[-1]) in _NO_SPACE_AFTER:
        return False
    return True


def _read_tsv(path: Union[str, Path]) -> List[Tuple[int, List[str]]]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            rows.append((line_no, line.split("\t")))
    return rows


def load_glossary(path: Union[str, Path]) -> Glossary:
    """
    Read a glossary file: source_term TAB target_term [TAB kind].

    Raises:
        GlossaryError: malformed line, unknown kind or duplicate term
    """
    entries = []
    for line_no, fields in _read_tsv(path):
        if len(fields) < 2:
            raise GlossaryError(f"{path}:{line_no}: expected source_term<TAB>target_term[<TAB>kind]")
        kind = fields[2].strip() if len(fields) > 2 and fields[2].strip() else EntityKind.OTHER.value
        try:
            entries.append(GlossaryEntry(
                source_term=fields[0], target_term=fields[1], kind=EntityKind(kind)
            ))
        except ValueError as e:
            raise GlossaryError(f"{path}:{line_no}: {e}") from e
    try:
        glossary = Glossary(entries=entries)
    except ValueError as e:
        raise GlossaryError(f"{path}: {e}") from e
    logger.info(f"Loaded glossary {path} with {len(glossary)} entries")
    return glossary


def load_phrase_table(path: Union[str, Path]) -> DictionaryBackend:
    """Read a phrase table (source phrase TAB target phrase) into a DictionaryBackend."""
    phrases: Dict[str, str] = {}
    for line_no, fields in _read_tsv(path):
        if len(fields) != 2 or not fields[0]:
            raise GlossaryError(f"{path}:{line_no}: expected source<TAB>target")
        phrases[fields[0]] = fields[1]
    logger.info(f"Loaded phrase table {path} with {len(phrases)} phrases")
    return DictionaryBackend(phrases)
