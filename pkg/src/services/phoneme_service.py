import re
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from src.config import settings
from src.models.phoneme_model import (
    SIL,
    Lexicon,
    PhonemeSegment,
    PhonemeTimeline,
    UnknownTokenPolicy,
    split_prosody,
)
from src.utils.exceptions import LexiconError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

# Words (with an optional apostrophe part) or single punctuation marks
_TOKEN = re.compile(r"(\w+(?:['’]\w+)?)|([^\w\s])")


def load_lexicon(path: Union[str, Path], language: str) -> Lexicon:
    """
    Read a pronunciation lexicon: word TAB space-separated phonemes.

    Raises:
        LexiconError: malformed line or duplicate word
    """
    entries: Dict[str, Tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0].strip() or not fields[1].split():
                raise LexiconError(f"{path}:{line_no}: expected word<TAB>phonemes")
            word = fields[0].strip().casefold()
            if word in entries:
                raise LexiconError(f"{path}:{line_no}: duplicate word {word!r}", token=word)
            entries[word] = tuple(fields[1].split())
    try:
        lexicon = Lexicon(language=language, entries=entries)
    except ValueError as e:
        raise LexiconError(f"{path}: {e}") from e
    logger.info(f"Loaded {language} lexicon {path} with {len(entries)} words")
    return lexicon


def _decompose(token: str, lexicon: Lexicon) -> List[Tuple[str, Optional[Tuple[str, ...]]]]:
    """
    Greedy longest-match split of an unspaced run (Chinese, Japanese) into lexicon
    words. Uncovered characters come back with a None pronunciation.
    """
    pieces = []
    i = 0
    longest = lexicon.max_word_length
    while i < len(token):
        for j in range(min(len(token), i + longest), i, -1):
            pronunciation = lexicon.pronunciation(token[i:j])
            if pronunciation is not None:
                pieces.append((token[i:j], pronunciation))
                i = j
                break
        else:
            pieces.append((token[i], None))
            i += 1
    return pieces


def text_to_phonemes(
    text: str,
    language: str,
    lexicon: Lexicon,
    default_duration_s: Optional[float] = None,
    policy: Union[str, UnknownTokenPolicy] = UnknownTokenPolicy.ERROR,
    durations: Optional[Mapping[str, float]] = None,
    pause_duration_s: float = 0.0,
    include_prosody: bool = False,
) -> PhonemeTimeline:
    """
    Convert text to a phoneme timeline using a lexicon.

    Args:
        text: Text to pronounce
        language: Language tag, selects the prosody rule
        lexicon: Pronunciation lexicon for the language
        default_duration_s: Duration of phonemes missing from ``durations``
        policy: What to do with tokens the lexicon cannot cover
        durations: Optional per-phoneme duration table (base symbols)
        pause_duration_s: SIL inserted at sentence-internal punctuation when > 0
        include_prosody: Keep prosody in the phoneme symbol (expanded inventory)

    Returns:
        PhonemeTimeline over the lexicon's inventory

    Raises:
        LexiconError: a token is not covered and the policy is ``error``
    """
    default_duration_s = settings.DEFAULT_PHONEME_DURATION_S if default_duration_s is None else default_duration_s
    if default_duration_s <= 0:
        raise ValueError("default_duration_s must be > 0")
    policy = UnknownTokenPolicy(policy)
    durations = durations or {}
    inventory = lexicon.inventory(include_prosody)

    segments: List[PhonemeSegment] = []
    pending_pause = False
    for match in _TOKEN.finditer(text):
        word, punct = match.groups()
        if punct is not None:
            pending_pause = bool(segments)
            continue

        pronunciation = lexicon.pronunciation(word)
        if pronunciation is not None or language in settings.SPACED_LANGUAGES:
            pieces = [(word, pronunciation)]
        else:
            pieces = _decompose(word, lexicon)
        for piece, symbols in pieces:
            if symbols is None:
                if policy is UnknownTokenPolicy.ERROR:
                    raise LexiconError(f"no pronunciation for {piece!r} in {word!r}", token=word)
                logger.warning(f"Skipping {piece!r} in {word!r}: not in the {language} lexicon")
                continue
            if pending_pause and pause_duration_s > 0:
                segments.append(PhonemeSegment(phoneme=SIL, duration_s=pause_duration_s))
            pending_pause = False
            for symbol in symbols:
                base, prosody = split_prosody(symbol, language)
                segments.append(PhonemeSegment(
                    phoneme=symbol if include_prosody else base,
                    duration_s=durations.get(base, default_duration_s),
                    prosody=prosody,
                ))

    logger.debug(f"Phonemized {len(segments)} segments")
    return PhonemeTimeline(language=language, segments=segments, inventory=inventory)


def frame_count(total_duration_s: float, fps: float) -> int:
    """round(duration x fps), with halves rounded up."""
    return int(np.floor(total_duration_s * fps + 0.5))


def timeline_to_frames(timeline: PhonemeTimeline, fps: float) -> List[int]:
    """
    One inventory index per video frame.

    Frame t shows the segment containing its midpoint (t + 0.5) / fps;
    segments are half-open [start, end).
    """
    if fps <= 0:
        raise ValueError(f"fps must be > 0, got {fps}")
    if not timeline.segments:
        return []
    ends = np.cumsum([s.duration_s for s in timeline.segments])
    n_frames = frame_count(float(ends[-1]), fps)
    midpoints = (np.arange(n_frames) + 0.5) / fps
    positions = np.minimum(np.searchsorted(ends, midpoints, side="right"), len(ends) - 1)
    index = {symbol: i for i, symbol in enumerate(timeline.inventory)}
    ids = [index[s.phoneme] for s in timeline.segments]
    return [ids[p] for p in positions]


def save_timeline(timeline: PhonemeTimeline, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"#language\t{timeline.language}\n")
        handle.write(f"#inventory\t{' '.join(timeline.inventory)}\n")
        for segment in timeline.segments:
            handle.write(f"{segment.phoneme}\t{segment.duration_s!r}\t{segment.prosody or ''}\n")


def load_timeline(path: Union[str, Path]) -> PhonemeTimeline:
    language, inventory = None, None
    segments: List[PhonemeSegment] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if fields[0] == "#language":
                language = fields[1]
            elif fields[0] == "#inventory":
                inventory = tuple(fields[1].split())
            else:
                if len(fields) < 2:
                    raise LexiconError(f"{path}:{line_no}: expected phoneme<TAB>duration[<TAB>prosody]")
                prosody = fields[2] if len(fields) > 2 and fields[2] else None
                segments.append(PhonemeSegment(
                    phoneme=fields[0], duration_s=float(fields[1]), prosody=prosody
                ))
    if language is None or inventory is None:
        raise LexiconError(f"{path}: missing #language or #inventory header")
    return PhonemeTimeline(language=language, segments=segments, inventory=inventory)
