import csv
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from src.config import settings
from src.dsl.bank import TemplateBank, select_template
from src.dsl.interpreter import RenderContext, render
from src.dsl.nodes import Scalar
from src.models.article_model import Article, Section, Sentence
from src.models.event_model import EventCategory, EventRecord, MatchFacts
from src.utils.exceptions import TemplateLookupError
from src.utils.logger import setup_logger
from src.utils.rng import RandomStream

logger = setup_logger(__name__)

PREMATCH_KEY = "prematch"
PREMATCH_FALLBACK_KEY = "prematch_first"
POSTMATCH_KEY = "postmatch"
POSTMATCH_OUTLOOK_KEY = "postmatch_outlook"
OTHER_KEY = "other"


def _render_from_bank(
    bank: TemplateBank, key: str, bindings: Dict[str, Scalar], stream: RandomStream
) -> Tuple[str, RandomStream]:
    program, stream = select_template(bank, key, stream)
    return render(program, RenderContext(bindings, stream.state)), stream


def _team_bindings(facts: MatchFacts) -> Dict[str, Scalar]:
    return {"home": facts.home_team, "away": facts.away_team}


def generate_prematch(
    facts: MatchFacts,
    bank: TemplateBank,
    rng: RandomStream,
    max_records: Optional[int] = None,
) -> List[Sentence]:
    """
    Render the pre-match section from the head-to-head history.

    One sentence per history record (capped by max_records); with no history
    the ``prematch_first`` template is used when the bank has one.
    """
    max_records = settings.PREMATCH_MAX_RECORDS if max_records is None else max_records
    sentences: List[Sentence] = []

    if not facts.history:
        if PREMATCH_FALLBACK_KEY not in bank:
            return sentences
        text, _ = _render_from_bank(bank, PREMATCH_FALLBACK_KEY, _team_bindings(facts), rng)
        return [Sentence(text=text, section=Section.PRE_MATCH)]

    if PREMATCH_KEY not in bank:
        raise TemplateLookupError(PREMATCH_KEY)
    for record in facts.history[:max_records]:
        bindings = _team_bindings(facts)
        bindings.update({
            "record.home": record.home_team,
            "record.away": record.away_team,
            "record.home_goals": record.home_goals,
            "record.away_goals": record.away_goals,
            "record.score": record.score,
            "record.date": record.date,
            "record.is_draw": record.home_goals == record.away_goals,
            "history.count": len(facts.history),
        })
        text, rng = _render_from_bank(bank, PREMATCH_KEY, bindings, rng)
        sentences.append(Sentence(text=text, section=Section.PRE_MATCH))
    return sentences


def _inmatch_key(event: EventRecord, bank: TemplateBank) -> str:
    key = event.category.bank_key
    if key in bank:
        return key
    if event.category is EventCategory.OTHER or OTHER_KEY in bank:
        return OTHER_KEY
    return key


def generate_inmatch(
    events: Sequence[EventRecord],
    bank: TemplateBank,
    rng: RandomStream,
    categories: Optional[Iterable[Union[str, EventCategory]]] = None,
    home: Optional[str] = None,
) -> List[Sentence]:
    """
    Describe the important match events, one sentence per event in time order.

    Args:
        events: Match events in input order
        bank: Template bank with a key per category (Other uses "other")
        rng: Random stream for template selection
        categories: Categories to describe; None describes every event
        home: Home team name, used for the running score bindings

    Returns:
        Sentences linked to their event index, sorted by minute (stable)
    """
    wanted = None
    if categories is not None:
        wanted = {EventCategory(c) for c in categories}

    ordered = sorted(enumerate(events), key=lambda pair: pair[1].time_minute)
    running = {"home": 0, "away": 0}
    sentences: List[Sentence] = []
    for index, event in ordered:
        if event.category is EventCategory.SCORE:
            side = "home" if home is None or event.team == home else "away"
            running[side] += 1
        if wanted is not None and event.category not in wanted:
            continue

        bindings: Dict[str, Scalar] = {
            "minute": event.time_minute,
            "team": event.team,
            "player": event.player,
            "category": event.category_label,
            "running.home_goals": running["home"],
            "running.away_goals": running["away"],
            "running.score": f"{running['home']}-{running['away']}",
        }
        for key, value in event.attributes.items():
            bindings[f"attr.{key}"] = value

        text, rng = _render_from_bank(bank, _inmatch_key(event, bank), bindings, rng)
        sentences.append(Sentence(text=text, section=Section.IN_MATCH, source_event_index=index))
    return sentences


def postmatch_bindings(facts: MatchFacts, blowout_threshold: int) -> Dict[str, Scalar]:
    bindings = _team_bindings(facts)
    bindings.update({
        "home_goals": facts.home_goals,
        "away_goals": facts.away_goals,
        "score": f"{facts.home_goals}-{facts.away_goals}",
        "score_diff": facts.score_diff,
        "total_goals": facts.home_goals + facts.away_goals,
        "is_draw": facts.is_draw,
        "blowout": facts.score_diff >= blowout_threshold,
        "blowout_threshold": blowout_threshold,
    })
    if not facts.is_draw:
        bindings.update({
            "winner": facts.winning_team,
            "loser": facts.losing_team,
            "winning_score": facts.winning_score,
        })
    return bindings


def generate_postmatch(
    facts: MatchFacts,
    bank: TemplateBank,
    rng: RandomStream,
    blowout_threshold: Optional[int] = None,
) -> List[Sentence]:
    """
    Summarize the result, plus an outlook sentence when the bank has one.

    The ``blowout`` binding is true when score_diff >= blowout_threshold.
    """
    threshold = settings.BLOWOUT_THRESHOLD if blowout_threshold is None else blowout_threshold
    bindings = postmatch_bindings(facts, threshold)

    text, rng = _render_from_bank(bank, POSTMATCH_KEY, bindings, rng)
    sentences = [Sentence(text=text, section=Section.POST_MATCH)]
    if POSTMATCH_OUTLOOK_KEY in bank:
        text, rng = _render_from_bank(bank, POSTMATCH_OUTLOOK_KEY, bindings, rng)
        sentences.append(Sentence(text=text, section=Section.POST_MATCH))
    return sentences


def assemble_article(
    pre: Sequence[Sentence], inmatch: Sequence[Sentence], post: Sequence[Sentence]
) -> Article:
    return Article.from_sentences([*pre, *inmatch, *post])


def generate_article(
    events: Sequence[EventRecord],
    facts: MatchFacts,
    bank: TemplateBank,
    seed: int,
    blowout_threshold: Optional[int] = None,
    categories: Optional[Iterable[Union[str, EventCategory]]] = None,
) -> Article:
    """
    Run the three sentence-generation strategies and assemble the article.

    Each section draws from its own sub-stream of the seed.
    """
    root = RandomStream.from_seed(seed)
    if categories is None:
        categories = settings.INMATCH_CATEGORIES
    article = assemble_article(
        generate_prematch(facts, bank, root.derive("prematch")),
        generate_inmatch(events, bank, root.derive("inmatch"), categories, home=facts.home_team),
        generate_postmatch(facts, bank, root.derive("postmatch"), blowout_threshold),
    )
    article.check_event_links(len(events))
    logger.info(f"Generated article with {len(article.sentences)} sentences")
    return article


ARTICLE_HEADER = ["section", "event_index", "text"]


def save_article(article: Article, path: Union[str, Path]) -> None:
    """Write one tab-separated record per sentence: section, event index, text."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(ARTICLE_HEADER)
        for sentence in article.sentences:
            index = "" if sentence.source_event_index is None else sentence.source_event_index
            writer.writerow([sentence.section.value, index, sentence.text])


def load_article(path: Union[str, Path]) -> Article:
    sentences = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t")
        for row in reader:
            if not row or row == ARTICLE_HEADER:
                continue
            section, index, text = row
            sentences.append(Sentence(
                text=text,
                section=Section(section),
                source_event_index=int(index) if index else None,
            ))
    return Article.from_sentences(sentences)
