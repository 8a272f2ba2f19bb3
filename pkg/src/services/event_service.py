import csv
import io
import re
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

from pydantic import ValidationError

from src.models.event_model import (
    EventCategory,
    EventRecord,
    HistoryRecord,
    MatchFacts,
    lookup_category,
)
from src.utils.exceptions import EventParseError, EventValidationError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

_TIME_PATTERN = re.compile(r"^\s*(\d+)\s*['’]?\s*$")
_HEADER_FIELDS = ("time", "category", "player", "team")


def _split_row(row: Union[str, Sequence[str]]) -> List[str]:
    if isinstance(row, str):
        return next(csv.reader([row]), [])
    return list(row)


def _parse_attributes(raw: str, row_index: int) -> Dict[str, str]:
    attributes: Dict[str, str] = {}
    for pair in raw.split(";"):
        if not pair.strip():
            continue
        if "=" not in pair:
            raise EventParseError(row_index, f"attribute {pair!r} is not key=value")
        key, value = pair.split("=", 1)
        attributes[key.strip()] = value.strip()
    return attributes


def _format_attributes(attributes: Dict[str, str]) -> str:
    return ";".join(f"{key}={value}" for key, value in attributes.items())


def _is_header(fields: List[str]) -> bool:
    return tuple(f.strip().lower() for f in fields[:4]) == _HEADER_FIELDS


def parse_events(raw_rows: Iterable[Union[str, Sequence[str]]]) -> List[EventRecord]:
    """
    Parse delimited event rows into EventRecords, preserving order.

    Args:
        raw_rows: Comma-separated rows (or pre-split field lists) with columns
            time, category, player, team and optional attributes. A leading
            header row is skipped.

    Attribute keys and values are trimmed of surrounding whitespace, so a row
    with padded attributes serializes back in canonical form rather than byte
    for byte. Records survive serialize_events followed by parse_events unchanged.

    Returns:
        One EventRecord per data row
    """
    events: List[EventRecord] = []
    for index, row in enumerate(raw_rows):
        fields = _split_row(row)
        if index == 0 and _is_header(fields):
            continue
        if not any(f.strip() for f in fields):
            continue
        if len(fields) < 4:
            raise EventParseError(index, f"expected at least 4 fields, got {len(fields)}")

        match = _TIME_PATTERN.match(fields[0])
        if not match:
            raise EventParseError(index, f"malformed time field {fields[0]!r}")

        raw_category = fields[1].strip()
        category = lookup_category(raw_category)
        other_tag = None
        if category is None:
            category = EventCategory.OTHER
            other_tag = raw_category

        if not fields[2].strip() or not fields[3].strip():
            raise EventValidationError("player and team must be non-empty", row_index=index)

        attributes = _parse_attributes(fields[4], index) if len(fields) > 4 else {}
        try:
            events.append(EventRecord(
                time_minute=int(match.group(1)),
                category=category,
                player=fields[2],
                team=fields[3],
                attributes=attributes,
                other_tag=other_tag,
            ))
        except ValidationError as e:
            raise EventValidationError(str(e), row_index=index) from e
    return events


def serialize_events(events: Iterable[EventRecord]) -> List[str]:
    """Render EventRecords back into comma-separated rows accepted by parse_events."""
    rows = []
    for event in events:
        buffer = io.StringIO()
        fields = [f"{event.time_minute}'", event.category_label, event.player, event.team]
        if event.attributes:
            fields.append(_format_attributes(event.attributes))
        csv.writer(buffer, lineterminator="").writerow(fields)
        rows.append(buffer.getvalue())
    return rows


def load_events(path: Union[str, Path]) -> List[EventRecord]:
    """Read an event file (UTF-8, optional header)."""
    with open(path, encoding="utf-8", newline="") as handle:
        events = parse_events(list(csv.reader(handle)))
    logger.info(f"Loaded {len(events)} events from {path}")
    return events


def save_events(events: Iterable[EventRecord], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("time,category,player,team,attributes\n")
        for row in serialize_events(events):
            handle.write(row + "\n")


def load_history(path: Union[str, Path]) -> List[HistoryRecord]:
    """Read head-to-head history rows: date,home,away,home_goals,away_goals."""
    records: List[HistoryRecord] = []
    with open(path, encoding="utf-8", newline="") as handle:
        for index, fields in enumerate(csv.reader(handle)):
            if not fields or not any(f.strip() for f in fields):
                continue
            if index == 0 and fields[0].strip().lower() == "date":
                continue
            if len(fields) < 5:
                raise EventParseError(index, "history rows need date,home,away,home_goals,away_goals")
            try:
                records.append(HistoryRecord(
                    date=fields[0].strip(),
                    home_team=fields[1].strip(),
                    away_team=fields[2].strip(),
                    home_goals=int(fields[3]),
                    away_goals=int(fields[4]),
                ))
            except (ValueError, ValidationError) as e:
                raise EventParseError(index, f"invalid history row: {e}") from e
    return records


def normalize_facts(
    events: Sequence[EventRecord],
    home: str,
    away: str,
    history: Sequence[HistoryRecord] = (),
) -> MatchFacts:
    """
    Derive the match key-value facts (score, winner, loser, winning score).

    Args:
        events: Match events
        home: Home team name
        away: Away team name
        history: Prior head-to-head results, passed through unchanged

    Returns:
        MatchFacts with goals counted from Score events only
    """
    home, away = home.strip(), away.strip()
    if not home or not away:
        raise EventValidationError("home and away team must be non-empty")
    if home == away:
        raise EventValidationError(f"home and away team are both {home!r}")

    goals = {home: 0, away: 0}
    for event in events:
        if event.team not in goals:
            raise EventValidationError(f"event references unknown team {event.team!r}", team=event.team)
        if event.category is EventCategory.SCORE:
            goals[event.team] += 1

    home_goals, away_goals = goals[home], goals[away]
    winner = loser = winning_score = None
    if home_goals != away_goals:
        winner, loser = (home, away) if home_goals > away_goals else (away, home)
        winning_score = f"{home_goals}-{away_goals}"

    return MatchFacts(
        home_team=home,
        away_team=away,
        home_goals=home_goals,
        away_goals=away_goals,
        winning_team=winner,
        losing_team=loser,
        winning_score=winning_score,
        score_diff=abs(home_goals - away_goals),
        history=list(history),
    )
