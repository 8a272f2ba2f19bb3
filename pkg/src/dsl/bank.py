"""
Template banks: keyed lists of templates and seeded selection among them.

Bank file format (UTF-8)::

    [score]
    第{minute}分钟，{team}{player}打入一球。
    ---
    {team}{player}在第{minute}分钟破门。

    [yellow_card]
    ...

A ``[key]`` line opens a section; a line holding only ``---`` ends a
template. Blank lines around a template are dropped.
"""
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

from src.dsl.nodes import TemplateProgram
from src.dsl.parser import parse_template
from src.utils.exceptions import TemplateLookupError, TemplateSyntaxError
from src.utils.logger import setup_logger
from src.utils.rng import RandomStream

logger = setup_logger(__name__)

_SECTION = re.compile(r"^\[([^\[\]]+)\]\s*$")
_SEPARATOR = "---"


@dataclass(frozen=True)
class TemplateBank:
    entries: Mapping[str, Tuple[TemplateProgram, ...]]

    def __post_init__(self):
        for key, templates in self.entries.items():
            if not templates:
                raise ValueError(f"template bank key '{key}' has no templates")

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def keys(self) -> List[str]:
        return list(self.entries)


def parse_bank(text: str, source_name: str = "<bank>") -> TemplateBank:
    """Parse bank-file text into a TemplateBank."""
    entries: Dict[str, List[TemplateProgram]] = {}
    key = None
    lines: List[str] = []

    def finish_template():
        nonlocal lines
        # Drop surrounding blank lines, keep inner ones
        while lines and not lines[0][1].strip():
            lines.pop(0)
        while lines and not lines[-1][1].strip():
            lines.pop()
        if lines:
            first_line = lines[0][0]
            name = f"{source_name}[{key}]#{len(entries[key]) + 1}"
            source = "\n".join(line for _, line in lines)
            try:
                entries[key].append(parse_template(source, name))
            except TemplateSyntaxError as e:
                # Report the position within the bank file
                raise TemplateSyntaxError(
                    e.message, e.line + first_line - 1, e.column, source_name
                ) from e
        lines = []

    for line_no, line in enumerate(text.splitlines(), start=1):
        section = _SECTION.match(line)
        if section:
            if key is not None:
                finish_template()
            key = section.group(1).strip()
            entries.setdefault(key, [])
            continue
        if key is None:
            if line.strip():
                raise TemplateSyntaxError("text before the first [section]", line_no, 1, source_name)
            continue
        if line.strip() == _SEPARATOR:
            finish_template()
            continue
        lines.append((line_no, line))
    if key is not None:
        finish_template()

    empty = [k for k, templates in entries.items() if not templates]
    if empty:
        raise TemplateSyntaxError(f"section [{empty[0]}] has no templates", 1, 1, source_name)
    return TemplateBank({k: tuple(v) for k, v in entries.items()})


def load_bank(path: Union[str, Path]) -> TemplateBank:
    with open(path, encoding="utf-8") as handle:
        bank = parse_bank(handle.read(), str(path))
    logger.info(f"Loaded template bank {path} with keys {bank.keys()}")
    return bank


def select_template(
    bank: TemplateBank, key: str, stream: RandomStream
) -> Tuple[TemplateProgram, RandomStream]:
    """
    Pick one template for a key, uniformly, from a seeded stream.

    Args:
        bank: Template bank
        key: Event category or strategy key
        stream: Random stream value

    Returns:
        The chosen template and the advanced stream
    """
    if key not in bank.entries:
        raise TemplateLookupError(key)
    templates = bank.entries[key]
    index, stream = stream.choice_index(len(templates))
    logger.debug(f"Selected template {index + 1}/{len(templates)} for '{key}'")
    return templates[index], stream
