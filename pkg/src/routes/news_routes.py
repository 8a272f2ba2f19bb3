from typing import Dict, List, Literal, Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from src.config import settings
from src.dsl.bank import load_bank, parse_bank
from src.models.article_model import Article
from src.models.event_model import HistoryRecord
from src.models.translation_model import Glossary, GlossaryEntry
from src.services.event_service import normalize_facts, parse_events
from src.services.news_service import generate_article
from src.services.summarization_service import (
    HeuristicScorer,
    ImportanceTable,
    SelectionRule,
    label_sentences,
    soccer_labels,
    split_sentences,
    summarize_labeled,
    summarize_soccer,
)
from src.services.translation_service import (
    DictionaryBackend,
    IdentityBackend,
    entity_separator_for,
    load_glossary,
    load_phrase_table,
    mask_entities,
    translate_masked,
    unmask,
)
from src.utils.logger import setup_logger

router = APIRouter()
logger = setup_logger(__name__)


class GenerateRequest(BaseModel):
    events: List[str] = Field(..., description="Event rows: time,category,player,team[,attributes]")
    home: str = Field(..., min_length=1)
    away: str = Field(..., min_length=1)
    seed: int = Field(..., ge=0)
    history: List[HistoryRecord] = Field(default_factory=list)
    templates: Optional[str] = Field(None, description="Template bank text; the default bank when omitted")
    blowout_threshold: Optional[int] = Field(None, ge=1)


class SummarizeRequest(BaseModel):
    article: Article
    events: List[str] = Field(default_factory=list)
    mode: Literal["soccer", "labels"] = "soccer"
    budget: int = Field(settings.SUMMARY_BUDGET, ge=1)
    top_k: int = Field(settings.SUMMARY_TOP_K, ge=1)
    importance: Dict[str, float] = Field(default_factory=dict)
    reference: str = ""


class TranslateRequest(BaseModel):
    text: str
    src: str = "zh"
    tgt: str = "en"
    glossary: Optional[List[GlossaryEntry]] = Field(None, description="Default glossary when omitted")
    phrases: Optional[Dict[str, str]] = Field(None, description="Phrase table; the default one when omitted")
    identity: bool = Field(False, description="Use the identity backend")


@router.post("/generate", response_model=Dict)
async def generate(request: GenerateRequest):
    """
    Generate a match report from event rows.
    """
    events = parse_events(request.events)
    facts = normalize_facts(events, request.home, request.away, request.history)
    bank = parse_bank(request.templates, "<request>") if request.templates else load_bank(settings.DEFAULT_TEMPLATE_BANK)
    article = generate_article(events, facts, bank, request.seed, request.blowout_threshold)
    return {"article": article.model_dump(), "facts": facts.model_dump()}


@router.post("/summarize", response_model=Dict)
async def summarize(request: SummarizeRequest):
    """
    Extractive summary of a generated article, with per-sentence labels.
    """
    if request.mode == "soccer":
        events = parse_events(request.events)
        table = ImportanceTable().with_overrides(request.importance)
        summary = summarize_soccer(events, request.article, table, request.budget)
        labels = soccer_labels(events, request.article, table, request.budget)
    else:
        sentences = split_sentences(request.article)
        labels = label_sentences(sentences, HeuristicScorer(request.reference), SelectionRule(top_k=request.top_k))
        summary = summarize_labeled(request.article, labels)
    return {"summary": summary.model_dump(), "labels": labels.model_dump()}


@router.post("/translate", response_model=Dict)
async def translate(request: TranslateRequest):
    """
    Translate text with glossary entities protected by placeholders.
    """
    glossary = Glossary(entries=request.glossary) if request.glossary is not None \
        else load_glossary(settings.DEFAULT_GLOSSARY)
    if request.identity:
        backend = IdentityBackend()
    elif request.phrases is not None:
        backend = DictionaryBackend(request.phrases)
    else:
        backend = load_phrase_table(settings.DEFAULT_PHRASE_TABLE)

    masked = mask_entities(request.text, glossary)
    translated = translate_masked(masked, backend, request.src, request.tgt)
    result = unmask(translated, masked.mapping, entity_separator_for(request.tgt), masked.placeholder_format)
    logger.info(f"Translated {len(request.text)} characters with {len(masked.mapping)} protected entities")
    return {
        "translation": result,
        "masked": masked.text,
        "entities": {str(pid): entry.model_dump() for pid, entry in masked.mapping.items()},
    }
