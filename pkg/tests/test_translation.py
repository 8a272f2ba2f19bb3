import unittest

import numpy as np
import pytest

from src.models.article_model import Article, Section, Sentence
from src.models.translation_model import EntityKind, Glossary, GlossaryEntry, MaskedText, PlaceholderFormat
from src.services.translation_service import (
    DictionaryBackend,
    IdentityBackend,
    load_glossary,
    mask_entities,
    translate_article,
    translate_masked,
    translate_text,
    unmask,
)
from src.utils.exceptions import GlossaryError, PlaceholderIntegrityError, UnknownPlaceholderError

TABLE_ONE = {
    "第23分钟，西班牙人迪达克打入一球。": "In the 23rd minute, Espanyol Didac scored a goal.",
    "第35分钟，阿拉维斯穆巴拉克吃到一张黄牌。": "In the 35th minute, Alavés Mubarak received a yellow card.",
}


def _glossary(*pairs):
    return Glossary(entries=[GlossaryEntry(source_term=s, target_term=t) for s, t in pairs])


class DroppingBackend:
    def translate(self, text, src, tgt):
        return text.replace(PlaceholderFormat().render(2), "", 1)


class DuplicatingBackend:
    def translate(self, text, src, tgt):
        return text + PlaceholderFormat().render(1)


class TestMaskEntities(unittest.TestCase):
    def setUp(self):
        self.glossary = _glossary(("西班牙人", "Espanyol"), ("迪达克", "Didac"), ("西班牙", "Spain"))

    def test_table_one_sentence(self):
        masked = mask_entities("第23分钟，西班牙人迪达克打入一球。", self.glossary)
        self.assertEqual(masked.text, "第23分钟，⟨NE1⟩⟨NE2⟩打入一球。")
        self.assertEqual(masked.mapping[1].target_term, "Espanyol")
        self.assertEqual(masked.mapping[2].target_term, "Didac")

    def test_longest_match_first(self):
        masked = mask_entities("西班牙人来自西班牙", self.glossary)
        self.assertEqual(masked.text, "⟨NE1⟩来自⟨NE2⟩")
        self.assertEqual(masked.mapping[2].target_term, "Spain")

    def test_repeated_term_reuses_id(self):
        masked = mask_entities("迪达克传球，迪达克射门", self.glossary)
        self.assertEqual(masked.text, "⟨NE1⟩传球，⟨NE1⟩射门")
        self.assertEqual(list(masked.mapping), [1])

    def test_no_entities(self):
        masked = mask_entities("比赛开始。", self.glossary)
        self.assertEqual(masked.text, "比赛开始。")
        self.assertEqual(masked.mapping, {})

    def test_empty_glossary(self):
        self.assertEqual(mask_entities("迪达克", Glossary()).text, "迪达克")

    def test_idempotent_on_own_output(self):
        masked = mask_entities("西班牙人迪达克打入一球", self.glossary)
        self.assertEqual(mask_entities(masked, self.glossary), masked)

    def test_raw_text_with_placeholder_rejected(self):
        with self.assertRaises(GlossaryError):
            mask_entities("⟨NE1⟩ scored", self.glossary)

    def test_custom_placeholder_format(self):
        fmt = PlaceholderFormat(prefix="__E", suffix="__")
        masked = mask_entities("迪达克", self.glossary, fmt)
        self.assertEqual(masked.text, "__E1__")
        self.assertEqual(unmask(masked.text, masked.mapping, placeholder_format=fmt), "Didac")

    def test_masked_text_validates_numbering(self):
        entry = GlossaryEntry(source_term="迪达克", target_term="Didac")
        with self.assertRaises(ValueError):
            MaskedText(text="⟨NE2⟩", mapping={2: entry})
        with self.assertRaises(ValueError):
            MaskedText(text="no placeholder", mapping={1: entry})


class TestUnmask(unittest.TestCase):
    def setUp(self):
        self.mapping = {
            1: GlossaryEntry(source_term="西班牙人", target_term="Espanyol", kind=EntityKind.TEAM),
            2: GlossaryEntry(source_term="迪达克", target_term="Didac", kind=EntityKind.PLAYER),
        }

    def test_adjacent_entities_in_english(self):
        self.assertEqual(
            unmask("⟨NE1⟩⟨NE2⟩ scored a goal", self.mapping, entity_separator=" "),
            "Espanyol Didac scored a goal",
        )

    def test_adjacent_entities_unspaced(self):
        self.assertEqual(unmask("⟨NE1⟩⟨NE2⟩", self.mapping), "EspanyolDidac")

    def test_text_without_placeholders(self):
        self.assertEqual(unmask("Full time.", self.mapping), "Full time.")

    def test_unknown_placeholder(self):
        with self.assertRaises(UnknownPlaceholderError):
            unmask("⟨NE9⟩", self.mapping)


class TestTranslateMasked(unittest.TestCase):
    def setUp(self):
        self.masked = mask_entities("西班牙人迪达克打入一球", _glossary(("西班牙人", "Espanyol"), ("迪达克", "Didac")))

    def test_identity_backend(self):
        self.assertEqual(translate_masked(self.masked, IdentityBackend(), "zh", "zh"), self.masked.text)

    def test_dropped_placeholder(self):
        with self.assertRaises(PlaceholderIntegrityError) as ctx:
            translate_masked(self.masked, DroppingBackend(), "zh", "en")
        self.assertEqual(ctx.exception.missing, [2])
        self.assertEqual(ctx.exception.extra, [])

    def test_duplicated_placeholder(self):
        with self.assertRaises(PlaceholderIntegrityError) as ctx:
            translate_masked(self.masked, DuplicatingBackend(), "zh", "en")
        self.assertEqual(ctx.exception.extra, [1])


def test_identity_round_trip_over_generated_sentences():
    rng = np.random.default_rng(99)
    entries = [
        GlossaryEntry(source_term=f"球员{i:02d}号", target_term=f"Player{i:02d}", kind=EntityKind.PLAYER)
        for i in range(50)
    ]
    glossary = Glossary(entries=entries)
    filler = ["踢", "传球", "射门", "，", "。", " ", "abc", "23'"]
    for _ in range(200):
        pieces, expected = [], []
        for _ in range(int(rng.integers(1, 12))):
            if rng.random() < 0.4:
                entry = entries[int(rng.integers(len(entries)))]
                pieces.append(entry.source_term)
                expected.append(entry.target_term)
            else:
                word = filler[int(rng.integers(len(filler)))]
                pieces.append(word)
                expected.append(word)
        text = "".join(pieces)
        masked = mask_entities(text, glossary)
        assert len(PlaceholderFormat().find_ids(masked.text)) == sum(p.startswith("球员") for p in pieces)
        assert translate_text(text, glossary, IdentityBackend(), "zh", "zh") == "".join(expected)


def test_dictionary_backend_table_one(glossary, phrase_backend):
    for source, target in TABLE_ONE.items():
        assert translate_text(source, glossary, phrase_backend, "zh", "en") == target


def test_dictionary_backend_postmatch(glossary, phrase_backend):
    source = "全场比赛结束，西班牙人战胜阿拉维斯，比分1-0。"
    assert translate_text(source, glossary, phrase_backend, "zh", "en") == \
        "Full time: Espanyol beat Alavés, final score 1-0."


def test_dictionary_backend_keeps_placeholders_whole():
    backend = DictionaryBackend({"NE": "entity", "打入一球": "scored a goal"})
    assert backend.translate("⟨NE1⟩打入一球", "zh", "en") == "⟨NE1⟩ scored a goal"
    assert backend.segment("⟨NE12⟩")[0] == ("placeholder", "⟨NE12⟩")


def test_dictionary_backend_unspaced_target():
    backend = DictionaryBackend({"scored": "打入", "a goal": "一球"})
    assert backend.translate("⟨NE1⟩ scored a goal", "en", "zh") == "⟨NE1⟩ 打入 一球"
    assert backend.translate("⟨NE1⟩scored", "en", "zh") == "⟨NE1⟩打入"


def test_translate_article_keeps_structure(glossary, phrase_backend):
    article = Article.from_sentences([
        Sentence(text=source, section=Section.IN_MATCH, source_event_index=i)
        for i, source in enumerate(TABLE_ONE)
    ])
    translated = translate_article(article, glossary, phrase_backend, "zh", "en")
    assert translated.texts == list(TABLE_ONE.values())
    assert [s.source_event_index for s in translated.sentences] == [0, 1]


def test_load_glossary_fixture(glossary):
    assert len(glossary) == 4
    assert glossary.lookup("阿拉维斯").target_term == "Alavés"
    assert glossary.lookup("阿拉维斯").kind is EntityKind.TEAM


@pytest.mark.parametrize("content", [
    "西班牙人\tEspanyol\tClub\n",
    "西班牙人\n",
    "西班牙人\tEspanyol\tTeam\n西班牙人\tEspanyol FC\tTeam\n",
    "\tEspanyol\tTeam\n",
])
def test_bad_glossary_files(tmp_path, content):
    path = tmp_path / "glossary.tsv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(GlossaryError):
        load_glossary(path)
