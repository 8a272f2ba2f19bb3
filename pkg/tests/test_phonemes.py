import unittest

import numpy as np
import pytest

from src.models.phoneme_model import (
    SIL,
    Lexicon,
    PhonemeSegment,
    PhonemeTimeline,
    segments_from_pairs,
    split_prosody,
)
from src.services.phoneme_service import (
    frame_count,
    load_lexicon,
    load_timeline,
    save_timeline,
    text_to_phonemes,
    timeline_to_frames,
)
from src.utils.exceptions import LexiconError


def _timeline(pairs, inventory=(SIL, "A", "B", "C")):
    return PhonemeTimeline(language="en", segments=segments_from_pairs(pairs), inventory=inventory)


class TestProsody(unittest.TestCase):
    def test_split_by_language(self):
        self.assertEqual(split_prosody("AO1", "en"), ("AO", "1"))
        self.assertEqual(split_prosody("ma3", "zh"), ("ma", "3"))
        self.assertEqual(split_prosody("ka_H", "ja"), ("ka", "H"))
        self.assertEqual(split_prosody("B", "en"), ("B", None))
        self.assertEqual(split_prosody("AO1", "fr"), ("AO1", None))

    def test_tag_kind_must_match_language(self):
        with self.assertRaises(ValueError):
            PhonemeTimeline(
                language="en",
                segments=[PhonemeSegment(phoneme="A", duration_s=0.1, prosody="H")],
                inventory=(SIL, "A"),
            )

    def test_inventory_starts_with_silence(self):
        with self.assertRaises(ValueError):
            PhonemeTimeline(language="en", inventory=("A", SIL))
        with self.assertRaises(ValueError):
            PhonemeTimeline(language="en", inventory=(SIL, "A", "A"))

    def test_duration_must_be_positive(self):
        with self.assertRaises(ValueError):
            PhonemeSegment(phoneme="A", duration_s=0.0)


class TestTextToPhonemes(unittest.TestCase):
    def setUp(self):
        self.lexicon = Lexicon(language="en", entries={"ball": ("B", "AO1", "L"), "kick": ("K", "IH1", "K")})

    def test_single_word(self):
        timeline = text_to_phonemes("ball", "en", self.lexicon, default_duration_s=0.1)
        self.assertEqual([s.phoneme for s in timeline.segments], ["B", "AO", "L"])
        self.assertEqual([s.duration_s for s in timeline.segments], [0.1, 0.1, 0.1])
        self.assertEqual(timeline.segments[1].prosody, "1")
        self.assertEqual(timeline.inventory, (SIL, "AO", "B", "IH", "K", "L"))

    def test_empty_text(self):
        timeline = text_to_phonemes("", "en", self.lexicon, default_duration_s=0.1)
        self.assertEqual(timeline.segments, [])
        self.assertEqual(timeline.total_duration, 0.0)

    def test_unknown_word_error_policy(self):
        with self.assertRaises(LexiconError) as ctx:
            text_to_phonemes("ball header", "en", self.lexicon, default_duration_s=0.1)
        self.assertEqual(ctx.exception.token, "header")

    def test_unknown_word_skip_policy(self):
        timeline = text_to_phonemes("Ball, header!", "en", self.lexicon, default_duration_s=0.1, policy="skip")
        self.assertEqual([s.phoneme for s in timeline.segments], ["B", "AO", "L"])

    def test_duration_table(self):
        timeline = text_to_phonemes("kick", "en", self.lexicon, default_duration_s=0.1, durations={"IH": 0.05})
        self.assertEqual([s.duration_s for s in timeline.segments], [0.1, 0.05, 0.1])

    def test_pause_at_internal_punctuation(self):
        timeline = text_to_phonemes("ball, kick.", "en", self.lexicon, default_duration_s=0.1, pause_duration_s=0.2)
        phonemes = [s.phoneme for s in timeline.segments]
        self.assertEqual(phonemes, ["B", "AO", "L", SIL, "K", "IH", "K"])
        self.assertEqual(timeline.segments[3].duration_s, 0.2)

    def test_prosody_in_symbols(self):
        timeline = text_to_phonemes("ball", "en", self.lexicon, default_duration_s=0.1, include_prosody=True)
        self.assertEqual([s.phoneme for s in timeline.segments], ["B", "AO1", "L"])
        self.assertIn("AO1", timeline.inventory)

    def test_case_insensitive(self):
        timeline = text_to_phonemes("BALL", "en", self.lexicon, default_duration_s=0.1)
        self.assertEqual(len(timeline.segments), 3)

    def test_bad_default_duration(self):
        with self.assertRaises(ValueError):
            text_to_phonemes("ball", "en", self.lexicon, default_duration_s=0.0)

    def test_unspaced_language_decomposition(self):
        lexicon = Lexicon(language="zh", entries={"进球": ("j", "in4", "q", "iu2"), "球": ("q", "iu2")})
        timeline = text_to_phonemes("进球球", "zh", lexicon, default_duration_s=0.1)
        self.assertEqual([s.phoneme for s in timeline.segments], ["j", "in", "q", "iu", "q", "iu"])
        self.assertEqual([s.prosody for s in timeline.segments], [None, "4", None, "2", None, "2"])

    def test_silence_reserved_in_lexicon(self):
        with self.assertRaises(ValueError):
            Lexicon(language="en", entries={"hush": ("SIL",)})


class TestTimelineToFrames(unittest.TestCase):
    def test_two_segments_at_25_fps(self):
        frames = timeline_to_frames(_timeline([("A", 0.2), ("B", 0.2)]), 25)
        self.assertEqual(frames, [1] * 5 + [2] * 5)

    def test_single_short_segment(self):
        self.assertEqual(timeline_to_frames(_timeline([("A", 0.04)]), 25), [1])

    def test_midpoint_rule_at_30_fps(self):
        frames = timeline_to_frames(_timeline([("A", 0.1), ("B", 0.1)]), 30)
        self.assertEqual(frames, [1, 1, 1, 2, 2, 2])

    def test_empty_timeline(self):
        self.assertEqual(timeline_to_frames(_timeline([]), 25), [])

    def test_zero_fps(self):
        with self.assertRaises(ValueError):
            timeline_to_frames(_timeline([("A", 0.1)]), 0)

    def test_four_tenths_second(self):
        frames = timeline_to_frames(_timeline([("A", 0.1)] * 4), 25)
        self.assertEqual(len(frames), 10)

    def test_frame_count_rounding(self):
        self.assertEqual(frame_count(0.4, 25), 10)
        self.assertEqual(frame_count(0.02, 25), 1)
        self.assertEqual(frame_count(0.019, 25), 0)


def test_frame_count_within_one_of_duration():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n = int(rng.integers(1, 12))
        pairs = [(("A", "B", "C")[int(rng.integers(3))], float(rng.uniform(0.005, 0.5))) for _ in range(n)]
        timeline = _timeline(pairs)
        fps = float(rng.choice([24.0, 25.0, 29.97, 30.0, 60.0]))
        frames = timeline_to_frames(timeline, fps)
        assert abs(len(frames) - timeline.total_duration * fps) <= 1
        assert all(0 <= f < len(timeline.inventory) for f in frames)


def test_framing_commutes_with_concatenation_on_frame_multiples():
    rng = np.random.default_rng(23)
    fps = 25.0
    for _ in range(100):
        def random_part():
            frames_per_segment = [int(rng.integers(1, 6)) for _ in range(int(rng.integers(1, 5)))]
            return _timeline([
                (("A", "B", "C")[int(rng.integers(3))], k / fps) for k in frames_per_segment
            ])

        first, second = random_part(), random_part()
        joined = timeline_to_frames(first.concat(second), fps)
        assert joined == timeline_to_frames(first, fps) + timeline_to_frames(second, fps)


def test_load_lexicon_fixture(data_dir):
    lexicon = load_lexicon(data_dir / "lexicon_en.tsv", "en")
    assert lexicon.pronunciation("Alavés") == ("AE2", "L", "AH0", "V", "EH1", "S")
    inventory = lexicon.inventory()
    assert inventory[0] == SIL
    assert list(inventory[1:]) == sorted(inventory[1:])


@pytest.mark.parametrize("content", ["ball\n", "ball\tB AO1 L\nball\tB AA1 L\n", "\tB\n"])
def test_bad_lexicon_files(tmp_path, content):
    path = tmp_path / "lexicon.tsv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(LexiconError):
        load_lexicon(path, "en")


def test_timeline_file_keeps_exact_durations(tmp_path):
    lexicon = Lexicon(language="en", entries={"ball": ("B", "AO1", "L")})
    timeline = text_to_phonemes("ball ball", "en", lexicon, default_duration_s=1 / 30)
    save_timeline(timeline, tmp_path / "timeline.tsv")
    assert load_timeline(tmp_path / "timeline.tsv") == timeline
