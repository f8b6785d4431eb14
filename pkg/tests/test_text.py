import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textsiege.errors import OriginalMismatch, PositionOutOfRange
from textsiege.text import (
    Action,
    Perturbation,
    TokenizedText,
    apply_all,
    apply_perturbation,
    compact_edits,
    detokenize,
    invert_perturbation,
    tokenize,
)


def toks(*words: str) -> TokenizedText:
    return TokenizedText(tuple(words), tuple(any(c.isalnum() for c in w) for w in words))


class TestTokenize:
    def test_sentence_with_trailing_period(self):
        t = tokenize("I like the cat.")
        assert t.tokens == ("I", "like", "the", "cat", ".")
        assert t.is_word == (True, True, True, True, False)

    def test_empty(self):
        assert tokenize("").tokens == ()

    def test_internal_apostrophe_kept(self):
        assert tokenize("don't stop").tokens == ("don't", "stop")

    def test_leading_and_trailing_punctuation(self):
        t = tokenize('"(quoted)," he said...')
        assert t.tokens == ('"', "(", "quoted", ")", ",", '"', "he", "said", ".", ".", ".")

    def test_case_preserved(self):
        assert tokenize("Good GOOD good").tokens == ("Good", "GOOD", "good")

    def test_html_artifacts_survive(self):
        t = tokenize("<p> fine film <p>")
        assert "<" in t.tokens and ">" in t.tokens and "p" in t.tokens

    def test_numbers_with_internal_dot(self):
        assert tokenize("rated 3.5 stars").tokens == ("rated", "3.5", "stars")

    def test_deterministic(self):
        s = "Some text, with (many) marks!"
        assert tokenize(s) == tokenize(s)

    @given(st.text(max_size=80))
    @settings(max_examples=200)
    def test_tokens_nonempty_and_whitespace_free(self, s):
        t = tokenize(s)
        for tok in t.tokens:
            assert tok
            assert not any(ch.isspace() for ch in tok)

    @given(st.text(max_size=80))
    @settings(max_examples=200)
    def test_round_trip_up_to_whitespace(self, s):
        flat = "".join(detokenize(tokenize(s)).split())
        assert flat == "".join(s.split())


class TestDetokenize:
    def test_simple_join(self):
        assert detokenize(toks("I", "like", "cats", ".")) == "I like cats."

    def test_empty(self):
        assert detokenize(toks()) == ""

    def test_punctuation_attaches_left(self):
        assert detokenize(toks("a", ",", "b")) == "a, b"


class TestApplyPerturbation:
    def test_substitute(self):
        t = apply_perturbation(toks("a", "b"), Perturbation(Action.SUBSTITUTE, 1, "b", "c"))
        assert t.tokens == ("a", "c")

    def test_insert(self):
        t = apply_perturbation(toks("a", "b"), Perturbation(Action.INSERT, 1, replacement="x"))
        assert t.tokens == ("a", "x", "b")

    def test_remove(self):
        t = apply_perturbation(toks("a", "b"), Perturbation(Action.REMOVE, 0, original="a"))
        assert t.tokens == ("b",)

    def test_input_not_mutated(self):
        original = toks("a", "b")
        apply_perturbation(original, Perturbation(Action.REMOVE, 0, original="a"))
        assert original.tokens == ("a", "b")

    def test_position_out_of_range(self):
        with pytest.raises(PositionOutOfRange):
            apply_perturbation(toks("a"), Perturbation(Action.SUBSTITUTE, 3, "a", "b"))

    def test_insert_slot_n_is_valid(self):
        t = apply_perturbation(toks("a"), Perturbation(Action.INSERT, 1, replacement="b"))
        assert t.tokens == ("a", "b")

    def test_original_mismatch(self):
        with pytest.raises(OriginalMismatch):
            apply_perturbation(toks("a", "b"), Perturbation(Action.REMOVE, 0, original="z"))


class TestInvert:
    def test_substitute_swaps(self):
        p = invert_perturbation(Perturbation(Action.SUBSTITUTE, 3, "cat", "dog"))
        assert p == Perturbation(Action.SUBSTITUTE, 3, "dog", "cat")

    def test_insert_becomes_remove(self):
        p = invert_perturbation(Perturbation(Action.INSERT, 2, replacement="very"))
        assert p == Perturbation(Action.REMOVE, 2, original="very")

    def test_remove_becomes_insert(self):
        p = invert_perturbation(Perturbation(Action.REMOVE, 0, original="not"))
        assert p == Perturbation(Action.INSERT, 0, replacement="not")


WORDS = st.text(alphabet="abcdefg", min_size=1, max_size=5)


@st.composite
def text_and_perturbation(draw):
    words = draw(st.lists(WORDS, min_size=1, max_size=8))
    t = TokenizedText(tuple(words), tuple(True for _ in words))
    kind = draw(st.sampled_from([Action.SUBSTITUTE, Action.INSERT, Action.REMOVE]))
    if kind is Action.INSERT:
        pos = draw(st.integers(0, len(words)))
        p = Perturbation(Action.INSERT, pos, replacement=draw(WORDS))
    elif kind is Action.REMOVE:
        pos = draw(st.integers(0, len(words) - 1))
        p = Perturbation(Action.REMOVE, pos, original=words[pos])
    else:
        pos = draw(st.integers(0, len(words) - 1))
        new = draw(WORDS.filter(lambda w: w != words[pos]))
        p = Perturbation(Action.SUBSTITUTE, pos, words[pos], new)
    return t, p


class TestRoundTrip:
    @given(text_and_perturbation())
    @settings(max_examples=300)
    def test_apply_then_invert_restores(self, case):
        t, p = case
        assert apply_perturbation(apply_perturbation(t, p), invert_perturbation(p)) == t

    def test_perturbation_validation(self):
        with pytest.raises(ValueError):
            Perturbation(Action.SUBSTITUTE, 0, "same", "same")
        with pytest.raises(ValueError):
            Perturbation(Action.INSERT, 0, original="x", replacement="y")
        with pytest.raises(ValueError):
            Perturbation(Action.REMOVE, 0, original="x", replacement="y")


class TestCompactEdits:
    def test_substitution_chain_collapses(self):
        start = toks("a", "b", "c")
        final = toks("a", "z", "c")
        edits = compact_edits(start, final)
        assert edits == [Perturbation(Action.SUBSTITUTE, 1, "b", "z")]

    def test_insert_then_remove_cancels(self):
        start = toks("a", "b")
        assert compact_edits(start, start) == []

    def test_mixed_edit_script_replays(self):
        start = toks("the", "cat", "sat", "down")
        final = toks("a", "cat", "lay", "down", "today")
        edits = compact_edits(start, final)
        assert apply_all(start, edits) == final

    @given(
        st.lists(WORDS, min_size=0, max_size=8),
        st.lists(WORDS, min_size=0, max_size=8),
    )
    @settings(max_examples=200)
    def test_replay_arbitrary_pairs(self, a, b):
        start = TokenizedText(tuple(a), tuple(True for _ in a))
        final = TokenizedText(tuple(b), tuple(True for _ in b))
        edits = compact_edits(start, final)
        assert apply_all(start, edits).tokens == final.tokens
