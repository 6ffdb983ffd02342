import random

import pytest

from qcopt.tokenopt import HEURISTIC_IDS, Resources, apply_heuristic, stem
from qcopt.tokenopt.heuristics import get_heuristic

WORDS = (
    "the a an of in on and or but however committee meeting report results revenue office "
    "preprocessing reconstruction unbelievable nonlinear multiprocessing overestimated "
    "running studies happily relational connections generalization ponies caresses "
    "very really quite just in order to basically"
).split()
MARKS = [",", ";", ":", "—", "“", "”", '"', "(", ")", "U.S.A.", "e.g.", "N.A.S.A.", "-", "."]


def fuzz_sentences(n, seed=0):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        toks = []
        for _ in range(rng.randint(1, 18)):
            r = rng.random()
            if r < 0.75:
                w = rng.choice(WORDS)
                toks.append(w.capitalize() if rng.random() < 0.15 else w)
            elif r < 0.9:
                toks.append(rng.choice(MARKS))
            else:
                toks.append("(" + rng.choice(WORDS) + " " + rng.choice(WORDS) + ")")
        sep = " " if rng.random() < 0.8 else ""
        out.append(sep.join(toks) + rng.choice(["", ".", "?", " ."]))
    return out


@pytest.mark.parametrize(
    "word, expected",
    [
        ("caresses", "caress"),
        ("ponies", "poni"),
        ("relational", "relat"),
        ("happy", "happi"),
        ("hopping", "hop"),
        ("agreed", "agre"),
        ("conditional", "condit"),
        ("generalization", "gener"),
        ("is", "is"),
    ],
)
def test_porter_examples(word, expected):
    assert stem(word) == expected


def test_acronym_collapse(vocab, res):
    out, saved = apply_heuristic("The U.S.A. is large.", "RA", vocab, res)
    assert out == "The USA is large." and saved == vocab.count("The U.S.A. is large.") - vocab.count(out)
    assert saved > 0


def test_acronym_at_sentence_end_keeps_period(vocab, res):
    out, _ = apply_heuristic("They moved to the U.S.A.", "RA", vocab, res)
    assert out == "They moved to the USA."


def test_brackets(vocab, res):
    out, saved = apply_heuristic("We met (briefly) in the morning.", "RB", vocab, res)
    assert out == "We met briefly in the morning." and saved > 0


def test_stop_words(vocab, res):
    out, saved = apply_heuristic("We met in the morning and then the meeting was over.", "RSW", vocab, res)
    assert "the" not in out.split() and saved > 0
    # A dotted acronym is not mistaken for the article "a".
    out, _ = apply_heuristic("The U.S.A. is big.", "RSW", vocab, res)
    assert "U.S.A." in out


def test_leading_stop_word_passes_capital_on(vocab, res):
    out, saved = apply_heuristic("A strong storm moved in.", "RSW", vocab, res)
    assert out == "Strong storm moved in." and saved == 1


def test_punctuation_and_quote_pairs(vocab, res):
    out, saved = apply_heuristic("It works; however, it is slow.", "RP", vocab, res)
    assert out == "It works however it is slow." and saved > 0
    out, _ = apply_heuristic('"Attention is all", said the team.', "RP", vocab, res)
    assert out.count('"') in (0, 2)


def test_each_heuristic_never_increases(vocab, res):
    for s in fuzz_sentences(150, seed=4):
        before = vocab.count(s)
        for h in HEURISTIC_IDS:
            out, saved = apply_heuristic(s, h, vocab, res)
            assert vocab.count(out) == before - saved and saved >= 0


def test_unknown_heuristic():
    with pytest.raises(ValueError):
        get_heuristic("XX")


def test_custom_resources(tmp_path, vocab):
    sw = tmp_path / "sw.txt"
    sw.write_text("# none\n")
    empty = Resources.from_files(stopwords=sw)
    assert apply_heuristic("We met in the morning.", "RSW", vocab, empty) == ("We met in the morning.", 0)
    syn = tmp_path / "syn.tsv"
    syn.write_text("ameliorate\tease\n")
    custom = Resources.from_files(synonyms=syn)
    out, saved = apply_heuristic("We ameliorate pain.", "RS", vocab, custom)
    assert out == "We ease pain." and saved > 0
