"""The eight tokenizer-aware rewrite heuristics.

Every heuristic scans a sentence left to right and proposes local edits. An
edit is kept only if it lowers the sentence's token count, so no heuristic
can ever increase the count.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from importlib import resources as _res
from typing import Callable, Iterable

from ..tokenizer import TokenVocabulary
from .stemmer import stem

HEURISTIC_IDS = ("CS", "RS", "LS", "RB", "HC", "RSW", "RP", "RA")

HEURISTIC_NAMES = {
    "CS": "adjust spaces and capitalization",
    "RS": "replace synonyms",
    "LS": "lemmatize and stem",
    "RB": "remove round brackets",
    "HC": "split compound words",
    "RSW": "remove selective stop words",
    "RP": "remove selective punctuation",
    "RA": "collapse dotted acronyms",
}


def _data_lines(name):
    text = (_res.files("qcopt.tokenopt") / "data" / name).read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.rstrip("\n")
        if line.strip() and not line.lstrip().startswith("#"):
            yield line


@functools.lru_cache(maxsize=None)
def _default_wordlist() -> frozenset[str]:
    from english_words import get_english_words_set

    return frozenset(get_english_words_set(["gcide"], alpha=True, lower=True))


@dataclass(frozen=True)
class Resources:
    """Dictionaries the heuristics consult. ``wordlist`` is loaded lazily."""

    stopwords: frozenset[str]
    punctuation: frozenset[str]
    prefixes: tuple[str, ...]
    synonyms: dict[str, tuple[str, ...]] = field(hash=False)
    wordlist: frozenset[str] | None = field(default=None, hash=False)

    def words(self) -> frozenset[str]:
        return self.wordlist if self.wordlist is not None else _default_wordlist()

    @classmethod
    def from_files(cls, stopwords=None, punctuation=None, prefixes=None, synonyms=None, wordlist=None):
        def read(path, default):
            if path is None:
                return list(_data_lines(default))
            with open(path, encoding="utf-8") as fh:
                return [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]

        syn = {}
        for line in read(synonyms, "synonyms.tsv"):
            word, _, alts = line.partition("\t")
            syn[word.strip().lower()] = tuple(a.strip() for a in alts.split(",") if a.strip())
        words = None
        if wordlist is not None:
            words = frozenset(w.strip().lower() for w in read(wordlist, None))
        return cls(
            stopwords=frozenset(w.strip().lower() for w in read(stopwords, "stopwords.txt")),
            punctuation=frozenset(p.strip() for p in read(punctuation, "punctuation.txt")),
            prefixes=tuple(sorted((p.strip().lower() for p in read(prefixes, "prefixes.txt")), key=lambda p: (-len(p), p))),
            synonyms=syn,
            wordlist=words,
        )


@functools.lru_cache(maxsize=None)
def default_resources() -> Resources:
    return Resources.from_files()


Candidate = tuple  # (start, end, replacement)


def _rewrite(text: str, pattern: re.Pattern, candidates: Callable[[re.Match, str], Iterable[Candidate]], vocab: TokenVocabulary) -> str:
    current = text
    count = vocab.count(current)
    pos = 0
    while pos <= len(current):
        m = pattern.search(current, pos)
        if m is None:
            break
        best = None
        for start, end, repl in candidates(m, current):
            new = current[:start] + repl + current[end:]
            c = vocab.count(new)
            if c < count and (best is None or c < best[0]):
                best = (c, new, start + len(repl))
        if best is not None:
            count, current, pos = best
        else:
            pos = m.end() if m.end() > m.start() else m.start() + 1
    return current


_WORD = re.compile(r"[A-Za-z]+")
_CS_SPACE_AFTER = set("\"'([{-/")


def _match_case(template: str, word: str) -> str:
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def cs(sentence, vocab, res):
    def cands(m, text):
        w = m.group()
        s, e = m.span()
        out = []
        if s == 0 or text[s - 1] in _CS_SPACE_AFTER:
            out.append((s, e, " " + w[0].lower() + w[1:]))
            out.append((s, e, " " + w))
        if len(w) == 1 or w[1:].islower():
            out.append((s, e, w[0].swapcase() + w[1:]))
        return out

    return _rewrite(sentence, _WORD, cands, vocab)


def rs(sentence, vocab, res):
    def cands(m, text):
        w = m.group()
        alts = res.synonyms.get(w.lower(), ())
        return [(m.start(), m.end(), _match_case(w, a)) for a in alts]

    return _rewrite(sentence, _WORD, cands, vocab)


def _repairs(stemmed: str):
    yield stemmed
    yield stemmed + "e"
    if stemmed.endswith("i"):
        yield stemmed[:-1] + "y"


def ls(sentence, vocab, res):
    words = res.words()

    def cands(m, text):
        w = m.group()
        if len(w) < 4 or not (w.islower() or (w[0].isupper() and w[1:].islower())):
            return []
        low = w.lower()
        stemmed = stem(low)
        out = []
        for cand in _repairs(stemmed):
            if cand != low and cand in words:
                out.append((m.start(), m.end(), _match_case(w, cand)))
        return out

    return _rewrite(sentence, _WORD, cands, vocab)


_PAREN = re.compile(r"\(([^()]*)\)")


def rb(sentence, vocab, res):
    def cands(m, text):
        return [(m.start(), m.end(), m.group(1))]

    return _rewrite(sentence, _PAREN, cands, vocab)


_COMPOUND = re.compile(r"[A-Za-z]+(?:-[A-Za-z]+)?")


def hc(sentence, vocab, res):
    words = res.words()

    def cands(m, text):
        w = m.group()
        low = w.lower()
        out = []
        for p in res.prefixes:
            if not low.startswith(p):
                continue
            rest = w[len(p):]
            if rest.startswith("-"):
                rest = rest[1:]
            if len(rest) < 3 or "-" in rest or rest.lower() not in words:
                continue
            out.append((m.start(), m.end(), w[: len(p)] + " " + rest))
        return out

    return _rewrite(sentence, _COMPOUND, cands, vocab)


@functools.lru_cache(maxsize=64)
def _stopword_pattern(words: frozenset[str]) -> re.Pattern:
    alt = "|".join(sorted(map(re.escape, words), key=lambda w: (-len(w), w)))
    return re.compile(rf"(?i)(?<![A-Za-z'.])(?:{alt})(?![A-Za-z']|\.[A-Za-z])")


def rsw(sentence, vocab, res):
    if not res.stopwords:
        return sentence

    def cands(m, text):
        s, e = m.span()
        if s > 0 and text[s - 1] == " ":
            return [(s - 1, e, "")]
        if e < len(text) and text[e] == " ":
            # A capitalized leading stop word hands its capital to the next word.
            nxt = _WORD.match(text, e + 1)
            if m.group()[0].isupper() and nxt and nxt.group().islower():
                w = nxt.group()
                return [(s, nxt.end(), w[0].upper() + w[1:])]
            return [(s, e + 1, "")]
        return [(s, e, "")]

    return _rewrite(sentence, _stopword_pattern(res.stopwords), cands, vocab)


@functools.lru_cache(maxsize=64)
def _punct_pattern(marks: frozenset[str]) -> re.Pattern:
    return re.compile("|".join(sorted(map(re.escape, marks), key=lambda p: (-len(p), p))))


_QUOTE_PAIRS = {'"': '"', "\u201c": "\u201d"}


def rp(sentence, vocab, res):
    if not res.punctuation:
        return sentence

    def cands(m, text):
        s, e = m.span()
        mark = m.group()
        if mark in _QUOTE_PAIRS:
            # Quotes go in pairs so no dangling mark is left behind.
            close = text.find(_QUOTE_PAIRS[mark], e)
            if close < 0:
                return []
            return [(s, close + 1, text[e:close])]
        if mark == "\u201d":
            return []
        if s > 0 and text[s - 1] == " " and e < len(text) and text[e] == " ":
            return [(s, e + 1, "")]
        return [(s, e, "")]

    return _rewrite(sentence, _punct_pattern(res.punctuation), cands, vocab)


_ACRONYM = re.compile(r"(?<![A-Za-z.])(?:[A-Z]\.){2,}")


def ra(sentence, vocab, res):
    def cands(m, text):
        letters = m.group().replace(".", "")
        repl = letters + "." if m.end() == len(text.rstrip()) else letters
        return [(m.start(), m.end(), repl)]

    return _rewrite(sentence, _ACRONYM, cands, vocab)


@dataclass(frozen=True)
class Heuristic:
    id: str
    name: str
    func: Callable

    def apply(self, sentence: str, vocab: TokenVocabulary, res: Resources | None = None) -> str:
        return self.func(sentence, vocab, res or default_resources())


HEURISTICS = {
    hid: Heuristic(hid, HEURISTIC_NAMES[hid], fn)
    for hid, fn in zip(HEURISTIC_IDS, (cs, rs, ls, rb, hc, rsw, rp, ra))
}


def get_heuristic(h) -> Heuristic:
    if isinstance(h, Heuristic):
        return h
    try:
        return HEURISTICS[h]
    except KeyError:
        raise ValueError(f"unknown heuristic {h!r}; expected one of {', '.join(HEURISTIC_IDS)}") from None


def apply_heuristic(sentence: str, h, vocab: TokenVocabulary, res: Resources | None = None) -> tuple[str, int]:
    """Apply one heuristic; returns ``(new_sentence, tokens_saved)``."""
    heuristic = get_heuristic(h)
    before = vocab.count(sentence)
    after_text = heuristic.apply(sentence, vocab, res)
    saved = before - vocab.count(after_text)
    if saved <= 0:
        return sentence, 0
    return after_text, saved
