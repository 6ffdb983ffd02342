"""Byte-pair-encoding tokenizer over tiktoken-format vocabularies.

The vocabulary file holds one ``<base64 bytes> <rank>`` pair per line. Lower
rank means higher merge priority. Text is first split into chunks with the
vocabulary's pre-tokenization pattern; each chunk is then merged greedily,
always fusing the adjacent pair whose concatenation has the lowest rank.
"""

from __future__ import annotations

import base64
import binascii
import functools
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import regex

from .errors import VocabularyError

CL100K_PATTERN = (
    r"""'(?i:[sdmt]|ll|ve|re)|[^\r\n\p{L}\p{N}]?+\p{L}++|\p{N}{1,3}+| ?[^\s\p{L}\p{N}]++[\r\n]*+"""
    r"""|\s++$|\s*[\r\n]|\s+(?!\S)|\s"""
)

CL100K_SPECIAL_TOKENS = {
    "<|endoftext|>": 100257,
    "<|fim_prefix|>": 100258,
    "<|fim_middle|>": 100259,
    "<|fim_suffix|>": 100260,
    "<|endofprompt|>": 100276,
}

VOCAB_ENV_VAR = "QCOPT_VOCAB"

_CACHE_LIMIT = 1 << 16


@dataclass(eq=False)
class TokenVocabulary:
    """Immutable mapping between byte sequences and token ranks."""

    name: str
    ranks: Mapping[bytes, int]
    pattern: str = CL100K_PATTERN
    special_tokens: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        missing = [b for b in range(256) if bytes([b]) not in self.ranks]
        if missing:
            raise VocabularyError(
                f"vocabulary {self.name!r} lacks single-byte coverage for {len(missing)} bytes"
            )
        self._decoder = {rank: seq for seq, rank in self.ranks.items()}
        if len(self._decoder) != len(self.ranks):
            raise VocabularyError(f"vocabulary {self.name!r} has duplicate ranks")
        self._regex = regex.compile(self.pattern)
        self._chunk_cache: dict[bytes, tuple[int, ...]] = {}

    def __len__(self):
        return len(self.ranks)

    def _encode_chunk(self, piece: bytes) -> tuple[int, ...]:
        cached = self._chunk_cache.get(piece)
        if cached is not None:
            return cached
        ranks = self.ranks
        rank = ranks.get(piece)
        if rank is not None:
            out = (rank,)
        else:
            out = tuple(ranks[p] for p in _bpe_parts(piece, ranks))
        if len(self._chunk_cache) >= _CACHE_LIMIT:
            self._chunk_cache.clear()
        self._chunk_cache[piece] = out
        return out

    def encode(self, text: str) -> list[int]:
        """Encode ``text``; special-token strings are treated as plain text."""
        out: list[int] = []
        for chunk in self._regex.findall(text):
            out.extend(self._encode_chunk(chunk.encode("utf-8")))
        return out

    def decode_bytes(self, tokens) -> bytes:
        return b"".join(self._decoder[t] for t in tokens)

    def decode(self, tokens) -> str:
        return self.decode_bytes(tokens).decode("utf-8", errors="replace")

    def count(self, text: str) -> int:
        n = 0
        for chunk in self._regex.findall(text):
            n += len(self._encode_chunk(chunk.encode("utf-8")))
        return n


def _bpe_parts(piece: bytes, ranks: Mapping[bytes, int]) -> list[bytes]:
    parts = [piece[i : i + 1] for i in range(len(piece))]
    while len(parts) > 1:
        best_rank = None
        best_i = -1
        for i in range(len(parts) - 1):
            r = ranks.get(parts[i] + parts[i + 1])
            if r is not None and (best_rank is None or r < best_rank):
                best_rank = r
                best_i = i
        if best_rank is None:
            break
        parts[best_i : best_i + 2] = [parts[best_i] + parts[best_i + 1]]
    return parts


def parse_vocabulary_lines(lines, name="custom", pattern=CL100K_PATTERN, special_tokens=None):
    ranks: dict[bytes, int] = {}
    seen_ranks: dict[int, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise VocabularyError("expected '<base64> <rank>'", line=lineno)
        token_b64, rank_s = fields
        try:
            seq = base64.b64decode(token_b64, validate=True)
            rank = int(rank_s)
        except (binascii.Error, ValueError):
            raise VocabularyError(f"cannot parse {line!r}", line=lineno) from None
        if rank < 0:
            raise VocabularyError(f"negative rank {rank}", line=lineno)
        if rank in seen_ranks:
            raise VocabularyError(
                f"duplicate rank {rank} (first seen on line {seen_ranks[rank]})", line=lineno
            )
        if seq in ranks:
            raise VocabularyError(f"duplicate byte sequence {seq!r}", line=lineno)
        seen_ranks[rank] = lineno
        ranks[seq] = rank
    return TokenVocabulary(name, ranks, pattern, dict(special_tokens or {}))


def load_vocabulary(path, name=None, pattern=CL100K_PATTERN, special_tokens=None) -> TokenVocabulary:
    """Load a tiktoken-format vocabulary file."""
    path = Path(path)
    with path.open("r", encoding="ascii") as fh:
        return parse_vocabulary_lines(
            fh, name=name or path.stem, pattern=pattern, special_tokens=special_tokens
        )


@functools.lru_cache(maxsize=None)
def _load_cached(path: str) -> TokenVocabulary:
    return load_vocabulary(path, name="cl100k_base", special_tokens=CL100K_SPECIAL_TOKENS)


def default_vocabulary(path=None) -> TokenVocabulary:
    """Return cl100k_base, honouring ``path`` then ``$QCOPT_VOCAB`` then the bundled copy."""
    if path is None:
        path = os.environ.get(VOCAB_ENV_VAR)
    if path is None:
        path = resources.files("qcopt") / "data" / "cl100k_base.tiktoken"
    return _load_cached(str(path))


_TEST_MERGES = [
    "th", "he", "in", "er", "an", "re", "on", "at", "en", "nd", "ti", "es", "or", "te",
    "of", "ed", "is", "it", "al", "ar", "st", "to", "nt", "ng", "se", "ha", "as", "ou",
    "io", "le", "ve", "co", "me", "de", "hi", "ri", "ro", "ic", "ne", "ea", "ra", "ce",
    "the", "ing", "and", "ion", "ent", "tio", "for", "her", "tion", "ther", "that",
    " t", " a", " s", " c", " o", " w", " th", " the", " an", " and", " in", " of",
    " to", " is", " it", " co", " re", " for", " that", " wi", " with", " on", " be",
    " are", " as", " at", " this", " by", " from", " or", " not", " we", " he",
    " ha", " has", " have", " was", " were", " can", " will", " model", " cost",
    " token", " tokens", " text", " section", "..", "  ", "\n\n", " (", ").", ", ",
]


@functools.lru_cache(maxsize=None)
def builtin_test_vocabulary() -> TokenVocabulary:
    """A ~360-entry vocabulary for fast unit tests (not a real LLM tokenizer)."""
    ranks = {bytes([b]): b for b in range(256)}
    for merge in _TEST_MERGES:
        seq = merge.encode("utf-8")
        if seq not in ranks:
            ranks[seq] = len(ranks)
    return TokenVocabulary("test", ranks)


_REGISTRY = {
    "cl100k_base": default_vocabulary,
    "test": builtin_test_vocabulary,
}


def get_vocabulary(tokenizer_id: str) -> TokenVocabulary:
    try:
        factory = _REGISTRY[tokenizer_id]
    except KeyError:
        raise VocabularyError(f"unknown tokenizer id {tokenizer_id!r}") from None
    return factory()


def encode(text: str, vocab: TokenVocabulary) -> list[int]:
    return vocab.encode(text)


def decode(tokens, vocab: TokenVocabulary) -> str:
    return vocab.decode(tokens)


def count_tokens(text: str, vocab: TokenVocabulary) -> int:
    return vocab.count(text)
