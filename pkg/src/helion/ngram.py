"""Interpolated Kneser-Ney n-gram models over event tokens.

Tokens are mapped to integer ids: vocabulary entries (UNK included) take
``0..V-1``, the end marker is ``V`` and the begin marker ``V+1``. The model
predicts over the ``V + 1`` outcomes vocabulary-plus-end; the begin marker
only ever appears in contexts.
"""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence as Seq

import numpy as np

from .events import EventToken, Sequence, Vocabulary, build_vocabulary, parse_token, UNK

FORMAT = "helion-ngram/1"
DEFAULT_SENTENCE_LENGTH = 20
MIN_DISCOUNT, MAX_DISCOUNT, FALLBACK_DISCOUNT = 0.05, 0.95, 0.5


def estimate_discount(counts: Iterable[int]) -> float:
    """Absolute discount from counts-of-counts, ``n1 / (n1 + 2 n2)``."""
    tally = Counter(counts)
    n1, n2 = tally[1], tally[2]
    if n1 == 0 or n2 == 0:
        return FALLBACK_DISCOUNT
    return min(MAX_DISCOUNT, max(MIN_DISCOUNT, n1 / (n1 + 2 * n2)))


@dataclass
class _Level:
    """Counts used for probability estimation at one order."""

    table: dict[tuple[int, ...], dict[int, int]]
    totals: dict[tuple[int, ...], int] = field(default_factory=dict)
    distinct: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        for ctx, row in self.table.items():
            self.totals[ctx] = sum(row.values())
            self.distinct[ctx] = len(row)


class NgramModel:
    """Trained model. Immutable by convention once constructed."""

    def __init__(
        self,
        order: int,
        vocabulary: Vocabulary,
        counts: list[dict[tuple[int, ...], dict[int, int]]],
        discounts: Seq[float] | None = None,
    ):
        if order < 1:
            raise ValueError("order must be >= 1")
        if len(counts) != order:
            raise ValueError("need one count table per order")
        self.order = order
        self.vocabulary = vocabulary
        self.eos = len(vocabulary)
        self.bos = len(vocabulary) + 1
        # raw counts: counts[k-1][context of length k-1][token] over all windows
        self.counts = counts
        self.continuation_counts = [self._continuations(k) for k in range(1, order)]
        levels = [self._level_table(k) for k in range(1, order + 1)]
        if discounts is None:
            discounts = [
                estimate_discount(c for row in table.values() for c in row.values())
                for table in levels
            ]
        self.discounts = tuple(float(d) for d in discounts)
        if len(self.discounts) != order or not all(0 <= d < 1 for d in self.discounts):
            raise ValueError(f"bad discounts {self.discounts}")
        self._levels = [_Level(t) for t in levels]
        self._tokens = [None if t == UNK else parse_token(t) for t in vocabulary.tokens]

    # -- construction helpers --------------------------------------------

    def _continuations(self, k: int) -> dict[tuple[int, ...], dict[int, int]]:
        """N1+(. g) for every k-gram g, from the (k+1)-gram types."""
        out: dict[tuple[int, ...], dict[int, int]] = defaultdict(dict)
        for ctx, row in self.counts[k].items():
            suffix_ctx = ctx[1:]
            for tok in row:
                if tok == self.bos:
                    continue
                cell = out[suffix_ctx]
                cell[tok] = cell.get(tok, 0) + 1
        return dict(out)

    def _level_table(self, k: int) -> dict[tuple[int, ...], dict[int, int]]:
        if k == self.order:
            return {
                ctx: {t: c for t, c in row.items() if t != self.bos}
                for ctx, row in self.counts[k - 1].items()
            }
        return self.continuation_counts[k - 1]

    # -- queries ---------------------------------------------------------

    @property
    def outcome_count(self) -> int:
        return len(self.vocabulary) + 1

    @property
    def interpolation_floor(self) -> float:
        return 1.0 / self.outcome_count

    def encode(self, token) -> int:
        return self.vocabulary.index(token)

    def token_at(self, index: int) -> EventToken | None:
        """Event token for a vocabulary id; ``None`` for reserved ids."""
        if 0 <= index < len(self._tokens):
            return self._tokens[index]
        return None

    def context(self, history: Seq) -> tuple[int, ...]:
        """Last ``order - 1`` history ids, left-padded with the begin marker."""
        n = self.order - 1
        if n == 0:
            return ()
        ids = [self.encode(t) for t in list(history)[-n:]]
        return (self.bos,) * (n - len(ids)) + tuple(ids)

    def prob_id(self, context: tuple[int, ...], token: int) -> float:
        p = self.interpolation_floor
        for k in range(1, self.order + 1):
            level = self._levels[k - 1]
            ctx = context[len(context) - (k - 1):] if k > 1 else ()
            total = level.totals.get(ctx)
            if not total:
                continue
            d = self.discounts[k - 1]
            c = level.table[ctx].get(token, 0)
            p = max(c - d, 0.0) / total + d * level.distinct[ctx] / total * p
        return p

    def distribution_id(self, context: tuple[int, ...]) -> np.ndarray:
        """Probabilities over all ``V + 1`` outcomes (index ``V`` is the end marker)."""
        p = np.full(self.outcome_count, self.interpolation_floor)
        for k in range(1, self.order + 1):
            level = self._levels[k - 1]
            ctx = context[len(context) - (k - 1):] if k > 1 else ()
            total = level.totals.get(ctx)
            if not total:
                continue
            d = self.discounts[k - 1]
            p *= d * level.distinct[ctx] / total
            row = level.table[ctx]
            idx = np.fromiter(row.keys(), dtype=np.int64, count=len(row))
            val = np.fromiter(row.values(), dtype=np.float64, count=len(row))
            p[idx] += np.maximum(val - d, 0.0) / total
        return p

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NgramModel)
            and self.order == other.order
            and self.vocabulary == other.vocabulary
            and self.counts == other.counts
            and self.discounts == other.discounts
        )

    # -- serialization ---------------------------------------------------

    def dumps(self) -> str:
        lines = [
            f"format\t{FORMAT}",
            f"order\t{self.order}",
            f"vocab_size\t{len(self.vocabulary)}",
            "discounts\t" + " ".join(repr(d) for d in self.discounts),
            "\\vocab",
        ]
        lines += [f"{i}\t{tok}" for i, tok in enumerate(self.vocabulary.tokens)]
        lines.append("\\counts")
        for k, table in enumerate(self.counts, 1):
            for ctx in sorted(table):
                row = table[ctx]
                ctx_text = " ".join(map(str, ctx))
                lines += [f"{k}\t{ctx_text}\t{tok}\t{row[tok]}" for tok in sorted(row)]
        lines.append("\\end")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> NgramModel:
        header: dict[str, str] = {}
        vocab: list[str] = []
        counts: list[dict] | None = None
        section = "header"
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.startswith("\\"):
                section = line[1:]
                if section == "counts":
                    counts = [defaultdict(dict) for _ in range(int(header["order"]))]
                continue
            if section == "header":
                key, _, value = line.partition("\t")
                header[key] = value
            elif section == "vocab":
                index, _, tok = line.partition("\t")
                if int(index) != len(vocab):
                    raise ValueError(f"line {lineno}: vocabulary index out of order")
                vocab.append(tok)
            elif section == "counts":
                k, ctx, tok, c = line.split("\t")
                ctx_ids = tuple(int(x) for x in ctx.split()) if ctx else ()
                counts[int(k) - 1][ctx_ids][int(tok)] = int(c)
        if header.get("format") != FORMAT:
            raise ValueError(f"unsupported model format {header.get('format')!r}")
        if counts is None:
            raise ValueError("model file has no counts section")
        vocabulary = Vocabulary(vocab)
        if list(vocabulary.tokens) != vocab or len(vocab) != int(header["vocab_size"]):
            raise ValueError("vocabulary block is inconsistent with header")
        discounts = [float(x) for x in header["discounts"].split()]
        return cls(int(header["order"]), vocabulary, [dict(t) for t in counts], discounts)

    @classmethod
    def load(cls, path: str | Path) -> NgramModel:
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def segment(corpus: Iterable[Sequence], length: int | None = DEFAULT_SENTENCE_LENGTH) -> list[Sequence]:
    """Split sequences into sentences of at most ``length`` tokens."""
    corpus = list(corpus)
    if not length:
        return corpus
    out = []
    for seq in corpus:
        toks = seq.tokens
        for start in range(0, len(toks), length):
            out.append(Sequence(toks[start:start + length], f"{seq.origin}@{start}"))
    return out


def train(corpus: Iterable[Sequence], order: int, vocabulary: Vocabulary | None = None) -> NgramModel:
    """Count every window of size 1..order over padded sentences."""
    if order < 1:
        raise ValueError("order must be >= 1")
    corpus = list(corpus)
    if not corpus:
        raise ValueError("cannot train on an empty corpus")
    vocabulary = vocabulary or build_vocabulary(corpus)
    eos, bos = len(vocabulary), len(vocabulary) + 1
    counters = [Counter() for _ in range(order)]
    for seq in corpus:
        ids = [bos] * (order - 1) + [vocabulary.index(t) for t in seq] + [eos]
        for k in range(1, order + 1):
            counter = counters[k - 1]
            counter.update(tuple(ids[i:i + k]) for i in range(len(ids) - k + 1))
    counts = []
    for counter in counters:
        table: dict[tuple[int, ...], dict[int, int]] = defaultdict(dict)
        for gram, c in counter.items():
            table[gram[:-1]][gram[-1]] = c
        counts.append(dict(table))
    return NgramModel(order, vocabulary, counts)


def prob(model: NgramModel, history: Seq[EventToken], next: EventToken) -> float:
    return model.prob_id(model.context(history), model.encode(next))


def sequence_logprob(model: NgramModel, s: Sequence) -> float:
    """Chain-rule log2 probability of the tokens of ``s`` (end marker excluded)."""
    n = model.order - 1
    ids = [model.bos] * n + [model.encode(t) for t in s]
    total = 0.0
    for i in range(n, len(ids)):
        total += math.log2(model.prob_id(tuple(ids[i - n:i]), ids[i]))
    return total


def cross_entropy(model, test: Iterable[Sequence]) -> float:
    """Average negative log2 probability per token."""
    total, tokens = _logprob_and_tokens(model, test)
    return -total / tokens


def _logprob_and_tokens(model, test: Iterable[Sequence]) -> tuple[float, int]:
    test = list(test)
    if not test:
        raise ValueError("empty test set")
    total = sum(sequence_logprob(model, s) for s in test)
    return total, sum(len(s) for s in test)


def perplexity(entropy: float) -> float:
    return 2.0 ** entropy


@dataclass(frozen=True)
class FoldResult:
    fold: int
    entropy: float
    tokens: int


@dataclass(frozen=True)
class EntropyReport:
    order: int
    per_fold: tuple[FoldResult, ...]

    @property
    def mean(self) -> float:
        tokens = sum(f.tokens for f in self.per_fold)
        return sum(f.entropy * f.tokens for f in self.per_fold) / tokens

    @property
    def perplexity(self) -> float:
        return perplexity(self.mean)

    @property
    def tokens(self) -> int:
        return sum(f.tokens for f in self.per_fold)


def fold_assignment(n_units: int, k: int, seed: int) -> list[list[int]]:
    """Shuffle unit indices with ``seed`` and cut them into ``k`` near-equal folds."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if n_units < k:
        raise ValueError(f"{n_units} sequences cannot fill {k} folds")
    order = list(range(n_units))
    random.Random(seed).shuffle(order)
    base, extra = divmod(n_units, k)
    folds, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(sorted(order[start:start + size]))
        start += size
    return folds


def kfold_entropy(
    corpus: Iterable[Sequence],
    order: int,
    k: int = 10,
    seed: int = 0,
    sentence_length: int | None = DEFAULT_SENTENCE_LENGTH,
) -> EntropyReport:
    """k-fold cross-validated cross-entropy; the vocabulary comes from training folds only."""
    units = segment(corpus, sentence_length)
    folds = fold_assignment(len(units), k, seed)
    results = []
    for i, held_out in enumerate(folds):
        held = set(held_out)
        train_units = [u for j, u in enumerate(units) if j not in held]
        test_units = [units[j] for j in held_out]
        model = train(train_units, order)
        total, tokens = _logprob_and_tokens(model, test_units)
        results.append(FoldResult(i, -total / tokens, tokens))
    return EntropyReport(order, tuple(results))
