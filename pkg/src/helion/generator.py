"""Scenario generation in up, down and hybrid flavors."""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from enum import Enum
from typing import Sequence as Seq

import numpy as np

from .events import EventToken, Sequence
from .ngram import DEFAULT_SENTENCE_LENGTH, NgramModel, segment, train

WINDOW = 10
DEFAULT_LENGTH = 10


class Pick(str, Enum):
    UP = "UP"
    DOWN = "DOWN"


class Flavor(str, Enum):
    UP = "UP"
    DOWN = "DOWN"
    UP_DOWN = "UP_DOWN"
    DOWN_UP = "DOWN_UP"

    @classmethod
    def parse(cls, text: str) -> Flavor:
        return cls(text.strip().upper().replace("-", "_"))


class Mode(str, Enum):
    SAMPLE = "SAMPLE"
    GREEDY = "GREEDY"


@dataclass(frozen=True)
class GenerationConfig:
    length: int = DEFAULT_LENGTH
    flavor: Flavor = Flavor.UP
    mode: Mode = Mode.SAMPLE
    seed: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")


@dataclass(frozen=True)
class Scenario:
    history: tuple[EventToken, ...]
    generated: tuple[EventToken, ...]
    flavor: Flavor
    per_event_flavor: tuple[Pick, ...]
    seed: int = 0

    def __post_init__(self):
        if len(self.per_event_flavor) != len(self.generated):
            raise ValueError("one flavor mark per generated event is required")

    @property
    def events(self) -> tuple[EventToken, ...]:
        return self.history + self.generated

    def to_line(self) -> str:
        return " ".join(str(t) for t in self.events)

    def annotation(self) -> str:
        marks = ["H"] * len(self.history) + [p.value[0] for p in self.per_event_flavor]
        return f"# flavor={self.flavor.value} seed={self.seed} marks=" + "".join(marks)


def candidate_ids(model: NgramModel) -> np.ndarray:
    """Vocabulary ids eligible for generation (UNK and markers excluded)."""
    return np.array([i for i in range(len(model.vocabulary)) if model.token_at(i) is not None], dtype=np.int64)


def next_event(
    model: NgramModel,
    history: Seq[EventToken],
    pick: Pick = Pick.UP,
    mode: Mode = Mode.SAMPLE,
    rng: random.Random | None = None,
) -> EventToken:
    """Predict one event after ``history``.

    DOWN returns the least probable real token, UP/GREEDY the most probable
    (ties go to the lexicographically first), UP/SAMPLE draws from the
    conditional distribution renormalized over real tokens.
    """
    ids = candidate_ids(model)
    if ids.size == 0:
        raise ValueError("model vocabulary has no generatable tokens")
    probs = model.distribution_id(model.context(history))[ids]
    if Pick(pick) is Pick.DOWN:
        choice = int(np.argmin(probs))
    elif Mode(mode) is Mode.GREEDY:
        choice = int(np.argmax(probs))
    else:
        rng = rng if rng is not None else random.Random(0)
        cumulative = np.cumsum(probs)
        u = rng.random() * cumulative[-1]
        choice = min(bisect.bisect_right(cumulative.tolist(), u), len(ids) - 1)
    # np.argmin/argmax return the first extreme, ids are in lexicographic order
    return model.token_at(int(ids[choice]))


def minority_count(window: int) -> int:
    """Minority picks for a trailing partial window of ``window`` events."""
    return min(window, max(1, round(window / WINDOW * 2)))


def plan_marks(flavor: Flavor, length: int, rng: random.Random) -> list[Pick]:
    flavor = Flavor(flavor)
    if flavor is Flavor.UP:
        return [Pick.UP] * length
    if flavor is Flavor.DOWN:
        return [Pick.DOWN] * length
    majority, minority = (Pick.UP, Pick.DOWN) if flavor is Flavor.UP_DOWN else (Pick.DOWN, Pick.UP)
    marks = []
    for start in range(0, length, WINDOW):
        size = min(WINDOW, length - start)
        k = rng.randint(1, 3) if size == WINDOW else minority_count(size)
        chosen = set(rng.sample(range(size), k))
        marks.extend(minority if i in chosen else majority for i in range(size))
    return marks


def generate(model: NgramModel, history: Seq[EventToken], cfg: GenerationConfig) -> Scenario:
    rng = random.Random(cfg.seed)
    marks = plan_marks(cfg.flavor, cfg.length, rng)
    running = list(history)
    generated = []
    for mark in marks:
        event = next_event(model, running, mark, cfg.mode, rng)
        generated.append(event)
        running.append(event)
    return Scenario(tuple(history), tuple(generated), Flavor(cfg.flavor), tuple(marks), cfg.seed)


@dataclass(frozen=True)
class ExtractionRound:
    round: int
    history: tuple[EventToken, ...]
    generated: tuple[EventToken, ...]


def extract_routines(
    model: NgramModel,
    corpus: Seq[Sequence],
    rounds: int,
    seed: int = 0,
    *,
    pick: Pick = Pick.UP,
    mode: Mode = Mode.SAMPLE,
    max_history: int = 7,
    sentence_length: int | None = DEFAULT_SENTENCE_LENGTH,
    log: list | None = None,
) -> list[tuple[EventToken, EventToken]]:
    """Mine fresh trigger-action pairs from generated continuations.

    Each round retrains a model of the same order on a random 90% of the
    sequences, takes an odd-length history from the held-out 10%, generates
    three events and keeps the second and third as a routine. Pairs are
    deduplicated in first-seen order. When ``log`` is a list, one
    :class:`ExtractionRound` per round is appended to it.
    """
    corpus = list(corpus)
    if len(corpus) < 2:
        raise ValueError("need at least two sequences to split 90/10")
    rng = random.Random(seed)
    n_test = max(1, round(len(corpus) * 0.1))
    found: dict[tuple[str, str], tuple[EventToken, EventToken]] = {}
    for r in range(rounds):
        shuffled = corpus[:]
        rng.shuffle(shuffled)
        test, training = shuffled[:n_test], shuffled[n_test:]
        round_model = train(segment(training, sentence_length), model.order)
        source = rng.choice(test).tokens
        lengths = [n for n in range(1, min(max_history, len(source)) + 1, 2)]
        length = rng.choice(lengths)
        start = rng.randrange(len(source) - length + 1)
        history = source[start:start + length]
        running = list(history)
        generated = []
        for _ in range(3):
            event = next_event(round_model, running, pick, mode, rng)
            generated.append(event)
            running.append(event)
        if log is not None:
            log.append(ExtractionRound(r, tuple(history), tuple(generated)))
        trigger, action = generated[1], generated[2]
        found.setdefault((str(trigger), str(action)), (trigger, action))
    return list(found.values())

