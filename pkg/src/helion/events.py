"""Event tokens, routines, vocabularies and the corpus wire format.

A token serializes as ``device|attribute|ACTION``; home-level events leave the
device segment empty (``|locationMode|AWAY``) and simultaneous events are
joined with ``&`` in canonical order.
"""

from __future__ import annotations

import bisect
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence as Seq

UNK = "<unk>"

_DEVICE_RE = re.compile(r"^[a-z0-9_]*$")
_ATTRIBUTE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_ACTION_RE = re.compile(r"^[A-Z0-9][A-Z0-9_]*$")


class TokenParseError(ValueError):
    pass


class TokenizeError(ValueError):
    pass


@dataclass(frozen=True)
class EventToken:
    device: str | None
    attribute: str
    action: str
    conjunct_of: tuple[EventToken, ...] = ()
    _text: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        if self.conjunct_of:
            if len(self.conjunct_of) < 2:
                raise ValueError("a conjunction needs at least two sub-tokens")
            if any(p.conjunct_of for p in self.conjunct_of):
                raise ValueError("conjunction sub-tokens must be atomic")
            if list(self.conjunct_of) != sorted(self.conjunct_of, key=_sort_key):
                raise ValueError("conjunction sub-tokens must be in canonical order")
            text = "&".join(str(p) for p in self.conjunct_of)
        else:
            if self.device is not None and not (self.device and _DEVICE_RE.match(self.device)):
                raise ValueError(f"bad device identifier {self.device!r}")
            if not _ATTRIBUTE_RE.match(self.attribute):
                raise ValueError(f"bad attribute identifier {self.attribute!r}")
            if not _ACTION_RE.match(self.action):
                raise ValueError(f"bad action identifier {self.action!r}")
            text = f"{self.device or ''}|{self.attribute}|{self.action}"
        object.__setattr__(self, "_text", text)

    @classmethod
    def conjunction(cls, parts: Iterable[EventToken]) -> EventToken:
        """Combine simultaneous events; nested conjunctions are flattened."""
        flat: list[EventToken] = []
        for p in parts:
            flat.extend(p.conjunct_of or (p,))
        unique = sorted(set(flat), key=_sort_key)
        if len(unique) == 1:
            return unique[0]
        return cls(None, "", "", tuple(unique))

    @property
    def is_conjunction(self) -> bool:
        return bool(self.conjunct_of)

    @property
    def atoms(self) -> tuple[EventToken, ...]:
        return self.conjunct_of or (self,)

    def __str__(self) -> str:
        return self._text


def _sort_key(t: EventToken):
    # device-less (home-level) events sort last
    return (t.device is None, t.device or "", t.attribute, t.action)


def _parse_atomic(text: str) -> EventToken:
    parts = text.split("|")
    if len(parts) != 3:
        raise TokenParseError(
            f"{text!r}: expected 3 '|'-separated segments (device|attribute|action), got {len(parts)}"
        )
    device, attribute, action = parts
    if device and not _DEVICE_RE.match(device):
        raise TokenParseError(f"{text!r}: bad device segment {device!r}")
    if not _ATTRIBUTE_RE.match(attribute):
        raise TokenParseError(f"{text!r}: bad attribute segment {attribute!r}")
    if not _ACTION_RE.match(action):
        raise TokenParseError(f"{text!r}: bad action segment {action!r}")
    return EventToken(device or None, attribute, action)


def parse_token(text: str) -> EventToken:
    text = text.strip()
    if not text:
        raise TokenParseError("empty token")
    pieces = text.split("&")
    if len(pieces) == 1:
        return _parse_atomic(text)
    return EventToken.conjunction(_parse_atomic(p) for p in pieces)


def serialize_token(t: EventToken) -> str:
    return str(t)


# -- routines ---------------------------------------------------------------


class TimeRange(str, Enum):
    EARLY_MORNING = "EARLY_MORNING"
    MORNING = "MORNING"
    NOON = "NOON"
    AFTERNOON = "AFTERNOON"
    EVENING = "EVENING"
    NIGHT = "NIGHT"
    LATE_NIGHT = "LATE_NIGHT"
    ANYTIME = "ANYTIME"
    NOT_SURE = "NOT_SURE"


class DayRange(str, Enum):
    WEEKDAYS = "WEEKDAYS"
    WEEKENDS = "WEEKENDS"
    ANYTIME = "ANYTIME"
    NOT_SURE = "NOT_SURE"


class Frequency(str, Enum):
    MANY_PER_DAY = "MANY_PER_DAY"
    FEW_PER_DAY = "FEW_PER_DAY"
    FEW_PER_WEEK = "FEW_PER_WEEK"
    FEW_PER_MONTH = "FEW_PER_MONTH"
    NOT_SURE = "NOT_SURE"


@dataclass(frozen=True)
class ExecutionIndicators:
    time_range: TimeRange = TimeRange.ANYTIME
    day_range: DayRange = DayRange.ANYTIME
    frequency: Frequency = Frequency.FEW_PER_DAY

    def __post_init__(self):
        object.__setattr__(self, "time_range", TimeRange(_enum_key(self.time_range)))
        object.__setattr__(self, "day_range", DayRange(_enum_key(self.day_range)))
        object.__setattr__(self, "frequency", Frequency(_enum_key(self.frequency)))

    def to_dict(self) -> dict:
        return {
            "time_range": self.time_range.value,
            "day_range": self.day_range.value,
            "frequency": self.frequency.value,
        }


def _enum_key(value) -> str:
    if isinstance(value, Enum):
        return value.value
    return str(value).strip().upper().replace(" ", "_").replace("-", "_")


@dataclass(frozen=True)
class Routine:
    id: str
    triggers: tuple[EventToken, ...]
    actions: tuple[EventToken, ...]
    indicators: ExecutionIndicators = ExecutionIndicators()
    specific_time: int | None = None
    user: str = "user"

    def __post_init__(self):
        object.__setattr__(self, "triggers", tuple(self.triggers))
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.triggers or not self.actions:
            raise ValueError(f"routine {self.id}: triggers and actions must be non-empty")
        overlap = {str(t) for t in self.triggers} & {str(a) for a in self.actions}
        if overlap:
            raise ValueError(f"routine {self.id}: token(s) used as both trigger and action: {sorted(overlap)}")
        if self.specific_time is not None and not 0 <= self.specific_time <= 23:
            raise ValueError(f"routine {self.id}: specific_time must be an hour 0-23")

    @property
    def tokens(self) -> tuple[EventToken, ...]:
        return self.triggers + self.actions

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "user": self.user,
            "triggers": [str(t) for t in self.triggers],
            "actions": [str(a) for a in self.actions],
            "indicators": self.indicators.to_dict(),
        }
        if self.specific_time is not None:
            out["specific_time"] = self.specific_time
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> Routine:
        return cls(
            id=str(d["id"]),
            triggers=tuple(parse_token(t) for t in d["triggers"]),
            actions=tuple(parse_token(a) for a in d["actions"]),
            indicators=ExecutionIndicators(**d.get("indicators", {})),
            specific_time=d.get("specific_time"),
            user=str(d.get("user", "user")),
        )


# -- device catalog, synonyms, value abstraction ------------------------------


def normalize_device(name: str) -> str:
    return re.sub(r"[\s\-]+", "_", name.strip().lower())


def normalize_action(value: str) -> str:
    return re.sub(r"[\s\-]+", "_", str(value).strip().upper())


@dataclass(frozen=True)
class RangeMap:
    """Maps a continuous value to a label: ``value < thresholds[0]`` gives
    ``labels[0]`` and so on, with optional hard bounds."""

    thresholds: tuple[float, ...]
    labels: tuple[str, ...]
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self):
        if len(self.labels) != len(self.thresholds) + 1:
            raise ValueError("need exactly one more label than thresholds")
        if list(self.thresholds) != sorted(self.thresholds):
            raise ValueError("thresholds must be ascending")

    def label(self, value: float) -> str:
        if (self.lower is not None and value < self.lower) or (
            self.upper is not None and value > self.upper
        ):
            raise TokenizeError(f"value {value} outside [{self.lower}, {self.upper}]")
        return self.labels[bisect.bisect_right(self.thresholds, value)]


DEFAULT_ABSTRACTION: dict[str, RangeMap] = {
    "temperature": RangeMap((70, 80), ("LOW", "MEDIUM", "HIGH"), lower=-60, upper=160),
    "humidity": RangeMap((30, 60), ("LOW", "MEDIUM", "HIGH"), lower=0, upper=100),
    "illuminance": RangeMap((100, 1000), ("LOW", "MEDIUM", "HIGH"), lower=0),
    "level": RangeMap((34, 67), ("LOW", "MEDIUM", "HIGH"), lower=0, upper=100),
}


def load_abstraction_map(path: str | Path) -> dict[str, RangeMap]:
    """Read ``{attribute: {thresholds, labels, lower?, upper?}}`` from JSON."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return {
        attr: RangeMap(
            tuple(spec["thresholds"]),
            tuple(normalize_action(x) for x in spec["labels"]),
            spec.get("lower"),
            spec.get("upper"),
        )
        for attr, spec in raw.items()
    }


@dataclass(frozen=True)
class DeviceCatalog:
    """Known device-attribute pairs and their admissible values.

    An empty value tuple means the attribute is unconstrained (or continuous).
    """

    devices: Mapping[str, Mapping[str, tuple[str, ...]]]
    home: Mapping[str, tuple[str, ...]]

    @classmethod
    def from_dict(cls, d: Mapping) -> DeviceCatalog:
        devices = {
            normalize_device(dev): {attr: tuple(vals) for attr, vals in attrs.items()}
            for dev, attrs in d.get("devices", {}).items()
        }
        home = {attr: tuple(vals) for attr, vals in d.get("home", {}).items()}
        return cls(devices, home)

    @classmethod
    def load(cls, path: str | Path) -> DeviceCatalog:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def default(cls) -> DeviceCatalog:
        text = resources.files("helion.data").joinpath("devices.json").read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text))

    def attributes(self, device: str | None) -> Mapping[str, tuple[str, ...]]:
        if device is None:
            return self.home
        return self.devices.get(device, {})

    def resolve_attribute(self, device: str | None, attribute: str) -> str:
        attrs = self.attributes(device)
        wanted = attribute.strip().replace(" ", "_").lower()
        for name in attrs:
            if name.lower() == wanted:
                return name
        where = f"device {device!r}" if device else "home"
        raise TokenizeError(f"unknown attribute {attribute!r} for {where}")


@dataclass(frozen=True)
class SynonymTable:
    devices: Mapping[str, str] = field(default_factory=dict)
    values: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> SynonymTable:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            {k.strip().lower(): v for k, v in raw.get("devices", {}).items()},
            {k.strip().lower(): v for k, v in raw.get("values", {}).items()},
        )

    def device(self, name: str) -> str:
        return self.devices.get(name.strip().lower(), name)

    def value(self, v: str) -> str:
        return self.values.get(str(v).strip().lower(), v)


def tokenize_event(
    spec: Mapping,
    abstraction_map: Mapping[str, RangeMap] | None = None,
    catalog: DeviceCatalog | None = None,
    synonyms: SynonymTable | None = None,
) -> EventToken:
    """Turn one raw ``{device, attribute, value}`` record into an atomic token."""
    catalog = catalog or DeviceCatalog.default()
    synonyms = synonyms or SynonymTable()
    abstraction_map = DEFAULT_ABSTRACTION if abstraction_map is None else abstraction_map

    raw_device = spec.get("device")
    device = normalize_device(synonyms.device(raw_device)) if raw_device else None
    if device is not None and device not in catalog.devices:
        raise TokenizeError(f"unknown device {raw_device!r}")
    attribute = catalog.resolve_attribute(device, str(spec["attribute"]))
    value = spec["value"]

    if attribute in abstraction_map:
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise TokenizeError(f"{attribute}: expected a number, got {value!r}") from None
        action = abstraction_map[attribute].label(number)
    else:
        action = normalize_action(synonyms.value(value))
        allowed = catalog.attributes(device)[attribute]
        if allowed and action not in allowed:
            raise TokenizeError(f"{attribute}: value {action!r} not in {list(allowed)}")
    return EventToken(device, attribute, action)


def tokenize_routine(
    triggers: Seq[Mapping],
    actions: Seq[Mapping],
    abstraction_map: Mapping[str, RangeMap] | None = None,
    *,
    catalog: DeviceCatalog | None = None,
    synonyms: SynonymTable | None = None,
    routine_id: str = "routine",
    indicators: ExecutionIndicators | None = None,
    specific_time: int | None = None,
    user: str = "user",
) -> Routine:
    """Build a routine from raw event specs.

    All trigger specs are treated as simultaneous and collapse into a single
    (conjunction) token; likewise for actions.
    """
    if not triggers or not actions:
        raise TokenizeError(f"routine {routine_id}: needs at least one trigger and one action")
    trig = EventToken.conjunction(
        tokenize_event(s, abstraction_map, catalog, synonyms) for s in triggers
    )
    act = EventToken.conjunction(
        tokenize_event(s, abstraction_map, catalog, synonyms) for s in actions
    )
    return Routine(
        id=routine_id,
        triggers=(trig,),
        actions=(act,),
        indicators=indicators or ExecutionIndicators(),
        specific_time=specific_time,
        user=user,
    )


# -- sequences and vocabulary -------------------------------------------------


@dataclass(frozen=True)
class Sequence:
    tokens: tuple[EventToken, ...]
    origin: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError(f"empty sequence ({self.origin or 'no origin'})")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def to_line(self) -> str:
        return " ".join(str(t) for t in self.tokens)


class Vocabulary:
    """Sorted set of serialized tokens, always including :data:`UNK`."""

    def __init__(self, tokens: Iterable[str]):
        self.tokens: tuple[str, ...] = tuple(sorted(set(tokens) | {UNK}))
        self._index = {t: i for i, t in enumerate(self.tokens)}
        self.unk_index = self._index[UNK]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token) -> bool:
        return str(token) in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def __hash__(self):
        return hash(self.tokens)

    def index(self, token) -> int:
        """Index of a token (or its serialized form); unknown tokens map to UNK."""
        return self._index.get(str(token), self.unk_index)

    def as_dict(self) -> dict[str, int]:
        return dict(self._index)


def build_vocabulary(corpus: Iterable[Sequence]) -> Vocabulary:
    corpus = list(corpus)
    if not corpus:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    return Vocabulary(str(t) for seq in corpus for t in seq)


def read_corpus(path: str | Path, origin: str | None = None) -> list[Sequence]:
    """One sequence per line, tokens separated by spaces; ``#`` lines are comments."""
    path = Path(path)
    seqs = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        seqs.append(parse_line(line, f"{origin or path.name}:{lineno}"))
    return seqs


def parse_line(line: str, origin: str = "") -> Sequence:
    return Sequence(tuple(parse_token(t) for t in line.split()), origin)


def format_corpus(sequences: Iterable[Sequence]) -> str:
    return "".join(seq.to_line() + "\n" for seq in sequences)


def write_corpus(path: str | Path, sequences: Iterable[Sequence]) -> None:
    Path(path).write_text(format_corpus(sequences), encoding="utf-8")
