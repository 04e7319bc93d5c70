"""Home-state snapshots and policy checking over scenarios."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence as Seq

import jsonschema

from .events import EventToken

UNKNOWN = "UNKNOWN"
DEFAULT_OBLIGATION_WINDOW = 3
WILDCARD = "*"


class PolicyError(ValueError):
    pass


# -- state ------------------------------------------------------------------


@dataclass(frozen=True)
class HomeState:
    device_state: Mapping[tuple[str, str], str] = field(default_factory=dict)
    home_state: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "device_state", MappingProxyType(dict(self.device_state)))
        object.__setattr__(self, "home_state", MappingProxyType(dict(self.home_state)))

    def get(self, device: str | None, attribute: str) -> str:
        if device is None:
            return self.home_state.get(attribute, UNKNOWN)
        return self.device_state.get((device, attribute), UNKNOWN)

    def items(self) -> list[tuple[str, str]]:
        """``(target, value)`` pairs with targets in ``device|attribute`` form."""
        out = [(f"{d}|{a}", v) for (d, a), v in sorted(self.device_state.items())]
        out += [(f"|{a}", v) for a, v in sorted(self.home_state.items())]
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HomeState)
            and dict(self.device_state) == dict(other.device_state)
            and dict(self.home_state) == dict(other.home_state)
        )

    def __hash__(self):
        return hash((tuple(sorted(self.device_state.items())), tuple(sorted(self.home_state.items()))))


def apply_event(state: HomeState, e: EventToken) -> HomeState:
    devices = dict(state.device_state)
    home = dict(state.home_state)
    for atom in e.atoms:
        if atom.device is None:
            home[atom.attribute] = atom.action
        else:
            devices[(atom.device, atom.attribute)] = atom.action
    return HomeState(devices, home)


def replay(events: Iterable[EventToken], initial: HomeState | None = None) -> list[HomeState]:
    """Snapshot after each event."""
    state = initial or HomeState()
    out = []
    for e in events:
        state = apply_event(state, e)
        out.append(state)
    return out


# -- policies -----------------------------------------------------------------


@dataclass(frozen=True)
class EventPattern:
    """``device|attribute|action`` matcher; ``*`` matches anything, ``any`` every event."""

    device: str | None
    attribute: str
    action: str
    any_event: bool = False

    @classmethod
    def parse(cls, text: str) -> EventPattern:
        text = text.strip()
        if text == "any":
            return cls(None, WILDCARD, WILDCARD, any_event=True)
        parts = text.split("|")
        if len(parts) != 3 or not parts[1] or not parts[2]:
            raise PolicyError(f"bad event pattern {text!r}")
        return cls(parts[0] or None, parts[1], parts[2])

    def matches(self, e: EventToken) -> bool:
        if self.any_event:
            return True
        return any(self._matches_atom(a) for a in e.atoms)

    def _matches_atom(self, a: EventToken) -> bool:
        if self.device != WILDCARD and self.device != a.device:
            return False
        if self.attribute != WILDCARD and self.attribute != a.attribute:
            return False
        return self.action == WILDCARD or self.action == a.action

    def __str__(self) -> str:
        return "any" if self.any_event else f"{self.device or ''}|{self.attribute}|{self.action}"


_OPS = ("eq", "ne", "in", "not_in")


@dataclass(frozen=True)
class Predicate:
    device: str | None
    attribute: str
    op: str
    value: tuple[str, ...]

    def __post_init__(self):
        if self.op not in _OPS:
            raise PolicyError(f"unknown comparator {self.op!r}")
        if self.op in ("eq", "ne") and len(self.value) != 1:
            raise PolicyError(f"{self.op} takes exactly one value")

    @property
    def target(self) -> str:
        return f"{self.device or ''}|{self.attribute}"

    def holds(self, state: HomeState) -> bool:
        current = state.get(self.device, self.attribute)
        if current == UNKNOWN:
            return False
        if self.op in ("eq", "in"):
            return current in self.value
        return current not in self.value

    def __str__(self) -> str:
        shown = self.value[0] if self.op in ("eq", "ne") else "{" + ",".join(self.value) + "}"
        sym = {"eq": "==", "ne": "!=", "in": "in", "not_in": "not in"}[self.op]
        return f"{self.target} {sym} {shown}"


class PolicyKind(str, Enum):
    STATE_FORBIDDEN = "STATE_FORBIDDEN"
    OBLIGATION = "OBLIGATION"


@dataclass(frozen=True)
class Policy:
    id: str
    kind: PolicyKind
    trigger: tuple[EventPattern, ...]
    state_condition: tuple[Predicate, ...]
    description: str = ""
    obligation_event: EventPattern | None = None
    obligation_window: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not self.trigger:
            raise PolicyError(f"{self.id}: at least one trigger pattern is required")
        if self.kind is PolicyKind.STATE_FORBIDDEN:
            if self.obligation_event is not None or self.obligation_window is not None:
                raise PolicyError(f"{self.id}: STATE_FORBIDDEN policies take no obligation fields")
        else:
            if self.obligation_event is None or self.obligation_window is None:
                raise PolicyError(f"{self.id}: OBLIGATION policies need obligation_event and obligation_window")
            if self.obligation_window < 1:
                raise PolicyError(f"{self.id}: obligation_window must be >= 1")

    def triggered_by(self, e: EventToken) -> bool:
        return any(p.matches(e) for p in self.trigger)

    def condition_holds(self, state: HomeState) -> bool:
        return all(p.holds(state) for p in self.state_condition)

    def evidence(self, state: HomeState) -> dict[str, str]:
        return {p.target: state.get(p.device, p.attribute) for p in self.state_condition}

    @classmethod
    def from_dict(cls, d: Mapping) -> Policy:
        trigger = d["trigger"]
        if isinstance(trigger, str):
            trigger = [trigger]
        conds = []
        for c in d.get("condition", []):
            device, _, attribute = c["target"].partition("|")
            value = c["value"]
            values = tuple(value) if isinstance(value, list) else (value,)
            conds.append(Predicate(device or None, attribute, c.get("op", "eq"), values))
        kind = PolicyKind(d["kind"])
        obligation = d.get("obligation_event")
        window = d.get("obligation_window")
        if kind is PolicyKind.OBLIGATION and window is None:
            window = DEFAULT_OBLIGATION_WINDOW
        return cls(
            id=d["id"],
            kind=kind,
            trigger=tuple(EventPattern.parse(t) for t in trigger),
            state_condition=tuple(conds),
            description=d.get("description", ""),
            obligation_event=EventPattern.parse(obligation) if obligation else None,
            obligation_window=window,
        )


POLICY_SCHEMA = {
    "type": "object",
    "required": ["policies"],
    "properties": {
        "format": {"const": "helion-policies/1"},
        "policies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind", "trigger"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "kind": {"enum": ["STATE_FORBIDDEN", "OBLIGATION"]},
                    "trigger": {
                        "oneOf": [
                            {"type": "string"},
                            {"type": "array", "items": {"type": "string"}, "minItems": 1},
                        ]
                    },
                    "condition": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["target", "value"],
                            "additionalProperties": False,
                            "properties": {
                                "target": {"type": "string", "pattern": "^[a-z0-9_]*\\|[A-Za-z][A-Za-z0-9_]*$"},
                                "op": {"enum": list(_OPS)},
                                "value": {
                                    "oneOf": [
                                        {"type": "string"},
                                        {"type": "array", "items": {"type": "string"}, "minItems": 1},
                                    ]
                                },
                            },
                        },
                    },
                    "obligation_event": {"type": "string"},
                    "obligation_window": {"type": "integer", "minimum": 1},
                    "description": {"type": "string"},
                },
            },
        },
    },
}


def parse_policies(doc: Mapping) -> list[Policy]:
    try:
        jsonschema.validate(doc, POLICY_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path)
        raise PolicyError(f"policy file invalid at {where or '<root>'}: {exc.message}") from None
    policies = [Policy.from_dict(p) for p in doc["policies"]]
    ids = [p.id for p in policies]
    if len(set(ids)) != len(ids):
        raise PolicyError("duplicate policy ids")
    return policies


def load_policies(path: str | Path) -> list[Policy]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PolicyError(f"{path}: not valid JSON ({exc})") from None
    return parse_policies(doc)


def default_policies() -> list[Policy]:
    text = resources.files("helion.data").joinpath("default.pol").read_text(encoding="utf-8")
    return parse_policies(json.loads(text))


# -- checking -----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    policy_id: str
    event_index: int
    snapshot: HomeState
    explanation: str
    trigger_index: int = -1
    evidence: Mapping[str, str] = field(default_factory=dict)
    description: str = ""


def _events_of(scenario) -> tuple[EventToken, ...]:
    if hasattr(scenario, "events"):
        return tuple(scenario.events)
    if hasattr(scenario, "tokens"):
        return tuple(scenario.tokens)
    return tuple(scenario)


def check(scenario, policies: Seq[Policy], initial: HomeState | None = None) -> list[Violation]:
    """Replay ``scenario`` and report every policy violation.

    ``scenario`` may be a generated Scenario, a Sequence or a plain list of
    tokens. Obligations still open when the scenario ends are reported at
    its last event.
    """
    for p in policies:
        if not isinstance(p, Policy):
            raise PolicyError(f"not a policy: {p!r}")
    events = _events_of(scenario)
    snapshots = replay(events, initial)
    found: list[Violation] = []
    pending: list[tuple[Policy, int, int]] = []  # (policy, opened at, deadline)

    for i, (e, state) in enumerate(zip(events, snapshots)):
        still_open = []
        for policy, opened, deadline in pending:
            if policy.obligation_event.matches(e):
                continue
            if i >= deadline:
                found.append(_obligation_violation(policy, opened, i, events, snapshots))
            else:
                still_open.append((policy, opened, deadline))
        pending = still_open

        for policy in policies:
            if not policy.triggered_by(e) or not policy.condition_holds(state):
                continue
            if policy.kind is PolicyKind.STATE_FORBIDDEN:
                found.append(
                    Violation(
                        policy.id, i, state,
                        f"{e} leads to a forbidden state: " + " and ".join(map(str, policy.state_condition)),
                        i, policy.evidence(state), policy.description,
                    )
                )
            elif policy.obligation_event.matches(e):
                continue
            else:
                pending.append((policy, i, i + policy.obligation_window))

    last = len(events) - 1
    for policy, opened, _ in pending:
        found.append(_obligation_violation(policy, opened, last, events, snapshots))
    found.sort(key=lambda v: (v.event_index, v.policy_id, v.trigger_index))
    return found


def _obligation_violation(policy, opened, at, events, snapshots) -> Violation:
    waited = at - opened
    return Violation(
        policy.id, at, snapshots[at],
        f"{events[opened]} at event {opened} requires {policy.obligation_event} "
        f"within {policy.obligation_window} events; none seen in {waited}",
        opened, policy.evidence(snapshots[opened]), policy.description,
    )


# -- reporting ------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    text: str
    records: tuple[dict, ...]

    @property
    def exit_status(self) -> int:
        return 1 if self.records else 0

    def records_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


def render_report(violations: Seq[Violation], scenario, name: str = "scenario") -> Report:
    events = _events_of(scenario)
    ordered = sorted(violations, key=lambda v: (v.event_index, v.policy_id, v.trigger_index))
    if not ordered:
        return Report(f"{name}: no violations ({len(events)} events checked)\n", ())
    lines = [f"{name}: {len(ordered)} violation(s) in {len(events)} events"]
    records = []
    for v in ordered:
        event = str(events[v.event_index])
        lines.append(f"  [{v.event_index}] {v.policy_id}: {v.description or v.explanation}")
        lines.append(f"      event: {event}")
        lines.append(f"      why: {v.explanation}")
        if v.evidence:
            lines.append("      state: " + ", ".join(f"{k}={val}" for k, val in v.evidence.items()))
        records.append(
            {
                "scenario": name,
                "policy_id": v.policy_id,
                "event_index": v.event_index,
                "trigger_index": v.trigger_index,
                "event": event,
                "evidence": dict(v.evidence),
                "explanation": v.explanation,
            }
        )
    return Report("\n".join(lines) + "\n", tuple(records))
