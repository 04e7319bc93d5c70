"""Loading and validating routine files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import jsonschema

from .events import (
    DeviceCatalog,
    ExecutionIndicators,
    RangeMap,
    Routine,
    SynonymTable,
    TokenizeError,
    load_abstraction_map,
    tokenize_routine,
)

_EVENT = {
    "type": "object",
    "required": ["attribute", "value"],
    "additionalProperties": False,
    "properties": {
        "device": {"type": ["string", "null"]},
        "attribute": {"type": "string", "minLength": 1},
        "value": {"type": ["string", "number"]},
    },
}

ROUTINE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "helion routine file",
    "type": "object",
    "required": ["routines"],
    "properties": {
        "format": {"const": "helion-routines/1"},
        "routines": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "triggers", "actions"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "user": {"type": "string", "minLength": 1},
                    "triggers": {"type": "array", "items": _EVENT, "minItems": 1},
                    "actions": {"type": "array", "items": _EVENT, "minItems": 1},
                    "indicators": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "time_range": {"type": "string"},
                            "day_range": {"type": "string"},
                            "frequency": {"type": "string"},
                        },
                    },
                    "specific_time": {"type": "integer", "minimum": 0, "maximum": 23},
                },
            },
        },
    },
}

INDICATOR_FIELDS = ("time_range", "day_range", "frequency")


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning" | "info"
    message: str
    record: int | None = None

    def __str__(self) -> str:
        where = f"record {self.record}: " if self.record is not None else ""
        return f"{self.severity}: {where}{self.message}"


@dataclass
class IngestResult:
    routines: list[Routine]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    def by_user(self) -> dict[str, list[Routine]]:
        users: dict[str, list[Routine]] = {}
        for r in self.routines:
            users.setdefault(r.user, []).append(r)
        return {u: users[u] for u in sorted(users)}


def percent(part: int, whole: int) -> str:
    """Percentage truncated (not rounded) to two decimals."""
    hundredths = part * 10000 // whole if whole else 0
    return f"{hundredths // 100}.{hundredths % 100:02d}%"


def indicator_tally(routines: list[Routine]) -> list[Diagnostic]:
    out = []
    total = len(routines)
    for name in INDICATOR_FIELDS:
        values = [getattr(r.indicators, name).value for r in routines]
        buckets = {
            "specific": sum(v not in ("ANYTIME", "NOT_SURE") for v in values),
            "anytime": values.count("ANYTIME"),
            "not_sure": values.count("NOT_SURE"),
        }
        for bucket, n in buckets.items():
            out.append(Diagnostic("info", f"{name} {bucket}: {n} ({percent(n, total)})"))
    return out


def ingest_records(
    doc: Mapping,
    catalog: DeviceCatalog | None = None,
    synonyms: SynonymTable | None = None,
    abstraction_map: Mapping[str, RangeMap] | None = None,
) -> IngestResult:
    validator = jsonschema.Draft202012Validator(ROUTINE_SCHEMA)
    problems = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if problems:
        lines = []
        for e in problems:
            path = list(e.absolute_path)
            where = f"record {path[1]}" if len(path) > 1 and path[0] == "routines" else "file"
            lines.append(f"{where}: {e.message}")
        raise IngestError("routine file failed schema validation:\n  " + "\n  ".join(lines))

    catalog = catalog or DeviceCatalog.default()
    records = doc["routines"]
    seen: dict[str, int] = {}
    for i, rec in enumerate(records):
        if rec["id"] in seen:
            raise IngestError(f"record {i}: duplicate routine id {rec['id']!r} (first at record {seen[rec['id']]})")
        seen[rec["id"]] = i

    routines, diags = [], []
    for i, rec in enumerate(records):
        raw_ind = rec.get("indicators", {})
        for name in INDICATOR_FIELDS:
            if name not in raw_ind:
                diags.append(Diagnostic("warning", f"{name} omitted, treated as NOT_SURE", i))
        try:
            indicators = ExecutionIndicators(**{n: raw_ind.get(n, "NOT_SURE") for n in INDICATOR_FIELDS})
        except ValueError as exc:
            diags.append(Diagnostic("error", f"bad indicator: {exc}", i))
            continue
        try:
            routine = tokenize_routine(
                rec["triggers"],
                rec["actions"],
                abstraction_map,
                catalog=catalog,
                synonyms=synonyms,
                routine_id=rec["id"],
                indicators=indicators,
                specific_time=rec.get("specific_time"),
                user=rec.get("user", "user"),
            )
        except (TokenizeError, ValueError) as exc:
            diags.append(Diagnostic("error", str(exc), i))
            continue
        routines.append(routine)
    diags.extend(indicator_tally(routines))
    return IngestResult(routines, diags)


def ingest(
    routine_file: str | Path,
    synonym_table: str | Path | None = None,
    abstraction_map: str | Path | None = None,
    device_map: str | Path | None = None,
) -> IngestResult:
    try:
        doc = json.loads(Path(routine_file).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise IngestError(f"{routine_file}: not valid JSON ({exc})") from None
    return ingest_records(
        doc,
        catalog=DeviceCatalog.load(device_map) if device_map else None,
        synonyms=SynonymTable.load(synonym_table) if synonym_table else None,
        abstraction_map=load_abstraction_map(abstraction_map) if abstraction_map else None,
    )


def dump_routines(routines: list[Routine]) -> str:
    """Normalized routines as JSON, stable byte-for-byte."""
    doc = {"format": "helion-routines-normalized/1", "routines": [r.to_dict() for r in routines]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
