"""Informed scheduling of routines into a month of hourly slots."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence as Seq

from .events import DayRange, ExecutionIndicators, Frequency, Routine, Sequence, TimeRange

HOURS_PER_DAY = 24
DEFAULT_DAYS = 30
DEFAULT_SLOT_CAPACITY = 12
FAVORED_SHARE = 0.8

TIME_RANGE_HOURS: dict[TimeRange, frozenset[int]] = {
    TimeRange.EARLY_MORNING: frozenset(range(5, 8)),
    TimeRange.MORNING: frozenset(range(8, 12)),
    TimeRange.NOON: frozenset(range(12, 14)),
    TimeRange.AFTERNOON: frozenset(range(14, 17)),
    TimeRange.EVENING: frozenset(range(17, 21)),
    TimeRange.NIGHT: frozenset(range(21, 24)),
    TimeRange.LATE_NIGHT: frozenset(range(0, 5)),
    TimeRange.ANYTIME: frozenset(range(24)),
    TimeRange.NOT_SURE: frozenset(range(24)),
}

# (min, max) instances per period, period length in days
FREQUENCY_BANDS: dict[Frequency, tuple[int, int, int]] = {
    Frequency.MANY_PER_DAY: (4, 8, 1),
    Frequency.FEW_PER_DAY: (1, 3, 1),
    Frequency.FEW_PER_WEEK: (1, 4, 7),
    Frequency.FEW_PER_MONTH: (1, 4, 30),
}
# an unsure frequency is treated as a rare event
FREQUENCY_BANDS[Frequency.NOT_SURE] = FREQUENCY_BANDS[Frequency.FEW_PER_MONTH]


class ScheduleError(ValueError):
    pass


def is_weekend(day: int) -> bool:
    # day 0 is a Monday
    return day % 7 >= 5


@dataclass(frozen=True)
class SlotWindow:
    hours: frozenset[int]
    day_filter: DayRange = DayRange.ANYTIME
    unconstrained: bool = False

    def __post_init__(self):
        if not self.hours or not self.hours <= set(range(HOURS_PER_DAY)):
            raise ValueError(f"hours must be a non-empty subset of 0..23, got {sorted(self.hours)}")

    def admits_day(self, day: int) -> bool:
        """Whether ``day`` is one of the favored days for this window."""
        if self.day_filter is DayRange.WEEKDAYS:
            return not is_weekend(day)
        if self.day_filter is DayRange.WEEKENDS:
            return is_weekend(day)
        return True

    @property
    def skewed(self) -> bool:
        return self.day_filter in (DayRange.WEEKDAYS, DayRange.WEEKENDS)


def slot_window_for(indicators: ExecutionIndicators) -> SlotWindow:
    day_filter = indicators.day_range
    if day_filter is DayRange.NOT_SURE:
        day_filter = DayRange.ANYTIME
    return SlotWindow(
        TIME_RANGE_HOURS[indicators.time_range],
        day_filter,
        unconstrained=indicators.time_range is TimeRange.NOT_SURE,
    )


def _period_split(frequency: Frequency, days: int) -> tuple[int, int, int, int, float]:
    lo, hi, period = FREQUENCY_BANDS[Frequency(frequency)]
    full, rest = divmod(days, period)
    return lo, hi, full, period, rest / period


def frequency_band(frequency: Frequency, days: int) -> tuple[int, int]:
    """Inclusive bounds on :func:`instance_count_for` over a horizon."""
    if days < 1:
        raise ValueError("days must be >= 1")
    lo, hi, full, _, frac = _period_split(frequency, days)
    return lo * full + round(lo * frac), hi * full + round(hi * frac)


def instance_count_for(frequency: Frequency, days: int, rng: random.Random) -> int:
    """Draw a count uniformly from the band for every period of the horizon.

    A trailing partial period draws a full-period count and scales it down.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    lo, hi, full, _, frac = _period_split(frequency, days)
    total = sum(rng.randint(lo, hi) for _ in range(full))
    if frac:
        total += round(rng.randint(lo, hi) * frac)
    return total


@dataclass(frozen=True)
class ScheduleTimeline:
    days: int
    slots: tuple[tuple[str, ...], ...]
    rng_seed: int

    def __post_init__(self):
        if len(self.slots) != self.days * HOURS_PER_DAY:
            raise ValueError("slot count must equal days * 24")

    def occupied(self) -> Iterable[tuple[int, int, str]]:
        """Yield ``(day, hour, routine_id)`` in chronological, placement order."""
        for index, ids in enumerate(self.slots):
            day, hour = divmod(index, HOURS_PER_DAY)
            for rid in ids:
                yield day, hour, rid

    def instances(self, routine_id: str) -> list[tuple[int, int]]:
        return [(d, h) for d, h, rid in self.occupied() if rid == routine_id]

    def dump(self) -> str:
        lines = ["day,hour,routine_id"]
        lines += [f"{d},{h},{rid}" for d, h, rid in self.occupied()]
        return "\n".join(lines) + "\n"


class _Placer:
    def __init__(self, days: int, capacity: int, rng: random.Random):
        self.days = days
        self.capacity = capacity
        self.rng = rng
        self.slots: list[list[str]] = [[] for _ in range(days * HOURS_PER_DAY)]

    def free(self, index: int) -> bool:
        return len(self.slots[index]) < self.capacity

    def place_uniform(self, rid: str, candidates: list[int], count: int) -> int:
        """Drop ``count`` instances uniformly over candidate slots with room.

        Returns the number of instances that could not be placed.
        """
        pool = [i for i in candidates if self.free(i)]
        for n in range(count):
            while pool:
                k = self.rng.randrange(len(pool))
                index = pool[k]
                if self.free(index):
                    self.slots[index].append(rid)
                    break
                pool[k] = pool[-1]
                pool.pop()
            else:
                return count - n
        return 0


def schedule(
    routines: Seq[Routine],
    days: int = DEFAULT_DAYS,
    seed: int = 0,
    slot_capacity: int = DEFAULT_SLOT_CAPACITY,
) -> ScheduleTimeline:
    """Place routine instances into ``days * 24`` hourly slots.

    Fixed-time routines go first, then routines with a time-range indicator,
    then routines whose time range is unknown, spread over whatever capacity
    is left. Raises :class:`ScheduleError` naming every routine that could
    not be fully placed.
    """
    if not routines:
        raise ScheduleError("no routines to schedule")
    if days < 1:
        raise ScheduleError("days must be >= 1")
    ids = [r.id for r in routines]
    if len(set(ids)) != len(ids):
        raise ScheduleError("routine ids must be unique within a schedule")

    rng = random.Random(seed)
    placer = _Placer(days, slot_capacity, rng)
    overflow: dict[str, int] = {}

    fixed = [r for r in routines if r.specific_time is not None]
    ranged = [r for r in routines if r.specific_time is None and r.indicators.time_range is not TimeRange.NOT_SURE]
    unsure = [r for r in routines if r.specific_time is None and r.indicators.time_range is TimeRange.NOT_SURE]

    for r in fixed:
        window = slot_window_for(r.indicators)
        admissible = [d for d in range(days) if window.admits_day(d)] or list(range(days))
        freq = r.indicators.frequency
        if freq in (Frequency.MANY_PER_DAY, Frequency.FEW_PER_DAY, Frequency.NOT_SURE):
            chosen = admissible
        else:
            n = min(instance_count_for(freq, days, rng), len(admissible))
            chosen = sorted(rng.sample(admissible, n))
        missed = 0
        for d in chosen:
            index = d * HOURS_PER_DAY + r.specific_time
            if placer.free(index):
                placer.slots[index].append(r.id)
            else:
                missed += 1
        if missed:
            overflow[r.id] = missed

    for r in ranged + unsure:
        window = slot_window_for(r.indicators)
        count = instance_count_for(r.indicators.frequency, days, rng)
        slots = [d * HOURS_PER_DAY + h for d in range(days) for h in sorted(window.hours)]
        if window.skewed:
            favored = [i for i in slots if window.admits_day(i // HOURS_PER_DAY)]
            others = [i for i in slots if not window.admits_day(i // HOURS_PER_DAY)]
            if not favored or not others:
                missed = placer.place_uniform(r.id, favored or others, count)
            else:
                n_fav = math.ceil(FAVORED_SHARE * count)
                missed = placer.place_uniform(r.id, favored, n_fav)
                missed += placer.place_uniform(r.id, others, count - n_fav)
        else:
            missed = placer.place_uniform(r.id, slots, count)
        if missed:
            overflow[r.id] = missed

    if overflow:
        detail = ", ".join(f"{rid} ({n} unplaced)" for rid, n in overflow.items())
        raise ScheduleError(f"slot capacity {slot_capacity} exceeded; over-constrained routines: {detail}")
    return ScheduleTimeline(days, tuple(tuple(s) for s in placer.slots), seed)


def extract_sequence(timeline: ScheduleTimeline, routines: Seq[Routine], origin: str = "") -> Sequence:
    """Flatten the timeline into trigger and action tokens in slot order."""
    by_id = {r.id: r for r in routines}
    tokens = []
    for _, _, rid in timeline.occupied():
        try:
            routine = by_id[rid]
        except KeyError:
            raise ScheduleError(f"timeline references unknown routine {rid!r}") from None
        tokens.extend(routine.triggers)
        tokens.extend(routine.actions)
    return Sequence(tuple(tokens), origin)
