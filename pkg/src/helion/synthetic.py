"""Synthetic routine sets for demos and desk-scale experiments.

Routines are drawn from a fixed pool of plausible smart-home automations so
that different synthetic users share vocabulary, the way real households do.
"""

from __future__ import annotations

import random

from .events import DayRange, Frequency, TimeRange

# (triggers, actions, time_range, day_range, frequency, specific_time)
POOL = [
    (["motion_sensor|motion|DETECTED"], ["light_bulb|switch|ON"], "ANYTIME", "ANYTIME", "MANY_PER_DAY", None),
    (["motion_sensor|motion|INACTIVE"], ["light_bulb|switch|OFF"], "ANYTIME", "ANYTIME", "MANY_PER_DAY", None),
    (["door_sensor|contact|OPEN"], ["porch_light|switch|ON"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["|locationMode|AWAY"], ["door_lock|lock|LOCKED"], "MORNING", "WEEKDAYS", "FEW_PER_DAY", None),
    (["|locationMode|HOME"], ["door_lock|lock|UNLOCKED"], "EVENING", "WEEKDAYS", "FEW_PER_DAY", None),
    (["|locationMode|AWAY"], ["camera|switch|ON"], "MORNING", "WEEKDAYS", "FEW_PER_DAY", None),
    (["|locationMode|HOME"], ["camera|switch|OFF"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["|locationMode|AWAY"], ["security_alarm|alarm|ON"], "MORNING", "ANYTIME", "FEW_PER_DAY", None),
    (["|locationMode|HOME"], ["security_alarm|alarm|OFF"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["presence_sensor|presence|PRESENT"], ["|locationMode|HOME"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["presence_sensor|presence|NOT_PRESENT"], ["|locationMode|AWAY"], "MORNING", "ANYTIME", "FEW_PER_DAY", None),
    (["sleep_monitor|sleeping|DETECTED"], ["door_lock|lock|LOCKED"], "NIGHT", "ANYTIME", "FEW_PER_DAY", None),
    (["sleep_monitor|sleeping|DETECTED"], ["light_bulb|switch|OFF", "tv|switch|OFF"], "NIGHT", "ANYTIME", "FEW_PER_DAY", None),
    (["sleep_monitor|sleeping|NOT_DETECTED"], ["coffee_maker|switch|ON"], "EARLY_MORNING", "WEEKDAYS", "FEW_PER_DAY", None),
    (["window_shade|windowShade|OPEN"], ["light_bulb|switch|OFF"], "MORNING", "ANYTIME", "FEW_PER_DAY", None),
    (["door_lock|lock|UNLOCKED"], ["light_bulb|switch|ON"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["smoke_detector|smoke|DETECTED"], ["fire_sprinkler|switch|ON", "water_valve|valve|OPEN"], "NOT_SURE", "NOT_SURE", "NOT_SURE", None),
    (["smoke_detector|smoke|DETECTED"], ["|notification|SENT"], "NOT_SURE", "NOT_SURE", "NOT_SURE", None),
    (["co_detector|carbonMonoxide|DETECTED"], ["air_purifier|switch|ON"], "NOT_SURE", "NOT_SURE", "NOT_SURE", None),
    (["leak_sensor|water|WET"], ["water_valve|valve|CLOSED"], "NOT_SURE", "NOT_SURE", "FEW_PER_MONTH", None),
    (["glass_break_sensor|glassBreak|DETECTED"], ["security_alarm|alarm|ON"], "NOT_SURE", "NOT_SURE", "NOT_SURE", None),
    (["doorbell|button|PUSHED"], ["camera|image|CAPTURED"], "AFTERNOON", "ANYTIME", "FEW_PER_DAY", None),
    (["door_sensor|contact|OPEN"], ["|notification|SENT"], "ANYTIME", "ANYTIME", "FEW_PER_DAY", None),
    (["window_sensor|contact|OPEN"], ["air_conditioner|switch|OFF"], "AFTERNOON", "ANYTIME", "FEW_PER_WEEK", None),
    (["weather_sensor|temperature|85"], ["air_conditioner|switch|ON"], "AFTERNOON", "ANYTIME", "FEW_PER_WEEK", None),
    (["weather_sensor|temperature|60"], ["heater|switch|ON"], "EARLY_MORNING", "ANYTIME", "FEW_PER_WEEK", None),
    (["thermostat|temperature|65"], ["thermostat|thermostatMode|HEAT"], "NIGHT", "ANYTIME", "FEW_PER_WEEK", None),
    (["gas_stove|switch|ON"], ["fan|switch|ON"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["gas_stove|switch|OFF"], ["fan|switch|OFF"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["induction_cooktop|switch|ON"], ["fan|switch|ON"], "NOON", "WEEKENDS", "FEW_PER_WEEK", None),
    (["washer|switch|OFF"], ["dryer|switch|ON"], "AFTERNOON", "WEEKENDS", "FEW_PER_WEEK", None),
    (["dryer|switch|OFF"], ["|notification|SENT"], "AFTERNOON", "WEEKENDS", "FEW_PER_WEEK", None),
    (["dishwasher|switch|OFF"], ["|notification|SENT"], "NIGHT", "ANYTIME", "FEW_PER_WEEK", None),
    (["garage_door|door|OPEN"], ["light_bulb|switch|ON"], "EVENING", "WEEKDAYS", "FEW_PER_DAY", None),
    (["|locationMode|AWAY"], ["garage_door|door|CLOSED"], "MORNING", "WEEKDAYS", "FEW_PER_DAY", None),
    (["|locationMode|VACATION"], ["irrigation_system|switch|ON"], "EARLY_MORNING", "ANYTIME", "FEW_PER_MONTH", None),
    (["|locationMode|NIGHT"], ["porch_light|switch|OFF"], "LATE_NIGHT", "ANYTIME", "FEW_PER_DAY", None),
    (["music_player|switch|ON"], ["light_bulb|level|40"], "EVENING", "WEEKENDS", "FEW_PER_WEEK", None),
    (["tv|switch|ON"], ["window_shade|windowShade|CLOSED"], "EVENING", "ANYTIME", "FEW_PER_DAY", None),
    (["electric_blanket|switch|ON"], ["heater|switch|OFF"], "NIGHT", "ANYTIME", "FEW_PER_WEEK", None),
    (["robot_vacuum|switch|OFF"], ["|notification|SENT"], "NOON", "WEEKDAYS", "FEW_PER_WEEK", None),
    (["|locationMode|AWAY"], ["robot_vacuum|switch|ON"], "NOON", "WEEKDAYS", "FEW_PER_WEEK", None),
    (["oven|switch|ON"], ["smart_plug|switch|OFF"], "EVENING", "ANYTIME", "FEW_PER_WEEK", None),
    (["contact_sensor|contact|OPEN"], ["speaker|switch|ON"], "AFTERNOON", "ANYTIME", "FEW_PER_WEEK", None),
    (["|notification|SENT"], ["light_bulb|switch|ON"], "ANYTIME", "ANYTIME", "FEW_PER_MONTH", None),
    ([], ["window_shade|windowShade|OPEN"], "MORNING", "ANYTIME", "FEW_PER_DAY", 8),
    ([], ["window_shade|windowShade|CLOSED"], "NIGHT", "ANYTIME", "FEW_PER_DAY", 21),
    ([], ["coffee_maker|switch|OFF"], "MORNING", "WEEKDAYS", "FEW_PER_DAY", 9),
]


DEFAULT_USERS = 10
DEFAULT_ROUTINES_PER_USER = 25


def _event(spec: str) -> dict:
    device, attribute, value = spec.split("|")
    return {"device": device or None, "attribute": attribute, "value": value}


def _record(template, user: str, index: int) -> dict:
    triggers, actions, time_range, day_range, frequency, specific = template
    rec = {
        "id": f"{user}-r{index:02d}",
        "user": user,
        # clock-driven routines fire on a home-level time event
        "triggers": [_event(t) for t in (triggers or [f"|clock|AT_{specific:02d}00"])],
        "actions": [_event(a) for a in actions],
        "indicators": {"time_range": time_range, "day_range": day_range, "frequency": frequency},
    }
    if specific is not None:
        rec["specific_time"] = specific
    return rec


def make_routine_file(
    users: int = DEFAULT_USERS,
    routines_per_user: int = DEFAULT_ROUTINES_PER_USER,
    seed: int = 0,
) -> dict:
    """A routine-file document for ``users`` synthetic households."""
    if routines_per_user > len(POOL):
        raise ValueError(f"pool only has {len(POOL)} routines")
    rng = random.Random(seed)
    records = []
    for u in range(users):
        user = f"user{u:02d}"
        picks = sorted(rng.sample(range(len(POOL)), routines_per_user))
        records += [_record(POOL[p], user, i) for i, p in enumerate(picks)]
    return {"format": "helion-routines/1", "routines": records}


_TIME_RANGES = [t.value for t in TimeRange]
_DAY_RANGES = [d.value for d in DayRange]
_SLOW = [Frequency.FEW_PER_DAY.value, Frequency.FEW_PER_WEEK.value,
         Frequency.FEW_PER_MONTH.value, Frequency.NOT_SURE.value]


def random_routine_file(rng: random.Random, size: int, max_many_per_day: int = 2) -> dict:
    """Pool routines with randomized indicators, kept within slot capacity."""
    records = []
    many = 0
    for i, p in enumerate(rng.sample(range(len(POOL)), size)):
        triggers, actions, *_, pool_specific = POOL[p]
        freq = rng.choice(_SLOW)
        time_range = rng.choice(_TIME_RANGES)
        if many < max_many_per_day and rng.random() < 0.15:
            freq, time_range, many = Frequency.MANY_PER_DAY.value, "ANYTIME", many + 1
        specific = rng.randrange(24) if rng.random() < 0.1 else None
        if not triggers:
            specific = pool_specific
        template = (triggers, actions, time_range, rng.choice(_DAY_RANGES), freq, specific)
        records.append(_record(template, "rand", i))
    return {"format": "helion-routines/1", "routines": records}
