import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from helion.events import ExecutionIndicators, Frequency, Routine, parse_token
from helion.ingest import ingest_records
from helion.scheduler import (
    ScheduleError,
    ScheduleTimeline,
    extract_sequence,
    frequency_band,
    instance_count_for,
    is_weekend,
    schedule,
    slot_window_for,
)
from helion.synthetic import random_routine_file


def routine(rid, trig="motion_sensor|motion|DETECTED", acts=("light_bulb|switch|ON",),
            time="ANYTIME", day="ANYTIME", freq="FEW_PER_DAY", at=None):
    return Routine(
        rid,
        (parse_token(trig),),
        tuple(parse_token(a) for a in acts),
        ExecutionIndicators(time, day, freq),
        specific_time=at,
    )


def test_night_window():
    assert slot_window_for(ExecutionIndicators("NIGHT")).hours == {21, 22, 23}


def test_anytime_window():
    w = slot_window_for(ExecutionIndicators("ANYTIME"))
    assert w.hours == set(range(24)) and not w.unconstrained


def test_not_sure_window_is_unconstrained():
    w = slot_window_for(ExecutionIndicators("NOT_SURE"))
    assert w.hours == set(range(24)) and w.unconstrained


def test_weekend_filter():
    w = slot_window_for(ExecutionIndicators("ANYTIME", "WEEKENDS"))
    assert [d for d in range(14) if w.admits_day(d)] == [5, 6, 12, 13]
    assert all(w.admits_day(d) == is_weekend(d) for d in range(30))


@pytest.mark.parametrize("time,hours", [
    ("EARLY_MORNING", range(5, 8)),
    ("MORNING", range(8, 12)),
    ("NOON", range(12, 14)),
    ("AFTERNOON", range(14, 17)),
    ("EVENING", range(17, 21)),
    ("LATE_NIGHT", range(0, 5)),
])
def test_time_range_table(time, hours):
    assert slot_window_for(ExecutionIndicators(time)).hours == set(hours)


def test_few_per_month_seed_sweep():
    counts = {instance_count_for(Frequency.FEW_PER_MONTH, 30, random.Random(s)) for s in range(500)}
    assert counts == {1, 2, 3, 4}


def test_many_per_day_band():
    for s in range(200):
        assert 120 <= instance_count_for(Frequency.MANY_PER_DAY, 30, random.Random(s)) <= 240
    assert frequency_band(Frequency.MANY_PER_DAY, 30) == (120, 240)


def test_days_zero_rejected():
    with pytest.raises(ValueError):
        instance_count_for(Frequency.FEW_PER_DAY, 0, random.Random(0))
    with pytest.raises(ScheduleError):
        schedule([routine("r")], days=0)


@given(st.sampled_from(list(Frequency)), st.integers(1, 90), st.integers(0, 2**32))
def test_count_within_band(freq, days, seed):
    lo, hi = frequency_band(freq, days)
    assert lo <= instance_count_for(freq, days, random.Random(seed)) <= hi


def test_specific_time_daily():
    r = routine("blinds", trig="|clock|AT_0800", acts=("window_shade|windowShade|OPEN",), at=8)
    inst = schedule([r], days=30, seed=3).instances("blinds")
    assert len(inst) == 30
    assert {h for _, h in inst} == {8}
    assert sorted(d for d, _ in inst) == list(range(30))


def test_night_containment():
    t = schedule([routine("n", time="NIGHT", freq="MANY_PER_DAY")], seed=1)
    assert t.instances("n")
    assert all(h in (21, 22, 23) for _, h in t.instances("n"))


def test_deterministic():
    rs = [routine("a", time="MORNING"), routine("b", time="NOT_SURE", freq="NOT_SURE"),
          routine("c", day="WEEKDAYS", freq="FEW_PER_WEEK")]
    assert schedule(rs, seed=11) == schedule(rs, seed=11)
    assert schedule(rs, seed=11).dump() != schedule(rs, seed=12).dump()


def test_day_skew():
    t = schedule([routine("w", day="WEEKDAYS", freq="MANY_PER_DAY")], seed=5)
    days = [d for d, _ in t.instances("w")]
    share = sum(not is_weekend(d) for d in days) / len(days)
    assert 0.75 <= share <= 0.85


def test_capacity_error_lists_routines():
    rs = [routine(f"r{i}", time="NOON", freq="MANY_PER_DAY") for i in range(3)]
    with pytest.raises(ScheduleError, match="over-constrained"):
        schedule(rs, days=2, slot_capacity=1)


def test_duplicate_ids_rejected():
    with pytest.raises(ScheduleError):
        schedule([routine("a"), routine("a")])


def test_extract_single_instance():
    r = routine("m")
    slots = [()] * 24
    slots[9] = ("m",)
    t = ScheduleTimeline(1, tuple(slots), 0)
    assert [str(x) for x in extract_sequence(t, [r]).tokens] == [
        "motion_sensor|motion|DETECTED", "light_bulb|switch|ON"]


def test_extract_empty_timeline():
    t = ScheduleTimeline(1, ((),) * 24, 0)
    with pytest.raises(ValueError):
        extract_sequence(t, [routine("m")])


def test_token_count_five_routines():
    rs = [
        routine("a"),
        routine("b", trig="|locationMode|AWAY", acts=("door_lock|lock|LOCKED", "camera|switch|ON"), time="MORNING"),
        routine("c", trig="tv|switch|ON", acts=("window_shade|windowShade|CLOSED",), freq="FEW_PER_WEEK"),
        routine("d", trig="|clock|AT_0900", acts=("coffee_maker|switch|ON",), at=9),
        routine("e", trig="leak_sensor|water|WET", acts=("water_valve|valve|CLOSED",),
                time="NOT_SURE", freq="NOT_SURE"),
    ]
    t = schedule(rs, seed=2)
    per = Counter(rid for _, _, rid in t.occupied())
    expected = sum(per[r.id] * (len(r.triggers) + len(r.actions)) for r in rs)
    assert len(extract_sequence(t, rs)) == expected


def test_dump_format():
    t = schedule([routine("a", freq="FEW_PER_MONTH")], seed=0)
    lines = t.dump().splitlines()
    assert lines[0] == "day,hour,routine_id"
    assert len(lines) - 1 == len(t.instances("a"))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_random_sets_respect_windows_and_bands(seed):
    rng = random.Random(seed)
    routines = ingest_records(random_routine_file(rng, rng.randint(5, 25))).routines
    t = schedule(routines, seed=seed)
    for r in routines:
        inst = t.instances(r.id)
        if r.specific_time is not None:
            assert {h for _, h in inst} <= {r.specific_time}
            continue
        assert {h for _, h in inst} <= slot_window_for(r.indicators).hours
        lo, hi = frequency_band(r.indicators.frequency, 30)
        assert lo <= len(inst) <= hi
