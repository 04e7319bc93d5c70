import pytest
from hypothesis import given, strategies as st

from helion.events import (
    UNK,
    DeviceCatalog,
    EventToken,
    ExecutionIndicators,
    RangeMap,
    Routine,
    Sequence,
    SynonymTable,
    TokenizeError,
    TokenParseError,
    build_vocabulary,
    format_corpus,
    parse_line,
    parse_token,
    read_corpus,
    serialize_token,
    tokenize_routine,
)

ident = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)
attr = st.from_regex(r"[a-z][A-Za-z0-9_]{0,8}", fullmatch=True)
action = st.from_regex(r"[A-Z][A-Z0-9_]{0,8}", fullmatch=True)
atomic = st.builds(EventToken, st.one_of(st.none(), ident), attr, action)
tokens = st.one_of(
    atomic,
    st.lists(atomic, min_size=2, max_size=4, unique=True).map(EventToken.conjunction),
)


def test_parse_device_token():
    t = parse_token("door_lock|lock|LOCKED")
    assert (t.device, t.attribute, t.action) == ("door_lock", "lock", "LOCKED")
    assert not t.is_conjunction


def test_parse_home_level_token():
    t = parse_token("|locationMode|HOME")
    assert t.device is None
    assert (t.attribute, t.action) == ("locationMode", "HOME")


@pytest.mark.parametrize("text,segment", [
    ("door_lock|lock", "3 '|'-separated segments"),
    ("Door|lock|LOCKED", "device segment"),
    ("door|lock|locked", "action segment"),
    ("door||LOCKED", "attribute segment"),
])
def test_parse_errors_name_the_segment(text, segment):
    with pytest.raises(TokenParseError, match=segment):
        parse_token(text)


def test_serialize():
    assert serialize_token(EventToken("motion_sensor", "motion", "DETECTED")) == "motion_sensor|motion|DETECTED"


def test_conjunction_sorted_by_device():
    t = EventToken.conjunction([
        EventToken("light_bulb", "switch", "ON"),
        EventToken("camera", "switch", "OFF"),
    ])
    assert str(t) == "camera|switch|OFF&light_bulb|switch|ON"


def test_home_level_parts_sort_last():
    t = EventToken.conjunction([
        EventToken(None, "locationMode", "AWAY"),
        EventToken("tv", "switch", "OFF"),
        EventToken("camera", "switch", "ON"),
    ])
    assert str(t) == "camera|switch|ON&tv|switch|OFF&|locationMode|AWAY"


def test_conjunction_requires_canonical_order():
    with pytest.raises(ValueError):
        EventToken(None, "", "", (EventToken("tv", "switch", "ON"), EventToken("camera", "switch", "ON")))


@given(tokens)
def test_round_trip(t):
    assert parse_token(serialize_token(t)) == t


@given(st.lists(atomic, min_size=2, max_size=5, unique=True), st.randoms())
def test_conjunction_permutation_invariant(parts, rnd):
    shuffled = parts[:]
    rnd.shuffle(shuffled)
    assert str(EventToken.conjunction(parts)) == str(EventToken.conjunction(shuffled))


def test_tokenize_motion_light():
    r = tokenize_routine(
        [{"device": "motion sensor", "attribute": "motion", "value": "detected"}],
        [{"device": "light bulb", "attribute": "switch", "value": "on"}],
    )
    assert [str(t) for t in r.triggers] == ["motion_sensor|motion|DETECTED"]
    assert [str(a) for a in r.actions] == ["light_bulb|switch|ON"]


@pytest.mark.parametrize("value,label", [(65, "LOW"), (69.9, "LOW"), (70, "MEDIUM"), (79, "MEDIUM"), (80, "HIGH")])
def test_temperature_abstraction(value, label):
    ranges = {"temperature": RangeMap((70, 80), ("LOW", "MEDIUM", "HIGH"))}
    r = tokenize_routine(
        [{"device": "thermostat", "attribute": "temperature", "value": value}],
        [{"device": "heater", "attribute": "switch", "value": "ON"}],
        ranges,
    )
    assert str(r.triggers[0]) == f"thermostat|temperature|{label}"


def test_value_outside_ranges():
    ranges = {"temperature": RangeMap((70, 80), ("LOW", "MEDIUM", "HIGH"), lower=0, upper=120)}
    with pytest.raises(TokenizeError):
        tokenize_routine(
            [{"device": "thermostat", "attribute": "temperature", "value": 500}],
            [{"device": "heater", "attribute": "switch", "value": "ON"}],
            ranges,
        )


def test_simultaneous_actions_collapse():
    r = tokenize_routine(
        [{"device": None, "attribute": "locationMode", "value": "away"}],
        [
            {"device": "light_bulb", "attribute": "switch", "value": "off"},
            {"device": "camera", "attribute": "switch", "value": "on"},
        ],
    )
    assert len(r.actions) == 1
    assert str(r.actions[0]) == "camera|switch|ON&light_bulb|switch|OFF"


def test_unknown_attribute():
    with pytest.raises(TokenizeError, match="unknown attribute"):
        tokenize_routine(
            [{"device": "door_lock", "attribute": "colour", "value": "red"}],
            [{"device": "light_bulb", "attribute": "switch", "value": "on"}],
        )


def test_synonyms_resolve_near_duplicates():
    syn = SynonymTable(devices={"lightbulb": "light_bulb"}, values={"captured": "DETECTED"})
    r = tokenize_routine(
        [{"device": "motion_sensor", "attribute": "motion", "value": "captured"}],
        [{"device": "Lightbulb", "attribute": "switch", "value": "on"}],
        synonyms=syn,
    )
    assert str(r.triggers[0]) == "motion_sensor|motion|DETECTED"
    assert str(r.actions[0]) == "light_bulb|switch|ON"


def test_attribute_case_resolves_to_catalog():
    catalog = DeviceCatalog.default()
    assert catalog.resolve_attribute(None, "locationmode") == "locationMode"


def test_routine_triggers_and_actions_disjoint():
    t = parse_token("tv|switch|ON")
    with pytest.raises(ValueError):
        Routine("r", (t,), (t,))


def test_routine_dict_round_trip():
    r = Routine(
        "r1",
        (parse_token("motion_sensor|motion|DETECTED"),),
        (parse_token("light_bulb|switch|ON"),),
        ExecutionIndicators("NIGHT", "WEEKENDS", "FEW_PER_WEEK"),
        specific_time=None,
        user="alice",
    )
    assert Routine.from_dict(r.to_dict()) == r


def test_vocabulary_set_semantics():
    a, b = parse_token("a|x|ON"), parse_token("b|x|ON")
    v = build_vocabulary([Sequence((a, b, a))])
    assert len(v) == 3
    assert set(v.tokens) == {"a|x|ON", "b|x|ON", UNK}


def test_vocabulary_permutation_invariant():
    s1 = parse_line("a|x|ON b|x|ON")
    s2 = parse_line("c|x|ON |locationMode|AWAY")
    assert build_vocabulary([s1, s2]).as_dict() == build_vocabulary([s2, s1]).as_dict()


def test_vocabulary_conjunctions_are_distinct_entries():
    a, b = parse_token("a|x|ON"), parse_token("b|x|ON")
    ab = EventToken.conjunction([a, b])
    v = build_vocabulary([Sequence((a, ab, b))])
    assert len({v.index(a), v.index(b), v.index(ab)}) == 3
    assert v.index(ab) != v.unk_index


def test_vocabulary_unknown_maps_to_unk():
    v = build_vocabulary([parse_line("a|x|ON")])
    assert v.index("zz|x|ON") == v.unk_index


def test_empty_corpus_and_sequence():
    with pytest.raises(ValueError):
        build_vocabulary([])
    with pytest.raises(ValueError):
        Sequence(())


def test_corpus_file_round_trip(tmp_path):
    seqs = [parse_line("a|x|ON b|x|OFF"), parse_line("|locationMode|AWAY a|x|ON&b|x|OFF")]
    path = tmp_path / "c.txt"
    path.write_text("# comment\n" + format_corpus(seqs) + "\n")
    back = read_corpus(path)
    assert [s.tokens for s in back] == [s.tokens for s in seqs]
