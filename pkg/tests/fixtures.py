"""Shared test fixtures: small fixed corpora and the policy scenario pairs."""

from helion.events import parse_line

# token strings are kept short; each is a valid wire-format event token
A, B, C, D, E = "a|x|ON", "b|x|ON", "c|y|OFF", "d|z|OPEN", "|locationMode|AWAY"

ORACLE_CORPORA = [
    [[A, B, A, B]],
    [[A, B, C, A, B, C, A, B], [C, A, A], [B]],
    [[A, A, A, A, A, B]] * 2 + [[B, B, C]],
    [[A, B, C, D, E], [E, D, C, B, A], [A, C, E], [B, D], [A, B, C, D, E]],
    [[A, B, A, C, A, D, A, E, B, C], [D, E, A, B], [C, C, D, D, E, E, A]],
]


def as_sequences(corpus):
    return [parse_line(" ".join(s)) for s in corpus]


# (policy id, positive scenario, negative scenario); the negative narrowly
# misses the state condition or satisfies the obligation
POLICY_FIXTURES = [
    ("Pol_1", ["gas_stove|switch|ON", "|locationMode|AWAY"],
              ["gas_stove|switch|ON", "|locationMode|HOME"]),
    ("Pol_2", ["smoke_detector|smoke|DETECTED", "gas_stove|switch|ON"],
              ["smoke_detector|smoke|CLEAR", "gas_stove|switch|ON"]),
    ("Pol_3", ["|locationMode|HOME", "camera|switch|ON"],
              ["|locationMode|AWAY", "camera|switch|ON"]),
    ("Pol_4", ["|locationMode|AWAY", "door_sensor|contact|OPEN", "tv|switch|OFF", "fan|switch|OFF", "heater|switch|OFF"],
              ["|locationMode|AWAY", "door_sensor|contact|OPEN", "tv|switch|OFF", "|notification|SENT"]),
    ("Pol_5", ["|locationMode|VACATION", "window_sensor|contact|OPEN"],
              ["|locationMode|HOME", "window_sensor|contact|OPEN"]),
    ("Pol_6", ["water_valve|valve|CLOSED", "fire_sprinkler|switch|ON"],
              ["water_valve|valve|OPEN", "fire_sprinkler|switch|ON"]),
    ("Pol_7", ["co_detector|carbonMonoxide|DETECTED", "air_purifier|switch|OFF"],
              ["co_detector|carbonMonoxide|CLEAR", "air_purifier|switch|OFF"]),
    ("Pol_8", ["|locationMode|AWAY", "window_shade|windowShade|OPEN"],
              ["|locationMode|AWAY", "window_shade|windowShade|CLOSED"]),
    ("Pol_9", ["|locationMode|AWAY", "door_lock|lock|UNLOCKED"],
              ["|locationMode|HOME", "door_lock|lock|UNLOCKED"]),
    ("Pol_10", ["door_lock|lock|UNLOCKED", "|locationMode|AWAY", "tv|switch|OFF", "fan|switch|OFF", "light_bulb|switch|OFF"],
               ["door_lock|lock|UNLOCKED", "|locationMode|AWAY", "door_lock|lock|LOCKED"]),
    ("Pol_11", ["sleep_monitor|sleeping|DETECTED", "door_lock|lock|UNLOCKED"],
               ["sleep_monitor|sleeping|NOT_DETECTED", "door_lock|lock|UNLOCKED"]),
    ("Pol_12", ["sleep_monitor|sleeping|DETECTED", "garage_door|door|OPEN"],
               ["sleep_monitor|sleeping|DETECTED", "garage_door|door|CLOSED"]),
    ("Pol_13", ["sleep_monitor|sleeping|DETECTED", "induction_cooktop|switch|ON"],
               ["sleep_monitor|sleeping|NOT_DETECTED", "induction_cooktop|switch|ON"]),
    ("Pol_14", ["|locationMode|VACATION", "garage_door|door|OPEN"],
               ["|locationMode|NIGHT", "garage_door|door|OPEN"]),
    ("Pol_15", ["glass_break_sensor|glassBreak|DETECTED", "tv|switch|OFF", "fan|switch|OFF", "heater|switch|OFF"],
               ["glass_break_sensor|glassBreak|DETECTED", "tv|switch|OFF", "fan|switch|OFF", "|notification|SENT"]),
    ("Pol_16", ["security_alarm|alarm|OFF", "|locationMode|AWAY"],
               ["security_alarm|alarm|ON", "|locationMode|AWAY"]),
    ("Pol_17", ["smoke_detector|smoke|CLEAR", "fire_sprinkler|switch|ON"],
               ["smoke_detector|smoke|DETECTED", "fire_sprinkler|switch|ON"]),
]

# the three worked examples: (policy id, scenario, index of the violating event)
WORKED_EXAMPLES = [
    ("Pol_1", ["gas_stove|switch|ON", "|locationMode|AWAY"], 1),
    ("Pol_2", ["smoke_detector|smoke|DETECTED", "gas_stove|switch|ON"], 1),
    ("Pol_3", ["|locationMode|HOME", "camera|switch|ON"], 1),
]
