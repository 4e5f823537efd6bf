import json

import pytest

from rpa_rm import records
from rpa_rm.bounds import bound_report


def test_csv_roundtrip_bound_record():
    rec = records.stamp(bound_report(8, 3, 0.3).as_record(), "bound")
    rec["channel"] = None
    text = records.to_csv([rec], "bound")
    back = records.from_csv(text, "bound")[0]
    for name, _ in records.BOUND_COLUMNS:
        assert back[name] == rec[name], name


def test_json_matches_csv_values():
    rec = records.stamp(bound_report(6, 2, 0.1).as_record(), "bound")
    from_json = records.from_json(records.to_json([rec], "bound"))[0]
    from_csv = records.from_csv(records.to_csv([rec], "bound"), "bound")[0]
    assert list(from_json) == [name for name, _ in records.BOUND_COLUMNS]
    assert from_json == from_csv


def test_float_repr_is_exact():
    rec = {"m": 5, "Z": 0.1 + 0.2, "channel": "x", "lambda": 1 / 3, "threshold": 2.0, "r": None, "r_below_threshold": None}
    back = records.from_csv(records.to_csv([records.stamp(rec, "threshold")], "threshold"), "threshold")[0]
    assert back["Z"] == 0.1 + 0.2 and back["lambda"] == 1 / 3
    assert back["r"] is None


def test_int_lists_and_bools():
    rec = records.stamp(
        {"channel": "bec:0.3", "Z": 0.3, "alphabet_size": 3, "combine": 1, "combined_z": [0.51],
         "z_upper_bound": [0.51], "combined_alphabet_size": [3]},
        "channel",
    )
    line = json.loads(records.to_json([rec], "channel"))
    assert line["combined_alphabet_size"] == [3] and line["quantize_levels"] is None
    assert records.from_csv(records.to_csv([rec], "channel"), "channel")[0]["combined_alphabet_size"] == [3]


def test_unknown_kind():
    with pytest.raises(ValueError):
        records.dumps([], "nope", "json")
    with pytest.raises(ValueError):
        records.dumps([], "bound", "xml")


def test_column_help_lists_schema_order():
    text = records.column_help("simulate")
    names = [n for n, _ in records.SIM_COLUMNS]
    assert text.index(names[3]) < text.index(names[-1])
