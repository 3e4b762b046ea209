import json

import pytest

from stairpebble.grid import StaircaseSpec, build_staircase
from stairpebble.harness.cache import CacheEntry, CacheError, WitnessCache
from stairpebble.harness.cli import main, parse_range
from stairpebble.harness.tables import Interval, Unspecified, conjectured_seven_wide, expected_value
from stairpebble.harness.verify import run_conjecture_experiment, stacked_distribution, verify_theorem
from stairpebble.pebble import Distribution, is_k_solvable

S = StaircaseSpec.parse


@pytest.mark.parametrize("text, value", [
    ("S3,1", 1), ("S'3,1", 2), ("S3,6", 5), ("S'3,7", 5), ("S3,7", 6), ("S'3,11", 8),
    ("S4,1", 2), ("S4,2", 3), ("S4,9", 7),
    ("S5,3", 4), ("S'5,3", 4), ("S'5,7", 7), ("S5,10", 8), ("S5,13", 11),
    ("S6,3", 5), ("S6,4", 5), ("S6,8", 9), ("S6,9", 10), ("S6,11", 11),
    ("S7,5", 6), ("S7,6", 7), ("S'7,7", 8), ("S'7,11", 12), ("S8,8", 11),
])
def test_expected_values(text, value):
    assert expected_value(S(text)) == value


@pytest.mark.parametrize("text", ["S5,1", "S'5,2", "S5,7", "S6,1", "S6,2", "S8,9", "S9,9"])
def test_unspecified(text):
    with pytest.raises(Unspecified):
        expected_value(S(text))


def test_seven_wide_interval():
    assert expected_value(S("S7,10")) == Interval(11, 13)
    assert 12 in expected_value(S("S'7,9"))
    # the sharp n = 3 mod 4 claim is only made for n >= 7
    assert expected_value(S("S'7,3")) == Interval(4, 6)


def test_conjecture_formula():
    assert [conjectured_seven_wide(StaircaseSpec(7, n)) for n in (10, 11, 12, 13)] == [12, 14, 14, 16]
    assert conjectured_seven_wide(S("S'7,11")) == 12
    assert conjectured_seven_wide(S("S'7,13")) == 15


def test_cache_round_trip(tmp_path):
    g = build_staircase(S("S3,4"))
    from stairpebble.harness.cache import default_cache

    entry = CacheEntry(S("S3,4"), 1, default_cache().get(S("S3,4")).witness, True)
    assert is_k_solvable(g, entry.witness)
    cache = WitnessCache([entry])
    path = cache.save(tmp_path / "c.json")
    back = WitnessCache.load(path)
    assert back.get(S("S3,4")) == entry


def test_cache_rejects_bad_witness(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"format": 1, "entries": [
        {"spec": "S3,4", "k": 1, "size": 3, "pebbles": [[0, 3]], "exhaustive": True}]}))
    with pytest.raises(CacheError):
        WitnessCache.load(path)


def test_cache_keeps_better_entry():
    g = build_staircase(S("S3,4"))
    big = CacheEntry(S("S3,4"), 1, Distribution((4,) + (0,) * (len(g) - 1)), False, derived=True)
    from stairpebble.harness.cache import default_cache

    small = CacheEntry(S("S3,4"), 1, default_cache().get(S("S3,4")).witness, True)
    cache = WitnessCache([small])
    assert not cache.put(big)
    assert cache.get(S("S3,4")).size == 3


def test_verify_width4():
    rep = verify_theorem("width4", range(1, 9))
    assert rep.ok and rep.complete
    assert [r.status for r in rep.rows] == ["match"] * 8


def test_verify_long_skipped_by_default():
    rep = verify_theorem("width6", range(8, 9))
    assert rep.rows[0].status == "skipped"


def test_experiment_stacked_k1_is_seven_wide():
    rep = run_conjecture_experiment("stacked", range(5, 9), k=1)
    assert all(r.n + 1 <= r.construction <= r.n + 3 for r in rep.rows)
    spec, dist = stacked_distribution(2, 6)
    assert spec == S("S14,6") and is_k_solvable(build_staircase(spec), dist)


def test_experiment_eight_wide_slope():
    rep = run_conjecture_experiment("eight-wide", range(10, 18))
    assert rep.slope is not None and 1.0 < rep.slope < 1.6


def test_parse_range():
    assert list(parse_range("3..5")) == [3, 4, 5]
    assert list(parse_range("7")) == [7]


# -- command line ---------------------------------------------------------------------------


def test_cli_optimal_prints_value(capsys):
    assert main(["optimal", "--spec", "S3,6"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "5"


def test_cli_bad_spec_is_usage_error(capsys):
    assert main(["optimal", "--spec", "Q3,6"]) == 2
    assert main(["optimal"]) == 2
    assert main(["nonsense"]) == 2


def test_cli_reach_unsolvable(capsys):
    assert main(["reach", "--spec", "S3,4", "--pebbles", "0:2", "--format", "json"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["solvable"] is False and isinstance(out["unreachable"], int)
    assert main(["reach", "--spec", "S3,4", "--pebbles", "0:2", "--target", "1", "--moves"]) == 0


def test_cli_verify_width6(capsys):
    assert main(["verify", "--family", "width6", "--n", "3..7"]) == 0


def test_cli_verify_is_deterministic(capsys):
    outs = []
    for threads in ("1", "3"):
        assert main(["verify", "--family", "width5", "--n", "3..6", "--format", "json", "--threads", threads]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_cli_budget_exit(capsys, tmp_path):
    rc = main(["optimal", "--spec", "S6,8", "--budget-seconds", "0", "--checkpoint", str(tmp_path / "cp.json")])
    assert rc == 3


def test_cli_gen_round_trip(capsys):
    assert main(["gen", "--spec", "S'5,3", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    from stairpebble.grid import PebbleGraph

    assert PebbleGraph.from_json(data).spec == S("S'5,3")
    assert main(["gen", "--grid", "3x4", "--format", "dot"]) == 0
    assert "--" in capsys.readouterr().out


def test_cli_gen_random_seeded(capsys):
    main(["gen", "--spec", "S4,4", "--random-pebbles", "5", "--seed", "3", "--format", "json"])
    a = capsys.readouterr().out
    main(["gen", "--spec", "S4,4", "--random-pebbles", "5", "--seed", "3", "--format", "json"])
    assert capsys.readouterr().out == a


def test_cli_construct_and_collapse(capsys, tmp_path):
    assert main(["construct", "--spec", "S7,6", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    path = tmp_path / "d.json"
    g = build_staircase(S("S7,6"))
    path.write_text(json.dumps(Distribution.from_pairs(len(g), data["pebbles"]).to_json(g)))
    assert main(["collapse", "--spec", "S7,6", "--dist", str(path), "--map", "7to6", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert sum(c for _, c in out["pebbles"]) == data["size"]
    assert main(["construct", "--grid", "1x1"]) == 0
    assert main(["construct", "--spec", "S3,5", "--widen", "--format", "json"]) == 0
