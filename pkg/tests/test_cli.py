"""Command line harness: flags, JSON reports, CSV experiment sweeps."""

import json

import pytest

from actmax import cli

SEED = 268005

FAST = ["--epsilon", "0.2", "--delta", "0.05", "--max-samples", "50000"]


@pytest.fixture
def star_file(tmp_path):
    path = tmp_path / "star.txt"
    path.write_text("0 1\n0 2\n0 3\n")
    return str(path)


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / "triangle.txt"
    path.write_text("0 1\n0 2\n1 2\n")
    return str(path)


@pytest.fixture
def cycle_file(tmp_path):
    # directed 3-cycle: every node has in-degree 1, so weighted-cascade B = 1
    path = tmp_path / "cycle.txt"
    path.write_text("0 1\n1 2\n2 0\n")
    return str(path)


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("0 1\n1 2\n")
    return str(path)


def run_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


# -- argument validation ---------------------------------------------------------


def test_missing_graph_is_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["select", "--algorithm", "degree", "--k", "1"])
    assert err.value.code == 2


def test_unknown_algorithm_is_usage_error(capsys, star_file):
    with pytest.raises(SystemExit) as err:
        cli.main(["select", "--graph", star_file, "--algorithm", "bogus",
                  "--k", "1"])
    assert err.value.code == 2


def test_seed_must_fit_uint64(capsys, star_file):
    for bad in ("-1", str(2 ** 64)):
        with pytest.raises(SystemExit) as err:
            cli.main(["select", "--graph", star_file, "--algorithm", "degree",
                      "--k", "1", "--seed", bad])
        assert err.value.code == 2


def test_k_must_be_positive(capsys, star_file):
    with pytest.raises(SystemExit) as err:
        cli.main(["select", "--graph", star_file, "--algorithm", "degree",
                  "--k", "0"])
    assert err.value.code == 2


def test_select_rejects_csv_format(capsys, star_file):
    with pytest.raises(SystemExit) as err:
        cli.main(["select", "--graph", star_file, "--algorithm", "degree",
                  "--k", "1", "--format", "csv"])
    assert err.value.code == 2


def test_evaluate_rejects_csv_format(capsys, star_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("0\n")
    with pytest.raises(SystemExit) as err:
        cli.main(["evaluate", "--graph", star_file, "--seeds", str(seeds),
                  "--metric", "activity", "--format", "csv"])
    assert err.value.code == 2


def test_experiment_k_flags_are_exclusive(capsys, star_file):
    with pytest.raises(SystemExit) as err:
        cli.main(["experiment", "--graph", star_file, "--k", "1",
                  "--k-sweep", "1,2"])
    assert err.value.code == 2


def test_experiment_requires_sandwich(capsys, star_file):
    with pytest.raises(SystemExit) as err:
        cli.main(["experiment", "--graph", star_file, "--k", "1",
                  "--algorithms", "degree,pagerank"])
    assert err.value.code == 2


def test_bad_algorithm_list_is_usage_error(capsys, star_file):
    with pytest.raises(SystemExit) as err:
        cli.main(["experiment", "--graph", star_file, "--k", "1",
                  "--algorithms", "sandwich,bogus"])
    assert err.value.code == 2


def test_unreadable_graph_exits_one(capsys):
    code = cli.main(["select", "--graph", "/nonexistent/g.txt",
                     "--algorithm", "degree", "--k", "1"])
    assert code == 1
    assert "error" in capsys.readouterr().err


# -- select -----------------------------------------------------------------------


def test_select_degree_star_center(capsys, star_file):
    payload = run_json(capsys, ["select", "--graph", star_file,
                                "--algorithm", "degree", "--k", "1",
                                "--seed", str(SEED)] + FAST)
    assert payload["seeds"] == [0]
    assert payload["algorithm"] == "degree"
    assert payload["k"] == 1
    assert payload["dataset"] == "star"
    assert payload["graph"]["nodes"] == 4
    assert payload["graph"]["arcs"] == 6  # undirected by default
    assert payload["rng_seed"] == SEED
    assert "ratio_bound" not in payload


def test_select_sandwich_triangle(capsys, triangle_file):
    payload = run_json(capsys, ["select", "--graph", triangle_file,
                                "--algorithm", "sandwich", "--k", "3",
                                "--seed", str(SEED)] + FAST)
    assert sorted(payload["seeds"]) == [0, 1, 2]
    assert payload["certified"] is True
    assert 0.0 < payload["ratio_bound"] < 1.0
    assert payload["detail"]["winner"] in ("upper", "lower", "activity")
    assert payload["samples"] > 0


def test_select_directed_flag(capsys, chain_file):
    payload = run_json(capsys, ["select", "--graph", chain_file, "--directed",
                                "--algorithm", "degree", "--k", "1",
                                "--seed", str(SEED)] + FAST)
    assert payload["graph"]["arcs"] == 2
    assert payload["seeds"] == [1]


def test_select_writes_out_file(capsys, star_file, tmp_path):
    out = tmp_path / "report.json"
    code = cli.main(["select", "--graph", star_file, "--algorithm", "degree",
                     "--k", "1", "--seed", str(SEED), "--out", str(out)] + FAST)
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["seeds"] == [0]


# -- evaluate ---------------------------------------------------------------------


def test_evaluate_interaction_ratio_full_cascade(capsys, cycle_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("0\n")
    payload = run_json(capsys, ["evaluate", "--graph", cycle_file, "--directed",
                                "--seeds", str(seeds),
                                "--metric", "interaction_ratio",
                                "--trials", "200", "--seed", str(SEED)])
    assert payload["value"] == 1.0
    assert payload["trials"] == 200
    assert payload["mean_both_endpoint_arcs"] == 3.0
    assert payload["mean_touched_arcs"] == 3.0


def test_evaluate_activity_chain_exact(capsys, chain_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("0\n")
    payload = run_json(capsys, ["evaluate", "--graph", chain_file, "--directed",
                                "--seeds", str(seeds), "--metric", "activity",
                                "--seed", str(SEED)] + FAST)
    assert payload["value"] == 2.0
    assert payload["certified"] is True
    assert payload["seeds"] == [0]


def test_evaluate_seed_file_comments_and_commas(capsys, triangle_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("# chosen by hand\n0, 1  # trailing note\n")
    payload = run_json(capsys, ["evaluate", "--graph", triangle_file,
                                "--seeds", str(seeds), "--metric", "activity",
                                "--seed", str(SEED)] + FAST)
    assert payload["seeds"] == [0, 1]


def test_evaluate_unknown_seed_id(capsys, triangle_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("99\n")
    code = cli.main(["evaluate", "--graph", triangle_file, "--seeds", str(seeds),
                     "--metric", "activity"])
    assert code == 1
    assert "99" in capsys.readouterr().err


def test_evaluate_bad_seed_token_reports_line(capsys, triangle_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("0\nnode7\n")
    code = cli.main(["evaluate", "--graph", triangle_file, "--seeds", str(seeds),
                     "--metric", "activity"])
    assert code == 1
    assert "line 2" in capsys.readouterr().err


def test_evaluate_empty_seed_file(capsys, triangle_file, tmp_path):
    seeds = tmp_path / "s.txt"
    seeds.write_text("# nothing here\n")
    code = cli.main(["evaluate", "--graph", triangle_file, "--seeds", str(seeds),
                     "--metric", "activity"])
    assert code == 1


# -- experiment --------------------------------------------------------------------


def run_experiment(capsys, triangle_file, extra):
    code = cli.main(["experiment", "--graph", triangle_file,
                     "--seed", str(SEED)] + FAST + extra)
    out = capsys.readouterr().out
    assert code == 0
    return out


def test_experiment_csv_shape(capsys, triangle_file):
    out = run_experiment(capsys, triangle_file,
                         ["--k-sweep", "1,2", "--repetitions", "2",
                          "--algorithms", "sandwich,degree"])
    lines = out.strip().split("\n")
    assert lines[0] == ",".join(cli.CSV_HEADER)
    rows = [dict(zip(cli.CSV_HEADER, line.split(","))) for line in lines[1:]]
    assert len(rows) == 2 * 2 * 2
    for row in rows:
        assert row["dataset"] == "triangle"
        assert row["model"] == "ic"
        assert row["activity_setting"] == "uniform"
        assert row["k"] in ("1", "2")
        assert row["algorithm"] in ("sandwich", "degree")
        # ratio_bound column is populated exactly on sandwich rows
        assert (row["ratio_bound"] != "") == (row["algorithm"] == "sandwich")
        float(row["activity_estimate"])
        int(row["samples"])


def test_experiment_gain_ratio_definition(capsys, triangle_file):
    out = run_experiment(capsys, triangle_file,
                         ["--k", "2", "--algorithms", "sandwich,degree,pagerank"])
    rows = [dict(zip(cli.CSV_HEADER, line.split(",")))
            for line in out.strip().split("\n")[1:]]
    base = float(next(r for r in rows if r["algorithm"] == "sandwich")
                 ["activity_estimate"])
    for row in rows:
        gain = float(row["gain_ratio"])
        if row["algorithm"] == "sandwich":
            assert gain == 0.0
        else:
            expect = (float(row["activity_estimate"]) - base) / base
            assert abs(gain - expect) < 1e-12


def test_experiment_reruns_byte_identical(capsys, triangle_file):
    args = ["--k", "2", "--repetitions", "2", "--algorithms", "sandwich,degree"]
    first = run_experiment(capsys, triangle_file, args)
    second = run_experiment(capsys, triangle_file, args)

    def strip_runtime(text):
        idx = cli.CSV_HEADER.index("runtime_ms")
        out = []
        for line in text.strip().split("\n"):
            cells = line.split(",")
            del cells[idx]
            out.append(",".join(cells))
        return out

    assert first != second  # runtime_ms differs
    assert strip_runtime(first) == strip_runtime(second)


def test_experiment_json_format(capsys, triangle_file):
    out = run_experiment(capsys, triangle_file,
                         ["--k", "1", "--algorithms", "sandwich",
                          "--format", "json"])
    rows = json.loads(out)
    assert isinstance(rows, list) and len(rows) == 1
    assert set(rows[0]) == set(cli.CSV_HEADER)
    assert rows[0]["gain_ratio"] == 0.0


def test_experiment_csv_matches_json_values(capsys, triangle_file):
    args = ["--k", "1", "--algorithms", "sandwich,degree"]
    csv_text = run_experiment(capsys, triangle_file, args)
    json_rows = json.loads(run_experiment(capsys, triangle_file,
                                          args + ["--format", "json"]))
    csv_rows = [dict(zip(cli.CSV_HEADER, line.split(",")))
                for line in csv_text.strip().split("\n")[1:]]
    for crow, jrow in zip(csv_rows, json_rows):
        assert crow["algorithm"] == jrow["algorithm"]
        # repr round-trips floats exactly, so the CSV is lossless
        assert float(crow["activity_estimate"]) == jrow["activity_estimate"]
        assert int(crow["samples"]) == jrow["samples"]
        assert int(crow["rng_seed"]) == jrow["rng_seed"]
