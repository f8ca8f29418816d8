import csv
import io
import json
import math

import pytest

from bohr_sampler.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def tsbd_file(tmp_path, capsys):
    code = main(["generate", "tsbd", "--kmax", "4", "--seed", "3", "--out", str(tmp_path / "gen")])
    capsys.readouterr()
    assert code == 0
    return tmp_path / "gen" / "generated_set.json"


def test_generate_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", "tsbd", "--kmax", "4", "--seed", "5", "--out", str(a)]) == 0
    assert main(["generate", "tsbd", "--kmax", "4", "--seed", "5", "--out", str(b)]) == 0
    for name in ("generated_set.json", "summary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    c = tmp_path / "c"
    assert main(["generate", "tsbd", "--kmax", "4", "--seed", "6", "--out", str(c)]) == 0
    assert (a / "generated_set.json").read_bytes() != (c / "generated_set.json").read_bytes()


def test_generate_csv_summary(capsys):
    code, out = run(capsys, "generate", "tsbd", "--kmax", "3", "--seed", "1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["k"]) for r in rows] == [1, 2, 3]
    assert {"lo", "hi", "ell", "count", "step_length", "density_proxy", "config_hash", "seed"} <= set(rows[0])
    assert all(int(r["count"]) >= 1 for r in rows)


def test_generate_kmax_cap_is_usage_error(capsys):
    code, _ = run(capsys, "generate", "tsbd", "--kmax", "20", "--seed", "1")
    assert code == 2


def test_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BOHR_SAMPLER_SEED", "11")
    _, env_doc = run_json(capsys, "generate", "tsbd", "--kmax", "3")
    _, flag_doc = run_json(capsys, "generate", "tsbd", "--kmax", "3", "--seed", "11")
    assert env_doc["seed"] == 11
    assert env_doc == flag_doc
    monkeypatch.setenv("BOHR_SAMPLER_SEED", "abc")
    code, _ = run(capsys, "generate", "tsbd", "--kmax", "3")
    assert code == 2


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_verify_stl_passes(capsys, tsbd_file):
    code, doc = run_json(capsys, "verify", "--check", "stl", "--input", str(tsbd_file))
    assert code == 0
    assert doc["verdict"] is True and doc["check"] == "stl"
    assert doc["margin"] is not None


def test_verify_matching_on_empty_set_fails(tmp_path, capsys):
    p = tmp_path / "empty.json"
    p.write_text(json.dumps({"points": []}))
    code, doc = run_json(capsys, "verify", "--check", "matching", "--input", str(p),
                         "--family", "1", "--eps", "0.25", "--interval", "0,10", "--seed", "1")
    assert code == 1
    assert doc["verdict"] is False


def test_verify_matching_dense_set_passes(tmp_path, capsys):
    p = tmp_path / "grid.json"
    p.write_text(json.dumps({"points": [i / 100 for i in range(1001)]}))
    code, doc = run_json(capsys, "verify", "--check", "matching", "--input", str(p),
                         "--family", "1,0.5", "--eps", "0.3", "--interval", "0,10", "--seed", "2")
    assert code == 0
    assert doc["margin"] > 0


def test_verify_mfetnei1_and_bad_eps(capsys):
    code, doc = run_json(capsys, "verify", "--check", "mfetnei1", "--family", "1/2,1",
                         "--eps", "1/4", "--interval", "0,4")
    assert code == 0 and doc["verdict"] is True
    code, _ = run(capsys, "verify", "--check", "mfetnei1", "--family", "1/2,1",
                  "--eps", "0.6", "--interval", "0,4")
    assert code == 2


def test_verify_pfamily_exact_margin(capsys):
    code, doc = run_json(capsys, "verify", "--check", "pfamily", "--family", "1", "--eps", "1/4",
                         "--interval", "0,1", "--exact", "--anchors", "0,1/3")
    assert code == 0
    assert doc["verdict"] is True


def test_simulate_aest_bound(capsys):
    code, doc = run_json(capsys, "simulate", "aest", "--N", "4", "--n", "1", "--eps", "0.5",
                         "--ell", "8", "--trials", "400", "--seed", "1")
    row = doc["rows"][0]
    assert math.isclose(row["bound"], 4 * 0.5**8, rel_tol=1e-12)
    assert code == 0 and row["verdict"] is True


def test_simulate_tsr_near_closed_form(capsys):
    code, doc = run_json(capsys, "simulate", "tsr", "--Nk", "100", "--Nkm1", "10",
                         "--trials", "4000", "--seed", "4")
    row = doc["rows"][0]
    exact = 1 - (90 / 100) ** 2
    assert math.isclose(row["params"]["exact"], exact, rel_tol=1e-12)
    assert abs(row["empirical"] - exact) < 4 * math.sqrt(exact * (1 - exact) / 4000)
    assert code == 0


def test_simulate_rejects_zero_trials(capsys):
    code, _ = run(capsys, "simulate", "tsr", "--Nk", "100", "--Nkm1", "10", "--trials", "0")
    assert code == 2


def test_measure_exact(capsys):
    code, doc = run_json(capsys, "measure", "--family", "1", "--eps", "1/4", "--interval", "0,1", "--exact")
    assert code == 0
    assert doc["measure"] == "1/2"


def test_discrepancy_decreases(capsys):
    code, doc = run_json(capsys, "discrepancy", "--x", "1,1.4142135623730951", "--T", "25,400")
    assert code == 0
    small, large = (r["estimate"] for r in doc["rows"])
    assert large < small


def test_reconstruct_recovers_planted(tmp_path, capsys):
    p = tmp_path / "pts.json"
    p.write_text(json.dumps({"points": [i * 0.37 for i in range(60)]}))
    code, doc = run_json(capsys, "reconstruct", "--input", str(p), "--phases", "0,0.5,1", "--seed", "3")
    assert code == 0
    assert doc["relative_error"] < 1e-8


def test_reconstruct_rank_deficient_fails(tmp_path, capsys):
    p = tmp_path / "pts.json"
    p.write_text(json.dumps({"points": [0.0]}))
    code, doc = run_json(capsys, "reconstruct", "--input", str(p), "--phases", "0,1")
    assert code == 1 and doc["verdict"] is False


def test_missing_input_file_is_usage_error(tmp_path, capsys):
    code, _ = run(capsys, "verify", "--check", "stl", "--input", str(tmp_path / "nope.json"))
    assert code == 2
