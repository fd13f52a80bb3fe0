import csv
import hashlib
import json

import numpy as np
import pytest

from relayrate import __version__, cli
from relayrate.probcore import ChannelSpec, Var, channel_to_dict


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert cli.parse_range("0.2:0.2:1", "g") == [0.2, 0.4, 0.6, 0.8, 1.0]
    assert cli.parse_range("0.5", "g") == [0.5]
    assert cli.parse_range("1,3", "g") == [1.0, 3.0]
    with pytest.raises(cli.UsageError, match="empty"):
        cli.parse_range("2:0.1:1", "g")
    with pytest.raises(cli.UsageError):
        cli.parse_range("a:b", "g")


def test_fmt_nine_digits():
    assert cli.fmt(0.29247988212345) == "0.292479882"
    assert cli.rounded({"a": [np.float64(1 / 3)], "b": np.int64(2)}) == {"a": [0.333333333], "b": 2}


def test_eval_bundled_fixture(capsys):
    code, out, _ = run(capsys, "eval", "--channel", "table1.json", "--strategy", "ts-eaf",
                       "--dist", "table3.json")
    assert code == 0
    rep = json.loads(out)
    assert rep["rate"] == 0.292479882
    assert rep["params"]["q"][0] == 0.158060124


def test_eval_writes_manifest(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "eval", "--channel", "table1.json", "--strategy", "daf",
                     "--dist", "table2.json", "--out", str(out))
    assert code == 0
    man = json.loads((tmp_path / "r.json.manifest.json").read_text())
    assert man["outputs"][str(out)] == hashlib.sha256(out.read_bytes()).hexdigest()
    assert man["version"] == __version__
    assert len(man["inputs"]) == 2
    assert json.loads(out.read_text())["rate"] == pytest.approx(0.2408629, abs=1e-6)


def test_optimize_reproducible(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}.json"
        code, _, _ = run(capsys, "optimize", "--channel", "table1.json", "--strategy", "ts-eaf",
                         "--restarts", "2", "--seed", "9", "--out", str(out))
        assert code == 0
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    m0, m1 = (json.loads((tmp_path / f"o{k}.json.manifest.json").read_text()) for k in range(2))
    for m in (m0, m1):
        for key in ("timestamp", "wall_clock_s", "outputs", "command"):
            m.pop(key)
    assert m0 == m1 and m0["seed"] == 9
    res = json.loads(outs[0].read_text())
    assert len(res["optimization"]["restarts"]) == 2


def test_gaussian_sweep_round_trip(tmp_path, capsys):
    from relayrate import gaussian_cm as gcm
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "gaussian-sweep", "--strategy", "hd-eaf", "--g", "0.5:0.5:1",
                     "--C", "0.5", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["g", "C", "strategy", "rate", "param1", "param2", "feasible_slack"]
    for row in rows:
        p = gcm.GaussianCMParams(g=float(row["g"]), C=float(row["C"]))
        r = gcm.hd_eaf_optimal(p)
        assert float(row["rate"]) == float(cli.fmt(r.rate))
        assert float(row["param1"]) == float(cli.fmt(r.params["p_ne"]))
        assert row["param2"] == ""


def test_sweep_threads_match_sequential(tmp_path, capsys):
    texts = []
    for threads in ("1", "2"):
        out = tmp_path / f"t{threads}.csv"
        run(capsys, "sweep", "--strategy", "daf", "--g", "0.5,1,1.5", "--C", "0.3,0.6",
            "--threads", threads, "--out", str(out))
        texts.append(out.read_text())
    assert texts[0] == texts[1]
    assert texts[0].count("\n") == 7


def test_region_map_outputs(tmp_path, capsys):
    csv_out, json_out = tmp_path / "m.csv", tmp_path / "m.json"
    code, _, _ = run(capsys, "region-map", "--g", "0.2,2.0", "--C", "0.4",
                     "--out-csv", str(csv_out), "--out-json", str(json_out))
    assert code == 0
    rows = list(csv.DictReader(csv_out.open()))
    assert [r["label"] for r in rows][0] == "GQ-EAF"
    m = json.loads(json_out.read_text())
    assert m["labels"][0][0] == rows[0]["label"]
    assert m["rates"]["DAF"][0][1] == float(rows[1]["DAF"])
    assert (tmp_path / "m.csv.manifest.json").exists() and (tmp_path / "m.json.manifest.json").exists()


def test_bc_sweep(capsys):
    code, out, _ = run(capsys, "bc-sweep", "--bsc", "0.1", "--C", "0:0.34:0.68")
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert list(rows[0]) == ["C", "upper", "one_step", "single_cycle_ts"]
    assert float(rows[0]["upper"]) == float(rows[0]["one_step"]) == 0.531004406


def test_empty_range_exit_code(capsys):
    code, _, err = run(capsys, "bc-sweep", "--bsc", "0.1", "--C", "1:0.1:0")
    assert code == 1 and "empty range" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["eval", "--strategy", "daf"])
    assert e.value.code == 1


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"inputs": [\n  {"name": "X", "size": 2},\n]}')
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1 and "line 3 column 1" in err
    code, _, err = run(capsys, "eval", "--channel", str(bad), "--strategy", "daf")
    assert code == 1 and "line 3" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "eval", "--channel", "nowhere.json", "--strategy", "daf")
    assert code == 1 and "no such file" in err


def test_validate_fixtures(capsys):
    code, out, _ = run(capsys, "validate", "table1.json", "table2.json", "table3.json")
    assert code == 0
    assert out.count(": ok:") == 3 and "renormalised" in out


def test_infeasible_exit_code(tmp_path, capsys):
    # the relay-destination link carries nothing, so forwarding Y1 verbatim is infeasible
    w = np.zeros((2, 2, 2, 2))
    for x in (0, 1):
        for x1 in (0, 1):
            w[x, x1, :, :] = np.outer([0.5, 0.5], [0.8, 0.2] if x == 0 else [0.2, 0.8])
    ch = ChannelSpec([Var("X", 2), Var("X1", 2)], [Var("Y", 2), Var("Y1", 2)], w)
    q = ChannelSpec([Var("X1", 2), Var("Y1", 2)], [Var("Yh1", 2)], np.tile(np.eye(2), (2, 1, 1)))
    (tmp_path / "ch.json").write_text(json.dumps(channel_to_dict(ch)))
    (tmp_path / "q.json").write_text(json.dumps(channel_to_dict(q)))
    code, out, _ = run(capsys, "eval", "--channel", str(tmp_path / "ch.json"), "--strategy", "eaf",
                       "--quantizer", str(tmp_path / "q.json"))
    assert code == 2
    assert json.loads(out)["feasible"] is False
