import csv
import io
import json

import pytest

from movingwell.cli import RunConfig, main, resolve_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_sudden_half_width(capsys):
    code, out, _ = run(capsys, "sudden", "--n", "1", "--alpha", "0.5", "--kmax", "64")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 64
    assert float(rows[0]["row_total"]) == pytest.approx(0.5, abs=5e-3)
    assert float(rows[0]["deficit"]) == pytest.approx(0.5, abs=1e-12)
    assert float(rows[0]["closed_form"]) == 0.5


def test_sudden_identity(capsys):
    _, out, _ = run(capsys, "sudden", "--alpha", "1.0", "--kmax", "4")
    for r in rows_of(out):
        assert float(r["W"]) == pytest.approx(float(r["n"] == r["k"]), abs=1e-15)


def test_sudden_degenerate_entry(capsys):
    _, out, _ = run(capsys, "sudden", "--n", "2", "--alpha", "0.5", "--kmax", "16")
    w = [float(r["W"]) for r in rows_of(out)]
    assert w[0] == pytest.approx(0.5, abs=1e-10)
    assert max(w[1:]) < 1e-20


def test_metadata_header_and_json(capsys):
    _, out, _ = run(capsys, "sudden", "--n", "1", "--kmax", "2", "--format", "json")
    payload = json.loads(out)
    assert payload["config"]["command"] == "sudden" and payload["config"]["kmax"] == 2
    assert [r["k"] for r in payload["rows"]] == [1, 2]
    _, out, _ = run(capsys, "sudden", "--n", "1", "--kmax", "2")
    header = [line for line in out.splitlines() if line.startswith("# config: ")][0]
    cfg = RunConfig.from_dict(json.loads(header[len("# config: "):]))
    assert cfg.kmax == 2 and cfg.command == "sudden"


def test_bessel_table(capsys):
    code, out, _ = run(capsys, "bessel", "--nmax", "50", "--digits", "2")
    rows = rows_of(out)
    assert code == 0
    assert rows[0]["u_minus_1_rounded"] == "0.22" and rows[2]["u_minus_1_rounded"] == "0.08"
    assert all(r["within_bound"] == "True" for r in rows)
    assert "# bound_violations: 0" in out


def test_evolve_sudden_limit_matches_sudden(capsys):
    _, out, _ = run(capsys, "evolve", "--law", "linear", "--alpha-final", "0.5", "--T", "1e-3", "--kmax", "5")
    evolved = [float(r["W_mapped"]) for r in rows_of(out)]
    _, out, _ = run(capsys, "sudden", "--n", "1", "--alpha", "0.5", "--kmax", "5")
    sudden = [float(r["W"]) for r in rows_of(out)]
    assert evolved == pytest.approx(sudden, rel=1e-2)


def test_evolve_both_frames_and_series(capsys, tmp_path):
    series = tmp_path / "series.csv"
    code, out, _ = run(capsys, "evolve", "--T", "1e-3", "--frames", "both", "--kmax", "5", "--series", str(series))
    assert code == 0
    rows = rows_of(out)
    assert all(float(r["relative_difference"]) < 2e-2 for r in rows)
    assert "# norm_drift_lab:" in out and "# continuum_lab:" in out
    srows = rows_of(series.read_text())
    assert {r["frame"] for r in srows} == {"mapped", "lab"}
    assert set(srows[0]) == {"frame", "t", "alpha", "tau", "W_nn"}


def test_evolve_table_law(capsys):
    code, out, _ = run(capsys, "evolve", "--law", "table", "--table", "0:1,0.5:0.8,1:0.8", "--grid", "512")
    assert code == 0
    assert sum(float(r["W_mapped"]) for r in rows_of(out)) == pytest.approx(1.0, abs=1e-4)


def test_regularized_leakage(capsys):
    _, out, _ = run(capsys, "regularized", "--V", "1e6", "--alpha", "0.5")
    (row,) = rows_of(out)
    assert float(row["leakage"]) == pytest.approx(0.5, abs=1e-2)


def test_regularized_levels(capsys):
    _, out, _ = run(capsys, "regularized", "--V", "1e4", "--levels")
    rows = rows_of(out)
    assert len(rows) == 46
    assert all(float(r["relative_shift"]) < 0 for r in rows)


def test_perturb_columns(capsys):
    code, out, _ = run(capsys, "perturb", "--n", "1", "--m", "2", "--alpha-final", "1.1", "--T", "10",
                       "--halvings", "2", "--grid", "512")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 2
    assert float(rows[0]["delta"]) == pytest.approx(2 * float(rows[1]["delta"]))
    assert float(rows[0]["relative_error"]) < 1e-2


def test_one_point_sweep_is_single_run(capsys):
    _, single, _ = run(capsys, "sudden", "--n", "1", "--alpha", "0.5", "--kmax", "8")
    _, swept, _ = run(capsys, "sweep", "--run", "sudden", "--alpha", "0.5", "--n", "1", "--kmax", "8")
    assert single == swept


def test_sweep_orders_points(capsys):
    _, out, _ = run(capsys, "sweep", "--run", "sudden", "--alpha", "0.25", "0.5", "0.75", "--n", "1",
                    "--kmax", "2", "--workers", "2")
    rows = rows_of(out)
    assert [int(r["point"]) for r in rows] == [0, 0, 1, 1, 2, 2]
    assert [float(r["alpha"]) for r in rows[::2]] == [0.25, 0.5, 0.75]


def test_deterministic_output(capsys, tmp_path):
    path = tmp_path / "run.json"
    outputs = []
    for _ in range(2):
        assert main(["evolve", "--T", "0.5", "--grid", "512", "--format", "json", "--output", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 0.25, "kmax": 3, "n": "2"}))
    resolved = resolve_config(["sudden", "--config", str(cfg), "--kmax", "5"])
    assert resolved.alpha == 0.25 and resolved.kmax == 5 and resolved.n == "2"
    # the embedded config reloads into the same run
    _, out, _ = run(capsys, "sudden", "--config", str(cfg), "--format", "json")
    saved = tmp_path / "saved.json"
    saved.write_text(json.dumps(json.loads(out)["config"]))
    _, again, _ = run(capsys, "sudden", "--config", str(saved))
    assert again == out


@pytest.mark.parametrize("argv", [
    ["sudden", "--alpha", "-1"],
    ["sudden", "--n", "0"],
    ["bogus"],
    ["evolve", "--grid", "100"],
    ["evolve", "--frames", "lab", "--V", "10"],
    ["perturb", "--n", "1", "--m", "1"],
])
def test_errors_are_one_line(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code != 0 and out == ""
    assert len(err.strip().splitlines()) == 1 and err.startswith("error: ")


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"nonsense": 1}')
    code, _, err = run(capsys, "sudden", "--config", str(cfg))
    assert code == 2 and "nonsense" in err
