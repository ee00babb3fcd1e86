"""Sweep emitters and the command-line surface."""

import json

import pytest

from cascade_squeezing import ValidationError
from cascade_squeezing.cli import main
from cascade_squeezing.sweep import SweepConfig, format_csv, render_svg, run_sweep


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def kv(out):
    pairs = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition("=")
        pairs[key] = float(value) if value else None
    return pairs


# ---------------------------------------------------------------- sweeps

def test_sweep_config_validation():
    with pytest.raises(ValidationError):
        SweepConfig(kappa=0.8, eps_max=0.41)  # above threshold
    with pytest.raises(ValidationError):
        SweepConfig(steps=1)
    with pytest.raises(ValidationError):
        SweepConfig(eps_min=-0.1)
    with pytest.raises(ValidationError):
        SweepConfig(ordering="sideways")


def test_degenerate_two_point_sweep():
    config = SweepConfig(eps_min=0.2, eps_max=0.2, steps=2)
    result = run_sweep(config)
    assert len(result.rows) == 2
    assert result.rows[0] == result.rows[1]
    csv_rows = format_csv(result).splitlines()[2:]
    assert csv_rows[0] == csv_rows[1]


def test_csv_is_deterministic_and_parameter_stamped():
    config = SweepConfig(gamma_c=1.25, steps=11)
    first = format_csv(run_sweep(config))
    second = format_csv(run_sweep(config))
    assert first == second
    header = first.splitlines()[0]
    assert header.startswith("#")
    for token in ("kappa=0.8", "gamma_c=1.25", "eps_min=0", "eps_max=0.4",
                  "steps=11", "ordering=normal"):
        assert token in header
    assert first.splitlines()[1] == "epsilon,var_plus,var_minus,squeezing,vacuum_level"


def test_plus_variance_sweep_reproduces_figure_curve():
    result = run_sweep(SweepConfig(gamma_c=16 / 15, steps=101))
    plus = [row["var_plus"] for row in result.rows]
    assert plus[0] == pytest.approx((16 / 15) / 0.8, rel=1e-12)
    assert abs(plus[-1]) < 1e-9
    assert all(b < a for a, b in zip(plus, plus[1:]))
    # the threshold grid point defines plus but not minus
    assert result.rows[-1]["var_minus"] is None
    assert any("var_minus undefined" in note for note in result.notes)


def test_squeezing_sweep_terminal_value():
    result = run_sweep(SweepConfig(gamma_c=1.25, steps=101))
    squeezing = [row["squeezing"] for row in result.rows]
    assert squeezing[0] == 0.0
    assert squeezing[-1] == pytest.approx(0.890, abs=1e-3)


def test_arbitrary_ordering_sweep():
    result = run_sweep(SweepConfig(gamma_c=1.25, eps_max=0.2, steps=5,
                                   ordering="arbitrary"))
    for row in result.rows:
        assert row["vacuum_level"] == 2.0
        assert row["squeezing"] is None
    # the eliminated-dynamics steady moments carry gamma_c/kappa in anti_b
    # even at zero drive, so the zero-drive variance sits above 2
    assert result.rows[0]["var_plus"] == pytest.approx(2.0 + 1.25 / 0.8, abs=1e-10)


def test_svg_rendering():
    result = run_sweep(SweepConfig(gamma_c=16 / 15, steps=21))
    svg = render_svg(result, "var_plus", "var_plus")
    assert svg.startswith("<svg")
    assert "<polyline" in svg and "epsilon" in svg and "var_plus" in svg


# ---------------------------------------------------------------- commands

def test_steady_at_critical_point(capsys):
    code, out, _ = run_cli(capsys, "steady", "--kappa", "0.8", "--epsilon", "0.4",
                           "--gamma-c", str(16 / 15))
    assert code == 0
    pairs = kv(out)
    assert pairs["var_plus_normal"] == 0.0
    assert pairs["squeezing"] == 1.0
    assert pairs["var_minus_normal"] is None


def test_steady_vacuum_point(capsys):
    code, out, _ = run_cli(capsys, "steady", "--kappa", "0.8", "--epsilon", "0",
                           "--gamma-c", "1.0")
    assert code == 0
    pairs = kv(out)
    assert pairs["var_plus_normal"] == 1.25
    assert pairs["squeezing"] == 0.0


def test_steady_worked_point(capsys):
    code, out, _ = run_cli(capsys, "steady", "--kappa", "0.8", "--epsilon", "0.3",
                           "--gamma-c", "1.0")
    assert code == 0
    pairs = kv(out)
    assert pairs["var_plus_normal"] == pytest.approx(0.285714, abs=1e-6)
    assert pairs["var_minus_normal"] == pytest.approx(4.4, abs=1e-6)
    assert pairs["c2"] == pytest.approx(-1.028571, abs=1e-6)


def test_steady_json_mode(capsys):
    code, out, _ = run_cli(capsys, "steady", "--kappa", "0.8", "--epsilon", "0.3",
                           "--gamma-c", "1.0", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["var_plus_normal"] == pytest.approx(2 / 7, rel=1e-12)


def test_steady_rejects_above_threshold(capsys):
    code, _, err = run_cli(capsys, "steady", "--kappa", "0.8", "--epsilon", "0.5",
                           "--gamma-c", "1.0")
    assert code == 3
    assert "kappa/2" in err


def test_mutually_exclusive_coupling_flags(capsys):
    code, _, _ = run_cli(capsys, "steady", "--gamma-c", "1.0", "--g", "0.5")
    assert code == 3


def test_critical_gamma_command(capsys):
    code, out, _ = run_cli(capsys, "critical-gamma", "--kappa", "0.8",
                           "--epsilon", "0.4")
    assert code == 0
    assert "gamma_c_critical=1.066667" in out
    assert "plus_variance_residual=" in out

    code, out, _ = run_cli(capsys, "critical-gamma", "--kappa", "0.8",
                           "--epsilon", "0.2")
    assert code == 0
    assert "gamma_c_critical=0.500000" in out

    code, _, err = run_cli(capsys, "critical-gamma", "--kappa", "0.8",
                           "--epsilon", "0")
    assert code == 3
    assert "degenerates" in err


def test_sweep_command_writes_files(tmp_path, capsys):
    out_path = tmp_path / "curve.csv"
    code, _, _ = run_cli(capsys, "sweep", "--gamma-c", str(16 / 15), "--steps", "11",
                         "--out", str(out_path), "--format", "both")
    assert code == 0
    text = out_path.read_text()
    assert text.splitlines()[1] == "epsilon,var_plus,var_minus,squeezing,vacuum_level"
    assert (tmp_path / "curve.svg").exists()


def test_sweep_both_orderings_writes_two_files(tmp_path, capsys):
    out_path = tmp_path / "curve.csv"
    code, _, _ = run_cli(capsys, "sweep", "--steps", "5", "--ordering", "both",
                         "--out", str(out_path))
    assert code == 0
    assert (tmp_path / "curve.normal.csv").exists()
    assert (tmp_path / "curve.arbitrary.csv").exists()


def test_sweep_to_stdout(capsys):
    code, out, err = run_cli(capsys, "sweep", "--steps", "5")
    assert code == 0
    assert out.splitlines()[1] == "epsilon,var_plus,var_minus,squeezing,vacuum_level"
    assert "var_minus undefined" in err


def test_sweep_rejects_bad_grid(capsys):
    code, _, err = run_cli(capsys, "sweep", "--eps-max", "0.5")
    assert code == 3
    assert "threshold" in err


def test_svg_requires_out(capsys):
    code, _, err = run_cli(capsys, "sweep", "--format", "svg")
    assert code == 3
    assert "--out" in err


def test_config_file_precedence(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("# shared run settings\nkappa = 1.6\ngamma-c = 2.0\n")
    code, out, _ = run_cli(capsys, "steady", "--config", str(config),
                           "--epsilon", "0")
    assert code == 0
    pairs = kv(out)
    assert pairs["kappa"] == 1.6
    assert pairs["vacuum_normal"] == 1.25  # 2.0 / 1.6
    # explicit flag beats the config file
    code, out, _ = run_cli(capsys, "steady", "--config", str(config),
                           "--epsilon", "0", "--kappa", "0.8")
    pairs = kv(out)
    assert pairs["kappa"] == 0.8
    assert pairs["vacuum_normal"] == 2.5


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 3


def test_validate_cutoff_limited_exit_code(capsys):
    code, out, _ = run_cli(capsys, "validate", "--n-max", "1")
    assert code == 2
    assert "[cutoff-limited]" in out
    assert "CUTOFF-LIMITED" in out


def test_validate_default_run_reports_honest_failures(capsys):
    code, out, _ = run_cli(capsys, "validate")
    assert code == 1
    assert "check solver-vs-closed moments: PASS" in out
    assert "check assembled-vs-closed variances: PASS" in out
    assert "check ehrenfest t=0.5: PASS" in out
    assert "FAILED: ehrenfest residual at t=1" in out
    assert "approximation gap" in out
    assert "squeezing consistency skipped at gamma_c=0" in out
