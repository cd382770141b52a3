"""Command-line interface: config resolution, schemas, determinism."""

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from regsim import bellcore as bc
from regsim import chain, cli, pumping, regmodel


def _invoke(args, env=None):
    return CliRunner().invoke(cli.main, args, env=env)


def _parse_csv(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    reader = csv.reader(lines)
    return next(reader), list(reader)


def _embedded_config(text):
    prefix = "# config: "
    for line in text.splitlines():
        if line.startswith(prefix):
            return json.loads(line[len(prefix):])
    raise AssertionError("no config comment in output")


# ------------------------------------------------------------- curves


def test_fig6_dephasing_matches_run_schedule():
    result = _invoke(["fidelity-curve", "--model", "dephasing"])
    assert result.exit_code == 0
    header, rows = _parse_csv(result.output)
    assert header == ["level", "step", "fidelity"]
    noise = bc.NoiseParams("dephasing", 0.95, p_gate=1e-4)
    run = pumping.run_schedule(noise, 1e-4, (0, 8))
    assert len(rows) == 9
    for level, step, fidelity in rows:
        assert level == "1"
        # repr round-trip makes the CSV floats exact
        assert float(fidelity) == run.level2[int(step)][0]


def test_fig6_depolarizing_emits_both_levels():
    result = _invoke(["fidelity-curve", "--model", "depolarizing"])
    assert result.exit_code == 0
    _, rows = _parse_csv(result.output)
    noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)
    bit_only = pumping.run_schedule(noise, 1e-4, (8, 0))
    two_level = pumping.run_schedule(noise, 1e-4, (1, 8))
    first = [float(r[2]) for r in rows if r[0] == "1"]
    second = [float(r[2]) for r in rows if r[0] == "2"]
    assert first == [bit_only.level1[j][0] for j in range(9)]
    assert second == [two_level.level2[k][0] for k in range(9)]


def test_fig9_matches_chain_failure_probabilities():
    result = _invoke(["fidelity-curve", "--figure", "fig9"])
    assert result.exit_code == 0
    header, rows = _parse_csv(result.output)
    assert header == ["n_bit", "n_phase", "n_tot", "fail_prob"]
    assert len(rows) == 2 * 60
    noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)
    ch = chain.chain_for_schedule(noise, 1e-4, (2, 3))
    picked = [r for r in rows if r[0] == "2" and r[1] == "3"]
    for r in (picked[0], picked[19], picked[-1]):
        assert float(r[3]) == chain.fail_prob(ch, int(r[2]))
    # exponential decrease once the pipeline is saturated
    tail = [float(r[3]) for r in picked[20:]]
    assert all(b < a for a, b in zip(tail, tail[1:]))


def test_csv_is_lf_comma_and_headered(tmp_path):
    out = tmp_path / "curve.csv"
    result = _invoke(["fidelity-curve", "--out", str(out)])
    assert result.exit_code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "# regsim fidelity-curve"
    assert lines[2] == "level,step,fidelity"
    # embedded config parses and feeds back (round trip)
    assert _embedded_config(raw.decode())["f"] == 0.95


# ------------------------------------------------- config resolution


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "depolarizing", "f": 0.9, "steps": 4}))
    result = _invoke(
        ["fidelity-curve", "--config", str(cfg), "--model", "dephasing"]
    )
    assert result.exit_code == 0
    resolved = _embedded_config(result.output)
    assert resolved["model"] == "dephasing"  # flag beats file
    assert resolved["f"] == 0.9  # file beats default
    assert resolved["steps"] == 4
    _, rows = _parse_csv(result.output)
    assert len(rows) == 5


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fidelity": 0.9}))
    result = _invoke(["fidelity-curve", "--config", str(cfg)])
    assert result.exit_code != 0
    assert "unknown config keys" in result.output
    assert "fidelity" in result.output


def test_config_must_be_json_object(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    result = _invoke(["fidelity-curve", "--config", str(cfg)])
    assert result.exit_code != 0
    assert "JSON object" in result.output


def test_config_round_trip_reproduces_output(tmp_path):
    first = _invoke(["contours", "--figure", "fig7"])
    assert first.exit_code == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(_embedded_config(first.output)))
    # figure id comes back out of the dumped config, no flag needed
    second = _invoke(["contours", "--config", str(cfg)])
    assert second.exit_code == 0
    assert second.output == first.output


def test_contours_requires_figure_somewhere():
    result = _invoke(["contours"])
    assert result.exit_code != 0
    assert "no --figure flag" in result.output


# ----------------------------------------------------------- grids


def test_grid_override_shrinks_axis():
    result = _invoke(
        ["contours", "--figure", "fig7", "--grid", "n_phase=0:4:5"]
    )
    assert result.exit_code == 0
    _, rows = _parse_csv(result.output)
    assert len(rows) == 9 * 5
    assert _embedded_config(result.output)["n_phase"] == [0, 1, 2, 3, 4]


def test_grid_log_spacing_and_single_point():
    result = _invoke([
        "contours", "--figure", "fig11",
        "--grid", "p_l=1e-6:1e-4:3:log",
        "--grid", "f=0.95:0.95:1",
    ])
    assert result.exit_code == 0
    resolved = _embedded_config(result.output)
    assert resolved["p_l"] == pytest.approx(
        list(np.geomspace(1e-6, 1e-4, 3)), rel=1e-15
    )
    assert resolved["f"] == [0.95]
    _, rows = _parse_csv(result.output)
    assert len(rows) == 2 * 3  # both models


@pytest.mark.parametrize("spec", [
    "p_l=1e-6:1e-4",        # missing count
    "p_l",                  # no '='
    "p_l=a:b:3",            # not numeric
])
def test_malformed_grid_rejected(spec):
    result = _invoke(["contours", "--figure", "fig11", "--grid", spec])
    assert result.exit_code != 0
    assert "bad grid spec" in result.output


def test_unknown_grid_axis_rejected():
    result = _invoke(
        ["contours", "--figure", "fig7", "--grid", "p_m=0:1:3"]
    )
    assert result.exit_code != 0
    assert "no grid" in result.output


def test_zero_count_grid_rejected():
    result = _invoke(
        ["contours", "--figure", "fig7", "--grid", "n_phase=0:4:0"]
    )
    assert result.exit_code != 0
    assert "at least one point" in result.output


# ----------------------------------------------------- contour values


def test_fig7_values_match_infidelity_table():
    result = _invoke(["contours", "--figure", "fig7"])
    header, rows = _parse_csv(result.output)
    assert header == ["n_bit", "n_phase", "log10_infidelity"]
    noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)
    table = pumping.infidelity_table(noise, 1e-4, (8, 8))
    for n_bit, n_phase, value in rows:
        assert float(value) == pytest.approx(
            math.log10(table[int(n_bit), int(n_phase)]), rel=1e-12
        )


def test_fig13_single_point_matches_solver():
    result = _invoke([
        "contours", "--figure", "fig13",
        "--grid", "p_l=1e-5:1e-5:1", "--grid", "f=0.85:0.85:1",
    ])
    assert result.exit_code == 0
    _, rows = _parse_csv(result.output)
    (row,) = rows
    _, eps_m = regmodel.optimal_m(0.05, 0.05, 1e-5)
    noise = bc.NoiseParams("dephasing", 0.85, p_gate=1e-5,
                           p_init=0.05, p_meas=0.05)
    n_ps = chain.solve_ntot(noise, eps_m, "aif", (0, 8), scheme="ps").n_tot
    n_nps = chain.solve_ntot(noise, eps_m, "aif", (0, 8), scheme="nps").n_tot
    assert int(row[2]) == n_ps
    assert int(row[3]) == n_nps
    assert float(row[4]) == n_ps / n_nps


def test_fig10_values_lower_bound_every_schedule(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(
        {"p_l_values": [1e-4], "n_tot_max": 40, "model": "dephasing"}
    ))
    result = _invoke(["contours", "--figure", "fig10", "--config", str(cfg)])
    assert result.exit_code == 0
    _, rows = _parse_csv(result.output)
    tep = {int(r[3]): float(r[4]) for r in rows if r[1] == "tep"}
    aif = {int(r[3]): float(r[4]) for r in rows if r[1] == "aif"}
    _, eps_m = regmodel.optimal_m(0.05, 0.05, 1e-4)
    noise = bc.NoiseParams("dephasing", 0.95, p_gate=1e-4,
                           p_init=0.05, p_meas=0.05)
    # spot-check against two explicit schedules at a few budgets
    for sched in [(0, 2), (0, 3)]:
        ch = chain.chain_for_schedule(noise, eps_m, sched)
        final = ch.infid[ch.absorbing_index]
        for n in (5, 20, 40):
            assert tep[n] <= chain.tep(ch, n, final) + 1e-15
            assert aif[n] <= chain.aif(ch, n) + 1e-15
    # and the curve saturates: once failures are negligible the TEP
    # floor is the best achievable final infidelity
    opt = pumping.optimize_schedule(noise, eps_m, (0, 8))
    assert tep[40] == pytest.approx(opt.delta_min, rel=0.05)


def test_fig16_point_matches_operating_point():
    result = _invoke([
        "contours", "--figure", "fig16", "--model", "dephasing",
        "--grid", "p_l=1e-4:1e-4:1", "--grid", "one_minus_f=0.05:0.05:1",
    ])
    assert result.exit_code == 0
    _, rows = _parse_csv(result.output)
    (row,) = rows
    noise = bc.NoiseParams("dephasing", 0.95, p_gate=1e-4,
                           p_init=0.05, p_meas=0.05)
    tp = regmodel.TimingParams(t_local=1.0, tau=1e-12,
                               cooperativity=1.0, efficiency=0.2)
    point = regmodel.operating_point(noise, tp, mode="tep")
    expected = point.metrics.clock_floor / point.metrics.cycle_error
    assert float(row[3]) == pytest.approx(math.log10(expected), rel=1e-12)
    assert float(row[4]) == pytest.approx(
        math.log10(point.metrics.cycle_error), rel=1e-12
    )


# ---------------------------------------------------- determinism


def test_sweep_deterministic_and_thread_invariant(tmp_path):
    args = [
        "contours", "--figure", "fig11",
        "--grid", "p_l=1e-5:1e-3:3:log", "--grid", "f=0.9:0.95:2",
    ]
    serial_a = _invoke(args, env={"REGSIM_THREADS": "1"})
    serial_b = _invoke(args, env={"REGSIM_THREADS": "1"})
    pooled = _invoke(args, env={"REGSIM_THREADS": "3"})
    assert serial_a.exit_code == serial_b.exit_code == pooled.exit_code == 0
    assert serial_a.output == serial_b.output
    assert serial_a.output == pooled.output


def test_bad_threads_env_rejected():
    args = [
        "contours", "--figure", "fig11",
        "--grid", "p_l=1e-4:1e-4:1", "--grid", "f=0.95:0.95:1",
    ]
    result = _invoke(args, env={"REGSIM_THREADS": "many"})
    assert result.exit_code != 0
    assert "REGSIM_THREADS" in result.output


# --------------------------------------------------------- table1


def test_table1_json_cells(tmp_path):
    out = tmp_path / "table.json"
    result = _invoke(["table1", "--out", str(out)])
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "table1"
    cells = doc["cells"]
    assert len(cells) == 16
    # wiring check: one cell against the library directly
    cell = next(c for c in cells
                if c["model"] == "dephasing" and c["p_l"] == 1e-4
                and c["f"] == 0.95)
    noise = bc.NoiseParams("dephasing", 0.95, p_gate=1e-4,
                           p_init=0.05, p_meas=0.05)
    tp = regmodel.TimingParams(t_local=1e-7, tau=1e-8,
                               cooperativity=10.0, efficiency=0.2)
    tep = regmodel.operating_point(noise, tp, mode="tep")
    aif = regmodel.operating_point(noise, tp, mode="aif")
    assert cell["n_tot_tep"] == tep.n_tot
    assert cell["n_tot_aif"] == aif.n_tot
    assert cell["t_c_tep_us"] == pytest.approx(tep.metrics.t_clock * 1e6)
    assert cell["gamma"] == pytest.approx(tep.metrics.cycle_error)
    assert cell["schedule"] == list(tep.schedule)


def test_table1_csv_flavor(tmp_path):
    out = tmp_path / "table.csv"
    result = _invoke(["table1", "--out", str(out)])
    assert result.exit_code == 0
    header, rows = _parse_csv(out.read_text())
    assert header[:3] == ["model", "p_l", "f"]
    assert len(rows) == 16
    schedules = {r[header.index("schedule")] for r in rows}
    assert all("+" in s for s in schedules)


# ------------------------------------------------------------ ghz


def test_ghz_report_depth_registers_and_scaling(tmp_path):
    out = tmp_path / "ghz.json"
    result = _invoke(["ghz", "--out", str(out), "--seed", "0"])
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["depth"] == 3
    assert doc["schedule"]["n_registers"] == 8
    assert [inj["p"] for inj in doc["injection"]] == [0.01, 0.02, 0.04]
    assert 1.8 <= doc["multi_register_scaling_exponent"] <= 2.2
    for inj in doc["injection"]:
        assert inj["per_register_rate"] == pytest.approx(1.25 * inj["p"],
                                                         rel=0.10)


def test_ghz_k2_zero_rate(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(
        {"k": 2, "p_values": [0.0], "n_samples": 2000}
    ))
    out = tmp_path / "ghz.json"
    result = _invoke(["ghz", "--config", str(cfg), "--out", str(out)])
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["depth"] == 2
    assert doc["schedule"]["n_registers"] == 4
    (inj,) = doc["injection"]
    assert inj["multi_register_rate"] == 0.0
    assert inj["per_register_rate"] == 0.0
    assert doc["multi_register_scaling_exponent"] is None


# ------------------------------------------------------- validate


VALIDATE_FAST = {"n_samples": 4000, "n_seeds": 2, "budgets": [20]}


def test_validate_passes_and_reports(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(VALIDATE_FAST))
    out = tmp_path / "report.json"
    result = _invoke(
        ["validate", "--config", str(cfg), "--seed", "0", "--out", str(out)]
    )
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert doc["verdicts_identical_across_seeds"] is True
    assert [run["seed"] for run in doc["runs"]] == [0, 1]
    names = [c["name"] for c in doc["runs"][0]["checks"]]
    assert names == [
        "ps_fail_vs_chain_n20",
        "ps_aif_vs_chain",
        "delivered_infidelity",
        "nps_noiseless_vs_chain",
        "generation_identity",
        "fault_injection_detects",
    ]


def test_validate_starved_sampler_fails_named_check(tmp_path):
    # with 50 samples the 3-sigma band swallows the deliberately
    # perturbed chain, so the detector self-test must report failure
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(
        {"n_samples": 50, "n_seeds": 2, "budgets": [20]}
    ))
    out = tmp_path / "report.json"
    result = _invoke(
        ["validate", "--config", str(cfg), "--seed", "0", "--out", str(out)]
    )
    assert result.exit_code == 1
    doc = json.loads(out.read_text())
    assert doc["passed"] is False
    failing = [c["name"] for c in doc["runs"][0]["checks"] if not c["passed"]]
    assert "fault_injection_detects" in failing


def test_validate_seed_robustness_across_bases(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(VALIDATE_FAST))
    for seed in ("3", "17"):
        result = _invoke(["validate", "--config", str(cfg), "--seed", seed])
        assert result.exit_code == 0, f"seed {seed}: {result.output}"


# ------------------------------------------------------------ misc


def test_model_flag_rejected_for_fixed_model_figure():
    result = _invoke(
        ["contours", "--figure", "fig13", "--model", "depolarizing"]
    )
    assert result.exit_code != 0
    assert "fixed error model" in result.output


def test_help_lists_commands_and_schemas():
    top = _invoke(["--help"])
    for name in ("fidelity-curve", "contours", "table1", "ghz", "validate"):
        assert name in top.output
    contours_help = _invoke(["contours", "--help"])
    assert "log10_tmem_over_tl" in contours_help.output
    assert "ntot_tep" in contours_help.output
    curve_help = _invoke(["fidelity-curve", "--help"])
    assert "fail_prob" in curve_help.output


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "regsim.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "fidelity-curve" in proc.stdout
