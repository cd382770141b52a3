"""Acceptance gate: one test (and one printed pass/fail line) per criterion.

Every tolerance below is pinned by the acceptance contract; none may be
loosened here.  Criterion 02 is a known inconsistency: the reference
value 0.9997 for the (1,3) schedule and the claimed optimizer output
(1,3) do not follow from the model (exact value 0.99729; the optimizer
prefers (3,3), which does deliver 0.99972).  The test asserts the
criterion as stated and is expected to fail; see the analysis notes
kept outside the package.
"""

import json
import math
import time

import numpy as np
from click.testing import CliRunner

from regsim import bellcore as bc
from regsim import chain, cli, mc, protocols, pumping, regmodel


def _gate(num, name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:02d} ({name}): {detail}")
    assert ok, f"criterion {num:02d} ({name}): {detail}"


def test_criterion_01_fig6a_dephasing_curve():
    t0 = time.monotonic()
    noise = bc.NoiseParams("dephasing", 0.95, p_gate=1e-4)
    run = pumping.run_schedule(noise, 1e-4, (0, 3))
    f_fin = 1.0 - run.final_infidelity
    elapsed = time.monotonic() - t0
    ok = abs(f_fin - 0.9998) <= 2e-4 and elapsed < 1.0
    _gate(1, "fig6a", ok, f"F_fin={f_fin:.6f} (target 0.9998 +-2e-4), {elapsed:.3f}s")


def test_criterion_02_fig6b_depolarizing_curve():
    t0 = time.monotonic()
    noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)
    run = pumping.run_schedule(noise, 1e-4, (1, 3))
    f_fin = 1.0 - run.final_infidelity
    opt = pumping.optimize_schedule(noise, 1e-4)
    elapsed = time.monotonic() - t0
    value_ok = abs(f_fin - 0.9997) <= 2e-4
    optimizer_ok = (opt.n_bit, opt.n_phase) == (1, 3)
    ok = value_ok and optimizer_ok and elapsed < 5.0
    _gate(2, "fig6b", ok,
          f"F_fin(1,3)={f_fin:.6f} (target 0.9997 +-2e-4: "
          f"{'ok' if value_ok else 'MISS'}), optimizer=({opt.n_bit},{opt.n_phase}) "
          f"(target (1,3): {'ok' if optimizer_ok else 'MISS'}), {elapsed:.3f}s")


def test_criterion_03_robust_measurement_optima():
    t0 = time.monotonic()
    m4, err4 = regmodel.optimal_m(0.05, 0.05, 1e-4)
    m6, err6 = regmodel.optimal_m(0.05, 0.05, 1e-6)
    elapsed = time.monotonic() - t0
    ok = (
        m4 == 6 and abs(err4 / 8e-4 - 1.0) <= 0.10
        and m6 == 10 and abs(err6 / 1.2e-5 - 1.0) <= 0.25
        and elapsed < 0.1
    )
    _gate(3, "robust measurement", ok,
          f"m*={m4} eps_M={err4:.3e} (6, 8e-4 +-10%); "
          f"m*={m6} eps_M={err6:.3e} (10, 1.2e-5 +-25%); {elapsed:.4f}s")


# printed reference cells: (t_C in us, gamma) keyed by (model, F, p_L)
TABLE1_REFERENCE = {
    ("depolarizing", 0.95, 1e-3): (65.0, 1.9e-2),
    ("depolarizing", 0.95, 1e-4): (200.0, 2.7e-3),
    ("depolarizing", 0.95, 1e-5): (387.0, 3.5e-4),
    ("depolarizing", 0.95, 1e-6): (997.0, 4.5e-5),
    ("depolarizing", 0.99, 1e-3): (19.0, 9.1e-3),
    ("depolarizing", 0.99, 1e-4): (49.0, 1.2e-3),
    ("depolarizing", 0.99, 1e-5): (65.0, 1.3e-4),
    ("depolarizing", 0.99, 1e-6): (162.0, 1.7e-5),
    ("dephasing", 0.95, 1e-3): (20.0, 1.7e-2),
    ("dephasing", 0.95, 1e-4): (42.0, 2.2e-3),
    ("dephasing", 0.95, 1e-5): (80.0, 2.8e-4),
    ("dephasing", 0.95, 1e-6): (140.0, 3.4e-5),
    ("dephasing", 0.99, 1e-3): (8.0, 8.7e-3),
    ("dephasing", 0.99, 1e-4): (17.0, 9.9e-4),
    ("dephasing", 0.99, 1e-5): (22.0, 1.2e-4),
    ("dephasing", 0.99, 1e-6): (39.0, 1.4e-5),
}


def test_criterion_04_table1_regression():
    t0 = time.monotonic()
    result = CliRunner().invoke(cli.main, ["table1"])
    assert result.exit_code == 0, result.output
    cells = json.loads(result.output)["cells"]
    elapsed = time.monotonic() - t0
    assert len(cells) == 16
    misses = []
    for cell in cells:
        ref_tc, ref_gamma = TABLE1_REFERENCE[
            (cell["model"], cell["f"], cell["p_l"])
        ]
        if not abs(cell["t_c_tep_us"] / ref_tc - 1.0) <= 0.50:
            misses.append((cell["model"], cell["f"], cell["p_l"], "t_C",
                           cell["t_c_tep_us"], ref_tc))
        if not abs(cell["gamma"] / ref_gamma - 1.0) <= 0.30:
            misses.append((cell["model"], cell["f"], cell["p_l"], "gamma",
                           cell["gamma"], ref_gamma))
    ok = not misses and elapsed < 600.0
    _gate(4, "table 1", ok,
          f"16/16 cells, t_C +-50% gamma +-30%, {elapsed:.1f}s"
          if ok else f"misses={misses}, {elapsed:.1f}s")


def test_criterion_05_tep_over_aif_budget_ratio():
    result = CliRunner().invoke(cli.main, ["contours", "--figure", "fig11"])
    assert result.exit_code == 0, result.output
    lines = [l for l in result.output.splitlines()
             if l and not l.startswith("#")][1:]
    ratios = []
    for line in lines:
        parts = line.split(",")
        ratios.append(int(parts[4]) / int(parts[5]))
    ok = min(ratios) >= 1.1 and max(ratios) <= 2.2
    _gate(5, "TEP/AIF ratio", ok,
          f"N_tot(TEP)/N_tot(AIF) in [{min(ratios):.3f}, {max(ratios):.3f}] "
          f"over {len(ratios)} grid points (required [1.1, 2.2])")


def test_criterion_06_nps_budget_advantage():
    _, eps_m = regmodel.optimal_m(0.05, 0.05, 1e-5)
    noise = bc.NoiseParams("dephasing", 0.85, p_gate=1e-5,
                           p_init=0.05, p_meas=0.05)
    n_ps = chain.solve_ntot(noise, eps_m, "aif", (0, 8), scheme="ps").n_tot
    n_nps = chain.solve_ntot(noise, eps_m, "aif", (0, 8), scheme="nps").n_tot
    ratio = n_ps / n_nps
    ok = ratio > 3.0
    _gate(6, "PS/NPS ratio", ok,
          f"N_tot(PS)={n_ps}, N_tot(NPS)={n_nps}, ratio={ratio:.2f} (> 3)")


def test_criterion_07_chain_vs_mc_random_points():
    t0 = time.monotonic()
    master = 20260816
    gen = np.random.default_rng(master)
    worst_z = 0.0
    violations = []
    for i in range(20):
        model = "dephasing" if gen.random() < 0.5 else "depolarizing"
        f = gen.uniform(0.80, 0.97)
        p_l = 10 ** gen.uniform(-5, -3)
        eps_m = 10 ** gen.uniform(-5, -3)
        n_b = 0 if model == "dephasing" else int(gen.integers(0, 4))
        n_p = int(gen.integers(1, 5))
        pipeline = (n_b + 1) * (n_p + 1)
        n_tot = int(gen.integers(pipeline, 4 * pipeline + 1))
        noise = bc.NoiseParams(model, f, p_gate=p_l)
        expect = chain.fail_prob(
            chain.chain_for_schedule(noise, eps_m, (n_b, n_p)), n_tot
        )
        stats = mc.simulate_ps(noise, eps_m, (n_b, n_p), n_tot,
                               n_samples=200_000, seed=master + i)
        sigma = math.sqrt(max(expect * (1.0 - expect) / 200_000, 1e-300))
        z = abs(stats.fail_prob - expect) / sigma
        worst_z = max(worst_z, z)
        if z > 3.0:
            violations.append((model, round(f, 3), n_b, n_p, n_tot, round(z, 2)))
    elapsed = time.monotonic() - t0
    ok = not violations and elapsed < 300.0
    _gate(7, "chain vs MC", ok,
          f"20 random points, 2e5 samples each, worst |z|={worst_z:.2f} "
          f"(3-sigma bands), {elapsed:.0f}s"
          if ok else f"violations={violations}, {elapsed:.0f}s")


def test_criterion_08_ideal_pumping_epsilon_schedules():
    misses = []
    for f0 in (0.8, 0.9, 0.95):
        for eps in (1e-2, 1e-3, 1e-4):
            sched = pumping.epsilon_n_schedule(f0, eps)
            trk = pumping.werner_trackers(f0, sched.n_bit, sched.n_phase)
            infid = 0.5 - trk.delta2[-1]
            if not infid < 4 * eps:
                misses.append((f0, eps, tuple(sched), infid))
    ok = not misses
    _gate(8, "epsilon-N schedules", ok,
          "1-F < 4*eps for all 9 (F0, eps) combinations"
          if ok else f"misses={misses}")


def test_criterion_09_ghz_depth_and_fault_scaling():
    t0 = time.monotonic()
    depth2 = protocols.ghz_schedule(2).depth
    depth3 = protocols.ghz_schedule(3).depth
    # the 1.5p +-15% per-register band only admits k >= 4, where the
    # PBM count is 3*2^(k-1) - 2 = 1.375 * 2^k; statistics run at k=4
    circ = protocols.ghz_schedule(4)
    p_values = (0.01, 0.02, 0.04)
    multi, per = [], []
    for p in p_values:
        stats = protocols.ghz_fault_injection(circ, p, 1_000_000, seed=0)
        multi.append(stats.multi_register_rate)
        per.append(stats.per_register_rate)
    slope = float(np.polyfit(np.log(p_values), np.log(multi), 1)[0])
    per_ok = all(abs(r / (1.5 * p) - 1.0) <= 0.15
                 for r, p in zip(per, p_values))
    elapsed = time.monotonic() - t0
    ok = (depth2, depth3) == (2, 3) and abs(slope - 2.0) <= 0.3 \
        and per_ok and elapsed < 300.0
    _gate(9, "GHZ growth", ok,
          f"depths=({depth2},{depth3}), multi-register exponent={slope:.2f} "
          f"(2.0 +-0.3), per-register/1.5p="
          f"{[round(r / (1.5 * p), 3) for r, p in zip(per, p_values)]} "
          f"(+-15%), {elapsed:.0f}s")


def test_criterion_10_teleported_cnot_baseline():
    worst = 0.0
    misses = []
    for f in (0.90, 0.95, 0.99):
        for p_l, p_m in [(0.0, 0.0), (0.01, 0.01), (0.05, 0.05),
                         (0.01, 0.05), (0.05, 0.01), (0.02, 0.0), (0.0, 0.02)]:
            bell = bc.fidelity_vector("depolarizing", f)
            noise = bc.NoiseParams("depolarizing", f, p_gate=p_l, p_meas=p_m)
            err = protocols.cnot_process_error(bell, noise)
            base = regmodel.p_cnot_baseline(noise)
            rel = abs(err / base - 1.0)
            worst = max(worst, rel)
            if rel > 0.30:
                misses.append((f, p_l, p_m, round(rel, 3)))
    ok = not misses
    _gate(10, "teleported-CNOT baseline", ok,
          f"exact process error within +-30% of (1-F)+2p_L+2p_M at all "
          f"21 grid points, worst {worst:.1%}"
          if ok else f"misses={misses}")
