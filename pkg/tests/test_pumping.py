import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regsim import bellcore as bc
from regsim import pumping as pp

DEPOL_95 = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)
DEPH_95 = bc.NoiseParams("dephasing", 0.95, p_gate=1e-4)
EPS_M = 1e-4


def fv_strategy():
    return (
        st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4)
        .map(lambda v: np.asarray(v) / sum(v))
    )


def test_pump_bit_ideal_fixed_points():
    # [TRIVIAL] perfect pairs are a fixed point
    perfect = np.array([1.0, 0.0, 0.0, 0.0])
    p, out = pp.pump_bit_ideal(perfect, perfect)
    assert p == pytest.approx(1.0) and np.allclose(out, perfect)
    # [DERIVED] equal phi+/psi+ weight cannot be separated by bit pumping
    half = np.array([0.5, 0.0, 0.5, 0.0])
    p, out = pp.pump_bit_ideal(half, half)
    assert p == pytest.approx(0.5) and np.allclose(out, half)


def test_pump_bit_ideal_werner():
    # [DERIVED] direct evaluation of the kept-branch map; cross-checked
    # against the 16-dim density-matrix circuit in test_noisy_step_matches...
    w = bc.fidelity_vector("depolarizing", 0.95)
    p, out = pp.pump_bit_ideal(w, w)
    a, b, c, d = w
    p_want = (a + b) ** 2 + (c + d) ** 2
    assert p == pytest.approx(p_want, abs=1e-15)
    assert out[0] == pytest.approx((a * a + b * b) / p_want, abs=1e-15)
    assert out[0] == pytest.approx(0.96496, abs=5e-6)


def test_pump_phase_ideal_dephasing_sequence():
    # [DERIVED] hand evaluation: a' = a F/(a F + b (1-F)) for dephasing pairs
    w = bc.fidelity_vector("dephasing", 0.95)
    cur = w
    expected = (0.99723757, 0.99985423, 0.99999233)
    for want in expected:
        p, cur = pp.pump_phase_ideal(w, cur)
        assert cur[0] == pytest.approx(want, abs=1e-8)
        assert cur[2] == 0.0 and cur[3] == 0.0
    # [DERIVED] equal phase error is a fixed point
    half = np.array([0.5, 0.5, 0.0, 0.0])
    p, out = pp.pump_phase_ideal(half, half)
    assert p == pytest.approx(0.5) and np.allclose(out, half)


def test_ideal_step_rejects_impossible_branch():
    # post-selecting the even-parity branch of a pure psi+ x phi+ input
    psi = np.array([0.0, 0.0, 1.0, 0.0])
    phi = np.array([1.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        pp.pump_bit_ideal(psi, phi)


@given(raw=fv_strategy(), cur=fv_strategy())
@settings(max_examples=100, deadline=None)
def test_branch_weights_partition_unity(raw, cur):
    for kind in (pp.BIT, pp.PHASE):
        kept, disc = pp._branch_weights(raw, cur, kind)
        assert kept.min() >= -1e-15 and disc.min() >= -1e-15
        assert kept.sum() + disc.sum() == pytest.approx(1.0, abs=1e-12)


@given(raw=fv_strategy(), cur=fv_strategy(), kind=st.sampled_from([pp.BIT, pp.PHASE]))
@settings(max_examples=40, deadline=None)
def test_noisy_step_matches_density_matrix_circuit(raw, cur, kind):
    # the closed-form channel must agree with the explicit 4-qubit circuit
    noise = bc.NoiseParams("depolarizing", 0.9, p_gate=3e-3)
    eps = 2e-3
    q_cf, out_cf, _ = pp._step_weights(raw, cur, kind, noise.p_gate, eps)
    q_dm, out_dm = pp.pump_step_noisy(
        bc.bell_embed(raw), bc.bell_embed(cur), kind, noise, eps
    )
    assert q_dm == pytest.approx(float(q_cf), abs=1e-10)
    assert np.allclose(bc.bell_extract(out_dm, tol=1e-9), out_cf, atol=1e-10)


def test_noisy_step_reduces_to_ideal():
    rng = np.random.default_rng(3)
    noise = bc.NoiseParams("depolarizing", 0.9)
    for _ in range(5):
        w = rng.dirichlet(np.ones(4))
        v = rng.dirichlet(np.ones(4))
        for kind, ideal in ((pp.BIT, pp.pump_bit_ideal), (pp.PHASE, pp.pump_phase_ideal)):
            p_i, out_i = ideal(w, v)
            p_n, out_n = pp.pump_step_noisy(
                bc.bell_embed(w), bc.bell_embed(v), kind, noise, 0.0
            )
            assert p_n == pytest.approx(p_i, abs=1e-10)
            assert np.allclose(bc.bell_extract(out_n), out_i, atol=1e-10)


def test_failure_branch_restores_previous_state_noiseless_dephasing():
    # with perfect operations and dephasing pairs, failing a step on the
    # k-times-pumped pair gives back exactly the (k-1)-times-pumped pair,
    # so the score fully determines the state
    raw = bc.fidelity_vector("dephasing", 0.9)
    states = [raw]
    for _ in range(3):
        _, out, _ = pp._step_weights(raw, states[-1], pp.PHASE, 0.0, 0.0)
        states.append(out)
    for k in range(1, 4):
        _, _, fail = pp._step_weights(raw, states[k], pp.PHASE, 0.0, 0.0)
        assert np.allclose(fail, states[k - 1], atol=1e-12)


def test_run_schedule_nominal_trajectory():
    res = pp.run_schedule(DEPOL_95, EPS_M, (3, 3))
    assert len(res.level1) == 4 and len(res.level2) == 4
    assert res.q_phase[0] == 1.0
    # [DERIVED] oracle values from the density-matrix circuit path
    assert res.q_bit[0] == pytest.approx(0.935294279, abs=1e-8)
    assert np.allclose(
        res.level1[1],
        [0.964878082, 0.0338740682, 6.23924888e-4, 6.23924888e-4],
        atol=1e-9,
    )
    assert res.q_phase[1] == pytest.approx(0.877213701, abs=1e-8)
    assert res.final_infidelity == pytest.approx(2.8216e-4, rel=1e-3)


def test_run_schedule_level1_curve_drops_beyond_first_step():
    # the level-1 fidelity under depolarizing raw pairs peaks at one step
    res = pp.run_schedule(DEPOL_95, EPS_M, (3, 0))
    f = [w[0] for w in res.level1]
    assert f[1] > f[0]
    assert f[2] < f[1] and f[3] < f[2]


def test_run_schedule_trivial():
    res = pp.run_schedule(DEPOL_95, EPS_M, (0, 0))
    assert res.final_infidelity == pytest.approx(0.05, abs=1e-12)


def test_run_schedule_matches_dm_chain():
    # chain the explicit density-matrix step over a full (2,2) schedule
    noise = bc.NoiseParams("depolarizing", 0.92, p_gate=5e-4)
    eps = 3e-4
    res = pp.run_schedule(noise, eps, (2, 2))
    raw_dm = bc.make_raw_pair(noise.raw_model, noise.fidelity)
    cur = raw_dm
    for j in range(2):
        q, cur = pp.pump_step_noisy(raw_dm, cur, pp.BIT, noise, eps)
        assert q == pytest.approx(res.q_bit[j], abs=1e-10)
        assert np.allclose(bc.bell_extract(cur), res.level1[j + 1], atol=1e-10)
    resource = cur
    for k in range(2):
        q, cur = pp.pump_step_noisy(resource, cur, pp.PHASE, noise, eps)
        assert q == pytest.approx(res.q_phase[k + 1], abs=1e-10)
        assert np.allclose(bc.bell_extract(cur), res.level2[k + 1], atol=1e-10)


def test_infidelity_table_consistency():
    table = pp.infidelity_table(DEPOL_95, EPS_M, (2, 3))
    assert table.shape == (3, 4)
    for j in range(3):
        for k in range(4):
            want = pp.run_schedule(DEPOL_95, EPS_M, (j, k)).final_infidelity
            assert table[j, k] == pytest.approx(want, abs=1e-14)


def test_infidelity_closed_form_values():
    # [DERIVED] direct evaluation of the printed leading-order expressions
    got = pp.infidelity_closed_form(DEPH_95, EPS_M, (0, 3))
    assert got == pytest.approx(0.05**4 + 1.25e-4 + 2 * 0.05 * 1e-4, abs=1e-12)
    # ideal-operation limit vanishes with growing schedule
    clean = bc.NoiseParams("depolarizing", 0.95)
    assert pp.infidelity_closed_form(clean, 0.0, (8, 8)) < 1e-6
    with pytest.raises(ValueError):
        pp.infidelity_closed_form(DEPOL_95, EPS_M, (0, 3))
    with pytest.raises(ValueError):
        pp.infidelity_closed_form(DEPH_95, EPS_M, (1, 3))


def test_closed_form_tracks_exact_within_factor_two():
    for f in (0.9, 0.95, 0.99):
        for p_l in (1e-5, 1e-4):
            noise = bc.NoiseParams("depolarizing", f, p_gate=p_l)
            for sched in ((1, 1), (2, 2), (2, 3), (3, 3)):
                exact = pp.run_schedule(noise, p_l, sched).final_infidelity
                approx = pp.infidelity_closed_form(noise, p_l, sched)
                assert 0.5 < approx / exact < 2.0, (f, p_l, sched)


def test_optimize_schedule_depolarizing():
    opt = pp.optimize_schedule(DEPOL_95, EPS_M)
    # exhaustive search over the (8,8) grid lands on (3,3); the infidelity
    # there corresponds to F_fin = 99.97%
    assert (opt.n_bit, opt.n_phase) == (3, 3)
    assert opt.delta_min == pytest.approx(2.8216e-4, rel=1e-3)


def test_optimize_schedule_ties_prefer_fewer_pairs():
    # with no noise at all every schedule below saturation has distinct
    # infidelity, but a fidelity-1 input makes all schedules tie at zero
    clean = bc.NoiseParams("depolarizing", 1.0)
    opt = pp.optimize_schedule(clean, 0.0, caps=(3, 3))
    assert (opt.n_bit, opt.n_phase) == (0, 0)


@given(
    f0=st.floats(0.75, 0.99),
    n=st.integers(1, 8),
)
@settings(max_examples=60, deadline=None)
def test_werner_level1_bounds(f0, n):
    trk = pp.werner_trackers(f0, n, 0)
    alpha = trk.alpha
    # eta strictly decreasing with the printed exponential envelope
    assert np.all(np.diff(trk.eta) < 1e-18)
    assert np.all(
        trk.eta[1:] <= (0.75 ** np.arange(1, n + 1)) * trk.eta[0] + 1e-15
    )
    if alpha < 2.0 / 7.0:
        assert np.all(trk.p_succ > 2.0 / 3.0 * (1 - alpha) - 1e-12)
        assert np.all(trk.p_succ < 1 - alpha + 1e-12)
        base = (1 - 2 * alpha) / (1 - alpha)
        assert np.all(
            trk.delta[1:] > base ** np.arange(1, n + 1) * trk.delta[0] - 1e-12
        )


@given(f0=st.floats(0.77, 0.99), n_b=st.integers(1, 6), n_p=st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_werner_level2_bounds(f0, n_b, n_p):
    trk = pp.werner_trackers(f0, n_b, n_p)
    assert np.all(trk.p2_succ > 0.5)
    d0, e0 = trk.delta2[0], trk.eta2[0]
    # eta' grows, bounded by the one-step recursion
    # eta'_{n+1} < (1+2 delta'_0) eta'_n + 2 eta'_0
    for k in range(n_p):
        assert trk.eta2[k + 1] > 0.5 * (trk.eta2[k] + e0) - 1e-18
        assert trk.eta2[k + 1] < (1 + 2 * d0) * trk.eta2[k] + 2 * e0 + 1e-18
    assert np.all(trk.eta2[1:] > e0 - 1e-18)


def test_epsilon_n_schedule_guarantee():
    for f0 in (0.8, 0.9, 0.95):
        for eps in (1e-2, 1e-3, 1e-4):
            sched = pp.epsilon_n_schedule(f0, eps)
            raw = bc.fidelity_vector("depolarizing", f0)
            cur = raw
            for _ in range(sched.n_bit):
                _, cur = pp.pump_bit_ideal(raw, cur)
            resource = cur
            for _ in range(sched.n_phase):
                _, cur = pp.pump_phase_ideal(resource, cur)
            assert 1.0 - cur[0] < 4 * eps, (f0, eps, sched)


def test_epsilon_n_schedule_infeasible():
    with pytest.raises(ValueError):
        pp.epsilon_n_schedule(0.55, 1e-3)
