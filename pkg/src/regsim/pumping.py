"""Entanglement pumping maps, schedules and schedule optimization.

A stored Bell pair is purified by consuming fresh raw pairs: level 1 pumps
against bit errors (bilateral CNOT with the stored pair as control, Z
readout of the raw pair, keep on equal outcomes), level 2 pumps against
phase errors (raw pair as control, X readout).  Writing Bell labels as
(x, z) bit pairs, the bilateral CNOT maps control (x, z) -> (x, z xor z_t)
and target (x, z) -> (x xor x_c, z), so equal Z outcomes post-select x_raw'
= 0 (bit step) and equal X outcomes post-select z_raw' = 0 (phase step).

Two equivalent implementations are provided and cross-checked in the tests:

* ``pump_step_noisy`` runs the full 4-qubit density-matrix circuit with
  noisy gates and measurement branches (bellcore primitives).
* ``_step_weights`` evaluates the same channel in closed form on Bell
  weight vectors.  On Bell-diagonal pair states the two noisy CNOTs act as
  (1-p_L)^2 times the ideal bilateral CNOT plus the remainder as the fully
  mixed state on both pairs (tracing out either gate's qubits of a product
  of Bell-diagonal pairs leaves maximal mixtures), and readout flips mix
  the true keep/discard branches with weights (1-e)^2 + e^2 and 2e(1-e).
  This closed form is what the schedule runner and the Monte Carlo module
  use; it is exact, not a leading-order expansion.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import bellcore as bc

BIT = "bit"
PHASE = "phase"


class PumpSchedule(NamedTuple):
    """Pumping schedule: n_bit level-1 steps, n_phase level-2 steps."""

    n_bit: int
    n_phase: int


class PumpStepResult(NamedTuple):
    """Success probability and kept state of one pumping step."""

    success_prob: float
    state: np.ndarray


class OptimizeResult(NamedTuple):
    n_bit: int
    n_phase: int
    delta_min: float


def _branch_weights(raw, cur, kind):
    """Unnormalized kept/discarded Bell weights of one ideal pumping step.

    Vectorized over leading axes; the last axis holds (a, b, c, d) weights.
    Returns (kept, discarded); their sums are the true equal/unequal
    readout-parity probabilities.
    """
    ar, br, cr, dr = (raw[..., i] for i in range(4))
    ac, bc_, cc, dc = (cur[..., i] for i in range(4))
    if kind == BIT:
        # stored control keeps its x; kept branch needs x_raw = x_cur
        kept = np.stack(
            [
                ac * ar + bc_ * br,
                ac * br + bc_ * ar,
                cc * cr + dc * dr,
                cc * dr + dc * cr,
            ],
            axis=-1,
        )
        disc = np.stack(
            [
                ac * cr + bc_ * dr,
                ac * dr + bc_ * cr,
                cc * ar + dc * br,
                cc * br + dc * ar,
            ],
            axis=-1,
        )
    elif kind == PHASE:
        kept = np.stack(
            [
                ac * ar + cc * cr,
                bc_ * br + dc * dr,
                ac * cr + cc * ar,
                bc_ * dr + dc * br,
            ],
            axis=-1,
        )
        disc = np.stack(
            [
                ac * br + cc * dr,
                bc_ * ar + dc * cr,
                ac * dr + cc * br,
                bc_ * cr + dc * ar,
            ],
            axis=-1,
        )
    else:
        raise ValueError(f"unknown pumping kind {kind!r}")
    return kept, disc


def _ideal_step(raw, cur, kind):
    raw = bc.check_fidelity_vector(raw)
    cur = bc.check_fidelity_vector(cur)
    kept, _ = _branch_weights(raw, cur, kind)
    p = float(kept.sum())
    if p <= 0.0:
        raise ValueError("pumping step post-selects an impossible branch")
    return PumpStepResult(p, kept / p)


def pump_bit_ideal(raw, cur):
    """One noiseless bit-pumping step.

    Parameters
    ----------
    raw, cur : FidelityVector
        Fresh raw pair and currently stored pair (the map is symmetric in
        the two arguments; the kept pair is ``cur``).

    Returns
    -------
    PumpStepResult
        Success probability p = (a0+b0)(an+bn) + (c0+d0)(cn+dn) and the
        renormalized kept weights.
    """
    return _ideal_step(raw, cur, BIT)


def pump_phase_ideal(raw, cur):
    """One noiseless phase-pumping step (X readout, see module docstring)."""
    return _ideal_step(raw, cur, PHASE)


def _step_weights(raw, cur, kind, p_gate, eps_meas):
    """Exact noisy pumping step on Bell weight vectors.

    Returns (q, kept, discarded): observed success probability and the two
    normalized conditional output weight vectors.  Vectorized over leading
    axes of ``raw``/``cur``.
    """
    kept, disc = _branch_weights(raw, cur, kind)
    g = (1.0 - p_gate) ** 2
    # gate depolarization sends both pairs to the maximal mixture, which
    # splits its weight evenly over the 4 outputs of either parity branch
    mix = (1.0 - g) / 8.0
    kept = g * kept + mix
    disc = g * disc + mix
    f_eq = (1.0 - eps_meas) ** 2 + eps_meas**2
    f_ne = 2.0 * eps_meas * (1.0 - eps_meas)
    w_pass = f_eq * kept + f_ne * disc
    w_fail = f_ne * kept + f_eq * disc
    q = w_pass.sum(axis=-1)
    q_fail = w_fail.sum(axis=-1)
    # a branch of probability zero has no conditional state; report zeros
    with np.errstate(invalid="ignore", divide="ignore"):
        out_pass = np.where(q[..., None] > 0.0, w_pass / q[..., None], 0.0)
        out_fail = np.where(
            q_fail[..., None] > 0.0, w_fail / q_fail[..., None], 0.0
        )
    return q, out_pass, out_fail


def pump_step_noisy(raw, cur, kind, noise, eps_meas):
    """One pumping step on explicit two-qubit density matrices.

    Builds the 4-qubit joint state (``cur`` on qubits 0,1 and ``raw`` on
    2,3), applies one noisy CNOT per register with gate error
    ``noise.p_gate``, measures both raw-pair qubits with flip probability
    ``eps_meas`` (Z basis for bit pumping, X basis for phase pumping), and
    post-selects on equal reported outcomes.

    Returns
    -------
    PumpStepResult
        Observed success probability and the kept stored pair (2-qubit
        density matrix, normalized).
    """
    if kind == BIT:
        gates = [(0, 2), (1, 3)]
        basis = "z"
    elif kind == PHASE:
        gates = [(2, 0), (3, 1)]
        basis = "x"
    else:
        raise ValueError(f"unknown pumping kind {kind!r}")
    joint = bc.tensor(cur, raw)
    for control, target in gates:
        u = bc.cnot_matrix(control, target, 4)
        joint = bc.apply_noisy_gate(joint, u, (control, target), noise.p_gate)
    prob_pass = 0.0
    kept = np.zeros_like(joint)
    for b2 in bc.noisy_measure(joint, 2, eps_meas, basis=basis):
        for b3 in bc.noisy_measure(b2.state, 3, eps_meas, basis=basis):
            if b2.outcome == b3.outcome:
                prob_pass += b2.prob * b3.prob
                kept = kept + b2.prob * b3.prob * b3.state
    if prob_pass <= bc.PROB_TOL:
        raise ValueError("zero post-selection probability")
    return PumpStepResult(prob_pass, bc.partial_trace(kept / prob_pass, [0, 1]))


@dataclass
class ScheduleResult:
    """Nominal (all-success) trajectory of a two-level pumping schedule.

    ``level1[j]`` is the stored level-1 pair after j bit steps (entry 0 is
    the raw pair); ``level2[k]`` the level-2 pair after k phase steps
    (entry 0 is the promoted level-1 resource).  ``q_bit[j-1]`` is the
    success probability q_j of bit step j; ``q_phase[k]`` is Q_k with
    Q_0 = 1 for the deterministic promotion of the first finished resource.
    """

    schedule: PumpSchedule
    level1: list = field(default_factory=list)
    level2: list = field(default_factory=list)
    q_bit: np.ndarray = None
    q_phase: np.ndarray = None
    final_infidelity: float = 0.0

    @property
    def resource(self):
        return self.level1[-1]


def run_schedule(noise, eps_meas, sched):
    """Run the nominal two-level pumping schedule in closed form.

    The level-2 raw resource is always the full n_bit-step level-1 output.
    Equality with chaining ``pump_step_noisy`` over explicit density
    matrices is covered by tests; this path is exact, not approximate.
    """
    sched = PumpSchedule(*sched)
    if sched.n_bit < 0 or sched.n_phase < 0:
        raise ValueError(f"bad schedule {sched}")
    raw = bc.fidelity_vector(noise.raw_model, noise.fidelity)
    level1 = [raw]
    q_bit = np.empty(sched.n_bit)
    for j in range(sched.n_bit):
        q, out, _ = _step_weights(raw, level1[-1], BIT, noise.p_gate, eps_meas)
        q_bit[j] = q
        level1.append(out)
    resource = level1[-1]
    level2 = [resource]
    q_phase = np.empty(sched.n_phase + 1)
    q_phase[0] = 1.0  # promotion of the first finished resource
    for k in range(sched.n_phase):
        q, out, _ = _step_weights(
            resource, level2[-1], PHASE, noise.p_gate, eps_meas
        )
        q_phase[k + 1] = q
        level2.append(out)
    return ScheduleResult(
        schedule=sched,
        level1=level1,
        level2=level2,
        q_bit=q_bit,
        q_phase=q_phase,
        final_infidelity=float(1.0 - level2[-1][0]),
    )


def infidelity_table(noise, eps_meas, sched):
    """Final infidelities of every sub-schedule of ``sched``.

    Returns an (n_bit+1, n_phase+1) array whose (j, k) entry is the final
    infidelity of schedule (j, k).  Row j is read off the per-step states
    of one (j, n_phase) run, so the table costs n_bit+1 schedule runs.
    """
    sched = PumpSchedule(*sched)
    table = np.empty((sched.n_bit + 1, sched.n_phase + 1))
    for j in range(sched.n_bit + 1):
        res = run_schedule(noise, eps_meas, PumpSchedule(j, sched.n_phase))
        table[j] = [1.0 - w[0] for w in res.level2]
    return table


def infidelity_closed_form(noise, eps_meas, sched):
    """Leading-order closed-form purified infidelity.

    Valid for n_bit, n_phase >= 1 with depolarizing raw pairs and for
    (0, n_phase >= 1) with dephasing raw pairs; other schedules are out of
    the formulas' domain and raise ``ValueError``.
    """
    sched = PumpSchedule(*sched)
    n_b, n_p = sched
    one_minus_f = 1.0 - noise.fidelity
    if noise.raw_model == "depolarizing" and n_b >= 1 and n_p >= 1:
        return (
            (3 + 2 * n_p) / 4 * noise.p_gate
            + (4 + 2 * (n_b + n_p)) / 3 * one_minus_f * eps_meas
            + (n_p + 1) * (2 * one_minus_f / 3) ** (n_b + 1)
            + ((n_b + 1) * one_minus_f / 3) ** (n_p + 1)
        )
    if noise.raw_model == "dephasing" and n_b == 0 and n_p >= 1:
        return (
            one_minus_f ** (n_p + 1)
            + (2 + n_p) / 4 * noise.p_gate
            + 2 * one_minus_f * eps_meas
        )
    raise ValueError(f"schedule {sched} outside closed-form domain")


def optimize_schedule(noise, eps_meas, caps=(8, 8)):
    """Exhaustive schedule search minimizing the exact final infidelity.

    Ties break toward fewer total raw pairs (smaller n_bit + n_phase) and
    then toward smaller n_bit.
    """
    best = None
    for n_b in range(caps[0] + 1):
        for n_p in range(caps[1] + 1):
            infid = run_schedule(
                noise, eps_meas, PumpSchedule(n_b, n_p)
            ).final_infidelity
            key = (infid, n_b + n_p, n_b)
            if best is None or key < best:
                best = key
                best_sched = PumpSchedule(n_b, n_p)
    return OptimizeResult(best_sched.n_bit, best_sched.n_phase, best[0])


@dataclass
class WernerTrackers:
    """Level-1/level-2 convergence trackers for ideal pumping of Werner pairs.

    With alpha = (2/3)(1-F0), the level-1 state after n bit steps is
    (1/2+delta_n, 1/2-delta_n-2 eta_n, eta_n, eta_n); the level-2 state
    after n phase steps is parametrized the same way with primes.
    """

    alpha: float
    delta: np.ndarray
    eta: np.ndarray
    p_succ: np.ndarray
    delta2: np.ndarray
    eta2: np.ndarray
    p2_succ: np.ndarray


def werner_trackers(f0, n_bit, n_phase):
    """Run the ideal maps on a Werner pair and collect the trackers."""
    raw = bc.fidelity_vector("depolarizing", f0)
    alpha = (2.0 / 3.0) * (1.0 - f0)
    delta = [raw[0] - 0.5]
    eta = [raw[2]]
    p_succ = []
    cur = raw
    for _ in range(n_bit):
        p, cur = pump_bit_ideal(raw, cur)
        p_succ.append(p)
        delta.append(cur[0] - 0.5)
        eta.append(cur[2])
    resource = cur
    delta2 = [cur[0] - 0.5]
    eta2 = [cur[2]]
    p2_succ = []
    for _ in range(n_phase):
        p, cur = pump_phase_ideal(resource, cur)
        p2_succ.append(p)
        delta2.append(cur[0] - 0.5)
        eta2.append(cur[2])
    return WernerTrackers(
        alpha,
        np.array(delta),
        np.array(eta),
        np.array(p_succ),
        np.array(delta2),
        np.array(eta2),
        np.array(p2_succ),
    )


def epsilon_n_schedule(f0, eps):
    """Schedule guaranteeing ideal-pumping infidelity below 4*eps.

    Uses the closed selection rules for Werner raw pairs: n_bit is the
    ceiling of the larger of two logarithmic bounds in alpha = (2/3)(1-F0),
    and n_phase is taken just above the lower end of its admissible window,
    computed from the actual level-1 trackers.  Infeasible for alpha >= 2/7
    (F0 <= 4/7), where bit pumping no longer converges fast enough.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    alpha = (2.0 / 3.0) * (1.0 - f0)
    if alpha >= 2.0 / 7.0:
        raise ValueError(f"infeasible: alpha={alpha:.4f} >= 2/7")
    log_eps = math.log(eps)
    t1 = (log_eps - math.log(alpha / (1 - 3 * alpha))) / math.log(
        3 * alpha / (2 - 4 * alpha)
    )
    t2 = (3 * log_eps - math.log(alpha / 2)) / math.log(
        3 * alpha / (2 * (1 - alpha))
    )
    n_bit = max(math.ceil(max(t1, t2)), 0)
    trk = werner_trackers(f0, n_bit, 0)
    delta2_0 = trk.delta2[0]
    zeta = 2.0 * eps
    lam = math.sqrt((1 + zeta) / (1 - 2 * zeta)) * delta2_0
    lower = log_eps / math.log(1 - 2 * lam * (1 - 2 * zeta))
    n_phase = math.floor(lower) + 1
    return PumpSchedule(n_bit, max(n_phase, 1))
