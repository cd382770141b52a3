"""Absorbing Markov chains for pumping success statistics.

Each chain tracks one purification slot over discrete attempts; every
transition consumes one raw pair (or one generation attempt once a
generation sublevel is added).  Matrices are column stochastic: M[i, j] is
the probability of moving to state i from state j, and the probability
vector evolves as P -> M P from P_0 = (1, 0, ..., 0).

State layout
------------
One-level chains have states (0, 1, ..., n, final): state j >= 1 holds a
pair with j-1 completed pumping steps, state 0 holds nothing.  Two-level
chains have (n_b+1)(n_p+1)+1 states ordered in blocks K = 0..n_p of size
n_b+1: state (K, J) means K level-1 resources have been consumed by level 2
(so the stored level-2 pair has K-1 completed phase steps, none for K = 0)
while the level-1 pair in progress has J completed bit steps.  The phase
step is contracted into the attempt that completes its resource, so the
block exit from (K, n_b) splits success q_{n_b} into Q-weighted promotion
and failure branches.  The flat index of (K, J) is K(n_b+1)+J; the final
state is last.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import pumping
from .bellcore import PROB_TOL

ATTEMPT_CAP = 10**6


@dataclass(frozen=True)
class PumpChain:
    """Absorbing chain plus the metadata needed to weight its states."""

    kind: str  # "one_level_ps" | "one_level_nps" | "two_level_ps" | "two_level_mixed"
    dims: tuple  # (n,) for one-level, (n_b, n_p) for two-level
    labels: tuple
    matrix: np.ndarray
    infid: np.ndarray = None
    absorbing_index: int = -1

    def __post_init__(self):
        m = self.matrix
        n = m.shape[0]
        if m.shape != (n, n):
            raise ValueError("transition matrix must be square")
        cols = m.sum(axis=0)
        if np.abs(cols - 1.0).max() > PROB_TOL or m.min() < 0.0:
            raise ValueError("matrix is not column stochastic")
        a = self.absorbing_index % n
        if m[a, a] != 1.0:
            raise ValueError("final state is not absorbing")
        object.__setattr__(self, "absorbing_index", a)


def _check_probs(q):
    q = np.asarray(q, dtype=float)
    if q.ndim != 1:
        raise ValueError("success probabilities must be a vector")
    if q.size and (q.min() <= 0.0 or q.max() > 1.0):
        raise ValueError(f"success probabilities outside (0, 1]: {q}")
    return q


def _one_level_matrix(q, fail_target):
    """Shared one-level builder; fail_target(j) gives the failure state."""
    n = q.size
    m = np.zeros((n + 2, n + 2))
    m[1, 0] = 1.0  # generation of a fresh pair, q_0 = 1
    for j in range(1, n + 1):
        m[j + 1, j] = q[j - 1]
        m[fail_target(j), j] += 1.0 - q[j - 1]
    m[n + 1, n + 1] = 1.0
    return m


def _one_level_infid(q_len, infid_steps):
    if infid_steps is None:
        return None
    infid_steps = np.asarray(infid_steps, dtype=float)
    if infid_steps.shape != (q_len + 1,):
        raise ValueError(
            f"need {q_len + 1} per-step infidelities, got {infid_steps.shape}"
        )
    # state j >= 1 holds a pair with j-1 completed steps; state 0 holds
    # nothing and enters the average as the classical 1/2 term
    return np.concatenate([[0.5], infid_steps])


def build_one_level_ps(q, infid_steps=None):
    """Post-selective one-level chain: failure discards the pair.

    Parameters
    ----------
    q : sequence
        Success probabilities q_1..q_n of the n pumping steps.
    infid_steps : sequence, optional
        Infidelity of the pair after 0..n completed steps; stored as the
        per-state AIF weights.
    """
    q = _check_probs(q)
    if q.size == 0:
        raise ValueError("empty success-probability vector")
    m = _one_level_matrix(q, lambda j: 0)
    labels = ("0",) + tuple(str(j) for j in range(1, q.size + 1)) + ("*",)
    return PumpChain(
        "one_level_ps", (q.size,), labels, m, _one_level_infid(q.size, infid_steps)
    )


def build_one_level_nps(q, infid_steps=None):
    """Non-post-selective one-level chain: failure drops the score by one.

    A failed step on a fresh pair (state 1) leaves nothing usable, so it
    falls to state 0 and regenerates on the next attempt.
    """
    q = _check_probs(q)
    if q.size == 0:
        raise ValueError("empty success-probability vector")
    m = _one_level_matrix(q, lambda j: j - 1)
    labels = ("0",) + tuple(str(j) for j in range(1, q.size + 1)) + ("*",)
    return PumpChain(
        "one_level_nps", (q.size,), labels, m, _one_level_infid(q.size, infid_steps)
    )


def _two_level_weights(n_b, n_p, infid_table):
    if infid_table is None:
        return None
    table = np.asarray(infid_table, dtype=float)
    if table.shape != (n_b + 1, n_p + 1):
        raise ValueError(
            f"infidelity table shape {table.shape}, want {(n_b + 1, n_p + 1)}"
        )
    size = (n_b + 1) * (n_p + 1) + 1
    w = np.empty(size)
    w[0] = 0.5
    for k in range(n_p + 1):
        for j in range(n_b + 1):
            idx = k * (n_b + 1) + j
            if idx == 0:
                continue
            if j == 0:
                # a (K,0) state holds only the level-2 pair, pumped K-1 times
                w[idx] = table[n_b, k - 1]
            else:
                w[idx] = table[j - 1, k]
    w[-1] = table[n_b, n_p]
    return w


def _two_level_matrix(q, Q, n_b, n_p, level2_fail_target):
    blocks = n_p + 1
    size = blocks * (n_b + 1) + 1
    m = np.zeros((size, size))
    q_last = q[n_b - 1] if n_b >= 1 else 1.0
    for k in range(blocks):
        base = k * (n_b + 1)
        # in-block level-1 progression (generation is deterministic)
        if n_b >= 1:
            m[base + 1, base] = 1.0
            for j in range(1, n_b):
                m[base + j + 1, base + j] = q[j - 1]
                m[base, base + j] += 1.0 - q[j - 1]
        # block exit from (K, n_b): bit failure keeps the level-2 pair
        exit_col = base + n_b
        m[base, exit_col] += 1.0 - q_last
        big_q = 1.0 if k == 0 else Q[k - 1]  # Q_0 = 1: promotion
        if k < n_p:
            m[(k + 1) * (n_b + 1), exit_col] += q_last * big_q
        else:
            m[size - 1, exit_col] += q_last * big_q
        if big_q < 1.0:
            m[level2_fail_target(k) * (n_b + 1), exit_col] += q_last * (
                1.0 - big_q
            )
    m[size - 1, size - 1] = 1.0
    return m


def _two_level_labels(n_b, n_p):
    labels = tuple(
        f"{k},{j}" for k in range(n_p + 1) for j in range(n_b + 1)
    )
    return labels + ("*",)


def build_two_level_ps(q, Q, n_b, n_p, infid_table=None):
    """Post-selective two-level chain (contracted form).

    Parameters
    ----------
    q, Q : sequences
        Level-1 probabilities q_1..q_{n_b} and level-2 probabilities
        Q_1..Q_{n_p} (the deterministic promotion Q_0 = 1 is implicit).
    n_b, n_p : int
        Schedule; must match the vector lengths.
    infid_table : array (n_b+1, n_p+1), optional
        Sub-schedule infidelities from ``pumping.infidelity_table``, mapped
        onto the states as the AIF weight vector.
    """
    q, Q = _check_probs(q), _check_probs(Q)
    if q.size != n_b or Q.size != n_p:
        raise ValueError("probability vectors inconsistent with schedule")
    m = _two_level_matrix(q, Q, n_b, n_p, lambda k: 0)
    return PumpChain(
        "two_level_ps",
        (n_b, n_p),
        _two_level_labels(n_b, n_p),
        m,
        _two_level_weights(n_b, n_p, infid_table),
    )


def build_two_level_mixed(q, Q, n_b, n_p, infid_table=None):
    """PS at level 1, NPS at level 2: a failed phase step drops K by one."""
    q, Q = _check_probs(q), _check_probs(Q)
    if q.size != n_b or Q.size != n_p:
        raise ValueError("probability vectors inconsistent with schedule")
    m = _two_level_matrix(q, Q, n_b, n_p, lambda k: k - 1)
    return PumpChain(
        "two_level_mixed",
        (n_b, n_p),
        _two_level_labels(n_b, n_p),
        m,
        _two_level_weights(n_b, n_p, infid_table),
    )


def add_generation_sublevel(chain, p_gen):
    """Gate every transition behind a Bernoulli(p_gen) generation attempt.

    Entanglement generation succeeds only with probability p_gen, so each
    attempt either performs the original transition (with the raw pair now
    available) or leaves the state unchanged.  This is the contracted form
    of inserting a two-state generation stage before every raw-consuming
    transition; the memoryless stage collapses onto the existing states.
    """
    if not 0.0 < p_gen <= 1.0:
        raise ValueError(f"p_gen {p_gen} outside (0, 1]")
    m = p_gen * chain.matrix + (1.0 - p_gen) * np.eye(chain.matrix.shape[0])
    return replace(chain, matrix=m)


def evolve(chain, n_tot):
    """Occupancy vector after ``n_tot`` attempts (iterated mat-vec)."""
    if n_tot < 0:
        raise ValueError("n_tot must be non-negative")
    p = np.zeros(chain.matrix.shape[0])
    p[0] = 1.0
    for _ in range(n_tot):
        p = chain.matrix @ p
    return p


def fail_prob(chain, n_tot):
    """Probability of not having finished after ``n_tot`` attempts."""
    return float(1.0 - evolve(chain, n_tot)[chain.absorbing_index])


def tep(chain, n_tot, infid_final):
    """Total error probability: failure plus the delivered infidelity.

    At n_tot = 0 the failure probability is 1 (nothing delivered; the
    delivered-state fidelity is zero), so tep(0) = 1 + infid_final under
    this additive convention.
    """
    return fail_prob(chain, n_tot) + infid_final


def _aif_weights(chain, infid_table):
    if infid_table is None:
        if chain.infid is None:
            raise ValueError("chain carries no infidelity weights")
        return chain.infid
    if chain.kind.startswith("one_level"):
        return _one_level_infid(chain.dims[0], infid_table)
    return _two_level_weights(*chain.dims, infid_table)


def aif(chain, n_tot, infid_table=None):
    """Average infidelity of the delivered pair after ``n_tot`` attempts.

    States are weighted by their pair's infidelity; the no-pair state
    counts 1/2 (a random guess instead of a gate).  ``infid_table``
    overrides the weights stored on the chain.
    """
    w = _aif_weights(chain, infid_table)
    return float(w @ evolve(chain, n_tot))


class SolveResult(NamedTuple):
    n_tot: int
    schedule: pumping.PumpSchedule
    delta_min: float


def _first_hit(chain, condition_value, target, cap=ATTEMPT_CAP):
    """Smallest N with condition_value(P_N) <= target.

    condition_value maps an occupancy vector to the monotone figure of
    merit, so the first hit of a linear scan is the exact answer (cheaper
    than bisection, which would need the whole trajectory anyway since
    matrix powers are not used).
    """
    p = np.zeros(chain.matrix.shape[0])
    p[0] = 1.0
    if condition_value(p) <= target:
        return 0
    for n in range(1, cap + 1):
        p = chain.matrix @ p
        if condition_value(p) <= target:
            return n
    raise RuntimeError(
        f"target {target:g} not reached within {cap} attempts"
    )


def solve_ntot(noise, eps_meas, mode, caps=(8, 8), scheme="ps", cap=ATTEMPT_CAP):
    """Attempt budget meeting the operating point eps_E = 2 delta_min.

    Optimizes the schedule, builds the chain of the requested scheme from
    the nominal per-step success probabilities, and scans for the smallest
    N_tot satisfying the mode's condition: fail_prob <= delta_min for
    "tep" (so tep <= 2 delta_min) or aif <= 2 delta_min for "aif".

    scheme: "ps" (two-level PS; one-level when n_b = 0), "nps" (one-level
    NPS, requires n_b = 0 schedules), or "mixed" (PS level 1, NPS level 2).
    """
    if mode not in ("tep", "aif"):
        raise ValueError(f"unknown mode {mode!r}")
    opt = pumping.optimize_schedule(noise, eps_meas, caps)
    sched = pumping.PumpSchedule(opt.n_bit, opt.n_phase)
    chain = chain_for_schedule(noise, eps_meas, sched, scheme)
    if mode == "tep":
        abs_idx = chain.absorbing_index
        n = _first_hit(
            chain, lambda p: 1.0 - p[abs_idx], opt.delta_min, cap
        )
    else:
        w = chain.infid
        n = _first_hit(chain, lambda p: w @ p, 2.0 * opt.delta_min, cap)
    return SolveResult(n, sched, opt.delta_min)


def chain_for_schedule(noise, eps_meas, sched, scheme="ps"):
    """Build the chain of a schedule from its nominal success trajectory."""
    sched = pumping.PumpSchedule(*sched)
    res = pumping.run_schedule(noise, eps_meas, sched)
    table = pumping.infidelity_table(noise, eps_meas, sched)
    if sched.n_bit == 0:
        q = res.q_phase[1:]
        steps = table[0]
        if scheme not in ("ps", "nps", "mixed"):
            raise ValueError(f"unknown scheme {scheme!r}")
        if sched.n_phase == 0:
            return _trivial_chain(steps)
        # with no level-1 steps the phase level is the whole chain, so
        # "mixed" (NPS at level 2) coincides with plain NPS
        build = build_one_level_ps if scheme == "ps" else build_one_level_nps
        return build(q, steps)
    if scheme == "ps":
        build = build_two_level_ps
    elif scheme == "mixed":
        build = build_two_level_mixed
    elif scheme == "nps":
        raise ValueError("one-level NPS needs an n_b = 0 schedule")
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return build(res.q_bit, res.q_phase[1:], sched.n_bit, sched.n_phase, table)


def _trivial_chain(steps):
    # (0,0) schedule: a single generation attempt delivers the raw pair
    m = np.array([[0.0, 0.0], [1.0, 1.0]])
    return PumpChain(
        "one_level_ps", (0,), ("0", "*"), m, np.array([0.5, steps[-1]])
    )
