"""Monte Carlo trajectory oracle for pumping and generation statistics.

Samples full restart-on-failure trajectories attempt by attempt and
reports empirical absorption statistics, independently of the analytic
chain evolution it is used to validate.  Per-step success probabilities
come from the exact Bell-weight update of the tracked pair
(:func:`regsim.pumping._step_weights`): under post-selection the tracked
state at a given chain position is deterministic, so those probabilities
coincide with the nominal schedule values; the non-post-selective sampler
keeps one weight vector per sample instead and resolves the full history.

Sampling is vectorized over the fixed-size chunks of
:mod:`regsim.rng`; every attempt consumes exactly one uniform per sample
lane (absorbed lanes keep drawing), so the stream layout is a pure
function of the seed and statistics merge bit-identically across any
worker split along chunk boundaries.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from . import bellcore as bc
from . import pumping
from .pumping import PHASE, PumpSchedule
from .rng import chunk_streams

DEFAULT_SAMPLES = 200_000


@dataclass(frozen=True)
class TrajectoryStats:
    """Empirical absorption statistics of one batch of trajectories.

    ``attempts[a]`` counts samples absorbed at exactly attempt ``a``
    (index 0 is unused) and the final entry counts samples never absorbed
    within the budget, so the tuple sums to ``n_samples``.
    ``mean_infidelity`` averages the delivered pairs only (None when
    nothing was delivered); ``aif`` averages the infidelity weight over
    all samples, scoring undelivered samples by the pair they hold at
    budget exhaustion (one half for samples holding nothing).
    """

    n_samples: int
    n_tot: int
    n_delivered: int
    fail_prob: float
    fail_ci: tuple
    mean_infidelity: float
    aif: float
    attempts: tuple


def _finalize(n_samples, n_tot, attempts, delivered_infid_sum, aif_sum):
    n_fail = int(attempts[-1])
    n_delivered = n_samples - n_fail
    ci = binomtest(n_fail, n_samples).proportion_ci(
        confidence_level=0.95, method="wilson"
    )
    return TrajectoryStats(
        n_samples=n_samples,
        n_tot=n_tot,
        n_delivered=n_delivered,
        fail_prob=n_fail / n_samples,
        fail_ci=(float(ci.low), float(ci.high)),
        mean_infidelity=(
            delivered_infid_sum / n_delivered if n_delivered else None
        ),
        aif=aif_sum / n_samples,
        attempts=tuple(int(c) for c in attempts),
    )


def _check_args(n_tot, n_samples):
    if n_tot < 0:
        raise ValueError("attempt budget must be non-negative")
    if n_samples < 1:
        raise ValueError("need at least one sample")


def _ps_weights(noise, eps_meas, sched):
    """Per-state infidelity weights, laid out as (block, in-block) grid.

    Fresh restarts score one half; a block-K entry state holds the pair
    pumped through K-1 phase rounds; an in-progress state with J raw
    pairs consumed is scored by its J-1 completed bit steps.
    """
    n_b, n_p = sched
    table = pumping.infidelity_table(noise, eps_meas, sched)
    w = np.empty((n_p + 2, n_b + 1))
    w[0, 0] = 0.5
    for k in range(1, n_p + 1):
        w[k, 0] = table[n_b, k - 1]
    for j in range(1, n_b + 1):
        for k in range(n_p + 1):
            w[k, j] = table[j - 1, k]
    w[n_p + 1, :] = table[n_b, n_p]  # delivered
    return w, float(table[n_b, n_p])


def _walk_ps(noise, eps_meas, sched, n_tot, n_samples, seed, p_gen):
    sched = PumpSchedule(*sched)
    _check_args(n_tot, n_samples)
    if not 0.0 < p_gen <= 1.0:
        raise ValueError(f"generation probability {p_gen} outside (0, 1]")
    run = pumping.run_schedule(noise, eps_meas, sched)
    n_b, n_p = sched
    q_bit = run.q_bit
    q_phase = run.q_phase  # q_phase[0] = 1 is the deterministic promotion
    q_last = float(q_bit[n_b - 1]) if n_b >= 1 else 1.0
    weights, final_infid = _ps_weights(noise, eps_meas, sched)
    attempts = np.zeros(n_tot + 2, dtype=np.int64)
    delivered_infid_sum = 0.0
    aif_sum = 0.0
    for start, stop, gen in chunk_streams(seed, n_samples):
        m = stop - start
        block = np.zeros(m, dtype=np.int64)
        used = np.zeros(m, dtype=np.int64)  # raw pairs consumed in the block
        absorbed_at = np.zeros(m, dtype=np.int64)
        for t in range(1, n_tot + 1):
            u = gen.random(m)
            alive = absorbed_at == 0
            if not alive.any():
                continue
            act = alive & (u < p_gen)
            v = u / p_gen  # conditional uniform inside a generated attempt
            if n_b >= 1:
                fresh = act & (used == 0)
            else:
                fresh = np.zeros(m, dtype=bool)
            exiting = act & ~fresh & (used == n_b)
            mid = act & ~fresh & ~exiting
            big_q = q_phase[np.clip(block, 0, n_p)]
            advance = exiting & (v < q_last * big_q)
            phase_fail = exiting & ~advance & (v < q_last)
            delivered = advance & (block == n_p)
            new_used = np.where(fresh, 1, used)
            if n_b >= 1:
                q_mid = q_bit[np.clip(used - 1, 0, n_b - 1)]
                new_used = np.where(mid, np.where(v < q_mid, used + 1, 0), new_used)
            new_used = np.where(exiting, 0, new_used)
            new_block = np.where(advance, block + 1, block)
            new_block = np.where(phase_fail, 0, new_block)  # full restart
            block, used = new_block, new_used
            absorbed_at = np.where(delivered, t, absorbed_at)
        done = absorbed_at > 0
        attempts[: n_tot + 1] += np.bincount(
            absorbed_at[done], minlength=n_tot + 1
        )
        attempts[n_tot + 1] += int((~done).sum())
        n_done = int(done.sum())
        delivered_infid_sum += n_done * final_infid
        aif_sum += n_done * final_infid
        aif_sum += float(weights[block[~done], used[~done]].sum())
    return _finalize(n_samples, n_tot, attempts, delivered_infid_sum, aif_sum)


def simulate_ps(noise, eps_meas, sched, n_tot, n_samples=DEFAULT_SAMPLES, seed=0):
    """Sample post-selective pumping trajectories against a raw-pair budget.

    Each attempt consumes one raw pair.  A failed bit step discards only
    the in-progress level-1 pair (back to the start of the block); a
    failed phase step discards everything.  Absorption means the full
    schedule completed within ``n_tot`` attempts.

    Returns a :class:`TrajectoryStats`; the analytic counterpart is
    ``chain.evolve`` on ``chain.chain_for_schedule(...)``.
    """
    return _walk_ps(noise, eps_meas, sched, n_tot, n_samples, seed, 1.0)


def simulate_generation(
    p_gen, noise, eps_meas, sched, n_tot, n_samples=DEFAULT_SAMPLES, seed=0
):
    """Post-selective pumping fed by stochastic pair generation.

    The attempt unit is one *generation* attempt: with probability
    ``1 - p_gen`` no raw pair arrives and the state idles.  A generated
    attempt proceeds exactly as in :func:`simulate_ps`, driven by the
    same uniform draw rescaled into the generated branch, so ``p_gen=1``
    reproduces :func:`simulate_ps` bit for bit.
    """
    return _walk_ps(noise, eps_meas, sched, n_tot, n_samples, seed, p_gen)


def simulate_nps(noise, eps_meas, sched, n_tot, n_samples=DEFAULT_SAMPLES, seed=0):
    """Sample history-resolved non-post-selective phase pumping.

    Covers phase-only schedules (``n_bit = 0``).  Every sample carries
    the Bell weights of its stored pair: a successful step applies the
    kept-branch update and raises the score, a failed step applies the
    discarded-branch update and lowers it, and a score of zero discards
    the pair (the next attempt starts over from a fresh raw pair).  With
    noiseless local operations the discarded branch exactly undoes the
    last successful step, which is what makes the score-labelled chain
    exact in that limit; with local noise the sampled failure rate is
    the honest one and exceeds the chain's optimistic estimate.
    """
    sched = PumpSchedule(*sched)
    if sched.n_bit != 0:
        raise ValueError(
            "history-resolved sampling covers phase-only schedules (n_bit = 0)"
        )
    _check_args(n_tot, n_samples)
    n_p = sched.n_phase
    raw = bc.fidelity_vector(noise.raw_model, noise.fidelity)
    attempts = np.zeros(n_tot + 2, dtype=np.int64)
    delivered_infid_sum = 0.0
    aif_sum = 0.0
    for start, stop, gen in chunk_streams(seed, n_samples):
        m = stop - start
        score = np.zeros(m, dtype=np.int64)
        fv = np.zeros((m, 4))
        absorbed_at = np.zeros(m, dtype=np.int64)
        for t in range(1, n_tot + 1):
            u = gen.random(m)
            alive = absorbed_at == 0
            if not alive.any():
                continue
            create = alive & (score == 0)
            pumping_now = alive & (score >= 1)
            q, out_pass, out_fail = pumping._step_weights(
                raw, fv, PHASE, noise.p_gate, eps_meas
            )
            success = pumping_now & (u < q)
            failure = pumping_now & ~success
            fv = np.where(create[:, None], raw, fv)
            fv = np.where(success[:, None], out_pass, fv)
            fv = np.where(failure[:, None], out_fail, fv)
            if n_p == 0:
                delivered = create  # promotion completes the schedule
            else:
                delivered = success & (score == n_p)
            new_score = np.where(create, 1, score)
            new_score = np.where(success, score + 1, new_score)
            new_score = np.where(failure, score - 1, new_score)
            score = new_score
            absorbed_at = np.where(delivered, t, absorbed_at)
        done = absorbed_at > 0
        attempts[: n_tot + 1] += np.bincount(
            absorbed_at[done], minlength=n_tot + 1
        )
        attempts[n_tot + 1] += int((~done).sum())
        infid_now = 1.0 - fv[:, 0]
        delivered_infid_sum += float(infid_now[done].sum())
        holding = ~done & (score >= 1)
        aif_sum += float(infid_now[done].sum())
        aif_sum += float(infid_now[holding].sum())
        aif_sum += 0.5 * float((~done & (score == 0)).sum())
    return _finalize(n_samples, n_tot, attempts, delivered_infid_sum, aif_sum)
