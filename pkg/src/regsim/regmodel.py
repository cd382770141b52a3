"""Register-level timing and error model for the non-local gate cycle.

Combines the robust (majority-vote) measurement scheme, the optical time
estimates for initialization / measurement / raw-pair generation, and the
pumping statistics into the two numbers that characterize one inter-register
gate: the clock cycle time and the effective error probability per cycle.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.stats import binom

from . import chain, pumping
from .bellcore import NoiseParams

MAX_VOTE_M = 50

# measurement/initialization error grows as 1-F in the hardware estimates,
# so pumping schedules rarely pay off beyond a handful of steps; these caps
# bound the schedule search in the full pipeline
DEPOLARIZING_CAPS = (8, 8)
DEPHASING_CAPS = (0, 8)  # bit errors absent: one-level (phase) pumping only


@dataclass(frozen=True)
class TimingParams:
    """Hardware time scales: local gates plus the optical interface."""

    t_local: float  # two-qubit local gate time (s)
    tau: float  # vacuum radiative lifetime (s)
    cooperativity: float  # Purcell factor C; tau/C is the emission time
    efficiency: float  # photon collection/detection efficiency
    t_memory: float = None  # storage-qubit memory time (s), if relevant

    def __post_init__(self):
        if min(self.t_local, self.tau, self.cooperativity) <= 0.0:
            raise ValueError("time scales and cooperativity must be positive")
        if not 0.0 < self.efficiency < 1.0:
            raise ValueError(f"efficiency {self.efficiency} outside (0, 1)")
        if self.t_memory is not None and self.t_memory <= 0.0:
            raise ValueError("memory time must be positive")


class MeasurePlan(NamedTuple):
    m: int  # majority vote over 2m+1 QND readouts
    error: float  # residual readout error
    duration: float  # wall-clock time of the robust measurement (s)


class OpticalTimes(NamedTuple):
    t_init: float
    t_meas: float
    t_entangle: float


class GateMetrics(NamedTuple):
    t_init: float
    t_meas: float
    t_entangle: float
    t_robust_meas: float
    t_robust_entangle: float
    t_clock: float
    cycle_error: float
    clock_floor: float  # limit of t_clock/t_local for instantaneous optics


class MemoryRequirement(NamedTuple):
    ratio_required: float  # minimal t_memory / t_local
    feasible: bool


def robust_measure_error(m, p_init, p_meas, p_gate):
    """Residual error of a majority vote over 2m+1 QND readouts.

    Each readout errs when its freshly initialized auxiliary qubit starts
    wrong or reads out wrong (probability p_init + p_meas); the vote fails
    when more than m readouts err.  Each of the 2m+1 copy gates can also
    flip the measured qubit itself, at p_gate/2 per gate.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    p = p_init + p_meas
    votes = 2 * m + 1
    return float(binom.sf(m, votes, p)) + votes * p_gate / 2.0


def optimal_m(p_init, p_meas, p_gate, max_m=MAX_VOTE_M):
    """Brute-force minimizer of the robust measurement error over m.

    The error first falls (vote statistics) and then rises again (gate
    noise accumulates), so a scan is cheap and exact; ties go to fewer
    repetitions.
    """
    best_m, best_err = 0, robust_measure_error(0, p_init, p_meas, p_gate)
    for m in range(1, max_m + 1):
        err = robust_measure_error(m, p_init, p_meas, p_gate)
        if err < best_err:
            best_m, best_err = m, err
    return best_m, best_err


def robust_init_error(plan=None, verifications=None, p_init=None, p_meas=None, p_gate=None):
    """Effective initialization error of a storage qubit.

    Measurement-based initialization inherits the robust measurement error
    of the plan.  Verification-based initialization (k extra verification
    rounds) instead gives (p_init+p_meas)^(k+1) + (2k+1) p_gate / 2.
    """
    if verifications is None:
        if plan is None:
            raise ValueError("need a MeasurePlan or a verification count")
        return plan.error
    if verifications < 0:
        raise ValueError("verification count must be non-negative")
    p = p_init + p_meas
    return p ** (verifications + 1) + (2 * verifications + 1) * p_gate / 2.0


def optical_times(tp, p_meas):
    """Times for optical initialization/measurement and raw-pair generation.

    Readout repeats single-photon cycles of duration tau/C until the miss
    probability (1-eta)^n drops to p_meas; two-photon entanglement
    generation succeeds once per eta^2 rounds of emit-plus-measure.
    """
    if not 0.0 < p_meas < 1.0:
        raise ValueError(f"p_meas {p_meas} outside (0, 1)")
    cycle = tp.tau / tp.cooperativity
    t_meas = math.log(p_meas) / math.log(1.0 - tp.efficiency) * cycle
    t_entangle = (t_meas + cycle) / tp.efficiency**2
    return OpticalTimes(t_meas, t_meas, t_entangle)


def robust_measure_time(m, t_init, t_local, t_meas):
    """Duration of the 2m+1-readout vote; a bare readout when m = 0."""
    if m == 0:
        return t_meas
    return (2 * m + 1) * (t_init + t_local + t_meas)


def measure_plan(noise, tp):
    """Optimal vote size with its error and duration for this hardware."""
    m, err = optimal_m(noise.p_init, noise.p_meas, noise.p_gate)
    opt = optical_times(tp, noise.p_meas)
    return MeasurePlan(m, err, robust_measure_time(m, opt.t_init, tp.t_local, opt.t_meas))


def schedule_caps(noise):
    return DEPHASING_CAPS if noise.raw_model == "dephasing" else DEPOLARIZING_CAPS


def gate_metrics(tp, noise, m, eps_meas, n_tot, eps_entangle):
    """Clock cycle time and effective error of one inter-register gate.

    The cycle spends n_tot attempts on robust entanglement generation (raw
    generation + local gates + robust measurement each), then two local
    gates and one robust measurement to consume the purified pair.  The
    effective error adds the delivered pair's error budget to the gate and
    measurement errors of the consumption step.
    """
    opt = optical_times(tp, noise.p_meas)
    t_rob = robust_measure_time(m, opt.t_init, tp.t_local, opt.t_meas)
    t_gen = n_tot * (opt.t_entangle + tp.t_local + t_rob)
    t_clock = t_gen + 2.0 * tp.t_local + t_rob
    cycle_error = eps_entangle + 2.0 * noise.p_gate + 2.0 * eps_meas
    floor = (1 if m == 0 else 2 * m + 2) * n_tot
    return GateMetrics(
        opt.t_init, opt.t_meas, opt.t_entangle, t_rob, t_gen, t_clock,
        cycle_error, float(floor),
    )


class OperatingPoint(NamedTuple):
    plan: MeasurePlan
    schedule: pumping.PumpSchedule
    delta_min: float
    n_tot: int
    metrics: GateMetrics


def operating_point(noise, tp, caps=None, mode="tep"):
    """Full pipeline from imperfection parameters to (t_clock, error).

    Picks the vote size, optimizes the pumping schedule, sizes the attempt
    budget so the chosen figure of merit reaches eps_E = 2 delta_min, and
    evaluates the timing model at that budget.
    """
    if caps is None:
        caps = schedule_caps(noise)
    plan = measure_plan(noise, tp)
    solved = chain.solve_ntot(noise, plan.error, mode, caps)
    metrics = gate_metrics(
        tp, noise, plan.m, plan.error, solved.n_tot, 2.0 * solved.delta_min
    )
    return OperatingPoint(
        plan, solved.schedule, solved.delta_min, solved.n_tot, metrics
    )


def memory_constraint(tp, noise, caps=None, mode="tep"):
    """Minimal memory/local-gate time ratio for the cycle to be coherent.

    Requires the memory error per clock cycle, t_clock/t_memory, to stay
    below the cycle's own effective error.  Evaluated in the fast-optics
    limit where t_clock/t_local is the integer floor of the cycle.
    """
    point = operating_point(noise, tp, caps, mode)
    required = point.metrics.clock_floor / point.metrics.cycle_error
    if tp.t_memory is None:
        raise ValueError("TimingParams.t_memory needed for a feasibility verdict")
    return MemoryRequirement(required, tp.t_memory / tp.t_local >= required)


def p_cnot_baseline(noise):
    """Error of a teleported CNOT run directly on an unpurified pair."""
    return (1.0 - noise.fidelity) + 2.0 * noise.p_gate + 2.0 * noise.p_meas
