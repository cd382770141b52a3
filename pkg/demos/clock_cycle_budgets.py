"""
From hardware numbers to a clock cycle
======================================

A register pair is only as fast as its slowest ingredient: optical
entanglement attempts, majority-vote readout, and enough pumping
attempts to purify.  This script composes those pieces into the two
numbers that summarize a non-local gate, the clock-cycle time t_C and
the effective error gamma, and checks how long the storage qubits must
survive to keep up.
"""

from regsim import bellcore as bc
from regsim import regmodel

# ---------------------------------------------------------------------
# 1. Robust measurement: majority vote over 2m+1 readouts
# ---------------------------------------------------------------------

# each extra readout pair suppresses the binomial tail but adds gate
# noise (2m+1) p_L / 2, so there is an optimal m for every noise mix
for p_l in (1e-3, 1e-4, 1e-5, 1e-6):
    m, err = regmodel.optimal_m(0.05, 0.05, p_l)
    print(f"p_I=p_M=5%, p_L={p_l:.0e}: m*={m:2d} -> eps_M = {err:.3e}")

# ---------------------------------------------------------------------
# 2. Optical times for a cavity-coupled emitter
# ---------------------------------------------------------------------

tp = regmodel.TimingParams(t_local=1e-7, tau=1e-8,
                           cooperativity=10.0, efficiency=0.2)
times = regmodel.optical_times(tp, p_meas=0.05)
print(f"\nt_init = {times.t_init * 1e9:.1f} ns, "
      f"t_meas = {times.t_meas * 1e9:.1f} ns, "
      f"t_entangle = {times.t_entangle * 1e6:.2f} us per raw pair")

# ---------------------------------------------------------------------
# 3. The full operating point
# ---------------------------------------------------------------------

noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4,
                       p_init=0.05, p_meas=0.05)
point = regmodel.operating_point(noise, tp, mode="tep")
print(f"\ndepolarizing F=0.95, p_L=1e-4:")
print(f"  measurement plan m={point.plan.m}, eps_M={point.plan.error:.2e}")
print(f"  pumping schedule {tuple(point.schedule)}, "
      f"delta_min {point.delta_min:.2e}")
print(f"  attempt budget N_tot = {point.n_tot}")
print(f"  clock cycle t_C = {point.metrics.t_clock * 1e6:.1f} us, "
      f"gamma = {point.metrics.cycle_error:.2e}")

aif_point = regmodel.operating_point(noise, tp, mode="aif")
print(f"  (average-infidelity budgeting: N_tot = {aif_point.n_tot}, "
      f"t_C = {aif_point.metrics.t_clock * 1e6:.1f} us)")

# ---------------------------------------------------------------------
# 4. What the storage qubits must endure
# ---------------------------------------------------------------------

# a useful register computes faster than it decoheres: the memory time
# must cover the whole clock cycle at error level gamma
with_memory = regmodel.TimingParams(t_local=1e-7, tau=1e-8,
                                    cooperativity=10.0, efficiency=0.2,
                                    t_memory=1.0)
req = regmodel.memory_constraint(with_memory, noise)
print(f"\nrequired t_memory / t_local >= {req.ratio_required:.3e}")
print(f"with t_memory = 1 s and t_local = 0.1 us: feasible = {req.feasible}")
