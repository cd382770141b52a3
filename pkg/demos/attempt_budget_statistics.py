"""
Attempt budgets from absorbing Markov chains
============================================

Every pumping step either advances the pipeline or throws it back, so
the whole restart-on-failure protocol is an absorbing Markov chain over
pipeline states.  Evolving its occupancy vector answers the practical
question: how many raw-pair attempts buy a delivered pair at the target
quality, and how does keeping failed pairs (NPS) change the bill?
"""

import numpy as np

from regsim import bellcore as bc
from regsim import chain, regmodel

noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)

# ---------------------------------------------------------------------
# 1. The chain behind schedule (2, 3)
# ---------------------------------------------------------------------

ch = chain.chain_for_schedule(noise, 1e-4, (2, 3))
print(f"chain: {ch.kind}, states {ch.labels}")
print(f"absorbing state index {ch.absorbing_index}")

occ = chain.evolve(ch, 12)
print(f"\noccupancy after the minimal 12 attempts: "
      f"delivered {occ[ch.absorbing_index]:.4f}")
for n in (12, 20, 30, 40, 60):
    print(f"  N_tot={n:3d}: fail {chain.fail_prob(ch, n):.3e}, "
          f"tep {chain.tep(ch, n, ch.infid[ch.absorbing_index]):.3e}, "
          f"aif {chain.aif(ch, n):.3e}")

# ---------------------------------------------------------------------
# 2. Sizing the budget two ways
# ---------------------------------------------------------------------

# "tep": total error probability (failure counts as error) at most
# 2 delta_min; "aif": average delivered infidelity at most 2 delta_min.
# AIF forgives rare failures (they only cost 1/2 a random guess), so it
# always returns the smaller budget.
for mode in ("tep", "aif"):
    solved = chain.solve_ntot(noise, 1e-4, mode)
    print(f"{mode}: schedule {tuple(solved.schedule)} -> "
          f"N_tot = {solved.n_tot} (delta_min {solved.delta_min:.3e})")

# ---------------------------------------------------------------------
# 3. Post-selective vs non-post-selective pumping
# ---------------------------------------------------------------------

# NPS keeps the degraded pair on failure (score - 1 instead of restart),
# a large saving when raw pairs are good enough that failures are rare
# but restarts are expensive.
deph = bc.NoiseParams("dephasing", 0.85, p_gate=1e-5, p_init=0.05, p_meas=0.05)
_, eps_m = regmodel.optimal_m(0.05, 0.05, 1e-5)
n_ps = chain.solve_ntot(deph, eps_m, "aif", (0, 8), scheme="ps").n_tot
n_nps = chain.solve_ntot(deph, eps_m, "aif", (0, 8), scheme="nps").n_tot
print(f"\ndephasing F=0.85, p_L=1e-5: N_tot(PS) = {n_ps}, "
      f"N_tot(NPS) = {n_nps}, ratio {n_ps / n_nps:.2f}")

# ---------------------------------------------------------------------
# 4. Probabilistic generation as a sublevel
# ---------------------------------------------------------------------

# when raw pairs themselves only appear with probability p_gen per
# attempt, the same chain gains an idle self-loop; budgets stretch by
# roughly 1/p_gen
base = chain.chain_for_schedule(noise, 1e-4, (2, 3))
for p_gen in (1.0, 0.5, 0.2):
    g = chain.add_generation_sublevel(base, p_gen)
    n = next(n for n in range(1, 2000)
             if chain.fail_prob(g, n) < 0.01)
    print(f"p_gen={p_gen:.1f}: N_tot for 99% delivery = {n}")
