"""Simulator and analysis toolkit for register-based distributed quantum
computation over purified entanglement.

Subpackages
-----------
bellcore   dense density-matrix primitives and Bell-pair bookkeeping
pumping    entanglement pumping maps, schedules and schedule optimization
chain      absorbing Markov chains for pumping success statistics
regmodel   robust measurement/initialization and clock-cycle mapping
protocols  teleported gates, parity measurements and GHZ growing
mc         Monte Carlo trajectory sampler (independent validation path)
cli        command line front end emitting CSV/JSON sweeps
"""

__version__ = "0.1.0"
