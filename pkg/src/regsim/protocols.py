"""Teleported two-register gates and measurement-based GHZ preparation.

Storage qubits never travel.  Every non-local operation here consumes one
pre-shared Bell pair and uses only local CNOTs, single-qubit readouts and
classically conditioned Pauli corrections.  The dense ops stay within the
qubit cap of :mod:`regsim.bellcore`; the GHZ fault-injection path works on
classical parity bits instead and scales to many registers.

Layout convention for the teleported gates: the joint register order is
``[s1, c1, c2, s2]`` where ``s1``/``s2`` are the storage qubits on the two
registers and ``c1``/``c2`` the halves of the consumed pair.
"""

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import bellcore as bc
from .rng import chunk_streams


@dataclass(frozen=True)
class PauliFrame:
    """Pending single-qubit X/Z corrections, applied lazily.

    One bit pair per output qubit.  Composition is bitwise XOR: the global
    phases that distinguish XZ from ZX drop out at the density-matrix
    level, which is what makes frame composition associative.
    """

    x_bits: tuple
    z_bits: tuple

    def __post_init__(self):
        if len(self.x_bits) != len(self.z_bits):
            raise ValueError("x and z bit tuples differ in length")
        if any(b not in (0, 1) for b in self.x_bits + self.z_bits):
            raise ValueError("frame bits must be 0 or 1")

    @classmethod
    def identity(cls, n):
        return cls((0,) * n, (0,) * n)

    @property
    def n_qubits(self):
        return len(self.x_bits)

    def compose(self, later):
        """Frame equivalent to applying ``self`` first, then ``later``."""
        if later.n_qubits != self.n_qubits:
            raise ValueError("frame sizes differ")
        return PauliFrame(
            tuple(a ^ b for a, b in zip(self.x_bits, later.x_bits)),
            tuple(a ^ b for a, b in zip(self.z_bits, later.z_bits)),
        )

    def apply(self, rho):
        """Apply the recorded corrections to a dense state."""
        n = bc.n_qubits(rho)
        if n != self.n_qubits:
            raise ValueError(f"{n}-qubit state under a {self.n_qubits}-qubit frame")
        out = rho
        for q in range(n):
            op = np.eye(2, dtype=complex)
            if self.x_bits[q]:
                op = bc.PAULI_X @ op
            if self.z_bits[q]:
                op = op @ bc.PAULI_Z
            if self.x_bits[q] or self.z_bits[q]:
                out = bc.apply_unitary(out, bc.expand_op(op, [q], n))
        return out


def _local_noise(noise):
    if noise is None:
        return 0.0, 0.0
    return noise.p_gate, noise.p_meas


def _resource_matrix(bell):
    """Coerce a Bell-weight vector or an explicit 4x4 state to a matrix."""
    arr = np.asarray(bell)
    if arr.shape == (4,):
        return bc.bell_embed(arr)
    if arr.shape == (4, 4):
        return np.asarray(bc.check_density_matrix(arr), dtype=complex)
    raise ValueError("resource must be 4 Bell weights or a two-qubit state")


def _apply_teleported_cnot(joint, idx, p_gate, p_meas, outcomes):
    """Run the teleported-CNOT circuit on qubits ``idx = (s1, c1, c2, s2)``.

    Returns the full-width state (measured qubits collapsed in place) and
    the pending frame on (s1, s2).  With ``outcomes=None`` all four readout
    branches are averaged with their corrections applied, so the frame is
    trivial; with explicit ``outcomes=(m1, m2)`` that branch is selected
    and the corrections stay pending.
    """
    s1, c1, c2, s2 = idx
    n = bc.n_qubits(joint)
    rho = bc.apply_noisy_gate(joint, bc.cnot_matrix(s1, c1, n), (s1, c1), p_gate)
    rho = bc.apply_noisy_gate(rho, bc.cnot_matrix(c2, s2, n), (c2, s2), p_gate)
    if outcomes is None:
        out = np.zeros_like(rho)
        for b1 in bc.noisy_measure(rho, c1, p_meas, basis="z"):
            if b1.prob <= bc.PROB_TOL:
                continue
            for b2 in bc.noisy_measure(b1.state, c2, p_meas, basis="x"):
                if b2.prob <= bc.PROB_TOL:
                    continue
                state = b2.state
                if b1.outcome:
                    state = bc.apply_unitary(state, bc.expand_op(bc.PAULI_X, [s2], n))
                if b2.outcome:
                    state = bc.apply_unitary(state, bc.expand_op(bc.PAULI_Z, [s1], n))
                out += b1.prob * b2.prob * state
        return out, PauliFrame.identity(2)
    m1, m2 = outcomes
    b1 = bc.noisy_measure(rho, c1, p_meas, basis="z")[m1]
    if b1.prob <= bc.PROB_TOL:
        raise ValueError(f"readout pattern {outcomes} has zero probability")
    b2 = bc.noisy_measure(b1.state, c2, p_meas, basis="x")[m2]
    return b2.state, PauliFrame((0, m1), (m2, 0))


def teleported_cnot(bell, input_state, noise, outcomes=None):
    """Non-local CNOT with control ``s1`` and target ``s2``.

    The circuit entangles each storage qubit with its half of the consumed
    pair (CNOT s1 -> c1, CNOT c2 -> s2), reads c1 in Z and c2 in X, and
    corrects with X on s2 for the Z outcome and Z on s1 for the X outcome.

    Parameters
    ----------
    bell : array_like
        Consumed resource: four Bell weights or a two-qubit density matrix.
    input_state : ndarray
        Two-qubit state of (s1, s2).
    noise : NoiseParams or None
        Only ``p_gate`` (local CNOT depolarization) and ``p_meas``
        (readout flip) are read; None means noiseless locals.
    outcomes : (int, int), optional
        Select the readout branch (m1, m2) and defer the corrections to
        the returned frame.  Default averages the branches with their
        corrections applied, returning the trivial frame.

    Returns
    -------
    (ndarray, PauliFrame)
        Output state of (s1, s2) and the pending corrections.
    """
    if bc.n_qubits(input_state) != 2:
        raise ValueError("input must hold exactly the two storage qubits")
    p_gate, p_meas = _local_noise(noise)
    joint = bc.tensor(input_state, _resource_matrix(bell))
    joint = bc.permute_qubits(joint, [0, 2, 3, 1])
    out, frame = _apply_teleported_cnot(joint, (0, 1, 2, 3), p_gate, p_meas, outcomes)
    return bc.partial_trace(out, [0, 3]), frame


def teleported_controlled_u(bell, input_state, u, noise, outcomes=None):
    """Non-local controlled-``u`` with control ``s1`` and target ``s2``.

    Variant of :func:`teleported_cnot` for an arbitrary single-qubit
    target unitary: CNOT s1 -> c1, read c1 in Z, flip c2 on outcome 1,
    apply controlled-u from c2 onto s2, read c2 in X and correct s1 with
    Z on outcome 1.  The mid-circuit flip on c2 gates the controlled-u,
    so it is always applied in place; only the final Z correction can be
    deferred through ``outcomes``.
    """
    if bc.n_qubits(input_state) != 2:
        raise ValueError("input must hold exactly the two storage qubits")
    p_gate, p_meas = _local_noise(noise)
    joint = bc.tensor(input_state, _resource_matrix(bell))
    joint = bc.permute_qubits(joint, [0, 2, 3, 1])
    s1, c1, c2, s2 = 0, 1, 2, 3
    n = 4
    rho = bc.apply_noisy_gate(joint, bc.cnot_matrix(s1, c1, n), (s1, c1), p_gate)
    cu = bc.controlled_u_matrix(u, c2, s2, n)
    flip_c2 = bc.expand_op(bc.PAULI_X, [c2], n)
    phase_s1 = bc.expand_op(bc.PAULI_Z, [s1], n)
    if outcomes is None:
        out = np.zeros_like(rho)
        for b1 in bc.noisy_measure(rho, c1, p_meas, basis="z"):
            if b1.prob <= bc.PROB_TOL:
                continue
            state = b1.state
            if b1.outcome:
                state = bc.apply_unitary(state, flip_c2)
            state = bc.apply_noisy_gate(state, cu, (c2, s2), p_gate)
            for b2 in bc.noisy_measure(state, c2, p_meas, basis="x"):
                if b2.prob <= bc.PROB_TOL:
                    continue
                branch = b2.state
                if b2.outcome:
                    branch = bc.apply_unitary(branch, phase_s1)
                out += b1.prob * b2.prob * branch
        return bc.partial_trace(out, [s1, s2]), PauliFrame.identity(2)
    m1, m2 = outcomes
    b1 = bc.noisy_measure(rho, c1, p_meas, basis="z")[m1]
    if b1.prob <= bc.PROB_TOL:
        raise ValueError(f"readout pattern {outcomes} has zero probability")
    state = b1.state
    if m1:
        state = bc.apply_unitary(state, flip_c2)
    state = bc.apply_noisy_gate(state, cu, (c2, s2), p_gate)
    b2 = bc.noisy_measure(state, c2, p_meas, basis="x")[m2]
    return bc.partial_trace(b2.state, [s1, s2]), PauliFrame((0, 0), (m2, 0))


def cnot_process_error(bell, noise):
    """Exact process error of the teleported CNOT against the ideal gate.

    The channel is evaluated on half of a maximally entangled four-qubit
    reference (s1 with r1, s2 with r2), so the returned value is the full
    process infidelity rather than an average over some input family.
    """
    p_gate, p_meas = _local_noise(noise)
    omega = np.zeros(16, dtype=complex)
    omega[[0, 5, 10, 15]] = 0.5  # |ij> on (s1, s2) paired with |ij> on (r1, r2)
    ideal = bc.cnot_matrix(0, 1, 4) @ omega
    joint = bc.tensor(np.outer(omega, omega.conj()), _resource_matrix(bell))
    joint = bc.permute_qubits(joint, [0, 4, 5, 1, 2, 3])
    out, _ = _apply_teleported_cnot(joint, (0, 1, 2, 3), p_gate, p_meas, None)
    chi = bc.partial_trace(out, [0, 3, 4, 5])
    return 1.0 - float(np.real(ideal.conj() @ chi @ ideal))


class PbmBranch(NamedTuple):
    """One readout branch of a partial Bell measurement."""

    outcomes: tuple
    prob: float
    parity: int
    state: np.ndarray


def pbm_branches(joint, pair, bell, noise):
    """Enumerate the readout branches of a partial Bell measurement.

    The measurement couples storage qubits ``pair = (i, j)`` of ``joint``
    to a consumed resource pair through one local CNOT each, then reads
    both resource qubits in Z.  Equal outcomes project (i, j) onto the
    even-parity Bell plane; unequal outcomes project onto the odd plane
    and the protocol's corrective flip of qubit ``j`` is already folded
    into the branch state.  Branches with zero probability are dropped.
    """
    i, j = pair
    n = bc.n_qubits(joint)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"invalid register pair {pair} for {n} registers")
    p_gate, p_meas = _local_noise(noise)
    big = bc.tensor(joint, _resource_matrix(bell))
    ci, cj = n, n + 1
    m = n + 2
    big = bc.apply_noisy_gate(big, bc.cnot_matrix(i, ci, m), (i, ci), p_gate)
    big = bc.apply_noisy_gate(big, bc.cnot_matrix(j, cj, m), (j, cj), p_gate)
    flip_j = bc.expand_op(bc.PAULI_X, [j], n)
    branches = []
    for bi in bc.noisy_measure(big, ci, p_meas, basis="z"):
        if bi.prob <= bc.PROB_TOL:
            continue
        for bj in bc.noisy_measure(bi.state, cj, p_meas, basis="z"):
            prob = bi.prob * bj.prob
            if prob <= bc.PROB_TOL:
                continue
            parity = bi.outcome ^ bj.outcome
            state = bc.partial_trace(bj.state, list(range(n)))
            if parity:
                state = bc.apply_unitary(state, flip_j)
            branches.append(PbmBranch((bi.outcome, bj.outcome), prob, parity, state))
    return branches


def pbm(joint, pair, bell, noise, outcomes=(0, 0)):
    """Partial Bell measurement of two storage qubits, one branch.

    Returns ``(parity, post_state, frame)`` for the requested readout
    pattern.  The corrective bit-flip for odd parity is part of the
    protocol and already applied in the returned state, so the frame is
    trivial; it is returned for signature parity with the teleported
    gates.  Multi-register schedules that must defer corrections instead
    collect parities and solve them with :func:`ghz_corrections`.
    """
    for branch in pbm_branches(joint, pair, bell, noise):
        if branch.outcomes == tuple(outcomes):
            return branch.parity, branch.state, PauliFrame.identity(bc.n_qubits(joint))
    raise ValueError(f"readout pattern {tuple(outcomes)} has zero probability")


@dataclass(frozen=True)
class GhzCircuit:
    """Clock-cycle schedule of pairwise parity measurements for GHZ growth.

    ``cycles`` holds one tuple of register pairs per clock cycle; pairs in
    the same cycle touch disjoint registers and run in parallel.  The
    pairs in ``redundancy`` re-measure parities that are already fixed by
    the rest of the schedule; their only job is error detection.  The
    remaining (primary) pairs form a spanning tree of the registers.
    """

    k: int
    n_registers: int
    cycles: tuple
    redundancy: frozenset

    def __post_init__(self):
        if self.n_registers != 2**self.k:
            raise ValueError("register count must be 2**k")
        seen = set()
        for cycle in self.cycles:
            used = set()
            for pair in cycle:
                i, j = pair
                if i == j or not (0 <= i < self.n_registers > j >= 0):
                    raise ValueError(f"invalid pair {pair}")
                if i in used or j in used:
                    raise ValueError(f"cycle reuses a register: {cycle}")
                used.update(pair)
                seen.add(pair)
        if not self.redundancy <= seen:
            raise ValueError("redundancy lists an unscheduled pair")

    @property
    def depth(self):
        return len(self.cycles)

    @property
    def all_pbms(self):
        """All pairs in schedule order (cycle by cycle)."""
        return tuple(pair for cycle in self.cycles for pair in cycle)

    @property
    def primary(self):
        """The non-redundant pairs, in schedule order."""
        return tuple(p for p in self.all_pbms if p not in self.redundancy)

    def to_json(self):
        """JSON description (cycles of pairs) for downstream tooling."""
        return json.dumps(
            {
                "k": self.k,
                "n_registers": self.n_registers,
                "cycles": [[list(p) for p in cycle] for cycle in self.cycles],
                "redundancy": sorted(list(p) for p in self.redundancy),
            }
        )


def ghz_schedule(k):
    """Pairing schedule that grows a GHZ state over ``2**k`` registers.

    Cycle 1 fuses neighbours into pairs, cycle 2 fuses pairs into blocks
    of four, and one further cycle joins all blocks at their boundaries,
    so the depth is 2 for ``k=2`` and 3 for any larger ``k``.  Every
    fusion beyond the spanning tree is doubled by a redundant partner
    measurement on the adjacent registers, which closes a short cycle in
    the parity graph: no single readout error can go undetected.
    """
    if k < 2:
        raise ValueError("need at least four registers (k >= 2)")
    n = 2**k
    cycle1 = tuple((2 * t, 2 * t + 1) for t in range(n // 2))
    connectors = [(4 * t, 4 * t + 2) for t in range(n // 4)]
    redundancy = [(4 * t + 1, 4 * t + 3) for t in range(n // 4)]
    cycles = [cycle1, tuple(connectors + redundancy)]
    if k >= 3:
        cycle3 = []
        for boundary in range(4, n, 4):
            cycle3.append((boundary - 1, boundary))
            cycle3.append((boundary - 2, boundary + 1))
            redundancy.append((boundary - 2, boundary + 1))
        cycles.append(tuple(cycle3))
    return GhzCircuit(
        k=k,
        n_registers=n,
        cycles=tuple(cycles),
        redundancy=frozenset(redundancy),
    )


def _tree_order(circ):
    """BFS orientation of the primary pairs, plus the redundant indices.

    Returns ``(steps, checks)`` where ``steps`` is a list of
    ``(parent, child, pbm_index)`` in traversal order covering every
    register once, and ``checks`` lists the schedule indices of the
    redundant pairs.
    """
    pbms = circ.all_pbms
    adjacency = {r: [] for r in range(circ.n_registers)}
    checks = []
    for index, pair in enumerate(pbms):
        if pair in circ.redundancy:
            checks.append(index)
        else:
            i, j = pair
            adjacency[i].append((j, index))
            adjacency[j].append((i, index))
    steps = []
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for reg in frontier:
            for other, index in adjacency[reg]:
                if other not in seen:
                    seen.add(other)
                    steps.append((reg, other, index))
                    nxt.append(other)
        frontier = nxt
    if len(seen) != circ.n_registers:
        raise ValueError("primary pairs do not connect all registers")
    return steps, checks


def ghz_corrections(circ, parities):
    """Solve the measured parities for the final bit-flip corrections.

    Propagates the primary parities over the spanning tree (register 0 is
    the reference and never flipped) and checks every redundant parity
    against the solution.  Returns ``(frame, syndromes)``: a frame whose
    X bits fold the grown state onto the canonical GHZ state, and one
    consistency bit per redundant pair (schedule order).  Any nonzero
    syndrome means some parity readout was corrupted.
    """
    parities = [int(b) for b in parities]
    pbms = circ.all_pbms
    if len(parities) != len(pbms) or any(b not in (0, 1) for b in parities):
        raise ValueError(f"need one parity bit per scheduled pair ({len(pbms)})")
    steps, checks = _tree_order(circ)
    x = [0] * circ.n_registers
    for parent, child, index in steps:
        x[child] = x[parent] ^ parities[index]
    syndromes = []
    for index in checks:
        i, j = pbms[index]
        syndromes.append(parities[index] ^ x[i] ^ x[j])
    frame = PauliFrame(tuple(x), (0,) * circ.n_registers)
    return frame, tuple(syndromes)


@dataclass(frozen=True)
class GhzInjectionStats:
    """Outcome counts of a GHZ fault-injection run."""

    n_samples: int
    p: float
    n_undetected: int
    undetected_fraction: float
    multi_register_rate: float
    per_register_rate: float


def ghz_fault_injection(circ, p, n_samples, seed=0):
    """Monte Carlo error injection at every scheduled parity measurement.

    Each measurement independently suffers two kinds of fault with
    probability ``p`` apiece: a readout flip of its reported parity, and
    a phase kick on one uniformly chosen member of its pair.  Readout
    flips are attacked with the redundancy checks: a run is *detected*
    (and would be discarded) when any syndrome from
    :func:`ghz_corrections` fires.  Phase kicks commute with every parity
    check, so they can never be heralded and set the noise floor.

    Statistics over the undetected runs:

    - ``multi_register_rate``: fraction with two or more bit-corrupted
      registers after correction (counting flips up to the global
      complement, which is not an error for a GHZ state),
    - ``per_register_rate``: mean number of phase-kicked registers
      divided by the register count.

    Returns a :class:`GhzInjectionStats`; sums are accumulated in fixed
    chunk order, so results are reproducible for a given seed and
    independent of any worker partitioning along chunk boundaries.
    """
    if not 0.0 <= p <= 0.05:
        raise ValueError("per-measurement error probability must be in [0, 0.05]")
    if n_samples < 1:
        raise ValueError("need at least one sample")
    edges = circ.all_pbms
    n_edges = len(edges)
    n_reg = circ.n_registers
    steps, checks = _tree_order(circ)
    n_undetected = 0
    n_multi = 0
    phase_odd_total = 0
    for start, stop, gen in chunk_streams(seed, n_samples):
        m = stop - start
        flips = gen.random((m, n_edges)) < p
        kicks = gen.random((m, n_edges)) < p
        sides = gen.random((m, n_edges)) < 0.5
        x = np.zeros((m, n_reg), dtype=bool)
        for parent, child, index in steps:
            x[:, child] = x[:, parent] ^ flips[:, index]
        detected = np.zeros(m, dtype=bool)
        for index in checks:
            i, j = edges[index]
            detected |= flips[:, index] ^ x[:, i] ^ x[:, j]
        undetected = ~detected
        weight = x.sum(axis=1)
        corrupted = np.minimum(weight, n_reg - weight)
        phase = np.zeros((m, n_reg), dtype=bool)
        for index, (i, j) in enumerate(edges):
            hit = kicks[:, index]
            phase[:, i] ^= hit & ~sides[:, index]
            phase[:, j] ^= hit & sides[:, index]
        n_undetected += int(undetected.sum())
        n_multi += int((undetected & (corrupted >= 2)).sum())
        phase_odd_total += int(phase[undetected].sum())
    if n_undetected == 0:
        multi_rate = float("nan")
        per_register = float("nan")
    else:
        multi_rate = n_multi / n_undetected
        per_register = phase_odd_total / (n_undetected * n_reg)
    return GhzInjectionStats(
        n_samples=n_samples,
        p=p,
        n_undetected=n_undetected,
        undetected_fraction=n_undetected / n_samples,
        multi_register_rate=multi_rate,
        per_register_rate=per_register,
    )
