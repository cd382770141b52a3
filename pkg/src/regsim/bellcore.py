"""Dense density-matrix primitives and Bell-pair bookkeeping.

Conventions used throughout the package:

* Qubit 0 is the leftmost tensor factor, so a computational basis index is
  read as a bit string with qubit 0 as the most significant bit.
* The Bell basis is ordered (phi+, phi-, psi+, psi-).  Writing a Bell label
  as a bit pair (x, z) with |b_xz> = (X^x Z^z ox I)|phi+>, the order is
  (0,0), (0,1), (1,0), (1,1).  A "fidelity vector" is the length-4 vector of
  diagonal weights of a two-qubit state in this basis; its first entry is the
  fidelity with respect to phi+.
* Dense operations refuse to build states on more than MAX_QUBITS qubits.
  Anything larger is handled by the structured (Bell-diagonal or stabilizer)
  paths in the higher modules.

Noise channels follow the standard register error models: a noisy two-qubit
gate replaces both gate qubits with the maximally mixed state with
probability p_L, initialization prepares diag(1 - p_I, p_I), and a noisy
measurement reports the flipped outcome with probability p_M while the
post-measurement state mixes the two projections accordingly.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

MAX_QUBITS = 6

# probability / matrix comparison tolerances used by the validation helpers
PROB_TOL = 1e-12
MAT_TOL = 1e-10

# single-qubit constants
ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

# Bell basis, one state per column, ordered (phi+, phi-, psi+, psi-)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
BELL_BASIS = np.column_stack([PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS])

# Bell label algebra: index <-> (x, z) bit pair
BELL_XZ = ((0, 0), (0, 1), (1, 0), (1, 1))
BELL_INDEX = {xz: i for i, xz in enumerate(BELL_XZ)}

RAW_MODELS = ("dephasing", "depolarizing")


@dataclass(frozen=True)
class NoiseParams:
    """Bundle of register imperfection parameters.

    Parameters
    ----------
    raw_model : str
        Raw-pair noise model, "dephasing" or "depolarizing".
    fidelity : float
        Raw Bell-pair fidelity F with respect to phi+.
    p_gate : float
        Two-qubit gate depolarization probability p_L.
    p_init : float
        Qubit initialization error probability p_I.
    p_meas : float
        Single measurement flip probability p_M.
    """

    raw_model: str
    fidelity: float
    p_gate: float = 0.0
    p_init: float = 0.0
    p_meas: float = 0.0

    def __post_init__(self):
        if self.raw_model not in RAW_MODELS:
            raise ValueError(f"unknown raw model {self.raw_model!r}")
        for name in ("fidelity", "p_gate", "p_init", "p_meas"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


class MeasureBranch(NamedTuple):
    """One reported outcome of a noisy measurement."""

    outcome: int
    prob: float
    state: np.ndarray


def n_qubits(rho):
    """Number of qubits of a dense state, validating the dimension."""
    dim = rho.shape[0]
    n = int(round(np.log2(dim)))
    if rho.shape != (dim, dim) or 2**n != dim:
        raise ValueError(f"not a qubit density matrix shape: {rho.shape}")
    return n


def check_density_matrix(rho, tol=MAT_TOL):
    """Validate trace one, Hermiticity and positivity of ``rho``.

    Raises ``ValueError`` on violation and returns ``rho`` unchanged
    otherwise, so calls can be chained.
    """
    n_qubits(rho)
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError(f"trace {np.trace(rho)} != 1")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise ValueError("not Hermitian")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol:
        raise ValueError(f"negative eigenvalue {evals.min()}")
    return rho


def tensor(*ops):
    """Kronecker product of the given operators, left to right."""
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def fidelity_vector(model, fidelity):
    """Bell-diagonal weights of a raw pair under the given noise model.

    Parameters
    ----------
    model : str
        "dephasing" gives diag(F, 1-F, 0, 0); "depolarizing" gives the
        Werner-type diag(F, (1-F)/3, (1-F)/3, (1-F)/3).
    fidelity : float
        Fidelity F with respect to phi+.

    Returns
    -------
    ndarray, shape (4,)
    """
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity {fidelity} outside [0, 1]")
    if model == "dephasing":
        return np.array([fidelity, 1.0 - fidelity, 0.0, 0.0])
    if model == "depolarizing":
        r = (1.0 - fidelity) / 3.0
        return np.array([fidelity, r, r, r])
    raise ValueError(f"unknown raw model {model!r}")


def check_fidelity_vector(w, tol=PROB_TOL):
    """Validate that ``w`` is a length-4 probability vector."""
    w = np.asarray(w)
    if np.iscomplexobj(w):
        if w.shape == (4,) and np.abs(w.imag).max() > tol:
            raise ValueError("fidelity vector must be real (got a ket?)")
        w = w.real
    w = w.astype(float)
    if w.shape != (4,):
        raise ValueError(f"fidelity vector shape {w.shape}")
    if w.min() < -tol or abs(w.sum() - 1.0) > max(tol, 4 * tol):
        raise ValueError(f"not a probability vector: {w}")
    return w


def bell_embed(w):
    """Two-qubit density matrix of a Bell-diagonal state with weights ``w``."""
    w = check_fidelity_vector(w)
    return (BELL_BASIS * w) @ BELL_BASIS.conj().T


def bell_extract(rho, tol=None):
    """Bell-basis diagonal of a two-qubit state.

    Off-diagonal elements in the Bell basis are discarded here; they are kept
    intact by all the circuit-level operations, so extraction is the only
    place where Bell-diagonal bookkeeping loses information.  If ``tol`` is
    given, off-diagonals larger than ``tol`` raise ``ValueError``.
    """
    if rho.shape != (4, 4):
        raise ValueError("bell_extract expects a two-qubit state")
    in_bell = BELL_BASIS.conj().T @ rho @ BELL_BASIS
    if tol is not None:
        off = in_bell - np.diag(np.diag(in_bell))
        if np.abs(off).max() > tol:
            raise ValueError(f"off-diagonal Bell element {np.abs(off).max()}")
    return np.real(np.diag(in_bell)).copy()


def make_raw_pair(model, fidelity):
    """Density matrix of a raw entangled pair (see ``fidelity_vector``)."""
    return bell_embed(fidelity_vector(model, fidelity))


def fidelity_phi_plus(rho):
    """Fidelity <phi+|rho|phi+> of a two-qubit state."""
    return float(np.real(PHI_PLUS.conj() @ rho @ PHI_PLUS))


def expand_op(op, qubits, n):
    """Embed an operator acting on ``qubits`` into an ``n``-qubit operator.

    Parameters
    ----------
    op : ndarray
        Operator on ``len(qubits)`` qubits, ordered as listed in ``qubits``.
    qubits : sequence of int
        Target qubit positions, distinct, each in ``range(n)``.
    n : int
        Total qubit count (at most ``MAX_QUBITS``).
    """
    if n > MAX_QUBITS:
        raise ValueError(f"dense path capped at {MAX_QUBITS} qubits, got {n}")
    qubits = list(qubits)
    k = len(qubits)
    if len(set(qubits)) != k or any(not 0 <= q < n for q in qubits):
        raise ValueError(f"bad qubit list {qubits} for n={n}")
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} for {k} qubits")
    rest = [q for q in range(n) if q not in qubits]
    full = tensor(op, *([ID2] * len(rest)))
    # tensor order is qubits + rest; permute axes back to 0..n-1
    perm = qubits + rest
    axes = [perm.index(q) for q in range(n)]
    full = full.reshape((2,) * (2 * n))
    full = full.transpose(axes + [n + a for a in axes])
    return full.reshape(2**n, 2**n)


def permute_qubits(rho, perm):
    """Reorder the qubits of a dense state: new qubit i is old ``perm[i]``."""
    n = n_qubits(rho)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    t = rho.reshape((2,) * (2 * n))
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(2**n, 2**n)


def cnot_matrix(control, target, n):
    """CNOT from ``control`` onto ``target`` as a dense ``n``-qubit unitary."""
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=complex,
    )
    return expand_op(cnot, [control, target], n)


def controlled_u_matrix(u, control, target, n):
    """Controlled single-qubit ``u`` as a dense ``n``-qubit unitary."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u @ u.conj().T, ID2, atol=MAT_TOL):
        raise ValueError("u must be a single-qubit unitary")
    block = np.eye(4, dtype=complex)
    block[2:, 2:] = u
    return expand_op(block, [control, target], n)


def apply_unitary(rho, u):
    return u @ rho @ u.conj().T


def partial_trace(rho, keep):
    """Reduced state on the qubits listed in ``keep`` (in that order)."""
    n = n_qubits(rho)
    keep = list(keep)
    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    # contract row with column axis for every traced qubit, highest first
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    # remaining axes are in ascending qubit order; reorder to match keep
    order = sorted(keep)
    axes = [order.index(q) for q in keep]
    k = len(keep)
    t = t.transpose(axes + [k + a for a in axes])
    return t.reshape(2**k, 2**k)


def apply_noisy_gate(rho, u, qubits, p_gate):
    """Apply a two-qubit gate with depolarizing gate noise.

    The channel is ``(1 - p_gate) U rho U+`` plus ``p_gate`` times the state
    with both gate qubits replaced by the maximally mixed state.

    Parameters
    ----------
    rho : ndarray
        Dense input state.
    u : ndarray
        Full ``n``-qubit unitary (e.g. from ``cnot_matrix``).
    qubits : (int, int)
        The two qubits the gate acts on.
    p_gate : float
        Depolarization probability p_L.
    """
    n = n_qubits(rho)
    out = (1.0 - p_gate) * apply_unitary(rho, u)
    if p_gate > 0.0:
        rest = [q for q in range(n) if q not in qubits]
        sigma = partial_trace(rho, rest) if rest else np.array([[1.0 + 0j]])
        mixed = tensor(sigma, ID2 / 2, ID2 / 2)
        # mixed is ordered rest + qubits; permute back
        perm = rest + list(qubits)
        axes = [perm.index(q) for q in range(n)]
        mixed = mixed.reshape((2,) * (2 * n))
        mixed = mixed.transpose(axes + [n + a for a in axes])
        out = out + p_gate * mixed.reshape(2**n, 2**n)
    return out


def noisy_init(p_init):
    """Single-qubit state prepared by a noisy initialization."""
    return np.array([[1.0 - p_init, 0.0], [0.0, p_init]], dtype=complex)


def _basis_projectors(basis):
    if basis == "z":
        kets = (KET_0, KET_1)
    elif basis == "x":
        kets = (KET_PLUS, KET_MINUS)
    else:
        raise ValueError(f"unknown measurement basis {basis!r}")
    return [np.outer(k, k.conj()) for k in kets]


def noisy_measure(rho, qubit, p_meas, basis="z"):
    """Measure one qubit with flip probability ``p_meas``, keeping branches.

    Returns the two reported-outcome branches as ``MeasureBranch`` tuples.
    Branch states keep the measured qubit in place (projected), are
    normalized, and the branch probabilities sum to one; outcome 0 is listed
    first.  Callers that post-select enumerate the branches deterministically
    rather than sampling.
    """
    n = n_qubits(rho)
    projs = [expand_op(p, [qubit], n) for p in _basis_projectors(basis)]
    parts = [p @ rho @ p for p in projs]
    weights = [float(np.real(np.trace(t))) for t in parts]
    branches = []
    for outcome in (0, 1):
        prob = (1.0 - p_meas) * weights[outcome] + p_meas * weights[1 - outcome]
        state = (1.0 - p_meas) * parts[outcome] + p_meas * parts[1 - outcome]
        if prob > PROB_TOL:
            state = state / prob
        branches.append(MeasureBranch(outcome, prob, state))
    total = branches[0].prob + branches[1].prob
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"branch probabilities sum to {total}")
    return branches
