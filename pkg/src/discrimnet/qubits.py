"""Dense linear algebra for small multi-qubit systems.

Conventions used throughout the package:

* Pauli axis labels follow the order (identity, z, x, y): label 0 is the
  identity, label 1 the z axis, label 2 the x axis and label 3 the y axis.
* Operators are plain complex numpy arrays in the computational basis,
  row-major, with dimension a power of two.
* ``TOL`` is the shared tolerance for validity and equality checks on exact
  arithmetic paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import product
from math import cos, pi, sin

import numpy as np

from .errors import ValidationError

TOL = 1e-9

#: Hard cap on the number of qubits a dense operator may span.
MAX_QUBITS = 6

PAULI_LABELS = (0, 1, 2, 3)
PAULI_AXES = (1, 2, 3)
OUTCOMES = (1, -1)


def _frozen(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    arr.setflags(write=False)
    return arr


_PAULI = (
    _frozen([[1, 0], [0, 1]]),
    _frozen([[1, 0], [0, -1]]),    # z
    _frozen([[0, 1], [1, 0]]),     # x
    _frozen([[0, -1j], [1j, 0]]),  # y
)

IDENTITY_2 = _PAULI[0]

_BELL_KETS = (
    _frozen([1, 0, 0, 1]) / np.sqrt(2),
    _frozen([1, 0, 0, -1]) / np.sqrt(2),
    _frozen([0, 1, 1, 0]) / np.sqrt(2),
    _frozen([0, 1, -1, 0]) / np.sqrt(2),
)


def pauli(label: int) -> np.ndarray:
    """Single-qubit Pauli matrix for an axis label in {0, 1, 2, 3}."""
    if label not in PAULI_LABELS:
        raise ValidationError(f"Pauli label must be one of {PAULI_LABELS}, got {label!r}")
    return _PAULI[label]


@lru_cache(maxsize=None)
def pauli_string(labels: tuple[int, ...]) -> np.ndarray:
    """Tensor product of single-qubit Pauli matrices, one label per site."""
    if not labels:
        raise ValidationError("pauli_string needs at least one label")
    mats = [pauli(k) for k in labels]
    out = reduce(np.kron, mats)
    out.setflags(write=False)
    return out


def pauli_projector(outcome: int, axis: int) -> np.ndarray:
    """Projector onto the ``outcome`` (+1 or -1) eigenspace of the Pauli ``axis``."""
    if outcome not in OUTCOMES:
        raise ValidationError(f"projector outcome must be +1 or -1, got {outcome!r}")
    if axis not in PAULI_AXES:
        raise ValidationError(f"projector axis must be one of {PAULI_AXES}, got {axis!r}")
    return (IDENTITY_2 + outcome * pauli(axis)) / 2


def bell_ket(index: int) -> np.ndarray:
    """State vector of the ``index``-th maximally entangled two-qubit state."""
    if index not in (0, 1, 2, 3):
        raise ValidationError(f"Bell index must be in 0..3, got {index!r}")
    return _BELL_KETS[index]


def bell_state(index: int) -> np.ndarray:
    """Rank-1 projector onto the ``index``-th maximally entangled state."""
    ket = bell_ket(index)
    return np.outer(ket, ket.conj())


def bell_unitary(index: int) -> np.ndarray:
    """Local unitary carrying the index-0 entangled ket to the ``index``-th one.

    bell_ket(b) == kron(bell_unitary(b), I) @ bell_ket(0) for every b.
    """
    if index not in (0, 1, 2, 3):
        raise ValidationError(f"Bell index must be in 0..3, got {index!r}")
    if index == 0:
        return IDENTITY_2
    if index == 3:
        return pauli(1) @ pauli(2)
    return pauli(index)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product of one or more operators, left to right."""
    if not ops:
        raise ValidationError("kron needs at least one operator")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


def partial_trace(op: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` gives the subsystem dimensions in tensor order; ``keep`` holds
    indices into ``dims``.
    """
    op = np.asarray(op, dtype=complex)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = tuple(sorted({int(k) for k in keep}))
    if not keep:
        raise ValidationError("keep must name at least one subsystem")
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"keep indices {keep} out of range for {n} subsystems")
    total = int(np.prod(dims))
    if op.shape != (total, total):
        raise ValidationError(f"operator shape {op.shape} does not match dims {dims}")
    tensor = op.reshape(dims + dims)
    n_left = n
    for i in [i for i in range(n) if i not in keep][::-1]:
        tensor = np.trace(tensor, axis1=i, axis2=i + n_left)
        n_left -= 1
    d_keep = int(np.prod([dims[k] for k in keep]))
    return tensor.reshape(d_keep, d_keep)


def conjugate_entries(op: np.ndarray) -> np.ndarray:
    """Entrywise complex conjugate (conjugation in the computational basis)."""
    return np.asarray(op, dtype=complex).conj()


def is_hermitian(op: np.ndarray, tol: float = TOL) -> bool:
    op = np.asarray(op, dtype=complex)
    return bool(np.max(np.abs(op - op.conj().T)) <= tol)


def is_unitary(op: np.ndarray, tol: float = TOL) -> bool:
    op = np.asarray(op, dtype=complex)
    eye = np.eye(op.shape[0])
    return bool(np.max(np.abs(op @ op.conj().T - eye)) <= tol)


def is_psd(op: np.ndarray, tol: float = TOL) -> bool:
    op = np.asarray(op, dtype=complex)
    if not is_hermitian(op, tol):
        return False
    return bool(np.min(np.linalg.eigvalsh(op)) >= -tol)


def qubit_count(dim: int) -> int:
    """Number of qubits spanned by a Hilbert-space dimension (must be 2**n)."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValidationError(f"dimension {dim} exceeds the {MAX_QUBITS}-qubit cap")
    return n


def validate_density(rho: np.ndarray, tol: float = TOL, name: str = "state") -> np.ndarray:
    """Check trace, Hermiticity and positivity; return the state as an array."""
    arr = np.asarray(rho, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    qubit_count(arr.shape[0])
    if abs(np.trace(arr) - 1.0) > tol:
        raise ValidationError(f"{name} has trace {np.trace(arr):.6g}, expected 1")
    if not is_hermitian(arr, tol):
        raise ValidationError(f"{name} is not Hermitian within {tol}")
    if np.min(np.linalg.eigvalsh(arr)) < -tol:
        raise ValidationError(f"{name} is not positive semidefinite within {tol}")
    return arr


def is_pure(rho: np.ndarray, tol: float = TOL) -> bool:
    rho = np.asarray(rho, dtype=complex)
    return bool(abs(np.trace(rho @ rho) - 1.0) <= max(tol, 1e-7))


@dataclass(frozen=True)
class PureState:
    """Single-qubit pure state cos(omega)|0> + exp(i*theta) sin(omega)|1>.

    ``omega`` lies in [0, pi/2]; ``theta`` is normalised into [0, 2*pi).
    """

    omega: float
    theta: float

    def __post_init__(self):
        if not -TOL <= self.omega <= pi / 2 + TOL:
            raise ValidationError(f"omega must lie in [0, pi/2], got {self.omega!r}")
        object.__setattr__(self, "theta", float(self.theta) % (2 * pi))

    def ket(self) -> np.ndarray:
        return np.array([cos(self.omega), np.exp(1j * self.theta) * sin(self.omega)])

    def density(self) -> np.ndarray:
        ket = self.ket()
        return np.outer(ket, ket.conj())


@dataclass(frozen=True)
class PauliCoefficients:
    """Real expansion coefficients of a state over tensor products of Paulis.

    ``table`` maps every label tuple in {0,1,2,3}**n_qubits (lexicographic
    insertion order) to Tr[pauli_string(labels) @ rho].
    """

    n_qubits: int
    table: dict[tuple[int, ...], float]

    def __getitem__(self, labels) -> float:
        return self.table[tuple(labels)]

    def __iter__(self):
        return iter(self.table)


def pauli_coefficients(rho: np.ndarray, tol: float = TOL) -> PauliCoefficients:
    """Expansion coefficients Tr[pauli_string(labels) @ rho] for all label tuples."""
    rho = validate_density(rho, tol)
    n = qubit_count(rho.shape[0])
    table: dict[tuple[int, ...], float] = {}
    for labels in product(PAULI_LABELS, repeat=n):
        value = np.trace(pauli_string(labels) @ rho)
        table[labels] = float(value.real)
    return PauliCoefficients(n_qubits=n, table=table)


def state_from_coefficients(coeffs: PauliCoefficients) -> np.ndarray:
    """Reassemble the density matrix from its Pauli expansion coefficients."""
    n = coeffs.n_qubits
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for labels in product(PAULI_LABELS, repeat=n):
        out += coeffs[labels] * pauli_string(labels)
    return out / dim
