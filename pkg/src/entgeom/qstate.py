"""State vectors and density matrices with explicit multi-party structure.

Basis index convention: row-major over parties, last party fastest, so the
index of the digit string (i_1, ..., i_m) is sum_k i_k * prod_{j>k} d_j.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import (
    DegenerateInputError,
    DimensionError,
    PartitionError,
    UnitaryError,
    UnknownStateError,
)

EIG_CUTOFF = 1e-12
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10

__all__ = [
    "PureState",
    "DensityMatrix",
    "Ensemble",
    "make_pure_state",
    "make_density_matrix",
    "named_state",
    "density_of",
    "partial_trace",
    "purity",
    "von_neumann_entropy",
    "haar_random_pure",
    "haar_random_unitary",
    "apply_local_unitary",
    "eigen_ensemble",
    "product_state",
    "bell_state",
]


def default_labels(m: int) -> tuple[str, ...]:
    if m > len(string.ascii_uppercase):
        raise PartitionError(f"too many parties: {m}")
    return tuple(string.ascii_uppercase[:m])


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DimensionError("dims must be nonempty")
    if any(d < 2 for d in dims):
        raise DimensionError(f"every local dimension must be >= 2, got {dims}")
    return dims


def _check_labels(labels, m) -> tuple[str, ...]:
    if labels is None:
        return default_labels(m)
    labels = tuple(str(x) for x in labels)
    if len(labels) != m:
        raise DimensionError(f"{len(labels)} labels for {m} parties")
    if len(set(labels)) != m:
        raise PartitionError(f"duplicate party labels {labels}")
    return labels


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...]
    party_labels: tuple[str, ...] = field(default=None)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise DimensionError(
                f"{amps.size} amplitudes do not match dims {dims} (product {int(np.prod(dims))})"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise DegenerateInputError(f"state is not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "party_labels", _check_labels(self.party_labels, len(dims)))

    @classmethod
    def _trusted(cls, amplitudes, dims, labels) -> "PureState":
        obj = object.__new__(cls)
        object.__setattr__(obj, "amplitudes", amplitudes)
        object.__setattr__(obj, "dims", dims)
        object.__setattr__(obj, "party_labels", labels)
        return obj

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def __repr__(self):
        return f"PureState(dims={self.dims}, labels={''.join(self.party_labels)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...]
    party_labels: tuple[str, ...] = field(default=None)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        mat = np.asarray(self.matrix, dtype=complex)
        n = int(np.prod(dims))
        if mat.shape != (n, n):
            raise DimensionError(f"matrix shape {mat.shape} does not match dims {dims}")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise DegenerateInputError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise DegenerateInputError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(mat).min() < -HERMITIAN_TOL:
            raise DegenerateInputError("density matrix has a negative eigenvalue")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "party_labels", _check_labels(self.party_labels, len(dims)))

    @classmethod
    def _trusted(cls, matrix, dims, labels) -> "DensityMatrix":
        obj = object.__new__(cls)
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "dims", dims)
        object.__setattr__(obj, "party_labels", labels)
        return obj

    @property
    def num_parties(self) -> int:
        return len(self.dims)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims}, labels={''.join(self.party_labels)})"


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Pure-state decomposition {p_i, |psi_i>} of a density matrix."""

    weights: np.ndarray
    members: tuple[PureState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.members),):
            raise DimensionError("one weight per member required")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
            raise DegenerateInputError("ensemble weights must be positive and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "members", tuple(self.members))

    def __len__(self):
        return len(self.members)

    def density(self) -> DensityMatrix:
        first = self.members[0]
        mat = sum(p * np.outer(s.amplitudes, s.amplitudes.conj()) for p, s in zip(self.weights, self.members))
        return DensityMatrix._trusted(mat, first.dims, first.party_labels)

    def average(self, functional) -> float:
        return float(sum(p * functional(s) for p, s in zip(self.weights, self.members)))


def make_pure_state(amplitudes, dims, party_labels=None) -> PureState:
    """Build a normalized PureState; the input need not be normalized."""
    dims = _check_dims(dims)
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.size != int(np.prod(dims)):
        raise DimensionError(f"{amps.size} amplitudes do not match dims {list(dims)}")
    norm = np.linalg.norm(amps)
    if norm == 0 or not np.isfinite(norm):
        raise DegenerateInputError("cannot normalize a zero or non-finite vector")
    return PureState(amps / norm, dims, party_labels)


def make_density_matrix(matrix, dims, party_labels=None) -> DensityMatrix:
    return DensityMatrix(np.asarray(matrix, dtype=complex), dims, party_labels)


def product_state(dims, digits=None) -> PureState:
    """Computational basis product state |digits>, default |0...0>."""
    dims = _check_dims(dims)
    digits = [0] * len(dims) if digits is None else list(digits)
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    amps[np.ravel_multi_index(digits, dims)] = 1.0
    return PureState(amps, dims)


def bell_state() -> PureState:
    """(|00> + |11>)/sqrt 2."""
    return make_pure_state([1, 0, 0, 1], [2, 2])


def _basis_sum(n, indices, coeff):
    amps = np.zeros(2**n, dtype=complex)
    amps[list(indices)] = coeff
    return amps


_NAMED = {
    "GHZ": lambda: PureState(_basis_sum(3, [0, 7], 1 / np.sqrt(2)), (2, 2, 2)),
    "W": lambda: PureState(_basis_sum(3, [4, 2, 1], 1 / np.sqrt(3)), (2, 2, 2)),
    "GHZ4": lambda: PureState(_basis_sum(4, [0, 15], 1 / np.sqrt(2)), (2, 2, 2, 2)),
    "W4": lambda: PureState(_basis_sum(4, [8, 4, 2, 1], 0.5), (2, 2, 2, 2)),
}

NAMED_STATES = ("GHZ", "W", "GHZ4", "W4", "PRODUCT_ZERO")


def named_state(name: str, dims: Sequence[int] | None = None) -> PureState:
    key = str(name).upper().replace("-", "_")
    if key in ("PRODUCT", "PRODUCT_ZERO"):
        return product_state(dims if dims is not None else (2, 2, 2))
    if key not in _NAMED:
        raise UnknownStateError(f"unknown state {name!r}; known: {', '.join(NAMED_STATES)}")
    state = _NAMED[key]()
    if dims is not None and tuple(dims) != state.dims:
        raise DimensionError(f"{key} is defined on qubits {list(state.dims)}, got dims {list(dims)}")
    return state


def density_of(state: PureState) -> DensityMatrix:
    a = state.amplitudes
    mat = np.outer(a, a.conj())
    mat.setflags(write=False)
    return DensityMatrix._trusted(mat, state.dims, state.party_labels)


def party_indices(obj, parties: Iterable) -> list[int]:
    """Resolve labels or integer positions to sorted party positions."""
    labels = obj.party_labels
    out = set()
    for p in parties:
        if isinstance(p, (int, np.integer)):
            if not 0 <= p < len(labels):
                raise PartitionError(f"party index {p} out of range")
            out.add(int(p))
        else:
            text = str(p)
            if text in labels:
                out.add(labels.index(text))
            elif all(ch in labels for ch in text):
                out.update(labels.index(ch) for ch in text)
            else:
                raise PartitionError(f"unknown party {p!r}; parties are {labels}")
    return sorted(out)


def reduced_matrix(amplitudes: np.ndarray, dims: tuple[int, ...], keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state on the sorted positions ``keep``."""
    rest = [i for i in range(len(dims)) if i not in keep]
    t = amplitudes.reshape(dims).transpose(list(keep) + rest)
    dk = int(np.prod([dims[i] for i in keep]))
    m = t.reshape(dk, -1)
    return m @ m.conj().T


def partial_trace(rho, keep) -> DensityMatrix:
    """Trace out every party not in ``keep``; kept parties stay in original order."""
    if isinstance(rho, PureState):
        rho = density_of(rho)
    keep = party_indices(rho, keep)
    if not keep:
        raise PartitionError("keep set must be nonempty")
    dims = rho.dims
    m = len(dims)
    if len(keep) == m:
        return rho
    t = rho.matrix.reshape(dims + dims)
    row = list(range(m))
    col = [i + m if i in keep else i for i in range(m)]
    out_idx = keep + [i + m for i in keep]
    red = np.einsum(t, row + col, out_idx)
    dk = int(np.prod([dims[i] for i in keep]))
    red = red.reshape(dk, dk)
    red = (red + red.conj().T) / 2
    red.setflags(write=False)
    return DensityMatrix._trusted(
        red, tuple(dims[i] for i in keep), tuple(rho.party_labels[i] for i in keep)
    )


def purity(rho: DensityMatrix) -> float:
    m = rho.matrix
    return float(np.real(np.vdot(m.conj().T, m)))


def entropy_of_spectrum(lam: np.ndarray) -> float:
    lam = np.asarray(lam, dtype=float)
    lam = lam[lam > EIG_CUTOFF]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits."""
    return entropy_of_spectrum(rho.eigenvalues())


def haar_random_pure(dims, seed) -> PureState:
    """Unitarily invariant random state; ``seed`` may be an int or a numpy Generator."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(seed)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return PureState(v, dims)


def haar_random_unitary(d: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def apply_local_unitary(state: PureState, party, U) -> PureState:
    idx = party_indices(state, [party])
    if len(idx) != 1:
        raise PartitionError(f"apply_local_unitary acts on a single party, got {party!r}")
    k = idx[0]
    U = np.asarray(U, dtype=complex)
    d = state.dims[k]
    if U.shape != (d, d):
        raise DimensionError(f"unitary of shape {U.shape} for party of dimension {d}")
    if np.max(np.abs(U.conj().T @ U - np.eye(d))) > 1e-10:
        raise UnitaryError("matrix is not unitary within 1e-10")
    t = np.tensordot(U, state.tensor(), axes=([1], [k]))
    t = np.moveaxis(t, 0, k)
    amps = t.reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return PureState(amps, state.dims, state.party_labels)


def eigen_ensemble(rho: DensityMatrix) -> Ensemble:
    lam, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    mask = lam > EIG_CUTOFF
    lam, vecs = lam[mask], vecs[:, mask]
    weights = lam / lam.sum()
    members = tuple(make_pure_state(vecs[:, i], rho.dims, rho.party_labels) for i in range(len(lam)))
    return Ensemble(weights, members)


def mixture(weights, states) -> DensityMatrix:
    """Convex combination of pure states or density matrices."""
    mats = []
    for s in states:
        if isinstance(s, PureState):
            mats.append(np.outer(s.amplitudes, s.amplitudes.conj()))
        else:
            mats.append(np.asarray(s.matrix))
    w = np.asarray(weights, dtype=float)
    mat = sum(p * m for p, m in zip(w, mats))
    first = states[0]
    return DensityMatrix(mat, first.dims, first.party_labels)


def tensor_product(*states: PureState) -> PureState:
    amps = np.array([1.0 + 0j])
    dims: list[int] = []
    for s in states:
        amps = np.kron(amps, s.amplitudes)
        dims.extend(s.dims)
    return make_pure_state(amps, dims)


def relabel(state, labels) -> PureState | DensityMatrix:
    labels = _check_labels(labels, state.num_parties)
    if isinstance(state, PureState):
        return PureState._trusted(state.amplitudes, state.dims, labels)
    return DensityMatrix._trusted(state.matrix, state.dims, labels)


def permute_parties(state: PureState, order: Sequence[int]) -> PureState:
    """Move the content of old party order[j] into position j.

    Labels stay positional, so the result is a physically different state
    whenever the permutation is nontrivial.
    """
    order = list(order)
    if sorted(order) != list(range(state.num_parties)):
        raise PartitionError(f"{order} is not a permutation")
    amps = state.tensor().transpose(order).reshape(-1)
    return PureState(
        np.ascontiguousarray(amps),
        tuple(state.dims[i] for i in order),
        state.party_labels,
    )


def werner_state(p: float) -> DensityMatrix:
    """p |Phi+><Phi+| + (1 - p) I/4 on two qubits."""
    if not 0.0 <= p <= 1.0:
        raise DegenerateInputError(f"Werner weight {p} outside [0, 1]")
    phi = bell_state().amplitudes
    return DensityMatrix(p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4, (2, 2))
