"""Bipartite entanglement measures across a cut.

Pure states use closed forms in the spectrum of one marginal; mixed states
either use negativity directly or a convex roof of the pure formula.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PartitionError, StrategyError
from .partitions import block_positions
from .qstate import EIG_CUTOFF, DensityMatrix, PureState, entropy_of_spectrum


class Kind(enum.Enum):
    TANGLE = "tangle"
    CONCURRENCE = "concurrence"
    EOF = "eof"
    NEGATIVITY = "negativity"


class Strategy(enum.Enum):
    DIRECT = "direct"
    CONVEX_ROOF = "convex_roof"


ROOF_ONLY = frozenset({Kind.TANGLE, Kind.CONCURRENCE, Kind.EOF})
SPECTRAL_KINDS = ROOF_ONLY


@dataclass(frozen=True)
class MeasureDescriptor:
    kind: Kind
    mixed_strategy: Strategy = None

    def __post_init__(self):
        kind = Kind(self.kind) if not isinstance(self.kind, Kind) else self.kind
        strat = self.mixed_strategy
        if strat is None:
            strat = Strategy.DIRECT if kind is Kind.NEGATIVITY else Strategy.CONVEX_ROOF
        elif not isinstance(strat, Strategy):
            strat = Strategy(strat)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "mixed_strategy", strat)

    @property
    def name(self) -> str:
        return self.kind.value


def as_measure(d) -> MeasureDescriptor:
    """Accept a descriptor, a Kind, or a case-insensitive name."""
    if isinstance(d, MeasureDescriptor):
        return d
    if isinstance(d, Kind):
        return MeasureDescriptor(d)
    try:
        return MeasureDescriptor(Kind(str(d).strip().lower()))
    except ValueError:
        names = ", ".join(k.value for k in Kind)
        raise StrategyError(f"unknown measure {d!r}; expected one of {names}") from None


def cut_positions(obj, cut) -> tuple[list[int], list[int]]:
    blocks = block_positions(obj, cut)
    if len(blocks) != 2:
        raise PartitionError(f"a bipartite measure needs a 2-block cut, got {len(blocks)} blocks")
    return blocks[0], blocks[1]


def cut_matrix(amplitudes, dims, side) -> np.ndarray:
    """Reshape amplitudes into a (d_side x d_rest) matrix."""
    rest = [i for i in range(len(dims)) if i not in side]
    t = amplitudes.reshape(dims).transpose(list(side) + rest)
    return t.reshape(int(np.prod([dims[i] for i in side])), -1)


def schmidt_spectrum(amplitudes, dims, side) -> np.ndarray:
    """Eigenvalues of the marginal on ``side`` (squared Schmidt coefficients)."""
    m = cut_matrix(amplitudes, dims, side)
    if m.shape[0] > m.shape[1]:
        m = m.T
    lam = np.linalg.eigvalsh(m @ m.conj().T)
    return np.clip(lam, 0.0, None)


def spectrum_measure(lam: np.ndarray, kind: Kind) -> float:
    if kind is Kind.TANGLE:
        return max(0.0, 2.0 * (1.0 - float(np.sum(lam * lam))))
    if kind is Kind.CONCURRENCE:
        return float(np.sqrt(max(0.0, 2.0 * (1.0 - float(np.sum(lam * lam))))))
    if kind is Kind.EOF:
        return entropy_of_spectrum(lam)
    if kind is Kind.NEGATIVITY:
        s = np.sqrt(lam[lam > EIG_CUTOFF])
        return max(0.0, (float(np.sum(s)) ** 2 - 1.0) / 2.0)
    raise StrategyError(f"unsupported kind {kind}")


def pure_measure(state: PureState, cut, d) -> float:
    """Bipartite measure of a pure state across a 2-block ``cut``.

    Tangle is 2(1 - Tr rho_X^2), concurrence its square root (for any local
    dimensions), EoF the marginal entropy in bits, and negativity the
    Schmidt-coefficient form ((sum sqrt(lambda))^2 - 1)/2.
    """
    d = as_measure(d)
    side, _ = cut_positions(state, cut)
    lam = schmidt_spectrum(state.amplitudes, state.dims, side)
    return spectrum_measure(lam, d.kind)


def partial_transpose(rho: DensityMatrix, side) -> np.ndarray:
    dims = rho.dims
    m = len(dims)
    t = rho.matrix.reshape(dims + dims)
    perm = list(range(2 * m))
    for i in side:
        perm[i], perm[i + m] = i + m, i
    n = int(np.prod(dims))
    return t.transpose(perm).reshape(n, n)


def negativity(rho, cut) -> float:
    """(||rho^{T_X}||_1 - 1) / 2 with the partial transpose on the first block."""
    if isinstance(rho, PureState):
        from .qstate import density_of

        rho = density_of(rho)
    side, _ = cut_positions(rho, cut)
    pt = partial_transpose(rho, side)
    lam = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return max(0.0, (float(np.sum(np.abs(lam))) - 1.0) / 2.0)


_SIGMA_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4) of the spin-flipped product."""
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"Wootters concurrence needs dims (2, 2), got {rho.dims}")
    r = np.asarray(rho.matrix)
    flipped = _SIGMA_YY @ r.conj() @ _SIGMA_YY
    ev = np.linalg.eigvals(r @ flipped)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def batch_spectra(amps: np.ndarray, dims, side) -> np.ndarray:
    """Marginal density matrices on ``side`` for a stack of state vectors."""
    rest = [i for i in range(len(dims)) if i not in side]
    n = amps.shape[0]
    t = amps.reshape((n,) + tuple(dims)).transpose([0] + [1 + i for i in side] + [1 + i for i in rest])
    m = t.reshape(n, int(np.prod([dims[i] for i in side])), -1)
    if m.shape[1] > m.shape[2]:
        m = m.transpose(0, 2, 1)
    return m @ m.conj().transpose(0, 2, 1)


def batch_measure(amps: np.ndarray, dims, side, kind: Kind) -> np.ndarray:
    rho = batch_spectra(amps, dims, side)
    if kind in (Kind.TANGLE, Kind.CONCURRENCE):
        pur = np.sum(rho.real**2 + rho.imag**2, axis=(1, 2))
        tangle = np.clip(2.0 * (1.0 - pur), 0.0, None)
        return tangle if kind is Kind.TANGLE else np.sqrt(tangle)
    lam = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    if kind is Kind.EOF:
        safe = np.where(lam > EIG_CUTOFF, lam, 1.0)
        return np.clip(-np.sum(np.where(lam > EIG_CUTOFF, lam * np.log2(safe), 0.0), axis=1), 0.0, None)
    s = np.sqrt(np.where(lam > EIG_CUTOFF, lam, 0.0))
    return np.clip((s.sum(axis=1) ** 2 - 1.0) / 2.0, 0.0, None)


class PureFunctional:
    """``pure_measure`` for a fixed cut, callable on PureState.

    ``batch`` evaluates a stack of normalized amplitude rows at once; the
    convex-roof search uses it when present.
    """

    def __init__(self, cut, d):
        self.cut = cut
        self.measure = as_measure(d)
        self._sides = {}

    def side(self, obj) -> list[int]:
        key = (obj.dims, obj.party_labels)
        side = self._sides.get(key)
        if side is None:
            side = self._sides[key] = cut_positions(obj, self.cut)[0]
        return side

    def __call__(self, psi: PureState) -> float:
        return float(batch_measure(psi.amplitudes[None, :], psi.dims, self.side(psi), self.measure.kind)[0])

    def batch(self, amps, dims, labels) -> np.ndarray:
        side = self.side(PureState._trusted(None, tuple(dims), tuple(labels)))
        return batch_measure(amps, dims, side, self.measure.kind)


def pure_functional(cut, d) -> PureFunctional:
    return PureFunctional(cut, d)


def mixed_measure(rho, cut, d, roof_config=None) -> float:
    """Bipartite measure of a density matrix.

    DIRECT evaluates negativity; CONVEX_ROOF minimizes the ensemble average
    of the pure formula (an upper bound from local search).
    """
    from .roof import roof_minimize

    d = as_measure(d)
    if isinstance(rho, PureState):
        return pure_measure(rho, cut, d)
    if d.mixed_strategy is Strategy.DIRECT:
        if d.kind is not Kind.NEGATIVITY:
            raise StrategyError(f"{d.name} has no direct mixed-state formula; use the convex roof")
        return negativity(rho, cut)
    cut_positions(rho, cut)
    return roof_minimize(rho, pure_functional(cut, d), roof_config).value
