"""Tripartite layer: unified measures, edge vectors and composite measures.

Edge order is fixed: x = E(A|BC), y = E(AB|C), z = E(B|AC), where A, B, C
are the three (possibly merged) parties in positional order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bipartite import MeasureDescriptor, as_measure, batch_measure, mixed_measure
from .combine import ZERO_TOL, Variant, as_variant, batch_gated_sum, batch_ratio, delta
from .errors import PartitionError
from .partitions import bipartition_sides, make_partition
from .qstate import PureState, entropy_of_spectrum, reduced_matrix
from .roof import RoofConfig, roof_minimize

# positions of the single-side block for x, y, z
_EDGE_SIDES = ([0], [2], [1])


@dataclass(frozen=True)
class EdgeVector3:
    x: float
    y: float
    z: float
    measure: MeasureDescriptor

    def __post_init__(self):
        if min(self.x, self.y, self.z) < 0:
            raise ValueError("edge values must be nonnegative")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def labelled(self, labels=("A", "B", "C")) -> dict[str, float]:
        a, b, c = labels
        return {f"{a}|{b}{c}": self.x, f"{a}{b}|{c}": self.y, f"{b}|{a}{c}": self.z}


class Composite(enum.Enum):
    EG123 = "eg123"
    E123 = "e123"


def _require_three(obj):
    if obj.num_parties != 3:
        raise PartitionError(f"expected exactly 3 parties, got {obj.num_parties}")


def _marginal_spectra(state: PureState):
    return [
        np.clip(np.linalg.eigvalsh(reduced_matrix(state.amplitudes, state.dims, [i])), 0.0, None)
        for i in range(3)
    ]


def tau3(state: PureState) -> float:
    """3 - Tr(rho_A^2) - Tr(rho_B^2) - Tr(rho_C^2)."""
    _require_three(state)
    total = 3.0
    for i in range(3):
        r = reduced_matrix(state.amplitudes, state.dims, [i])
        total -= float(np.vdot(r, r).real)
    return max(0.0, total)


def ef3(state: PureState) -> float:
    """Half the sum of the three single-party entropies (bits)."""
    _require_three(state)
    return 0.5 * sum(entropy_of_spectrum(lam) for lam in _marginal_spectra(state))


def _cuts(obj):
    a, b, c = obj.party_labels
    order = obj.party_labels
    return (
        make_partition([[a], [b, c]], order),
        make_partition([[a, b], [c]], order),
        make_partition([[b], [a, c]], order),
    )


def edge_vector_3(obj, d, roof_config: RoofConfig | None = None) -> EdgeVector3:
    """The three one-versus-rest values of a bipartite measure."""
    _require_three(obj)
    d = as_measure(d)
    if isinstance(obj, PureState):
        vals = [
            float(batch_measure(obj.amplitudes[None, :], obj.dims, side, d.kind)[0])
            for side in _EDGE_SIDES
        ]
    else:
        vals = [mixed_measure(obj, cut, d, roof_config) for cut in _cuts(obj)]
    return EdgeVector3(*vals, measure=d)


def f123(e: EdgeVector3, variant=Variant.RATIO) -> float:
    """xyz/(x+y+z) (0 when all edges vanish) or xyz."""
    x, y, z = e.as_tuple()
    if as_variant(variant) is Variant.PRODUCT:
        return x * y * z
    s = x + y + z
    return x * y * z / s if s > 0 else 0.0


def e123(e: EdgeVector3) -> float:
    return e.x + e.y + e.z


def eg123(e: EdgeVector3, tol: float = ZERO_TOL) -> float:
    """Sum of edges gated by whether all three are nonzero."""
    return delta(e.as_tuple(), tol) * e123(e)


def delta_pure_genuine(state: PureState, d, tol: float = ZERO_TOL) -> int:
    """1 iff the pure state is entangled across every bipartition."""
    d = as_measure(d)
    for side in bipartition_sides(state.num_parties):
        if batch_measure(state.amplitudes[None, :], state.dims, side, d.kind)[0] <= tol:
            return 0
    return 1


class CompositeFunctional:
    """Pure-state composite (E_{g-123}, E_123, F_123) on a 3-party layout."""

    def __init__(self, which, d, variant=Variant.RATIO):
        self.which = _as_composite_name(which)
        self.measure = as_measure(d)
        self.variant = as_variant(variant)

    def edges(self, amps, dims) -> np.ndarray:
        return np.stack([batch_measure(amps, dims, side, self.measure.kind) for side in _EDGE_SIDES], axis=1)

    def combine(self, edges: np.ndarray) -> np.ndarray:
        if self.which == "eg123":
            return batch_gated_sum(edges)
        if self.which == "e123":
            return edges.sum(axis=1)
        if self.variant is Variant.PRODUCT:
            return edges.prod(axis=1)
        return batch_ratio(edges)

    def batch(self, amps, dims, labels=None) -> np.ndarray:
        if len(dims) != 3:
            raise PartitionError("composite functional needs 3 parties")
        return self.combine(self.edges(amps, dims))

    def __call__(self, psi: PureState) -> float:
        return float(self.batch(psi.amplitudes[None, :], psi.dims)[0])


def _as_composite_name(which) -> str:
    if isinstance(which, Composite):
        return which.value
    name = str(which).strip().lower().replace("-", "").replace("_", "")
    aliases = {"eg123": "eg123", "e123": "e123", "f123": "f123"}
    if name not in aliases:
        raise ValueError(f"unknown tripartite composite {which!r}")
    return aliases[name]


def roofed_composite(rho, which, d, cfg: RoofConfig | None = None, variant=Variant.RATIO):
    """Convex roof of a pure-state composite; returns the RoofResult."""
    _require_three(rho)
    if isinstance(rho, PureState):
        from .qstate import density_of

        rho = density_of(rho)
    return roof_minimize(rho, CompositeFunctional(which, d, variant), cfg)
