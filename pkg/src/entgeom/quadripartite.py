"""Four-partite measure families.

Bipartite edges: the seven bipartitions in the order AB|CD, A|BCD, AC|BD,
ABC|D, AD|BC, B|ACD, C|ABD.  Tripartite edges: the six tripartitions in the
order A|B|CD, A|BC|D, AC|B|D, AB|C|D, AD|B|C, A|BD|C.  Party names refer to
positions 0..3 of the input state whatever its labels.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .bipartite import MeasureDescriptor, as_measure, batch_measure, mixed_measure
from .combine import ZERO_TOL, Combiner, Variant, as_variant, batch_gated_sum, delta, generic_combiner
from .errors import PartitionError
from .partitions import canonical_label, coarse_grain, enumerate_partitions, make_partition
from .qstate import PureState, density_of
from .roof import RoofConfig, roof_minimize
from .tripartite import CompositeFunctional, edge_vector_3, e123, eg123, ef3, f123, tau3

__all__ = [
    "BIP_PARTITIONS",
    "TRI_PARTITIONS",
    "EdgeVector4Bip",
    "EdgeVector4Tri",
    "TriKind",
    "edge_vector_4_bip",
    "edge_vector_4_tri",
    "delta_bisep",
    "f1234_2",
    "e1234_2",
    "eg1234_2",
    "f1234_3",
    "tilde_f1234_3",
    "e1234_3",
    "eg1234_3",
    "generic_combiner",
]

BIP_PARTITIONS = tuple(enumerate_partitions(4, 2))
TRI_PARTITIONS = tuple(enumerate_partitions(4, 3))
_POS = {"A": 0, "B": 1, "C": 2, "D": 3}


class TriKind(enum.Enum):
    TAU3 = "tau3"
    EF3 = "ef3"
    EG123 = "eg123"
    E123 = "e123"
    F123 = "f123"


def as_tri_kind(k) -> TriKind:
    if isinstance(k, TriKind):
        return k
    return TriKind(str(k).strip().lower().replace("-", "").replace("_", ""))


@dataclass(frozen=True)
class EdgeVector4Bip:
    values: tuple[float, ...]
    measure: MeasureDescriptor
    labels: tuple[str, ...] = field(default=tuple(canonical_label(p) for p in BIP_PARTITIONS))

    def __post_init__(self):
        if len(self.values) != 7 or min(self.values) < 0:
            raise ValueError("need seven nonnegative values")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values))


@dataclass(frozen=True)
class EdgeVector4Tri:
    values: tuple[float, ...]
    tri_kind: TriKind
    measure: MeasureDescriptor | None = None
    labels: tuple[str, ...] = field(default=tuple(canonical_label(p) for p in TRI_PARTITIONS))

    def __post_init__(self):
        if len(self.values) != 6 or min(self.values) < 0:
            raise ValueError("need six nonnegative values")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values))


def _require_four(obj):
    if obj.num_parties != 4:
        raise PartitionError(f"expected exactly 4 parties, got {obj.num_parties}")


def positional(p, labels):
    """Rewrite a partition over A..D onto the actual labels of a state."""
    return make_partition([[labels[_POS[q]] for q in b] for b in p.blocks], labels)


def edge_vector_4_bip(obj, d, cfg: RoofConfig | None = None) -> EdgeVector4Bip:
    _require_four(obj)
    d = as_measure(d)
    vals = []
    for p in BIP_PARTITIONS:
        if isinstance(obj, PureState):
            side = [_POS[q] for q in p.blocks[0]]
            vals.append(float(batch_measure(obj.amplitudes[None, :], obj.dims, side, d.kind)[0]))
        else:
            vals.append(mixed_measure(obj, positional(p, obj.party_labels), d, cfg))
    return EdgeVector4Bip(tuple(vals), d)


class _UnifiedFunctional:
    """tau3 or ef3 as a roof functional on 3-party layouts."""

    def __init__(self, kind: TriKind):
        self.fn = tau3 if kind is TriKind.TAU3 else ef3

    def __call__(self, psi: PureState) -> float:
        return self.fn(psi)


def tri_measure(obj, tri_kind, d="tangle", variant=Variant.RATIO, cfg: RoofConfig | None = None) -> float:
    """Evaluate one tripartite measure on a 3-party state.

    Mixed inputs: tau3, ef3 and eg123 go through the convex roof of their
    pure form; e123 and f123 combine mixed-state bipartite edges directly.
    """
    kind = as_tri_kind(tri_kind)
    if isinstance(obj, PureState):
        if kind is TriKind.TAU3:
            return tau3(obj)
        if kind is TriKind.EF3:
            return ef3(obj)
        e = edge_vector_3(obj, d)
    else:
        if kind in (TriKind.TAU3, TriKind.EF3):
            return roof_minimize(obj, _UnifiedFunctional(kind), cfg).value
        if kind is TriKind.EG123:
            return roof_minimize(obj, CompositeFunctional("eg123", d), cfg).value
        e = edge_vector_3(obj, d, cfg)
    if kind is TriKind.EG123:
        return eg123(e)
    if kind is TriKind.E123:
        return e123(e)
    return f123(e, variant)


def tripartition_view(obj, p):
    """Coarse-grain a 4-party state to the three blocks of ``p`` (block order kept)."""
    return coarse_grain(obj, positional(p, obj.party_labels))


def edge_vector_4_tri(obj, tri_kind, d="tangle", variant=Variant.RATIO, cfg: RoofConfig | None = None) -> EdgeVector4Tri:
    _require_four(obj)
    kind = as_tri_kind(tri_kind)
    vals = tuple(tri_measure(tripartition_view(obj, p), kind, d, variant, cfg) for p in TRI_PARTITIONS)
    measure = None if kind in (TriKind.TAU3, TriKind.EF3) else as_measure(d)
    return EdgeVector4Tri(vals, kind, measure)


def delta_bisep(state: PureState, d="tangle", tol: float = ZERO_TOL) -> int:
    """0 if any of the seven bipartition values is at most ``tol``, else 1."""
    _require_four(state)
    return delta(edge_vector_4_bip(state, d).values, tol)


def f1234_2(e: EdgeVector4Bip, variant=Variant.RATIO) -> float:
    kind = Combiner.PRODUCT if as_variant(variant) is Variant.PRODUCT else Combiner.RATIO
    return generic_combiner(e.values, kind)


def e1234_2(e: EdgeVector4Bip) -> float:
    return generic_combiner(e.values, Combiner.SUM)


def eg1234_2(e: EdgeVector4Bip) -> float:
    return generic_combiner(e.values, Combiner.GATED_SUM)


def f1234_3(e: EdgeVector4Tri, variant=Variant.RATIO) -> float:
    kind = Combiner.PRODUCT if as_variant(variant) is Variant.PRODUCT else Combiner.RATIO
    return generic_combiner(e.values, kind)


def tilde_f1234_3(e: EdgeVector4Tri, delta_value: int, variant=Variant.RATIO) -> float:
    """f1234_3 after multiplying every entry by the biseparability indicator."""
    gated = np.asarray(e.values) * int(delta_value)
    kind = Combiner.PRODUCT if as_variant(variant) is Variant.PRODUCT else Combiner.RATIO
    return generic_combiner(gated, kind)


def e1234_3(e: EdgeVector4Tri) -> float:
    return generic_combiner(e.values, Combiner.SUM)


def eg1234_3(e: EdgeVector4Tri, delta_value: int) -> float:
    return int(delta_value) * e1234_3(e)


class GatedSum4Functional:
    """Pure-state E_{g-1234(2)} for a fixed bipartite measure; roof-ready."""

    def __init__(self, d):
        self.measure = as_measure(d)

    def edges(self, amps, dims) -> np.ndarray:
        cols = [batch_measure(amps, dims, [_POS[q] for q in p.blocks[0]], self.measure.kind) for p in BIP_PARTITIONS]
        return np.stack(cols, axis=1)

    def batch(self, amps, dims, labels=None) -> np.ndarray:
        return batch_gated_sum(self.edges(amps, dims))

    def __call__(self, psi: PureState) -> float:
        return float(self.batch(psi.amplitudes[None, :], psi.dims)[0])


def roofed_eg1234_2(rho, d, cfg: RoofConfig | None = None):
    """Convex roof of E_{g-1234(2)}; returns the RoofResult."""
    _require_four(rho)
    if isinstance(rho, PureState):
        rho = density_of(rho)
    return roof_minimize(rho, GatedSum4Functional(d), cfg)


__all__ += ["tri_measure", "roofed_eg1234_2", "GatedSum4Functional", "as_tri_kind", "tripartition_view"]
