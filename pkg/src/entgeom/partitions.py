"""Set partitions of the party set and coarse-graining along them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PartitionError
from .qstate import DensityMatrix, PureState, default_labels, party_indices


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks of party labels, stored in canonical form.

    Canonical form sorts labels inside each block by party order and the
    blocks by their first member.
    """

    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise PartitionError("blocks must be nonempty")
        flat = [p for b in blocks for p in b]
        if len(flat) != len(set(flat)):
            raise PartitionError(f"blocks overlap: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def parties(self) -> frozenset[str]:
        return frozenset(p for b in self.blocks for p in b)

    def __str__(self):
        return canonical_label(self)


def _canonical_blocks(blocks, order) -> tuple[tuple[str, ...], ...]:
    rank = {p: i for i, p in enumerate(order)}
    blocks = [tuple(sorted(b, key=lambda p: rank.get(p, p))) for b in blocks]
    blocks.sort(key=lambda b: rank.get(b[0], b[0]))
    return tuple(blocks)


def make_partition(blocks, order=None) -> Partition:
    """Partition from any iterable of blocks, canonicalized.

    ``order`` fixes party precedence; defaults to alphabetical.
    """
    blocks = [tuple(str(p) for p in b) for b in blocks]
    if order is None:
        order = sorted({p for b in blocks for p in b})
    return Partition(_canonical_blocks(blocks, order))


def parse_partition(text: str, order=None) -> Partition:
    """Parse ``"AC|B|D"``; parties are single characters."""
    parts = [s.strip() for s in str(text).split("|")]
    if any(not s for s in parts):
        raise PartitionError(f"empty block in {text!r}")
    return make_partition([list(s) for s in parts], order)


def canonical_label(p: Partition) -> str:
    return "|".join("".join(b) for b in p.blocks)


def _set_partitions(n: int):
    """Restricted growth strings of length n in lexicographic order."""
    def rec(prefix, maxv):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(maxv + 2):
            yield from rec(prefix + [v], max(maxv, v))

    if n == 0:
        return
    yield from rec([0], 0)


# Orderings used for edge vectors.  The three-party list follows (A|BC, B|AC,
# AB|C); the four-party lists follow the x_i^(2) and x_i^(3) numbering.
_FIXED_ORDER = {
    (3, 2): ["A|BC", "B|AC", "AB|C"],
    (4, 2): ["AB|CD", "A|BCD", "AC|BD", "ABC|D", "AD|BC", "B|ACD", "C|ABD"],
    (4, 3): ["A|B|CD", "A|BC|D", "AC|B|D", "AB|C|D", "AD|B|C", "A|BD|C"],
}


@lru_cache(maxsize=None)
def _enumerate(m: int, k: int) -> tuple[Partition, ...]:
    labels = default_labels(m)
    fixed = _FIXED_ORDER.get((m, k))
    if fixed is not None:
        return tuple(parse_partition(s, labels) for s in fixed)
    out = []
    for rgs in _set_partitions(m):
        if max(rgs) + 1 != k:
            continue
        blocks = [[labels[i] for i in range(m) if rgs[i] == b] for b in range(k)]
        out.append(make_partition(blocks, labels))
    return tuple(out)


def enumerate_partitions(m: int, k: int) -> list[Partition]:
    """All set partitions of m parties (labels A, B, ...) into exactly k blocks.

    The count is the Stirling number of the second kind S(m, k).
    """
    if not 2 <= k <= m:
        raise PartitionError(f"need 2 <= k <= m, got m={m}, k={k}")
    if m > 8:
        raise PartitionError("at most 8 parties supported")
    return list(_enumerate(m, k))


def bipartition_sides(m: int) -> list[list[int]]:
    """The block holding position 0, for each of the 2^(m-1) - 1 bipartitions."""
    sides = []
    for mask in range(2 ** (m - 1) - 1):
        sides.append([0] + [i for i in range(1, m) if mask >> (i - 1) & 1])
    return sides


def _as_partition(p, order) -> Partition:
    if isinstance(p, Partition):
        return p
    if isinstance(p, str):
        return parse_partition(p, order)
    return make_partition(p, order)


def block_positions(obj, p) -> list[list[int]]:
    """Positions of each block's parties in ``obj``, checking coverage."""
    p = _as_partition(p, obj.party_labels)
    if p.parties != frozenset(obj.party_labels):
        raise PartitionError(
            f"partition {canonical_label(p)} does not cover parties {''.join(obj.party_labels)}"
        )
    return [party_indices(obj, b) for b in p.blocks]


def coarse_grain(obj, p):
    """Merge each block into one party of dimension prod(member dims).

    Works on PureState and DensityMatrix.  The new parties are labelled by
    the concatenated member labels ("AB", "C", ...).
    """
    p = _as_partition(p, obj.party_labels)
    blocks = block_positions(obj, p)
    perm = [i for b in blocks for i in b]
    new_dims = tuple(int(np.prod([obj.dims[i] for i in b])) for b in blocks)
    new_labels = tuple("".join(obj.party_labels[i] for i in b) for b in blocks)
    if isinstance(obj, PureState):
        amps = obj.tensor().transpose(perm).reshape(-1)
        amps = np.ascontiguousarray(amps)
        amps.setflags(write=False)
        return PureState._trusted(amps, new_dims, new_labels)
    if isinstance(obj, DensityMatrix):
        m = len(obj.dims)
        t = obj.matrix.reshape(obj.dims + obj.dims)
        t = t.transpose(perm + [i + m for i in perm])
        n = int(np.prod(new_dims))
        mat = np.ascontiguousarray(t.reshape(n, n))
        mat.setflags(write=False)
        return DensityMatrix._trusted(mat, new_dims, new_labels)
    raise TypeError(f"cannot coarse-grain {type(obj).__name__}")
