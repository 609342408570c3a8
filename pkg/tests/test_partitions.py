import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import comb

from entgeom.errors import PartitionError
from entgeom.partitions import (
    bipartition_sides,
    canonical_label,
    coarse_grain,
    enumerate_partitions,
    make_partition,
    parse_partition,
)
from entgeom.qstate import density_of, haar_random_pure, named_state, partial_trace, product_state, von_neumann_entropy


def stirling2(n, k):
    # inclusion-exclusion
    return sum((-1) ** j * comb(k, j, exact=True) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def test_three_party_bipartitions():
    parts = enumerate_partitions(3, 2)
    assert parts == [parse_partition(t) for t in ("A|BC", "B|AC", "AB|C")]
    # canonical form orders blocks by their smallest member
    assert [canonical_label(p) for p in parts] == ["A|BC", "AC|B", "AB|C"]


def test_four_party_fixed_orders():
    bip = ["AB|CD", "A|BCD", "AC|BD", "ABC|D", "AD|BC", "B|ACD", "C|ABD"]
    tri = ["A|B|CD", "A|BC|D", "AC|B|D", "AB|C|D", "AD|B|C", "A|BD|C"]
    assert enumerate_partitions(4, 2) == [parse_partition(t) for t in bip]
    assert enumerate_partitions(4, 3) == [parse_partition(t) for t in tri]


@pytest.mark.parametrize("m", range(2, 8))
def test_counts_are_stirling(m):
    for k in range(2, m + 1):
        parts = enumerate_partitions(m, k)
        assert len(parts) == stirling2(m, k)
        assert len({canonical_label(p) for p in parts}) == len(parts)
    assert len(enumerate_partitions(m, 2)) == 2 ** (m - 1) - 1
    assert len(bipartition_sides(m)) == 2 ** (m - 1) - 1


def test_enumerate_errors():
    with pytest.raises(PartitionError):
        enumerate_partitions(3, 1)
    with pytest.raises(PartitionError):
        enumerate_partitions(3, 4)
    with pytest.raises(PartitionError):
        enumerate_partitions(9, 2)


def test_canonical_label():
    assert canonical_label(make_partition([["C", "A"], ["D"], ["B"]])) == "AC|B|D"
    assert canonical_label(make_partition([["B"], ["A"]])) == "A|B"
    for text in ("D|CA|B", "B|A", "BC|A"):
        once = canonical_label(parse_partition(text))
        assert canonical_label(parse_partition(once)) == once


def test_overlapping_blocks_rejected():
    with pytest.raises(PartitionError):
        make_partition([["A", "B"], ["B"]])
    with pytest.raises(PartitionError):
        parse_partition("A||B")


def test_coarse_grain_ghz4_balanced_cut():
    g = coarse_grain(named_state("GHZ4"), "AB|CD")
    assert g.dims == (4, 4) and g.party_labels == ("AB", "CD")
    sv = np.linalg.svd(g.amplitudes.reshape(4, 4), compute_uv=False)
    assert np.sum(sv > 1e-12) == 2


def test_coarse_grain_trivial_partition_is_identity():
    psi = haar_random_pure([2, 3, 2], 4)
    out = coarse_grain(psi, "A|B|C")
    assert np.array_equal(out.amplitudes, psi.amplitudes) and out.dims == psi.dims


def test_coarse_grain_product_across_cut():
    out = coarse_grain(product_state([2, 2, 2, 2]), "AC|BD")
    assert von_neumann_entropy(partial_trace(out, ["AC"])) == pytest.approx(0.0, abs=1e-12)


def test_coarse_grain_mismatch():
    with pytest.raises(PartitionError):
        coarse_grain(named_state("GHZ"), "A|B")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), text=st.sampled_from(["AC|BD", "AD|BC", "A|BCD", "ABD|C", "A|B|CD", "AC|B|D"]))
def test_coarse_grain_commutes_with_partial_trace(seed, text):
    psi = haar_random_pure([2, 3, 2, 2], seed)
    p = parse_partition(text)
    for rho in (psi, density_of(psi)):
        merged = coarse_grain(rho, p)
        block = p.blocks[0]
        a = partial_trace(merged, ["".join(block)]).matrix
        b = partial_trace(rho, list(block)).matrix
        assert np.linalg.norm(a - b) <= 1e-12
