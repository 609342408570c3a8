import math

import numpy as np
import pytest

import oracles
from entgeom.errors import FaceInequalityViolation, InfeasibleError, NotApplicable, NotATriangle, StrategyError
from entgeom.geometry import (
    RefineConfig,
    alpha_estimate,
    alpha_from_states,
    balanced_cut_values,
    bip_triangle_4,
    cayley_menger_volume,
    classify_faces,
    gamma_star,
    gamma_star_unordered,
    heron_area,
    iso_tetra_edges,
    sample_seed,
    tetra_from_tripartitions,
    tetra_of_state,
    triangle_check,
    triangle_geom,
    tripartition_edge,
)
from entgeom.qstate import (
    bell_state,
    haar_random_pure,
    named_state,
    permute_parties,
    product_state,
    tensor_product,
)
from entgeom.quadripartite import TRI_PARTITIONS, edge_vector_4_tri
from entgeom.tripartite import edge_vector_3

TRI_LABELS = ["A|B|CD", "A|BC|D", "AC|B|D", "AB|C|D", "AD|B|C", "A|BD|C"]


def bell_bell():
    return tensor_product(bell_state(), bell_state())


def zero_zero_bell():
    return tensor_product(product_state([2, 2]), bell_state())


def test_triangle_check_examples():
    assert triangle_check(1, 1, 1)
    assert triangle_check(2, 1, 1)
    assert not triangle_check(2.1, 1, 1)
    assert triangle_check(2.1, 1, 1, gamma=0.5)
    assert not triangle_check(1, 0.75, 0.5, gamma=2.0)


def test_gamma_star_examples():
    assert gamma_star(1, 0.75, 0.75) == pytest.approx(oracles.bisect_gamma(1, 0.75, 0.75), abs=1e-9)
    assert gamma_star(1, 0.75, 0.5) == pytest.approx(oracles.bisect_gamma(1, 0.75, 0.5), abs=1e-9)
    assert gamma_star(1, 0.5, 0.5) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(NotApplicable):
        gamma_star(1, 1, 0.5)
    with pytest.raises(InfeasibleError):
        gamma_star(1, 0.5, 0)
    with pytest.raises(NotApplicable):
        gamma_star_unordered([0.3, 1, 1])
    assert gamma_star_unordered([0.5, 0.75, 1]) == pytest.approx(gamma_star(1, 0.75, 0.5), abs=1e-12)


def test_gamma_star_consistent_with_check():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        y, z = rng.uniform(0.01, 1, 2)
        x = max(y, z) * rng.uniform(1.001, 3)
        g = gamma_star(x, y, z)
        assert g == pytest.approx(oracles.bisect_gamma(x, y, z), abs=1e-8)
        assert triangle_check(x, y, z, g * (1 - 1e-6))
        assert not triangle_check(x, y, z, g * (1 + 1e-3) + 1e-6)


def test_triangle_geom_examples():
    t = triangle_geom(3, 4, 5)
    assert t.area == pytest.approx(6.0) and t.R == pytest.approx(2.5) and t.r == pytest.approx(1.0)
    assert t.R * t.r == pytest.approx(t.rr_product)
    flat = triangle_geom(2, 1, 1)
    assert flat.degenerate and flat.R is None and flat.area == 0.0
    with pytest.raises(NotATriangle):
        triangle_geom(3, 1, 1)
    with pytest.raises(NotATriangle):
        triangle_geom(-1, 1, 1)


def test_heron_against_coordinates():
    rng = np.random.default_rng(7)
    for _ in range(500):
        a, b = rng.uniform(0.1, 2, 2)
        c = rng.uniform(abs(a - b) + 1e-3, a + b - 1e-3)
        assert heron_area(a, b, c) == pytest.approx(oracles.triangle_area_coords(a, b, c), abs=1e-10)


def test_rr_identity():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        a, b = rng.uniform(0.1, 2, 2)
        c = rng.uniform(abs(a - b) + 1e-3, a + b - 1e-3)
        t = triangle_geom(a, b, c)
        assert t.R * t.r == pytest.approx(a * b * c / (2 * (a + b + c)), rel=1e-9)


def test_cayley_menger():
    assert cayley_menger_volume(iso_tetra_edges(1, 1, 1)) == pytest.approx(oracles.regular_tetra_volume(1), abs=1e-12)
    assert cayley_menger_volume(iso_tetra_edges(2, 2, 2)) == pytest.approx(oracles.regular_tetra_volume(2), abs=1e-12)
    assert cayley_menger_volume(iso_tetra_edges(0, 0, 0)) == pytest.approx(0.0, abs=1e-12)
    # unit square with its diagonals: flat
    square = {"AB": 1, "BC": 1, "CD": 1, "AD": 1, "AC": math.sqrt(2), "BD": math.sqrt(2)}
    assert cayley_menger_volume(square) == pytest.approx(0.0, abs=1e-6)
    assert cayley_menger_volume(iso_tetra_edges(1, 1, 1.9)) is None
    with pytest.raises(ValueError):
        cayley_menger_volume({"AB": 1})


def test_tripartition_edge_rule():
    assert tripartition_edge("A|B|CD") == ("A", "B", "CD")
    assert tripartition_edge("AC|B|D") == ("B", "D", "AC")
    assert {"".join(tripartition_edge(t)[:2]) for t in TRI_LABELS} == {"AB", "AD", "BD", "CD", "BC", "AC"}
    with pytest.raises(ValueError):
        tripartition_edge("AB|CD")


def test_classify_faces():
    assert classify_faces({"ABC": 1, "ABD": 1, "ACD": 1, "BCD": 1}) == "A"
    assert classify_faces({"ABC": 2, "ABD": 1, "ACD": 1, "BCD": 0}) == "B"
    assert classify_faces({"ABC": 3, "ABD": 1, "ACD": 1, "BCD": 0}) == "C"


def test_tetra_ghz4_regular():
    t = tetra_of_state(named_state("GHZ4"))
    assert t.case == "A"
    assert all(v == pytest.approx(1.5) for v in t.edges.values())
    assert t.volume == pytest.approx(oracles.regular_tetra_volume(1.5), abs=1e-10)


def test_tetra_b2_examples():
    t = tetra_of_state(zero_zero_bell())
    assert t.case == "B2" and t.reduced_edge == pytest.approx(1.0, abs=1e-10)
    t = tetra_of_state(bell_bell(), "eg123", "tangle")
    assert t.case == "B2" and t.reduced_edge == pytest.approx(1.0, abs=1e-10)


def test_tetra_bell_bell_tau3_is_case_a():
    t = tetra_of_state(bell_bell())
    assert t.case == "A"
    assert sorted(t.edges.values()) == pytest.approx([1, 1, 1.75, 1.75, 1.75, 1.75])


def test_tetra_product_b3():
    t = tetra_of_state(product_state([2] * 4))
    assert t.case == "B3" and t.volume == pytest.approx(0.0, abs=1e-12)


def test_zero_branch_for_pair_times_singles():
    rng = np.random.default_rng(13)
    for _ in range(20):
        pair = haar_random_pure([2, 2], rng)
        raw = tensor_product(pair, haar_random_pure([2], rng), haar_random_pure([2], rng))
        psi = permute_parties(raw, [0, 2, 3, 1])  # parties A, B, C, D
        t_ad = oracles.tangle(pair.amplitudes, (2, 2), [0])
        vals = dict(zip(TRI_LABELS, edge_vector_4_tri(psi, "tau3").values))
        assert vals["A|B|CD"] == pytest.approx(t_ad, abs=1e-12)
        assert vals["A|BD|C"] == pytest.approx(t_ad, abs=1e-12)
        assert vals["AD|B|C"] == pytest.approx(0.0, abs=1e-12)
        geo = tetra_of_state(psi)
        assert geo.case == "B2" and geo.reduced_edge == pytest.approx(t_ad, abs=1e-10)


def test_classification_is_total():
    rng = np.random.default_rng(14)
    seen = set()
    for _ in range(300):
        vals = dict(zip(TRI_LABELS, rng.uniform(0, 1, 6) * (rng.random(6) > 0.1)))
        try:
            t = tetra_from_tripartitions(vals)
        except FaceInequalityViolation:
            continue
        assert t.case in {"A", "B1", "B2", "B3", "C"}
        seen.add(t.case)
    assert "A" in seen


def test_tetra_from_states_satisfy_faces():
    for seed in range(50):
        psi = haar_random_pure([2, 2, 2, 2], seed)
        assert tetra_of_state(psi).case in {"A", "B1", "B2", "B3", "C"}


def test_tetra_input_checks():
    vals = dict(zip(TRI_LABELS, [1.0] * 6))
    with pytest.raises(ValueError):
        tetra_from_tripartitions(vals, gamma=0)
    with pytest.raises(ValueError):
        tetra_from_tripartitions(dict(list(vals.items())[:5]))
    bad = dict(vals, **{"A|B|CD": 5.0})
    with pytest.raises(FaceInequalityViolation):
        tetra_from_tripartitions(bad)


def test_balanced_cuts_bell_bell():
    vals = balanced_cut_values(bell_bell(), "tangle")
    assert [vals[k] for k in ("AB|CD", "AC|BD", "AD|BC")] == pytest.approx([0, 1.5, 1.5], abs=1e-12)


def test_bip_triangle_ghz4():
    b = bip_triangle_4(named_state("GHZ4"), "tangle")
    assert b.triangle.a == pytest.approx(1.0) and b.iso_realizable
    assert b.iso_volume == pytest.approx(oracles.regular_tetra_volume(1.0), abs=1e-12)
    with pytest.raises(StrategyError):
        bip_triangle_4(named_state("GHZ4"), "negativity")
    with pytest.raises(NotApplicable):
        bip_triangle_4(named_state("GHZ"), "tangle")


def test_alpha_estimate_is_deterministic():
    a = alpha_estimate([2, 2, 2], "tangle", 300, seed=5)
    b = alpha_estimate([2, 2, 2], "tangle", 300, seed=5)
    assert a.alpha_hat == b.alpha_hat and a.records == b.records
    assert a.applicable + a.not_applicable + a.infeasible == 300
    rec = a.records[7]
    psi = haar_random_pure([2, 2, 2], sample_seed(5, 7))
    e = edge_vector_3(psi, "tangle").as_tuple()
    assert (rec["x"], rec["y"], rec["z"]) == pytest.approx(e, abs=1e-12)
    assert a.alpha_hat >= 1 - 1e-9


def test_alpha_refinement_never_increases():
    plain = alpha_estimate([2, 2, 2], "tangle", 100, seed=2)
    refined = alpha_estimate([2, 2, 2], "tangle", 100, seed=2, refine=RefineConfig(iterations=50))
    assert refined.alpha_hat <= plain.alpha_hat
    e = edge_vector_3(refined.witness, "tangle").as_tuple()
    assert gamma_star_unordered(e) == pytest.approx(refined.alpha_hat, abs=1e-9)


def test_alpha_needs_strict_maximum():
    bisep = [tensor_product(bell_state(), product_state([2])), named_state("GHZ")]
    with pytest.raises(NotApplicable):
        alpha_from_states(bisep, "tangle")
    with pytest.raises(NotApplicable):
        alpha_estimate([2, 2, 2, 2], "tangle", 10)
    with pytest.raises(ValueError):
        alpha_estimate([2, 2, 2], "tangle", 0)


def test_tri_partition_order_used_by_geometry():
    assert [str(p) for p in TRI_PARTITIONS] == [str(p) for p in TRI_PARTITIONS]
    assert len(TRI_PARTITIONS) == len(TRI_LABELS)
