import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

import oracles
from entgeom.combine import Combiner, generic_combiner
from entgeom.qstate import (
    bell_state,
    density_of,
    haar_random_pure,
    named_state,
    permute_parties,
    product_state,
    tensor_product,
)
from entgeom.quadripartite import (
    BIP_PARTITIONS,
    EdgeVector4Tri,
    TriKind,
    delta_bisep,
    e1234_2,
    e1234_3,
    edge_vector_4_bip,
    edge_vector_4_tri,
    eg1234_2,
    eg1234_3,
    f1234_2,
    f1234_3,
    roofed_eg1234_2,
    tilde_f1234_3,
)
from entgeom.roof import RoofConfig

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "four_party_tripartite.json").read_text())
BIP_SIDES = [[0, 1], [0], [0, 2], [0, 1, 2], [0, 3], [1], [2]]


def bell_bell():
    return tensor_product(bell_state(), bell_state())


def tri_vector(value, n=6):
    return EdgeVector4Tri((value,) * n, TriKind.TAU3)


def test_bip_edges_named_states():
    assert edge_vector_4_bip(named_state("GHZ4"), "tangle").values == pytest.approx((1,) * 7, abs=1e-12)
    w4 = edge_vector_4_bip(named_state("W4"), "tangle").values
    assert w4 == pytest.approx((1, 0.75, 1, 0.75, 1, 0.75, 0.75), abs=1e-12)
    assert edge_vector_4_bip(product_state([2] * 4), "eof").values == pytest.approx((0,) * 7, abs=1e-12)


def test_bip_edges_against_loop_oracle():
    for seed in range(4):
        psi = haar_random_pure([2, 2, 2, 2], seed)
        vals = edge_vector_4_bip(psi, "tangle").values
        for v, side in zip(vals, BIP_SIDES):
            assert v == pytest.approx(oracles.tangle(psi.amplitudes, psi.dims, side), abs=1e-12)


def test_bip_partition_order_matches_sides():
    for p, side in zip(BIP_PARTITIONS, BIP_SIDES):
        assert side in [[ord(q) - ord("A") for q in b] for b in p.blocks]


def test_bip_family_values():
    ghz = edge_vector_4_bip(named_state("GHZ4"), "tangle")
    assert f1234_2(ghz, "ratio") == pytest.approx(1 / 7, abs=1e-10)
    assert f1234_2(ghz, "product") == pytest.approx(1.0, abs=1e-10)
    assert e1234_2(ghz) == pytest.approx(7.0, abs=1e-10) and eg1234_2(ghz) == pytest.approx(7.0, abs=1e-10)
    w = edge_vector_4_bip(named_state("W4"), "tangle")
    assert f1234_2(w, "ratio") == pytest.approx(27 / 512, abs=1e-10)
    assert f1234_2(w, "product") == pytest.approx(81 / 256, abs=1e-10)
    assert e1234_2(w) == pytest.approx(6.0, abs=1e-10) and eg1234_2(w) == pytest.approx(6.0, abs=1e-10)


def test_zero_entry_kills_product_and_gate():
    e = edge_vector_4_bip(bell_bell(), "tangle")
    assert min(e.values) == pytest.approx(0.0, abs=1e-12)
    assert f1234_2(e, "product") == pytest.approx(0.0, abs=1e-12)
    assert eg1234_2(e) == 0.0


def test_tri_edges_named_states():
    assert edge_vector_4_tri(named_state("GHZ4"), "tau3").values == pytest.approx((1.5,) * 6, abs=1e-10)
    assert edge_vector_4_tri(named_state("W4"), "tau3").values == pytest.approx((1.25,) * 6, abs=1e-10)
    assert edge_vector_4_tri(product_state([2] * 4), "tau3").values == pytest.approx((0,) * 6, abs=1e-12)


def test_tri_edges_against_loop_oracle():
    blocks = [[[0], [1], [2, 3]], [[0], [1, 2], [3]], [[0, 2], [1], [3]], [[0, 1], [2], [3]], [[0, 3], [1], [2]], [[0], [1, 3], [2]]]
    psi = haar_random_pure([2, 2, 2, 2], 12)
    vals = edge_vector_4_tri(psi, "tau3").values
    for v, b in zip(vals, blocks):
        assert v == pytest.approx(oracles.tripartition_value_tau3(psi.amplitudes, psi.dims, b), abs=1e-12)


def test_tri_kinds_on_ghz4():
    g = named_state("GHZ4")
    assert edge_vector_4_tri(g, "ef3").values == pytest.approx((1.5,) * 6, abs=1e-10)
    assert edge_vector_4_tri(g, "eg123", "tangle").values == pytest.approx((3.0,) * 6, abs=1e-10)
    assert edge_vector_4_tri(g, "e123", "tangle").values == pytest.approx((3.0,) * 6, abs=1e-10)
    assert edge_vector_4_tri(g, "f123", "tangle", "ratio").values == pytest.approx((1 / 3,) * 6, abs=1e-10)


@pytest.mark.parametrize("name", ["GHZ4", "W4"])
def test_tri_family_against_exact_oracle(name):
    fix = FIXTURE[name]
    entry = Fraction(fix["entry"])
    exact = oracles.combos([entry] * 6)
    for key in ("ratio", "product", "sum"):
        assert exact[key] == Fraction(fix["oracle"][key])
    e = edge_vector_4_tri(named_state(name), "tau3")
    d = delta_bisep(named_state(name), "tangle")
    assert d == 1
    assert f1234_3(e, "ratio") == pytest.approx(float(exact["ratio"]), abs=1e-10)
    assert f1234_3(e, "product") == pytest.approx(float(exact["product"]), abs=1e-10)
    assert tilde_f1234_3(e, d, "ratio") == pytest.approx(float(exact["ratio"]), abs=1e-10)
    assert e1234_3(e) == pytest.approx(float(exact["sum"]), abs=1e-10)
    assert eg1234_3(e, d) == pytest.approx(float(exact["sum"]), abs=1e-10)


def test_alternate_values_are_recorded_only():
    # only the GHZ4 ratio agrees with six-entry evaluation
    agree = {
        (name, key)
        for name in ("GHZ4", "W4")
        for key in ("ratio", "product", "sum")
        if FIXTURE[name]["alternate"][key] == FIXTURE[name]["oracle"][key]
    }
    assert agree == {("GHZ4", "ratio")}


def test_delta_bisep():
    assert delta_bisep(named_state("GHZ4")) == 1
    assert delta_bisep(bell_bell()) == 0
    assert delta_bisep(product_state([2] * 4)) == 0


def test_bell_bell_gated_forms_vanish():
    psi = bell_bell()
    e = edge_vector_4_tri(psi, "tau3")
    d = delta_bisep(psi)
    assert d == 0
    assert tilde_f1234_3(e, d) == 0.0 and tilde_f1234_3(e, d, "product") == 0.0
    assert eg1234_3(e, d) == 0.0
    assert e1234_3(e) > 0


def test_generic_combiner_examples():
    assert generic_combiner([1, 2, 3], Combiner.SUM) == 6
    for n in (2, 5, 9):
        s = 0.7
        assert generic_combiner([s] * n, "ratio") == pytest.approx(s ** (n - 1) / n, rel=1e-12)
    assert generic_combiner([1, 0, 2], "product") == 0
    assert generic_combiner([0, 0], "ratio") == 0
    with pytest.raises(ValueError):
        generic_combiner([1, -1], "sum")


def test_concentric_values():
    for s in (0.3, 1.0, 1.25, 1.5):
        e = tri_vector(s)
        assert f1234_3(e, "ratio") == pytest.approx(s**5 / 6, rel=1e-14)
        assert f1234_3(e, "product") == pytest.approx(s**6, rel=1e-14)


def test_combiners_monotone_any_length():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        big = rng.uniform(0, 2, n)
        if rng.random() < 0.2:
            big[rng.integers(n)] = 0.0
        small = big * rng.uniform(0, 1, n)
        for kind in Combiner:
            assert generic_combiner(small, kind) <= generic_combiner(big, kind) + 1e-12


def test_permutation_invariance():
    rng = np.random.default_rng(10)
    for _ in range(200):
        psi = haar_random_pure([2, 2, 2, 2], rng)
        moved = permute_parties(psi, list(rng.permutation(4)))
        b1, b2 = edge_vector_4_bip(psi, "tangle"), edge_vector_4_bip(moved, "tangle")
        t1, t2 = edge_vector_4_tri(psi, "tau3"), edge_vector_4_tri(moved, "tau3")
        assert sorted(b1.values) == pytest.approx(sorted(b2.values), abs=1e-12)
        assert sorted(t1.values) == pytest.approx(sorted(t2.values), abs=1e-12)
        for v in ("ratio", "product"):
            assert f1234_2(b1, v) == pytest.approx(f1234_2(b2, v), abs=1e-9)
            assert f1234_3(t1, v) == pytest.approx(f1234_3(t2, v), abs=1e-9)
        assert eg1234_2(b1) == pytest.approx(eg1234_2(b2), abs=1e-9)
        assert e1234_3(t1) == pytest.approx(e1234_3(t2), abs=1e-9)


def test_gated_sum_matches_biseparability():
    zero_ghz = tensor_product(product_state([2]), named_state("GHZ"))
    states = [named_state("GHZ4"), named_state("W4"), bell_bell(), zero_ghz]
    states += [haar_random_pure([2, 2, 2, 2], 1000 + s) for s in range(100)]
    expected = [1, 1, 0, 0] + [1] * 100
    for psi, want in zip(states, expected):
        e = edge_vector_4_bip(psi, "tangle")
        assert delta_bisep(psi) == want
        assert (eg1234_2(e) > 0) == (want == 1)


def test_roofed_gated_sum_on_pure_density():
    res = roofed_eg1234_2(density_of(named_state("GHZ4")), "tangle", RoofConfig(restarts=2))
    assert res.value == pytest.approx(7.0, abs=1e-9)
