import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinlb.algebra import build_structure_tensor, canonicalize, enumerate_basis, parse_monomial
from spinlb.oracle import represent
from spinlb.symmetry import (
    ConstraintSet,
    build_constraints,
    chain_mirror,
    chain_shift,
    image,
    mirror_identification,
    residual_constraints,
    translation_constraints,
)


def mono(text):
    return parse_monomial(text)[0]


def reversal(n):
    """Dense permutation reversing the site order of an n-qubit register."""
    dim = 2**n
    p = np.zeros((dim, dim))
    for k in range(dim):
        bits = format(k, f"0{n}b")
        p[int(bits[::-1], 2), k] = 1
    return p


def test_golden_n4():
    basis = enumerate_basis(4)
    cs = build_constraints(4, basis)
    desc = cs.describe()
    assert desc["a_equalities"] == [["(1,2)", "(2,3)"]]
    assert sorted(desc["b_orbits"]) == sorted(
        [["1"], ["(1,2)", "(3,4)"], ["(1,3)", "(2,4)"], ["(1,4)"], ["(2,3)"],
         ["(1,2)(3,4)"], ["(1,3)(2,4)"], ["(1,4)(2,3)"]]
    )
    assert cs.normalization == 0


def test_n3_residual_empty():
    basis = enumerate_basis(3)
    cs = build_constraints(3, basis)
    assert cs.describe()["translation"] == [["(1,2)", "(2,3)"]]
    assert cs.a_equalities == []


def test_n2_residual_empty():
    assert build_constraints(2, enumerate_basis(2)).a_equalities == []


def test_shift_examples_n5():
    shift = chain_shift(5)
    assert str(image(mono("(1,2)(3,4)"), shift)) == "(2,3)(4,5)"
    assert str(image(mono("(1,3)"), shift)) == "(2,4)"
    assert image(mono("(4,5)"), shift) is None
    assert image(mono("1"), shift) == mono("1")


def test_mirror_examples_n5():
    mirror = chain_mirror(5)
    assert str(image(mono("(1,2)"), mirror)) == "(4,5)"
    assert str(image(mono("(1,3)(2,4)"), mirror)) == "(2,4)(3,5)"
    assert str(image(mono("(2,4)"), mirror)) == "(2,4)"


@pytest.mark.parametrize("n", [3, 4, 5])
def test_mirror_matches_dense_reversal(n):
    p = reversal(n)
    mirror = chain_mirror(n)
    for m in enumerate_basis(n):
        assert np.abs(p @ represent(m, n) @ p.T - represent(image(m, mirror), n)).max() < 1e-12


def test_image_rejects_mixed_products():
    with pytest.raises(ValueError):
        image(mono("[1,2,3]"), chain_mirror(3))


@given(st.integers(4, 9).flatmap(lambda n: st.tuples(st.just(n), st.permutations(range(1, n + 1)))))
def test_maps_commute_with_canonicalization(data):
    n, order = data
    pairs = [(order[i], order[i + 1]) for i in range(0, n - 1, 2)]
    m, _ = canonicalize(pairs)
    for site_map in (chain_shift(n), chain_mirror(n)):
        if any(s not in site_map for s in m.support):
            continue
        direct, _ = canonicalize([(site_map[i], site_map[j]) for i, j in pairs])
        assert image(m, site_map) == direct


@pytest.mark.parametrize("n", [4, 5, 6])
def test_mirror_symmetric_b_forces_mirror_symmetric_a(n):
    t = build_structure_tensor(n)
    orbits = mirror_identification(n, t.basis)
    mirror = chain_mirror(n)
    partner = [t.index(image(m, mirror)) for m in t.basis]
    rng = np.random.default_rng(n)
    for _ in range(100):
        vals = rng.normal(size=len(orbits))
        b = np.zeros(t.size)
        for v, members in zip(vals, orbits):
            b[members] = v
        a = t.a_vector(b)
        assert np.abs(a - a[partner]).max() < 1e-10


@pytest.mark.parametrize("n", [5, 6])
def test_residuals_imply_all_translations(n):
    basis = enumerate_basis(n)
    trans = translation_constraints(n, basis)
    mirror = mirror_identification(n, basis)
    kept = residual_constraints(trans, mirror)
    assert set(kept) <= set(trans)
    # equivalence closure of kept equalities plus mirror orbits covers every translation
    parent = list(range(len(basis)))

    def find(k):
        while parent[k] != k:
            k = parent[k]
        return k

    for members in mirror:
        for k in members[1:]:
            parent[find(k)] = find(members[0])
    for k, kp in kept:
        parent[find(k)] = find(kp)
    assert all(find(k) == find(kp) for k, kp in trans)


def test_residual_counts():
    counts = {n: len(build_constraints(n, enumerate_basis(n)).a_equalities) for n in (3, 4, 5, 6, 7)}
    assert counts == {3: 0, 4: 1, 5: 2, 6: 10, 7: 28}


def test_translation_includes_multi_pair_shapes():
    basis = enumerate_basis(5)
    labels = [(str(basis[k]), str(basis[kp])) for k, kp in translation_constraints(5, basis)]
    assert ("(1,2)(3,4)", "(2,3)(4,5)") in labels


def test_constraint_set_json_roundtrip():
    cs = build_constraints(5, enumerate_basis(5))
    back = ConstraintSet.from_json(cs.to_json())
    assert back == cs
