import itertools
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bicat.errors import CycleError, NotALattice, ParseError
from bicat.poset import (
    ONE,
    Q,
    QPoly,
    antichain_polynomial,
    closure,
    count_order_ideals,
    dual,
    is_distributive,
    join_irreducible_subposet,
    meet_join_tables,
    parse_poset_text,
)

from conftest import brute_antichains

polys = st.lists(st.integers(-20, 20), max_size=6).map(QPoly)


def test_qpoly_basics():
    assert QPoly((1, 2, 0, 0)).coeffs == (1, 2)
    assert QPoly().coeffs == ()
    assert QPoly().degree == -1
    assert (ONE + Q) ** 3 == QPoly((1, 3, 3, 1))
    assert str(QPoly((1, 3, 1))) == "1 + 3q + q^2"
    assert QPoly((1, 3, 1)).at_one() == 5
    assert QPoly((5, 5, 1)).derivative() == QPoly((5, 2))
    assert QPoly((1, 3, 1)).compose_shift(1) == QPoly((5, 5, 1))
    assert QPoly((5, 5, 1)).reversed(2) == QPoly((1, 5, 5))
    assert QPoly((1, 4, 1)).is_symmetric()
    assert not QPoly((1, 4)).is_symmetric()


@given(polys, polys, polys)
def test_qpoly_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QPoly()
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()
    assert (a * b)(2) == a(2) * b(2)


@given(polys)
def test_shift_matches_evaluation(a):
    for x in range(-2, 3):
        assert a.compose_shift(1)(x) == a(x + 1)


def test_closure_examples():
    p = closure([(0, 2), (1, 2)], 3)
    assert sorted(p.minimal()) == [0, 1] and p.maximal() == [2]
    single = closure([], 1)
    assert single.minimal() == single.maximal() == [0]
    with pytest.raises(CycleError):
        closure([(0, 1), (1, 0)], 2)
    with pytest.raises(CycleError):
        closure([(0, 1), (1, 2), (2, 0)], 3)


def test_closure_is_transitive_and_reduces():
    p = closure([(0, 1), (1, 2), (0, 2)], 3)
    assert p.leq(0, 2) and not p.leq(2, 0)
    assert sorted(p.covers) == [(0, 1), (1, 2)]


def test_dual_involution():
    p = closure([(0, 2), (1, 2), (2, 3)], 4)
    dd = dual(dual(p))
    assert all(dd.leq(a, b) == p.leq(a, b) for a in range(4) for b in range(4))
    d = dual(p)
    assert all(d.leq(a, b) == p.leq(b, a) for a in range(4) for b in range(4))


def test_antichain_examples():
    assert antichain_polynomial(closure([(0, 2), (1, 2)], 3)) == QPoly((1, 3, 1))
    assert antichain_polynomial(closure([], 0)) == ONE


def test_antichain_a3_full_support_no_simples():
    # A3 root poset: simples 0,1,2; 3=a12, 4=a23, 5=a123; labels are supports
    covers = [(0, 3), (1, 3), (1, 4), (2, 4), (3, 5), (4, 5)]
    labels = [1, 2, 4, 3, 6, 7]
    p = closure(covers, 6, labels)
    poly = antichain_polynomial(p, forbidden=[0, 1, 2], required_label_union=7)
    assert poly == QPoly((0, 1, 1))
    assert poly.at_one() == 2


dag_edges = st.integers(1, 7).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]), max_size=12),
    )
)


@given(dag_edges)
def test_antichains_match_brute_force(data):
    n, edges = data
    p = closure(edges, n, [1 << (e % 3) for e in range(n)])
    brute = brute_antichains(n, p.leq)
    sizes = Counter(len(a) for a in brute)
    assert antichain_polynomial(p) == QPoly(sizes.get(k, 0) for k in range(n + 1))
    forb = {0}
    sizes = Counter(len(a) for a in brute if not forb & set(a))
    assert antichain_polynomial(p, forb) == QPoly(sizes.get(k, 0) for k in range(n + 1))
    for union in range(8):
        sizes = Counter(len(a) for a in brute if sum(set(p.labels[e] for e in a)) == union)
        assert antichain_polynomial(p, (), union) == QPoly(sizes.get(k, 0) for k in range(n + 1))


@given(dag_edges)
def test_linear_extension_respects_order(data):
    n, edges = data
    p = closure(edges, n)
    pos = {e: k for k, e in enumerate(p.linear_extension())}
    assert all(pos[a] < pos[b] for a, b in edges)


def _ideal_lattice(p):
    """Lattice of order ideals of p under inclusion, by brute force."""
    ideals = []
    for mask in range(1 << p.n):
        if all(not mask >> b & 1 or all(mask >> a & 1 for a in range(p.n) if p.leq(a, b)) for b in range(p.n)):
            ideals.append(mask)
    idx = {m: k for k, m in enumerate(ideals)}
    covers = [
        (idx[a], idx[b]) for a in ideals for b in ideals if a != b and a & b == a and bin(b ^ a).count("1") == 1
    ]
    return closure(covers, len(ideals))


@given(dag_edges)
def test_ideal_lattices_are_distributive(data):
    n, edges = data
    p = closure(edges, n)
    L = _ideal_lattice(p)
    assert is_distributive(L)
    assert count_order_ideals(p) == L.n
    # Birkhoff: the join-irreducibles of J(P) form a copy of P
    ji = join_irreducible_subposet(L)
    assert ji.n == n


def test_nondistributive_lattices():
    n5 = closure([(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)], 5)
    m3 = closure([(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)], 5)
    assert not is_distributive(n5)
    assert not is_distributive(m3)
    assert is_distributive(closure([(0, 1), (1, 2)], 3))
    bowtie = closure([(0, 2), (0, 3), (1, 2), (1, 3)], 4)
    with pytest.raises(NotALattice):
        meet_join_tables(bowtie)
    assert not is_distributive(bowtie)


def test_parse_poset_text():
    n, covers, d = parse_poset_text("# demo\n3\nsimples: 0 1\n0 2\n1 2\n")
    assert n == 3 and covers == [(0, 2), (1, 2)] and d == {"simples": [0, 1]}
    with pytest.raises(ParseError):
        parse_poset_text("3\n0 x\n")
    with pytest.raises(ParseError):
        parse_poset_text("")
