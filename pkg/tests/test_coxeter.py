import itertools
import random
from collections import deque

import numpy as np
import pytest

from bicat.coxeter import (
    GroupElement,
    absolute_interval_count,
    build_group,
    canonical_joinands,
    cover_reflections,
    descents,
    element_from_permutation,
    join,
    meet,
    parabolic_projection,
    permutation_of,
    reduced_word,
    support,
    support_mask,
    weak_order_lattice,
)
from bicat.errors import CapExceeded, UnsupportedSpec
from bicat.roots import parse_spec


@pytest.fixture(scope="module")
def lattices():
    return {name: weak_order_lattice(build_group(name)) for name in ("A2", "A3", "A4", "B3", "D4", "G2", "I2(7)", "H3", "F4")}


def test_group_shapes():
    g = build_group("A2")
    assert g.n == 2 and g.n_pos == 3
    assert build_group("I2(5)").n_pos == 5
    assert build_group("I2(9)").n_pos == 9
    h3 = build_group("H3")
    assert h3.n == 3 and 2 * h3.n_pos == 30
    with pytest.raises(UnsupportedSpec):
        build_group("I2(7)xA1")


def test_sizes(lattices):
    sizes = {"A2": 6, "A3": 24, "A4": 120, "B3": 48, "D4": 192, "G2": 12, "I2(7)": 14, "H3": 120, "F4": 1152}
    for name, size in sizes.items():
        L = lattices[name]
        assert L.size == size
        assert L.length[L.top] == L.group.n_pos
    assert weak_order_lattice(build_group("H4")).size == 14400


def test_cap():
    with pytest.raises(CapExceeded):
        weak_order_lattice(build_group("A5"), cap=100)


def test_reducible_group():
    L = weak_order_lattice(build_group("A1xA1"))
    assert L.size == 4
    assert join(L, 1, 2) == L.top


def test_generators_are_involutions(lattices):
    for L in lattices.values():
        g = L.group
        for s in range(g.n):
            p = np.array(g.generators[s])
            assert (p[p] == np.arange(len(p))).all()
            assert p[s] == g.neg(s)


def _reachable_up(L, u):
    seen = {u}
    todo = deque([u])
    while todo:
        x = todo.popleft()
        for y in L.upper_covers(x):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


@pytest.mark.parametrize("name", ["A3", "B3", "G2", "I2(7)"])
def test_inversion_order_is_cover_reachability(lattices, name):
    L = lattices[name]
    for u in range(L.size):
        up = _reachable_up(L, u)
        assert up == {v for v in range(L.size) if L.leq(u, v)}


def test_inversion_order_f4_sampled(lattices):
    L = lattices["F4"]
    rng = random.Random(3)
    for u in rng.sample(range(L.size), 20):
        assert _reachable_up(L, u) == {v for v in range(L.size) if L.leq(u, v)}


def _brute_join(L, u, v):
    ubs = [w for w in range(L.size) if L.leq(u, w) and L.leq(v, w)]
    least = [w for w in ubs if all(L.leq(w, x) for x in ubs)]
    assert len(least) == 1
    return least[0]


@pytest.mark.parametrize("name", ["A3", "B3", "G2", "H3"])
def test_join_meet_brute_force(lattices, name):
    L = lattices[name]
    rng = random.Random(name)
    pairs = [(rng.randrange(L.size), rng.randrange(L.size)) for _ in range(150)]
    for u, v in pairs:
        assert join(L, u, v) == _brute_join(L, u, v)
        lbs = [w for w in range(L.size) if L.leq(w, u) and L.leq(w, v)]
        m = meet(L, u, v)
        assert m in lbs and all(L.leq(w, m) for w in lbs)


def test_lattice_axioms_random_triples(lattices):
    L = lattices["D4"]
    rng = random.Random(11)
    for _ in range(200):
        a, b, c = (rng.randrange(L.size) for _ in range(3))
        assert join(L, join(L, a, b), c) == join(L, a, join(L, b, c))
        assert meet(L, meet(L, a, b), c) == meet(L, a, meet(L, b, c))
        assert join(L, a, meet(L, a, b)) == a
        assert meet(L, a, join(L, a, b)) == a
        assert meet(L, a, a) == a


def test_join_examples(lattices):
    L = lattices["I2(7)"]
    s1 = L.index[1 << 0]
    s2 = L.index[1 << 1]
    assert join(L, s1, s2) == L.top
    S5 = weak_order_lattice(build_group("A4"))
    u = element_from_permutation(S5, (4, 5, 3, 1, 2))
    v = element_from_permutation(S5, (5, 3, 1, 4, 2))
    assert permutation_of(S5, meet(S5, u, v)) == (3, 1, 4, 5, 2)


def test_permutation_round_trip(lattices):
    L = lattices["A4"]
    for p in itertools.permutations(range(1, 6)):
        w = element_from_permutation(L, p)
        assert permutation_of(L, w) == p
        inversions = sum(p[i] > p[j] for i in range(5) for j in range(i + 1, 5))
        assert L.length[w] == inversions


def test_descents_and_cover_reflections(lattices):
    L = lattices["A3"]
    assert descents(L, 0) == []
    assert descents(L, L.top) == [0, 1, 2]
    for w in range(L.size):
        assert len(cover_reflections(L, w)) == len(descents(L, w))
        for s, r in zip(descents(L, w), cover_reflections(L, w)):
            # removing the cover reflection's root from inv(w) gives ws
            assert L.inv[L.down[w][s]] == L.inv[w] & ~(1 << r)


def test_reduced_words(lattices):
    L = lattices["B3"]
    for w in range(L.size):
        word = reduced_word(L, w)
        assert len(word) == L.length[w]
        x = 0
        for s in word:
            x = L.up[x][s]
            assert x >= 0
        assert x == w
        assert L.element(w) == GroupElement(L.inv[w], tuple(word))


def _all_reduced_words(L, w):
    if w == 0:
        return [()]
    return [word + (s,) for s in descents(L, w) for word in _all_reduced_words(L, L.down[w][s])]


def test_support_independent_of_reduced_word(lattices):
    L = lattices["A3"]
    assert support(L, 0) == set()
    assert support(L, L.top) == {0, 1, 2}
    for w in range(L.size):
        sets = {frozenset(word) for word in _all_reduced_words(L, w)}
        assert len(sets) == 1
        assert sum(1 << s for s in sets.pop()) == support_mask(L, w)


def test_parabolic_projection(lattices):
    L = lattices["A2"]
    s1s2 = L.up[L.up[0][0]][1]
    assert parabolic_projection(L, s1s2, {0}) == L.up[0][0]
    for name in ("A3", "B3"):
        L = lattices[name]
        for w in range(L.size):
            assert parabolic_projection(L, w, range(L.group.n)) == w
            assert parabolic_projection(L, w, ()) == 0
            for J in ({0}, {0, 2}, {1, 2}):
                x = parabolic_projection(L, w, J)
                assert L.leq(x, w) and support(L, x) <= J
                below = [y for y in range(L.size) if L.leq(y, w) and support(L, y) <= J]
                assert all(L.leq(y, x) for y in below)


def _join_all(L, elems):
    z = 0
    for e in elems:
        z = join(L, z, e)
    return z


@pytest.mark.parametrize("name", ["A3", "B3", "G2"])
def test_canonical_joinands(lattices, name):
    L = lattices[name]
    assert canonical_joinands(L, 0) == []
    for s in range(L.group.n):
        atom = L.up[0][s]
        assert canonical_joinands(L, atom) == [atom]
    for w in range(L.size):
        can = canonical_joinands(L, w, exhaustive=True)
        assert can == canonical_joinands(L, w)
        assert len(can) == len(descents(L, w))
        assert _join_all(L, can) == w
        for k in range(len(can)):
            assert _join_all(L, can[:k] + can[k + 1:]) != w
        assert support(L, w) == set().union(*(support(L, j) for j in can)) if can else support(L, w) == set()


def test_absolute_interval_counts():
    assert absolute_interval_count(build_group("A2"), [0, 1]) == 5
    assert absolute_interval_count(build_group("B2"), [0, 1]) == 6
    assert absolute_interval_count(build_group("A3"), [0, 2, 1]) == 14
    assert absolute_interval_count(build_group("H3"), [0, 1, 2]) == 32


def test_conjugation_fixed_points_form_sublattice():
    for n, size in ((2, 8), (3, 48)):
        L = weak_order_lattice(build_group(f"A{2 * n - 1}"))
        w0 = L.top
        fixed = [w for w in range(L.size) if L.multiply(L.multiply(w0, w), w0) == w]
        assert len(fixed) == size
        fs = set(fixed)
        for u in fixed:
            for v in fixed:
                assert join(L, u, v) in fs and meet(L, u, v) in fs


def test_cache_round_trip(tmp_path):
    g = build_group("B3")
    a = weak_order_lattice(g, cache_dir=tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    b = weak_order_lattice(g, cache_dir=tmp_path)
    assert a.inv == b.inv and a.down == b.down
    files[0].write_bytes(b"garbage")
    c = weak_order_lattice(g, cache_dir=tmp_path)
    assert c.inv == a.inv


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("BICAT_CACHE_DIR", str(tmp_path))
    weak_order_lattice(build_group("A3"))
    assert any(tmp_path.iterdir())
