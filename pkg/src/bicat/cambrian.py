"""Coxeter elements, sortable elements, Cambrian projections and bisortable elements."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .coxeter import Group, WeakOrderLattice, _popcount, support_mask
from .errors import NonUniqueMaximum, NotBipartite, UnsupportedSpec
from .poset import QPoly

__all__ = [
    "CoxeterElementSpec",
    "bipartite_coxeter",
    "linear_coxeter",
    "coxeter_from_word",
    "c_sorting_word",
    "is_c_sortable",
    "sortable_flags",
    "CambrianData",
    "compute_cambrian_data",
    "bisortable_descent_polynomial",
    "twin_pair_count",
    "DegreeProfile",
    "quotient_degree_profile",
    "clever_positive_polynomial",
    "is_bipartite_order",
]


@dataclass(frozen=True)
class CoxeterElementSpec:
    order: tuple[int, ...]
    parts: tuple[frozenset[int], frozenset[int]] | None = None  # (S_minus, S_plus)

    def inverse(self) -> "CoxeterElementSpec":
        parts = None if self.parts is None else (self.parts[1], self.parts[0])
        return CoxeterElementSpec(tuple(reversed(self.order)), parts)


def bipartite_coxeter(g: Group) -> CoxeterElementSpec:
    """Two-colour each diagram component; the colour of its lowest generator comes first."""
    colour = {}
    adj = {i: [] for i in range(g.n)}
    for i, j in g.edges():
        adj[i].append(j)
        adj[j].append(i)
    for root in range(g.n):
        if root in colour:
            continue
        colour[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
    minus = frozenset(i for i in range(g.n) if colour[i] == 0)
    plus = frozenset(i for i in range(g.n) if colour[i] == 1)
    return CoxeterElementSpec(tuple(sorted(minus)) + tuple(sorted(plus)), (minus, plus))


def linear_coxeter(g: Group) -> CoxeterElementSpec:
    return CoxeterElementSpec(tuple(range(g.n)))


def coxeter_from_word(g: Group, word: Sequence[int]) -> CoxeterElementSpec:
    if sorted(word) != list(range(g.n)):
        raise UnsupportedSpec(f"{list(word)} is not a permutation of the generators")
    return CoxeterElementSpec(tuple(word))


def is_bipartite_order(g: Group, c: CoxeterElementSpec) -> bool:
    """Every generator is a source or a sink of the orientation defined by c."""
    pos = {s: k for k, s in enumerate(c.order)}
    for s in range(g.n):
        sides = {pos[t] > pos[s] for t in range(g.n) if t != s and g.coxeter[s][t] >= 3}
        if len(sides) > 1:
            return False
    return True


# ---------------------------------------------------------------- sorting


def c_sorting_word(L: WeakOrderLattice, w: int, c: CoxeterElementSpec) -> list[list[int]]:
    """Blocks of the c-sorting word: the leftmost reduced subword of c c c ... for w.

    Left descents of r are right descents of r^{-1}, so the scan walks down
    from w^{-1} in right weak order.
    """
    x = L.inverse[w]
    blocks = []
    while x:
        block = []
        for s in c.order:
            if L.des[x] >> s & 1:
                block.append(s)
                x = L.down[x][s]
        blocks.append(block)
    return blocks


def is_c_sortable(L: WeakOrderLattice, w: int, c: CoxeterElementSpec) -> bool:
    prev = None
    for block in c_sorting_word(L, w, c):
        cur = set(block)
        if prev is not None and not cur <= prev:
            return False
        prev = cur
    return True


def sortable_flags(L: WeakOrderLattice, c: CoxeterElementSpec) -> list[bool]:
    order = c.order
    des, down, inverse = L.des, L.down, L.inverse
    out = []
    for w in range(L.size):
        x = inverse[w]
        allowed = -1
        ok = True
        while x:
            got = 0
            for s in order:
                if des[x] >> s & 1:
                    got |= 1 << s
                    x = down[x][s]
            if got & ~allowed:
                ok = False
                break
            allowed = got
        out.append(ok)
    return out


# ---------------------------------------------------------------- projections


@dataclass
class CambrianData:
    c: CoxeterElementSpec
    sortable_c: list[bool]
    sortable_cinv: list[bool]
    pi_c: list[int]
    pi_cinv: list[int]
    bisortable: list[bool]

    def class_key(self, w: int) -> tuple[int, int]:
        return self.pi_c[w], self.pi_cinv[w]


def _pi_down(L: WeakOrderLattice, sortable: list[bool]) -> list[int]:
    inv = L.inv
    pi = [0] * L.size
    for w in range(L.size):
        if sortable[w]:
            pi[w] = w
            continue
        cands = {pi[x] for x in L.down[w] if x >= 0}
        best = [m for m in cands if all(inv[o] & ~inv[m] == 0 for o in cands)]
        if len(best) != 1:
            raise NonUniqueMaximum(f"no unique maximal projection below element {w}")
        pi[w] = best[0]
    return pi


def compute_cambrian_data(L: WeakOrderLattice, c: CoxeterElementSpec) -> CambrianData:
    sc = sortable_flags(L, c)
    sci = sortable_flags(L, c.inverse())
    pc, pci = _pi_down(L, sc), _pi_down(L, sci)
    inv = L.inv
    bis = []
    for w in range(L.size):
        need = inv[pc[w]] | inv[pci[w]]
        # w is the join iff no lower cover of w still lies above both projections
        bis.append(all(x < 0 or need & ~inv[x] for x in L.down[w]))
    return CambrianData(c, sc, sci, pc, pci, bis)


def bisortable_descent_polynomial(data: CambrianData, L: WeakOrderLattice) -> QPoly:
    counts = Counter(_popcount(L.des[w]) for w in range(L.size) if data.bisortable[w])
    return QPoly(counts.get(k, 0) for k in range(max(counts) + 1))


def twin_pair_count(data: CambrianData, L: WeakOrderLattice) -> int:
    return len({data.class_key(w) for w in range(L.size)})


@dataclass(frozen=True)
class DegreeProfile:
    histogram: dict[tuple[int, int], int]  # (down, up) -> number of classes
    n: int
    down_equals_descents: bool

    @property
    def regular(self) -> bool:
        return all(d + u == self.n for d, u in self.histogram)


def quotient_degree_profile(data: CambrianData, L: WeakOrderLattice) -> DegreeProfile:
    """Degrees in the Hasse diagram of the quotient by (pi_c, pi_cinv)."""
    key = [data.class_key(w) for w in range(L.size)]
    below: dict = {}
    above: dict = {}
    for w in range(L.size):
        kw = key[w]
        below.setdefault(kw, set())
        above.setdefault(kw, set())
        for x in L.down[w]:
            if x >= 0 and key[x] != kw:
                below[kw].add(key[x])
                above.setdefault(key[x], set()).add(kw)
    hist = Counter((len(below[k]), len(above[k])) for k in below)
    down_ok = all(
        len(below[key[w]]) == _popcount(L.des[w]) for w in range(L.size) if data.bisortable[w]
    )
    return DegreeProfile(dict(hist), L.group.n, down_ok)


def clever_positive_polynomial(L: WeakOrderLattice, c: CoxeterElementSpec) -> QPoly:
    """Descent polynomial of c-sortable elements with full support and no simple cover reflection."""
    g = L.group
    if not is_bipartite_order(g, c):
        raise NotBipartite("clever positive counting needs a bipartite Coxeter element")
    full = (1 << g.n) - 1
    N = g.n_pos
    counts = Counter()
    for w, ok in enumerate(sortable_flags(L, c)):
        if not ok or support_mask(L, w) != full:
            continue
        simple_cover = any(
            L.des[w] >> s & 1 and int(L.perms[w, s]) - N < g.n for s in range(g.n)
        )
        if not simple_cover:
            counts[_popcount(L.des[w])] += 1
    if not counts:
        return QPoly()
    return QPoly(counts.get(k, 0) for k in range(max(counts) + 1))
