"""q-Catalan polynomials of finite Coxeter groups and the identities relating them.

Everything here is exact integer polynomial arithmetic on :class:`QPoly`.
Irreducible inputs come from antichain counts in root posets; everything else
is assembled through standard parabolic subgroups.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Sequence

from .errors import ConsistencyError, MissingTable, UnknownIdentity, UnrecognizedDiagram
from .poset import ONE, Q, QPoly, _bits, antichain_polynomial
from .roots import (
    CartanSpec,
    Spec,
    _factors,
    canonical_factors,
    coxeter_matrix,
    coxeter_number,
    doubled_root_poset,
    irreducible_root_poset,
    type_spec,
)

__all__ = [
    "Diagram",
    "diagram",
    "decompose_parabolic",
    "cat_q",
    "cat_plus_q",
    "cat_plusplus_q",
    "no_simple_antichain_q",
    "bicat_q",
    "bicat_q_states",
    "bicat_integer",
    "binar_coefficients",
    "doubled_q",
    "cat_gf_dp_check",
    "f_polynomial",
    "IdentityReport",
    "IDENTITIES",
    "verify_identity",
    "TableRecord",
    "table_record",
    "tables_json",
    "tables_markdown",
]

ONE_PLUS_Q = ONE + Q
_lock = threading.RLock()


# ---------------------------------------------------------------- diagrams


@dataclass(frozen=True)
class Diagram:
    """Coxeter diagram as a full Coxeter matrix (entries 2 mean no edge)."""

    matrix: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.matrix)

    def neighbours(self, v: int) -> list[int]:
        return [u for u in range(self.n) if u != v and self.matrix[v][u] >= 3]

    def components(self, J: int) -> list[int]:
        """Connected components of the subdiagram on bitmask J, as bitmasks."""
        out = []
        left = J
        while left:
            start = left & -left
            comp = start
            stack = [start.bit_length() - 1]
            while stack:
                v = stack.pop()
                for u in self.neighbours(v):
                    if J >> u & 1 and not comp >> u & 1:
                        comp |= 1 << u
                        stack.append(u)
            out.append(comp)
            left &= ~comp
        return out


def diagram(spec: Spec) -> Diagram:
    return Diagram(tuple(tuple(r) for r in coxeter_matrix(spec)))


def _classify(d: Diagram, comp: int) -> CartanSpec:
    verts = list(_bits(comp))
    k = len(verts)
    if k == 1:
        return CartanSpec("A", 1)
    adj = {v: [u for u in d.neighbours(v) if comp >> u & 1] for v in verts}
    n_edges = sum(len(a) for a in adj.values()) // 2
    if n_edges != k - 1:
        raise UnrecognizedDiagram(f"component {verts} is not a tree")
    forks = [v for v in verts if len(adj[v]) >= 3]
    if forks:
        if len(forks) > 1 or len(adj[forks[0]]) > 3:
            raise UnrecognizedDiagram(f"component {verts} branches too much")
        f = forks[0]
        arms = []
        for start in adj[f]:
            if d.matrix[f][start] != 3:
                raise UnrecognizedDiagram("labelled edge at a fork")
            length, prev, cur = 1, f, start
            while True:
                nxt = [u for u in adj[cur] if u != prev]
                if not nxt:
                    break
                if d.matrix[cur][nxt[0]] != 3:
                    raise UnrecognizedDiagram("labelled edge on a fork arm")
                prev, cur = cur, nxt[0]
                length += 1
            arms.append(length)
        arms.sort()
        if arms[:2] == [1, 1]:
            return CartanSpec("D", arms[2] + 3)
        exc = {(1, 2, 2): 6, (1, 2, 3): 7, (1, 2, 4): 8}
        if tuple(arms) in exc:
            return CartanSpec("E", exc[tuple(arms)])
        raise UnrecognizedDiagram(f"fork with arms {arms}")
    # a path: walk it from one end
    end = next(v for v in verts if len(adj[v]) == 1)
    order, prev = [end], None
    while len(order) < k:
        cur = order[-1]
        nxt = [u for u in adj[cur] if u != prev][0]
        prev = cur
        order.append(nxt)
    labels = [d.matrix[order[i]][order[i + 1]] for i in range(k - 1)]
    odd = [i for i, m in enumerate(labels) if m != 3]
    if not odd:
        return CartanSpec("A", k)
    if k == 2:
        return canonical_factors(CartanSpec("I", 2, labels[0]))[0]
    if len(odd) == 1:
        i, m = odd[0], labels[odd[0]]
        terminal = i in (0, k - 2)
        if m == 4 and terminal:
            return CartanSpec("B", k)
        if m == 5 and terminal and k in (3, 4):
            return CartanSpec("H", k)
        if m == 4 and k == 4 and i == 1:
            return CartanSpec("F", 4)
    raise UnrecognizedDiagram(f"path with labels {labels}")


@lru_cache(maxsize=None)
def _decompose(d: Diagram, J: int) -> tuple[CartanSpec, ...]:
    return tuple(sorted(_classify(d, comp) for comp in d.components(J)))


def decompose_parabolic(d: Diagram, J: Iterable[int] | int) -> tuple[CartanSpec, ...]:
    """Irreducible factors of the standard parabolic subgroup on J, sorted.

    >>> decompose_parabolic(diagram(CartanSpec("B", 4)), {0, 1, 3})
    (CartanSpec(family='A', rank=1, m=None), CartanSpec(family='A', rank=2, m=None))
    """
    mask = J if isinstance(J, int) else sum(1 << v for v in set(J))
    return _decompose(d, mask)


# ---------------------------------------------------------------- irreducible tables


def _root_poset(s: CartanSpec):
    if str(s) == "H4":
        raise MissingTable("no root poset for H4; use the bisortable pipeline")
    return irreducible_root_poset(s)


def _supports(rp) -> list[int]:
    """Support labels; without explicit labels, a root's support is the set of simples below it."""
    if rp.support is not None:
        return list(rp.support)
    simples = rp.simples
    return [
        sum(1 << k for k, s in enumerate(simples) if rp.poset.leq(s, e)) for e in range(rp.poset.n)
    ]


def _labelled(rp):
    from .poset import Poset

    p = rp.poset
    return Poset(p.n, p.covers, p.upsets, tuple(_supports(rp)))


@lru_cache(maxsize=None)
def _cat_irr(s: CartanSpec) -> QPoly:
    return antichain_polynomial(_root_poset(s).poset)


@lru_cache(maxsize=None)
def _cat_plus_irr(s: CartanSpec) -> QPoly:
    d = diagram(s)
    n = s.rank
    by_ie = QPoly()
    for J in range(1 << n):
        sign = -1 if (n - bin(J).count("1")) % 2 else 1
        by_ie = by_ie + _product(_cat_irr, _decompose(d, J)) * sign
    rp = _root_poset(s)
    by_count = antichain_polynomial(_labelled(rp), (), rp.full_support)
    if by_ie != by_count:
        raise ConsistencyError(f"Cat+({s}): inclusion-exclusion {by_ie} vs counting {by_count}")
    return by_ie


@lru_cache(maxsize=None)
def _cat_plusplus_irr(s: CartanSpec) -> QPoly:
    d = diagram(s)
    n = s.rank
    by_ie = QPoly()
    for J in range(1 << n):
        k = n - bin(J).count("1")
        by_ie = by_ie + _product(_cat_plus_irr, _decompose(d, J)) * QPoly.monomial(k, (-1) ** k)
    rp = _root_poset(s)
    by_count = antichain_polynomial(_labelled(rp), rp.simples, rp.full_support)
    if by_ie != by_count:
        raise ConsistencyError(f"Cat++({s}): inclusion-exclusion {by_ie} vs counting {by_count}")
    return by_ie


def _product(f: Callable[[CartanSpec], QPoly], factors: Sequence[CartanSpec]) -> QPoly:
    out = ONE
    for s in factors:
        out = out * f(s)
    return out


def _norm(spec: Spec) -> tuple[CartanSpec, ...]:
    return canonical_factors(_factors(spec))


def cat_q(spec: Spec) -> QPoly:
    """Antichain polynomial of the root poset; multiplicative over factors.

    >>> cat_q("A2")
    QPoly(1 + 3q + q^2)
    """
    with _lock:
        return _product(_cat_irr, _norm(spec))


def cat_plus_q(spec: Spec) -> QPoly:
    with _lock:
        return _product(_cat_plus_irr, _norm(spec))


def cat_plusplus_q(spec: Spec) -> QPoly:
    """Double-positive Catalan polynomial.

    >>> cat_plusplus_q("A3")
    QPoly(q + q^2)
    >>> cat_plusplus_q(())
    QPoly(1)
    """
    with _lock:
        return _product(_cat_plusplus_irr, _norm(spec))


def no_simple_antichain_q(spec: Spec) -> QPoly:
    """Antichains avoiding the simple roots, counted by size (irreducible factors multiply)."""
    out = ONE
    for s in _norm(spec):
        rp = _root_poset(s)
        out = out * antichain_polynomial(rp.poset, rp.simples)
    return out


def doubled_q(spec: Spec) -> QPoly:
    """Antichain polynomial of the doubled root poset."""
    out = ONE
    for s in _norm(spec):
        out = out * _doubled_irr(s)
    return out


@lru_cache(maxsize=None)
def _doubled_irr(s: CartanSpec) -> QPoly:
    return antichain_polynomial(doubled_root_poset(_root_poset(s)).poset)


# ---------------------------------------------------------------- biCatalan


@lru_cache(maxsize=None)
def _cpp_subset(d: Diagram, J: int) -> QPoly:
    return _product(_cat_plusplus_irr, _decompose(d, J))


def _check_available(spec: Spec) -> tuple[CartanSpec, ...]:
    fs = _norm(spec)
    for s in fs:
        _root_poset(s)
    return fs


def bicat_q(spec: Spec) -> QPoly:
    """biCatalan polynomial from double-positive Catalan polynomials of parabolics.

    The free set M in the triple sum is summed out: each vertex outside I and J
    contributes a factor (1+q).

    >>> bicat_q("A1")
    QPoly(1 + q)
    >>> bicat_q("A2")
    QPoly(1 + 4q + q^2)
    """
    fs = _check_available(spec)
    d = diagram(fs)
    n = d.n
    full = (1 << n) - 1
    out = QPoly()
    with _lock:
        for I in range(1 << n):
            cI = _cpp_subset(d, I)
            if not cI:
                continue
            rest = full & ~I
            J = rest
            while True:
                cJ = _cpp_subset(d, J)
                if cJ:
                    free = n - bin(I).count("1") - bin(J).count("1")
                    out = out + cI * cJ * ONE_PLUS_Q ** free
                if J == 0:
                    break
                J = (J - 1) & rest
    return out


def bicat_q_states(spec: Spec) -> QPoly:
    """Literal sum over all 4^n assignments of each vertex to I, J, M or none."""
    fs = _check_available(spec)
    d = diagram(fs)
    n = d.n
    out = QPoly()

    def rec(v: int, I: int, J: int, m: int):
        nonlocal out
        if v == n:
            out = out + _cpp_subset(d, I) * _cpp_subset(d, J) * QPoly.monomial(m)
            return
        b = 1 << v
        rec(v + 1, I | b, J, m)
        rec(v + 1, I, J | b, m)
        rec(v + 1, I, J, m + 1)
        rec(v + 1, I, J, m)

    with _lock:
        rec(0, 0, 0, 0)
    return out


def bicat_integer(spec: Spec) -> int:
    """Integer biCatalan number as a weighted sum over disjoint pairs (I, J)."""
    fs = _check_available(spec)
    d = diagram(fs)
    n = d.n
    full = (1 << n) - 1
    total = 0
    for I in range(1 << n):
        rest = full & ~I
        J = rest
        while True:
            w = n - bin(I).count("1") - bin(J).count("1")
            total += 2**w * _cpp_subset(d, I).at_one() * _cpp_subset(d, J).at_one()
            if J == 0:
                break
            J = (J - 1) & rest
    return total


def binar_coefficients(spec: Spec) -> list[int]:
    """biNarayana numbers by explicit convolution over (I, J, M) triples."""
    fs = _check_available(spec)
    d = diagram(fs)
    n = d.n
    out = [0] * (n + 1)
    for I in range(1 << n):
        for J in range(1 << n):
            if I & J:
                continue
            rest = ((1 << n) - 1) & ~(I | J)
            a, b = _cpp_subset(d, I), _cpp_subset(d, J)
            for msize in range(bin(rest).count("1") + 1):
                mult = comb(bin(rest).count("1"), msize)
                for k in range(msize, n + 1):
                    s = sum(a.coeff(i) * b.coeff(k - msize - i) for i in range(k - msize + 1))
                    out[k] += mult * s
    return out


def cat_gf_dp_check(spec: Spec) -> bool:
    """Cat(W;q) against the sum over disjoint (I, J) of q^|J| Cat++(W_I;q)."""
    fs = _check_available(spec)
    d = diagram(fs)
    n = d.n
    full = (1 << n) - 1
    rhs = QPoly()
    for I in range(1 << n):
        rest = full & ~I
        J = rest
        while True:
            rhs = rhs + _cpp_subset(d, I) * QPoly.monomial(bin(J).count("1"))
            if J == 0:
                break
            J = (J - 1) & rest
    return rhs == cat_q(fs)


def f_polynomial(spec: Spec) -> QPoly:
    """Coefficient reversal of Cat(W; x+1).

    >>> f_polynomial("A2")
    QPoly(1 + 5q + 5q^2)
    """
    fs = _norm(spec)
    n = sum(s.rank for s in fs)
    return cat_q(fs).compose_shift(1).reversed(n)


# ---------------------------------------------------------------- identity registry


@dataclass
class IdentityReport:
    name: str
    checked: int = 0
    failures: list[tuple[str, QPoly, QPoly]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.failures

    def __str__(self):
        head = f"{self.name}: {self.checked - len(self.failures)}/{self.checked} instances pass"
        lines = [head] + [f"  {lab}: {l} != {r}" for lab, l, r in self.failures]
        return "\n".join(lines)


def C(fam: str, n: int) -> QPoly:
    return cat_q(type_spec(fam, n))


def P(fam: str, n: int) -> QPoly:
    return cat_plusplus_q(type_spec(fam, n))


def BC(fam: str, n: int) -> QPoly:
    return bicat_q(type_spec(fam, n))


def _connected(d: Diagram, J: int) -> bool:
    return len(d.components(J)) == 1


def _attach(d: Diagram, S0: int, comp: int) -> int | None:
    """The unique vertex of comp adjacent to S0 (diagrams are forests).

    None when comp lies in a different irreducible factor than S0.
    """
    touch = [v for v in _bits(comp) if any(S0 >> u & 1 for u in d.neighbours(v))]
    assert len(touch) <= 1
    return touch[0] if touch else None


def _sub(fs, d: Diagram, J: int) -> tuple[CartanSpec, ...]:
    return _decompose(d, J)


def _general_instances(types, fn):
    for t in types:
        fs = _norm(t)
        d = diagram(fs)
        for s in range(d.n):
            lab = f"{'x'.join(map(str, fs))}, s={s}"
            yield (lab,) + fn(fs, d, s)


def _qbicat_general(fs, d, s):
    n = d.n
    full = (1 << n) - 1
    scale = 2**n
    rhs = bicat_q(_sub(fs, d, full & ~(1 << s))) * ONE_PLUS_Q * scale
    for S0 in range(1 << n):
        if not S0 >> s & 1 or not _connected(d, S0):
            continue
        comps = d.components(full & ~S0)
        att = [_attach(d, S0, comp) for comp in comps]
        term = cat_plusplus_q(_sub(fs, d, S0)) * 2 ** (n + 1 - sum(a is not None for a in att))
        for comp, si in zip(comps, att):
            if si is None:
                term = term * bicat_q(_sub(fs, d, comp))
                continue
            term = term * (
                bicat_q(_sub(fs, d, comp)) + ONE_PLUS_Q * bicat_q(_sub(fs, d, comp & ~(1 << si)))
            )
        rhs = rhs + term
    return bicat_q(fs) * scale, rhs


def _qcat_general(fs, d, s):
    n = d.n
    full = (1 << n) - 1
    rhs = cat_q(_sub(fs, d, full & ~(1 << s))) * ONE_PLUS_Q
    for S0 in range(1 << n):
        if not S0 >> s & 1 or not _connected(d, S0):
            continue
        term = cat_plusplus_q(_sub(fs, d, S0))
        for comp in d.components(full & ~S0):
            si = _attach(d, S0, comp)
            if si is None:
                term = term * cat_q(_sub(fs, d, comp))
                continue
            term = term * ONE_PLUS_Q * cat_q(_sub(fs, d, comp & ~(1 << si)))
        rhs = rhs + term
    return cat_q(fs), rhs


def _whole(types, fn):
    for t in types:
        fs = _norm(t)
        yield ("x".join(map(str, fs)),) + fn(fs)


def _qcat_fz(fs):
    (s,) = fs
    h = coxeter_number(s)
    n = s.rank
    d = diagram(fs)
    c = cat_q(fs)
    lhs = (c * n + (ONE - Q) * c.derivative()) * 2
    rhs = QPoly()
    for v in range(n):
        rhs = rhs + cat_q(_sub(fs, d, ((1 << n) - 1) & ~(1 << v)))
    return lhs, rhs * (h + 2)


def _f_ode(fs):
    (s,) = fs
    h = coxeter_number(s)
    n = s.rank
    d = diagram(fs)
    rhs = QPoly()
    for v in range(n):
        rhs = rhs + f_polynomial(_sub(fs, d, ((1 << n) - 1) & ~(1 << v)))
    return f_polynomial(fs).derivative() * 2, rhs * (h + 2)


def _ranged(fam_fn, lo):
    def gen(ranks):
        for n in ranks:
            if n >= lo:
                yield (f"n={n}",) + fam_fn(n)

    return gen


def _sum(terms) -> QPoly:
    out = QPoly()
    for t in terms:
        out = out + t
    return out


def _qbicat_d(n):
    rhs = ONE_PLUS_Q * BC("D", n - 1)
    rhs += _sum(P("A", i) * (BC("D", n - i) + ONE_PLUS_Q * BC("D", n - i - 1)) for i in range(1, n - 2))
    rhs += ONE_PLUS_Q**2 * P("A", n - 2) * 2 + ONE_PLUS_Q * P("A", n - 1) * 4 + P("D", n) * 2
    return BC("D", n), rhs


def _qbicat_b(n):
    rhs = ONE_PLUS_Q * BC("B", n - 1) + P("B", n) * 2 + ONE_PLUS_Q * P("A", n - 1) * 2
    rhs += _sum(P("A", i) * (BC("B", n - i) + ONE_PLUS_Q * BC("B", n - i - 1)) for i in range(1, n - 1))
    return BC("B", n), rhs


def _qbicat_a(n):
    rhs = ONE_PLUS_Q * BC("A", n - 1) + P("A", n) * 2
    rhs += _sum(P("A", i) * (BC("A", n - i) + ONE_PLUS_Q * BC("A", n - i - 1)) for i in range(1, n))
    return BC("A", n), rhs


def _cat_a(n):
    rhs = ONE_PLUS_Q * C("A", n - 1) + Q * _sum(C("A", i - 1) * C("A", n - i - 1) for i in range(1, n))
    return C("A", n), rhs


def _cat_d_from_a(n):
    quad = QPoly((n - 1, 2, n - 1))
    return C("D", n) * 2, ONE_PLUS_Q * C("A", n - 1) * (n + 1) - quad * C("A", n - 2)


def _qcat_a(n):
    return C("A", n), P("A", n) + ONE_PLUS_Q * _sum(P("A", i) * C("A", n - i - 1) for i in range(n))


def _qcat_b2(n):
    return C("B", n), P("B", n) + ONE_PLUS_Q * _sum(P("A", i) * C("B", n - i - 1) for i in range(n))


def _qcat_d(n):
    rhs = ONE_PLUS_Q * C("A", n - 1) + ONE_PLUS_Q * P("A", n - 1) + P("D", n)
    rhs += ONE_PLUS_Q**2 * _sum(P("A", i) * C("A", n - i - 2) for i in range(1, n - 1))
    rhs += ONE_PLUS_Q * _sum(P("D", i) * C("A", n - i - 1) for i in range(3, n))
    return C("D", n), rhs


def _cpp_a(n):
    return ONE_PLUS_Q * P("A", n) + Q * P("A", n - 1), Q * C("A", n - 1)


def _cpp_d(n):
    return P("D", n), Q * C("A", n - 2) * (n - 2)


def _qcat_fz_b(n):
    c = C("B", n)
    lhs = c * n + (ONE - Q) * c.derivative()
    return lhs, _sum(C("A", i - 1) * C("B", n - i) for i in range(1, n + 1)) * (n + 1)


def _mystery(n):
    return _sum(C("A", i - 1) * C("B", n - i) for i in range(1, n + 1)), C("A", n - 1) * n


def _gratuitous(n):
    rhs = ONE_PLUS_Q * C("B", n - 1) - ONE_PLUS_Q * P("A", n - 1) + P("B", n) + ONE_PLUS_Q * P("B", n - 1)
    return C("B", n), rhs


def _cat_b_comb(n):
    lhs = ONE_PLUS_Q * C("B", n)
    rhs = QPoly((1, 1, 1)) * C("B", n - 1) + Q * ONE_PLUS_Q * C("A", n - 2) * (n - 1)
    rhs += Q * P("B", n - 1) + ONE_PLUS_Q * P("B", n)
    return lhs, rhs


def _cpp_b_prev(n):
    lhs = QPoly((1, 1, 1)) * P("B", n - 1)
    rhs = -Q * C("B", n - 1) + Q * ONE_PLUS_Q * C("A", n - 2) * (n - 1) + ONE_PLUS_Q**2 * P("A", n - 1)
    return lhs, rhs


def _bicat_a_is_cat_b(n):
    return BC("A", n), C("B", n)


def _d_bicat(n):
    return QPoly.const(BC("D", n).at_one()), QPoly.const(6 * 4 ** (n - 2) - 2 * comb(2 * n - 4, n - 2))


# (2k)!/2^k * biNar_k(D_n) as polynomials in n, lowest degree first
D_BINAR_POLYS = {
    0: (1,),
    1: (0, -3, 2),
    2: (-24, -7, 35, -20, 4),
    3: (-1080, 1104, 212, -705, 365, -84, 8),
    4: (-60480, 104826, -54133, -8022, 20349, -9576, 2268, -288, 16),
}


def _d_binar(n, kmax=4):
    lhs, rhs = [], []
    bc = BC("D", n)
    for k in range(kmax + 1):
        from math import factorial

        lhs.append(bc.coeff(k) * factorial(2 * k) // 2**k)
        rhs.append(sum(c * n**e for e, c in enumerate(D_BINAR_POLYS[k])))
        assert (bc.coeff(k) * factorial(2 * k)) % 2**k == 0
    return QPoly(lhs), QPoly(rhs)


def _bicat_dp(fs):
    return QPoly.const(bicat_integer(fs)), QPoly.const(doubled_q(fs).at_one())


def _binar_dp(fs):
    return QPoly(binar_coefficients(fs)), doubled_q(fs)


def _cat_gf_dp(fs):
    d = diagram(fs)
    n = d.n
    full = (1 << n) - 1
    rhs = QPoly()
    for I in range(1 << n):
        rest = full & ~I
        J = rest
        while True:
            rhs = rhs + _cpp_subset(d, I) * QPoly.monomial(bin(J).count("1"))
            if J == 0:
                break
            J = (J - 1) & rest
    return cat_q(fs), rhs


def _bicat_gf_dp(fs):
    return bicat_q(fs), doubled_q(fs)


def _binar1(fs):
    (s,) = fs
    return QPoly.const(bicat_q(fs).coeff(1)), QPoly.const(s.rank * (coxeter_number(s) - 1))


def _cat_plus_reversal(fs):
    n = sum(s.rank for s in fs)
    return no_simple_antichain_q(fs), cat_plus_q(fs).reversed(n)


# name -> (kind, generator, smallest valid parameter)
# kind "n": instances indexed by rank; kind "types": by a list of types;
# kind "general": by types and every choice of vertex s.
IDENTITIES: dict[str, tuple[str, Callable, int]] = {
    "qbiCat": ("general", _qbicat_general, 0),
    "qCat": ("general", _qcat_general, 0),
    "qbiCatD": ("n", _qbicat_d, 3),
    "qbiCatB": ("n", _qbicat_b, 2),
    "qbiCatA": ("n", _qbicat_a, 1),
    "CatA": ("n", _cat_a, 1),
    "CatDA": ("n", _cat_d_from_a, 2),
    "qCatA": ("n", _qcat_a, 0),
    "qCatB2": ("n", _qcat_b2, 0),
    "qCatD": ("n", _qcat_d, 3),
    "Cat++A": ("n", _cpp_a, 1),
    "Cat++D": ("n", _cpp_d, 2),
    "qCatFZ": ("types", _qcat_fz, 0),
    "fODE": ("types", _f_ode, 0),
    "qCatFZB": ("n", _qcat_fz_b, 0),
    "mystery": ("n", _mystery, 1),
    "gratuitous": ("n", _gratuitous, 1),
    "CatBcomb": ("n", _cat_b_comb, 2),
    "Cat++Bn-1": ("n", _cpp_b_prev, 2),
    "biCatA=CatB": ("n", _bicat_a_is_cat_b, 0),
    "DbiCat": ("n", _d_bicat, 2),
    "DbiNar": ("n", _d_binar, 2),
    "bicat-dp": ("types", _bicat_dp, 0),
    "binar-dp": ("types", _binar_dp, 0),
    "CatGFdp": ("types", _cat_gf_dp, 0),
    "biCatGFdp": ("types", _bicat_gf_dp, 0),
    "biNar1": ("types", _binar1, 0),
    "Cat+rev": ("types", _cat_plus_reversal, 0),
}


def default_types(max_rank: int = 8) -> list[tuple[CartanSpec, ...]]:
    """Irreducible crystallographic types up to max_rank, plus I2(5) and H3."""
    out = []
    for fam, lo in (("A", 1), ("B", 2), ("D", 4)):
        out += [(CartanSpec(fam, n),) for n in range(lo, max_rank + 1)]
    out += [(CartanSpec("E", n),) for n in (6, 7, 8) if n <= max_rank]
    out += [(CartanSpec("F", 4),), (CartanSpec("G", 2),)]
    out += [(CartanSpec("I", 2, 5),), (CartanSpec("H", 3),)]
    return out


def verify_identity(
    name: str,
    ranks: Iterable[int] | None = None,
    types: Iterable[Spec] | None = None,
    max_rank: int = 10,
) -> IdentityReport:
    """Check one registered identity on every instance in range.

    >>> verify_identity("Cat++A", ranks=range(1, 6)).ok
    True
    """
    if name not in IDENTITIES:
        raise UnknownIdentity(name)
    kind, fn, lo = IDENTITIES[name]
    if kind == "n":
        rs = list(ranks) if ranks is not None else list(range(max_rank + 1))
        inst = _ranged(fn, lo)(rs)
    else:
        ts = [_norm(t) for t in types] if types is not None else default_types(min(max_rank, 8))
        inst = _general_instances(ts, fn) if kind == "general" else _whole(ts, fn)
    rep = IdentityReport(name)
    for lab, lhs, rhs in inst:
        rep.checked += 1
        if lhs != rhs:
            rep.failures.append((lab, lhs, rhs))
    return rep


# ---------------------------------------------------------------- tables


@dataclass
class TableRecord:
    family: str
    rank: int
    m: int | None
    bicat: int
    binar_coeffs: list[int]
    sources: list[str]

    @property
    def name(self) -> str:
        return f"I2({self.m})" if self.family == "I" else f"{self.family}{self.rank}"

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "rank": self.rank,
            "m": self.m,
            "bicat": self.bicat,
            "binar_coeffs": self.binar_coeffs,
            "sources": self.sources,
        }


def table_record(s: CartanSpec, bisortable: Callable[[CartanSpec], QPoly] | None = None) -> TableRecord:
    """biCatalan data for one irreducible type from every pipeline that applies.

    ``bisortable`` supplies the weak-order pipeline (kept out of this module to
    avoid importing the group machinery); it may return None when over cap.
    Raises ConsistencyError if two pipelines disagree.
    """
    results: dict[str, QPoly] = {}
    try:
        results["formula"] = bicat_q(s)
        results["doubled"] = doubled_q(s)
    except MissingTable:
        pass
    if bisortable is not None:
        poly = bisortable(s)
        if poly is not None:
            results["bisortable"] = poly
    if not results:
        raise MissingTable(f"no pipeline can produce {s}")
    vals = list(results.values())
    if any(v != vals[0] for v in vals):
        raise ConsistencyError(f"{s}: " + ", ".join(f"{k}={v}" for k, v in results.items()))
    p = vals[0]
    return TableRecord(s.family, s.rank, s.m, p.at_one(), list(p.coeffs), sorted(results))


def tables_json(records: Sequence[TableRecord]) -> str:
    return json.dumps([r.as_dict() for r in records], indent=2)


def _poly_text(coeffs: Sequence[int]) -> str:
    return str(QPoly(coeffs)).removeprefix("QPoly(").removesuffix(")")


def tables_markdown(records: Sequence[TableRecord]) -> str:
    lines = ["| W | biCat(W) | biNarayana polynomial | sources |", "|---|---|---|---|"]
    for r in records:
        lines.append(f"| {r.name} | {r.bicat} | {_poly_text(r.binar_coeffs)} | {', '.join(r.sources)} |")
    return "\n".join(lines)
