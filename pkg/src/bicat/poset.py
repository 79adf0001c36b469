"""Finite posets stored as cover lists plus upset bitmasks, and integer q-polynomials."""

from __future__ import annotations

import heapq
import sys
from dataclasses import dataclass, field
from itertools import zip_longest
from typing import Iterable, Sequence

from .errors import CycleError, NotALattice, ParseError

__all__ = [
    "QPoly",
    "Poset",
    "closure",
    "antichain_polynomial",
    "dual",
    "is_distributive",
    "join_irreducible_subposet",
    "meet_join_tables",
    "count_order_ideals",
    "parse_poset_text",
]


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True, slots=True)
class QPoly:
    """Polynomial in q with integer coefficients; ``coeffs[k]`` multiplies q^k.

    >>> p = QPoly((1, 1))
    >>> p * p
    QPoly(1 + 2q + q^2)
    >>> (p * p)(1)
    4
    """

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @classmethod
    def const(cls, c: int) -> "QPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "QPoly":
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    @staticmethod
    def _lift(other) -> "QPoly":
        if isinstance(other, QPoly):
            return other
        if isinstance(other, int):
            return QPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return QPoly(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return QPoly(-a for a in self.coeffs)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return QPoly(other * a for a in self.coeffs)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return QPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QPoly":
        out = QPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def at_one(self) -> int:
        return sum(self.coeffs)

    def derivative(self) -> "QPoly":
        return QPoly(k * a for k, a in enumerate(self.coeffs) if k)

    def shift(self, k: int) -> "QPoly":
        """Multiply by q^k."""
        return QPoly((0,) * k + self.coeffs) if self.coeffs else self

    def reversed(self, degree: int | None = None) -> "QPoly":
        """q^d * p(1/q) with d the given degree bound (default: own degree)."""
        d = self.degree if degree is None else degree
        if d < self.degree:
            raise ValueError("degree bound smaller than degree")
        return QPoly(self.coeff(d - k) for k in range(d + 1))

    def compose_shift(self, a: int = 1) -> "QPoly":
        """p(q + a)."""
        out = QPoly()
        base = QPoly((a, 1))
        for c in reversed(self.coeffs):
            out = out * base + c
        return out

    def is_symmetric(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def __bool__(self):
        return bool(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, a in enumerate(self.coeffs):
            if a == 0:
                continue
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            if mono and a == 1:
                s = mono
            elif mono and a == -1:
                s = "-" + mono
            else:
                s = f"{a}{mono}"
            terms.append(s)
        return " + ".join(terms).replace("+ -", "- ")

    def __repr__(self):
        return f"QPoly({self})"


ONE = QPoly((1,))
Q = QPoly((0, 1))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Poset:
    """A finite poset on 0..n-1.

    ``upsets[i]`` is a bitmask of all j with i <= j (i included).
    ``labels`` holds an optional per-element tag; root posets use support bitmasks.
    """

    n: int
    covers: tuple[tuple[int, int], ...]
    upsets: tuple[int, ...]
    labels: tuple | None = None
    _downsets: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if not self._downsets:
            down = [0] * self.n
            for i, up in enumerate(self.upsets):
                for j in _bits(up):
                    down[j] |= 1 << i
            object.__setattr__(self, "_downsets", tuple(down))

    @property
    def downsets(self) -> tuple[int, ...]:
        return self._downsets

    def leq(self, a: int, b: int) -> bool:
        return bool(self.upsets[a] >> b & 1)

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def minimal(self) -> list[int]:
        return [i for i in range(self.n) if self._downsets[i] == 1 << i]

    def maximal(self) -> list[int]:
        return [i for i in range(self.n) if self.upsets[i] == 1 << i]

    def lower_covers(self, i: int) -> list[int]:
        return sorted(a for a, b in self.covers if b == i)

    def upper_covers(self, i: int) -> list[int]:
        return sorted(b for a, b in self.covers if a == i)

    def linear_extension(self) -> list[int]:
        indeg = [0] * self.n
        succ: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.covers:
            indeg[b] += 1
            succ[a].append(b)
        heap = [i for i in range(self.n) if indeg[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, j)
        if len(order) != self.n:
            raise CycleError("cover relation contains a cycle")
        return order

    def induced(self, elements: Sequence[int]) -> "Poset":
        """Induced subposet on ``elements`` (reindexed in the given order)."""
        pos = {e: k for k, e in enumerate(elements)}
        rel = []
        for a in elements:
            for b in elements:
                if a != b and self.leq(a, b):
                    rel.append((pos[a], pos[b]))
        labels = None if self.labels is None else tuple(self.labels[e] for e in elements)
        return closure(_reduce_relation(rel, len(elements)), len(elements), labels)


def _reduce_relation(rel: list[tuple[int, int]], n: int) -> list[tuple[int, int]]:
    """Transitive reduction of a (transitively closed) strict order."""
    above = [set() for _ in range(n)]
    for a, b in rel:
        above[a].add(b)
    out = []
    for a in range(n):
        for b in above[a]:
            if not any(b in above[c] for c in above[a] if c != b):
                out.append((a, b))
    return sorted(out)


def closure(covers: Iterable[tuple[int, int]], n: int, labels: Sequence | None = None) -> Poset:
    """Build a poset from cover pairs (lower, upper).

    >>> closure([(0, 2), (1, 2)], 3).minimal()
    [0, 1]
    """
    covers = tuple(sorted(set((int(a), int(b)) for a, b in covers)))
    for a, b in covers:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"cover ({a},{b}) out of range")
        if a == b:
            raise CycleError(f"self-cover at {a}")
    probe = Poset(n, covers, tuple(1 << i for i in range(n)), None, (0,) * n)
    order = probe.linear_extension()
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b in covers:
        succ[a].append(b)
    up = [0] * n
    for i in reversed(order):
        m = 1 << i
        for j in succ[i]:
            m |= up[j]
        up[i] = m
    # drop pairs implied by longer chains so that covers are genuine covers
    covers = tuple(
        (a, b) for a, b in covers if not any(c != b and up[c] >> b & 1 for c in succ[a])
    )
    return Poset(n, covers, tuple(up), None if labels is None else tuple(labels))


def dual(p: Poset) -> Poset:
    return Poset(p.n, tuple(sorted((b, a) for a, b in p.covers)), p.downsets, p.labels)


def antichain_polynomial(
    p: Poset,
    forbidden: Iterable[int] = (),
    required_label_union: int | None = None,
) -> QPoly:
    """Count antichains by size, skipping ``forbidden`` elements.

    With ``required_label_union`` set, labels must be bitmasks and only antichains
    whose label union equals it exactly are counted.

    >>> antichain_polynomial(closure([(0, 2), (1, 2)], 3))
    QPoly(1 + 3q + q^2)
    """
    order = p.linear_extension()
    pos = {e: k for k, e in enumerate(order)}
    n = p.n
    # incomparable elements later in the extension, in position coordinates
    later = [0] * n
    for e in order:
        k = pos[e]
        rel = p.upsets[e] | p.downsets[e]
        m = 0
        for j in range(k + 1, n):
            if not rel >> order[j] & 1:
                m |= 1 << j
        later[k] = m
    start = (1 << n) - 1
    for e in forbidden:
        start &= ~(1 << pos[e])

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 100))
    try:
        if required_label_union is None:
            return QPoly(_count(start, later, {}))
        labels = [p.labels[e] for e in order]
        table = _count_labelled(start, later, labels, {})
        return QPoly(table.get(required_label_union, ()))
    finally:
        sys.setrecursionlimit(old)


def _add_into(acc: list[int], src: Sequence[int], shift: int) -> None:
    need = len(src) + shift
    if len(acc) < need:
        acc.extend([0] * (need - len(acc)))
    for k, v in enumerate(src):
        acc[k + shift] += v


def _count(avail: int, later: list[int], memo: dict) -> tuple[int, ...]:
    if avail == 0:
        return (1,)
    hit = memo.get(avail)
    if hit is not None:
        return hit
    i = (avail & -avail).bit_length() - 1
    rest = avail & (avail - 1)
    acc = list(_count(rest, later, memo))
    _add_into(acc, _count(rest & later[i], later, memo), 1)
    out = tuple(acc)
    memo[avail] = out
    return out


def _count_labelled(avail: int, later: list[int], labels: list[int], memo: dict) -> dict:
    if avail == 0:
        return {0: (1,)}
    hit = memo.get(avail)
    if hit is not None:
        return hit
    i = (avail & -avail).bit_length() - 1
    rest = avail & (avail - 1)
    out = {u: list(c) for u, c in _count_labelled(rest, later, labels, memo).items()}
    for u, c in _count_labelled(rest & later[i], later, labels, memo).items():
        _add_into(out.setdefault(u | labels[i], []), c, 1)
    frozen = {u: tuple(c) for u, c in out.items()}
    memo[avail] = frozen
    return frozen


def meet_join_tables(p: Poset) -> tuple[list[list[int]], list[list[int]]]:
    """Meet and join tables; raises NotALattice if some pair lacks one."""
    n = p.n
    up, down = p.upsets, p.downsets
    join = [[0] * n for _ in range(n)]
    meet = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(x, n):
            common = up[x] & up[y]
            j = next((z for z in _bits(common) if up[z] & common == common), None)
            common = down[x] & down[y]
            m = next((z for z in _bits(common) if down[z] & common == common), None)
            if j is None or m is None:
                raise NotALattice(f"elements {x},{y} lack a meet or join")
            join[x][y] = join[y][x] = j
            meet[x][y] = meet[y][x] = m
    return meet, join


def is_distributive(p: Poset) -> bool:
    """Brute-force check of x ^ (y v z) = (x ^ y) v (x ^ z) over all triples."""
    import numpy as np

    if p.n == 0:
        return True
    try:
        meet, join = meet_join_tables(p)
    except NotALattice:
        return False
    M = np.array(meet, dtype=np.int16)
    J = np.array(join, dtype=np.int16)
    lhs = M[:, J]  # lhs[x, y, z] = meet(x, join(y, z))
    xy = M[:, :, None]
    xz = M[:, None, :]
    rhs = J[xy, xz]
    return bool((lhs == rhs).all())


def join_irreducible_subposet(p: Poset) -> Poset:
    meet_join_tables(p)
    elements = [i for i in range(p.n) if len(p.lower_covers(i)) == 1]
    return p.induced(elements)


def count_order_ideals(p: Poset) -> int:
    return antichain_polynomial(p).at_one()


def parse_poset_text(text: str) -> tuple[int, list[tuple[int, int]], dict[str, list[int]]]:
    """Parse the text poset format.

    First non-comment line is the element count, then ``a b`` cover pairs.
    Directive lines ``simples: i j k`` declare flagged elements.
    Returns (n, covers, directives).
    """
    n = None
    covers = []
    directives: dict[str, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if ":" in line:
                key, _, rest = line.partition(":")
                directives[key.strip()] = [int(t) for t in rest.split()]
            elif n is None:
                n = int(line)
                if n < 0:
                    raise ValueError
            else:
                a, b = line.split()
                covers.append((int(a), int(b)))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise ParseError("missing element count")
    for a, b in covers:
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"cover ({a},{b}) out of range for {n} elements")
    return n, covers, directives
