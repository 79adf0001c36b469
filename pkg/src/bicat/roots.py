"""Root systems, root posets, doubled root posets and c-compatibility of almost positive roots."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

from .errors import (
    CapExceeded,
    Noncrystallographic,
    NonTermination,
    ParseError,
    ShapeError,
    UnsupportedSpec,
)
from .poset import Poset, _reduce_relation, closure, parse_poset_text

__all__ = [
    "CartanSpec",
    "Golden",
    "RootSystem",
    "RootPoset",
    "DoubledRootPoset",
    "parse_spec",
    "canonical_factors",
    "coxeter_matrix",
    "coxeter_number",
    "build_root_system",
    "root_poset",
    "doubled_root_poset",
    "dihedral_root_poset",
    "load_poset_data",
    "bundled_h3_poset",
    "type_spec",
    "irreducible_root_poset",
    "almost_positive_roots",
    "sigma",
    "compatible",
    "cluster_count",
]

PHI = (1 + 5 ** 0.5) / 2


@dataclass(frozen=True, slots=True, order=True)
class CartanSpec:
    family: str
    rank: int
    m: int | None = None

    def __post_init__(self):
        f, n, m = self.family, self.rank, self.m
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "D": n >= 2,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "G": n == 2,
            "H": n in (3, 4),
            "I": n == 2 and m is not None and m >= 3,
        }.get(f, False)
        if not ok or (f != "I" and m is not None):
            raise UnsupportedSpec(f"illegal type {f}{n}" + (f"({m})" if m else ""))

    def __str__(self):
        return f"I2({self.m})" if self.family == "I" else f"{self.family}{self.rank}"

    @property
    def crystallographic(self) -> bool:
        return self.family in "ABDEFG"


Spec = Union[CartanSpec, Sequence[CartanSpec]]


def parse_spec(text: str) -> tuple[CartanSpec, ...]:
    """Parse ``A3``, ``I2(7)``, ``A1xA1`` (also ``A1*A1``) into a tuple of factors.

    >>> parse_spec("A1xB2")
    (CartanSpec(family='A', rank=1, m=None), CartanSpec(family='B', rank=2, m=None))
    """
    out = []
    for part in re.split(r"[x*×]", text.strip()):
        part = part.strip()
        m = re.fullmatch(r"I2?\((\d+)\)|I(\d+)", part)
        if m:
            out.append(CartanSpec("I", 2, int(m.group(1) or m.group(2))))
            continue
        m = re.fullmatch(r"([A-H])(\d+)", part)
        if not m:
            raise UnsupportedSpec(f"cannot parse type {part!r}")
        fam, n = m.group(1), int(m.group(2))
        if fam == "A" and n == 0:
            continue
        out.append(CartanSpec(fam, n))
    return tuple(out)


def _factors(spec: Spec) -> tuple[CartanSpec, ...]:
    if isinstance(spec, CartanSpec):
        return (spec,)
    if isinstance(spec, str):
        return parse_spec(spec)
    return tuple(spec)


def canonical_factors(spec: Spec) -> tuple[CartanSpec, ...]:
    """Rewrite small coincidences (D2, D3, I2(3), I2(4), I2(6)) and sort the factors."""
    out = []
    for s in _factors(spec):
        if s.family == "D" and s.rank == 2:
            out += [CartanSpec("A", 1), CartanSpec("A", 1)]
        elif s.family == "D" and s.rank == 3:
            out.append(CartanSpec("A", 3))
        elif s.family == "I" and s.m in (3, 4, 6):
            out.append(CartanSpec({3: "A", 4: "B", 6: "G"}[s.m], 2))
        else:
            out.append(s)
    return tuple(sorted(out))


def type_spec(family: str, n: int, m: int | None = None) -> tuple[CartanSpec, ...]:
    """Factors of the (possibly degenerate) type X_n, with A0 = B0 = empty and B1 = A1."""
    if n == 0:
        return ()
    if family == "B" and n == 1:
        return (CartanSpec("A", 1),)
    if family == "I":
        return canonical_factors(CartanSpec("I", 2, m))
    return canonical_factors(CartanSpec(family, n))


# ---------------------------------------------------------------- golden ring


@dataclass(frozen=True, slots=True)
class Golden:
    """a + b*phi with phi^2 = phi + 1."""

    a: int
    b: int = 0

    @staticmethod
    def _lift(x) -> "Golden":
        return x if isinstance(x, Golden) else Golden(int(x), 0)

    def __add__(self, o):
        o = self._lift(o)
        return Golden(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Golden(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Golden(self.a * o.a + self.b * o.b, self.a * o.b + self.b * o.a + self.b * o.b)

    __rmul__ = __mul__

    def __float__(self):
        return self.a + self.b * PHI

    def sign(self) -> int:
        if self.a == 0 and self.b == 0:
            return 0
        v = float(self)
        assert abs(v) > 1e-6, "golden value too close to zero"
        return 1 if v > 0 else -1

    def __bool__(self):
        return bool(self.a or self.b)

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a}{self.b:+d}φ)"


def _sign(x) -> int:
    if isinstance(x, Golden):
        return x.sign()
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------- diagrams


def _irreducible_edges(s: CartanSpec) -> list[tuple[int, int, int]]:
    """Coxeter diagram edges (i, j, m) with m >= 3, 0-indexed."""
    n, f = s.rank, s.family
    path = [(i, i + 1, 3) for i in range(n - 1)]
    if f == "A":
        return path
    if f == "B":
        return path[:-1] + [(n - 2, n - 1, 4)]
    if f == "D":
        if n == 2:
            return []
        if n == 3:
            return [(0, 1, 3), (0, 2, 3)]
        return [(i, i + 1, 3) for i in range(n - 2)] + [(n - 3, n - 1, 3)]
    if f == "E":
        # chain 0-2-3-4-...-(n-1), with 1 attached to 3
        return [(0, 2, 3)] + [(i, i + 1, 3) for i in range(2, n - 1)] + [(1, 3, 3)]
    if f == "F":
        return [(0, 1, 3), (1, 2, 4), (2, 3, 3)]
    if f == "G":
        return [(0, 1, 6)]
    if f == "H":
        return [(0, 1, 5)] + [(i, i + 1, 3) for i in range(1, n - 1)]
    if f == "I":
        return [(0, 1, s.m)]
    raise UnsupportedSpec(str(s))


def coxeter_matrix(spec: Spec) -> list[list[int]]:
    """Coxeter matrix of the product; m=2 for commuting pairs, 1 on the diagonal."""
    fs = _factors(spec)
    n = sum(f.rank for f in fs)
    mat = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    off = 0
    for f in fs:
        for i, j, m in _irreducible_edges(f):
            mat[off + i][off + j] = mat[off + j][off + i] = m
        off += f.rank
    return mat


_COXETER_NUMBER = {"E6": 12, "E7": 18, "E8": 30, "F4": 12, "G2": 6, "H3": 10, "H4": 30}


def coxeter_number(s: CartanSpec) -> int:
    f, n = s.family, s.rank
    if f == "A":
        return n + 1
    if f == "B":
        return 2 * n
    if f == "D":
        return 2 * n - 2
    if f == "I":
        return s.m
    return _COXETER_NUMBER[str(s)]


def _pairing_irreducible(s: CartanSpec):
    """Matrix P with s_i(v) = v - (sum_j P[i][j] v_j) alpha_i."""
    n = s.rank
    P = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    if s.family == "H" or (s.family == "I" and s.m == 5):
        P = [[Golden(x) for x in row] for row in P]
        for i, j, m in _irreducible_edges(s):
            P[i][j] = P[j][i] = Golden(-1) if m == 3 else Golden(0, -1)
        return P
    if s.family == "I" and s.m not in (3, 4, 6):
        raise UnsupportedSpec(f"{s} has no coordinate realization here; use the dihedral model")
    for i, j, m in _irreducible_edges(s):
        P[i][j] = P[j][i] = -1
        if m == 4:
            # j (the later node) is the short root
            P[j][i] = -2
        elif m == 6:
            P[j][i] = -3
    return P


# ---------------------------------------------------------------- root systems


@dataclass(frozen=True)
class RootSystem:
    spec: tuple[CartanSpec, ...]
    n: int
    pairing: tuple[tuple, ...]
    positive_roots: tuple[tuple, ...]
    golden: bool

    def reflect(self, i: int, v: tuple) -> tuple:
        c = sum((self.pairing[i][j] * v[j] for j in range(self.n)), 0 * v[0])
        return tuple(x - c if k == i else x for k, x in enumerate(v))

    def is_positive(self, v: tuple) -> bool:
        signs = {_sign(x) for x in v} - {0}
        assert len(signs) == 1, f"mixed-sign vector {v}"
        return signs == {1}

    def simple(self, i: int) -> tuple:
        zero, one = (Golden(0), Golden(1)) if self.golden else (0, 1)
        return tuple(one if k == i else zero for k in range(self.n))

    @property
    def crystallographic(self) -> bool:
        return all(s.crystallographic for s in self.spec)

    def support(self, v: tuple) -> int:
        return sum(1 << k for k, x in enumerate(v) if x)


def build_root_system(spec: Spec) -> RootSystem:
    """Close the simple roots under simple reflections, keeping positive roots."""
    fs = _factors(spec)
    if not fs:
        raise UnsupportedSpec("empty spec")
    blocks = [_pairing_irreducible(f) for f in fs]
    golden = any(isinstance(b[0][0], Golden) for b in blocks)
    n = sum(f.rank for f in fs)
    zero = Golden(0) if golden else 0
    P = [[zero] * n for _ in range(n)]
    off = 0
    for f, b in zip(fs, blocks):
        for i in range(f.rank):
            for j in range(f.rank):
                P[off + i][off + j] = b[i][j] + zero if golden else b[i][j]
        off += f.rank
    rs = RootSystem(fs, n, tuple(map(tuple, P)), (), golden)
    simples = [rs.simple(i) for i in range(n)]
    seen = set(simples)
    queue = list(simples)
    while queue:
        beta = queue.pop()
        for i in range(n):
            gamma = rs.reflect(i, beta)
            if gamma not in seen and rs.is_positive(gamma):
                seen.add(gamma)
                queue.append(gamma)
    rest = sorted(seen - set(simples), key=lambda v: (sum(float(x) for x in v), [float(x) for x in v]))
    return RootSystem(fs, n, rs.pairing, tuple(simples + rest), golden)


# ---------------------------------------------------------------- root posets


@dataclass(frozen=True)
class RootPoset:
    poset: Poset
    simple_flags: tuple[bool, ...]
    support: tuple[int, ...] | None = None
    roots: tuple[tuple, ...] | None = None
    name: str = ""

    @property
    def n_simple(self) -> int:
        return sum(self.simple_flags)

    @property
    def simples(self) -> list[int]:
        return [i for i, f in enumerate(self.simple_flags) if f]

    @property
    def full_support(self) -> int:
        return (1 << self.n_simple) - 1


@dataclass(frozen=True)
class DoubledRootPoset:
    poset: Poset
    top_map: tuple[int, ...]
    bottom_map: tuple[int, ...]
    root_poset: RootPoset

    def top(self, antichain) -> set[int]:
        inv = {e: r for r, e in enumerate(self.top_map)}
        return {inv[e] for e in antichain if e in inv}

    def bottom(self, antichain) -> set[int]:
        inv = {e: r for r, e in enumerate(self.bottom_map)}
        return {inv[e] for e in antichain if e in inv}


def root_poset(rs: RootSystem) -> RootPoset:
    if not rs.crystallographic:
        raise Noncrystallographic(f"{'x'.join(map(str, rs.spec))} has no coordinate root poset")
    roots = rs.positive_roots
    N = len(roots)
    rel = [
        (a, b)
        for a in range(N)
        for b in range(N)
        if a != b and all(y >= x for x, y in zip(roots[a], roots[b]))
    ]
    sup = tuple(rs.support(r) for r in roots)
    p = closure(_reduce_relation(rel, N), N, sup)
    flags = tuple(i < rs.n for i in range(N))
    return RootPoset(p, flags, sup, roots, "x".join(map(str, rs.spec)))


def dihedral_root_poset(m: int) -> RootPoset:
    """Two incomparable simples under a chain of m-2 further roots."""
    if m < 3:
        raise UnsupportedSpec("dihedral order must be at least 3")
    covers = [(0, 2), (1, 2)] + [(k, k + 1) for k in range(2, m - 1)]
    sup = (1, 2) + (3,) * (m - 2)
    p = closure(covers, m, sup)
    return RootPoset(p, (True, True) + (False,) * (m - 2), sup, None, f"I2({m})")


def load_poset_data(path) -> RootPoset:
    """Read a root poset in the text format; a ``simples:`` line lists simple elements."""
    text = Path(path).read_text() if not hasattr(path, "read_text") else path.read_text()
    n, covers, directives = parse_poset_text(text)
    if "simples" not in directives:
        raise ParseError("missing 'simples:' declaration")
    simples = sorted(directives["simples"])
    if any(not 0 <= s < n for s in simples):
        raise ParseError("simple index out of range")
    p = closure(covers, n)
    if sorted(p.minimal()) != simples:
        raise ShapeError(f"minimal elements {p.minimal()} differ from declared simples {simples}")
    flags = tuple(i in simples for i in range(n))
    return RootPoset(p, flags, None, None, Path(str(path)).stem)


def bundled_h3_poset() -> RootPoset:
    ref = resources.files("bicat") / "data" / "h3_root_poset.txt"
    rp = load_poset_data(ref)
    return RootPoset(rp.poset, rp.simple_flags, None, None, "H3")


@lru_cache(maxsize=None)
def irreducible_root_poset(s: CartanSpec) -> RootPoset:
    """Root poset of an irreducible type from whichever source exists for it."""
    if s.crystallographic:
        return root_poset(build_root_system(s))
    if s.family == "I":
        return dihedral_root_poset(s.m)
    if str(s) == "H3":
        return bundled_h3_poset()
    raise Noncrystallographic(f"no root poset available for {s}")


def doubled_root_poset(rp: RootPoset) -> DoubledRootPoset:
    """Glue the root poset (top) to its dual (bottom) along the simple roots."""
    N = rp.poset.n
    top = tuple(range(N))
    bottom = []
    nxt = N
    for r in range(N):
        if rp.simple_flags[r]:
            bottom.append(r)
        else:
            bottom.append(nxt)
            nxt += 1
    covers = list(rp.poset.covers)
    covers += [(bottom[b], bottom[a]) for a, b in rp.poset.covers]
    labels = None
    if rp.support is not None:
        labels = [0] * nxt
        for r in range(N):
            labels[top[r]] = labels[bottom[r]] = rp.support[r]
    return DoubledRootPoset(closure(covers, nxt, labels), top, tuple(bottom), rp)


# ---------------------------------------------------------------- compatibility


def almost_positive_roots(rs: RootSystem) -> list[tuple]:
    negs = [tuple(-x for x in rs.simple(i)) for i in range(rs.n)]
    return list(rs.positive_roots) + negs


def _negative_simple_index(rs: RootSystem, beta: tuple) -> int | None:
    nz = [k for k, x in enumerate(beta) if x]
    if len(nz) == 1 and _sign(beta[nz[0]]) < 0:
        return nz[0]
    return None


def sigma(rs: RootSystem, i: int, beta: tuple) -> tuple:
    """Involution fixing -alpha_j for j != i and acting as s_i elsewhere."""
    j = _negative_simple_index(rs, beta)
    if j is not None and j != i:
        return beta
    return rs.reflect(i, beta)


def compatible(rs: RootSystem, b1: tuple, b2: tuple, c: Sequence[int]) -> bool:
    """c-compatibility of two almost positive roots; ``c`` is a reduced word of generator indices."""
    word = list(c)
    cap = 2 * len(rs.positive_roots) + 2 * rs.n
    for _ in range(cap + 1):
        for x, y in ((b1, b2), (b2, b1)):
            i = _negative_simple_index(rs, x)
            if i is not None:
                return not y[i]
        s = word[0]
        b1, b2 = sigma(rs, s, b1), sigma(rs, s, b2)
        word = word[1:] + [s]
    raise NonTermination("compatibility rules did not terminate")


def cluster_count(spec: Spec, c: Sequence[int], cap: int = 5) -> int:
    """Number of maximal pairwise c-compatible sets of almost positive roots."""
    import networkx as nx

    rs = build_root_system(spec)
    if rs.n > cap:
        raise CapExceeded(f"rank {rs.n} exceeds cluster cap {cap}")
    roots = almost_positive_roots(rs)
    g = nx.Graph()
    g.add_nodes_from(range(len(roots)))
    for a in range(len(roots)):
        for b in range(a + 1, len(roots)):
            if compatible(rs, roots[a], roots[b], c):
                g.add_edge(a, b)
    cliques = list(nx.find_cliques(g))
    sizes = {len(k) for k in cliques}
    if sizes != {rs.n}:
        raise ShapeError(f"clusters of sizes {sorted(sizes)}, expected all of size {rs.n}")
    return len(cliques)
