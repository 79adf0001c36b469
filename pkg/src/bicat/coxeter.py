"""Finite Coxeter groups acting on roots, and their weak order lattices.

Roots are indexed 0..2N-1: positives first (simple roots at 0..n-1), and the
negative of root i is i + N (mod 2N).  A group element is identified with the
bitmask of its inversion set {beta > 0 : w^{-1} beta < 0}.
"""

from __future__ import annotations

import hashlib
import os
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CapExceeded, NonUniqueMinimum, UnsupportedSpec
from .roots import (
    CartanSpec,
    Spec,
    _factors,
    build_root_system,
    coxeter_matrix,
)

__all__ = [
    "Group",
    "GroupElement",
    "WeakOrderLattice",
    "build_group",
    "weak_order_lattice",
    "join",
    "meet",
    "descents",
    "cover_reflections",
    "parabolic_projection",
    "canonical_joinands",
    "support",
    "reduced_word",
    "absolute_interval_count",
    "element_from_permutation",
    "permutation_of",
    "WEAK_ORDER_CAP",
    "CACHE_VERSION",
]

WEAK_ORDER_CAP = 60_000
CACHE_VERSION = 1


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class Group:
    spec: tuple[CartanSpec, ...]
    n: int
    n_pos: int
    generators: tuple[tuple[int, ...], ...]
    coxeter: tuple[tuple[int, ...], ...]
    root_support: tuple[int, ...]
    roots: tuple[tuple, ...] | None = None

    @property
    def name(self) -> str:
        return "x".join(map(str, self.spec)) or "A0"

    def neg(self, r: int) -> int:
        return (r + self.n_pos) % (2 * self.n_pos)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.coxeter[i][j] >= 3]


@dataclass(frozen=True)
class GroupElement:
    inversion_set: int
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return _popcount(self.inversion_set)


def _dihedral_group(s: CartanSpec) -> Group:
    # root k (k = 0..2m-1) points at angle k*pi/m; positives are k < m
    m = s.m
    to_idx = {0: 0, m - 1: 1}
    for k in range(1, m - 1):
        to_idx[k] = k + 1
    for k in range(m):
        to_idx[k + m] = to_idx[k] + m
    gens = []
    for a in (0, m - 1):
        perm = [0] * (2 * m)
        for k in range(2 * m):
            perm[to_idx[k]] = to_idx[(2 * a + m - k) % (2 * m)]
        gens.append(tuple(perm))
    sup = (1, 2) + (3,) * (m - 2)
    cox = ((1, m), (m, 1))
    return Group((s,), 2, m, tuple(gens), cox, sup)


def build_group(spec: Spec) -> Group:
    """Generator actions on the full root set, as permutations of root indices."""
    fs = _factors(spec)
    if len(fs) == 1 and fs[0].family == "I" and fs[0].m not in (3, 4, 5, 6):
        return _dihedral_group(fs[0])
    if any(f.family == "I" and f.m not in (3, 4, 5, 6) for f in fs):
        raise UnsupportedSpec("dihedral factors of order other than 3,4,5,6 only as a single factor")
    if not fs:
        return Group((), 0, 0, (), (), ())
    rs = build_root_system(fs)
    pos = list(rs.positive_roots)
    allr = pos + [tuple(-x for x in v) for v in pos]
    idx = {v: k for k, v in enumerate(allr)}
    gens = tuple(tuple(idx[rs.reflect(i, v)] for v in allr) for i in range(rs.n))
    sup = tuple(rs.support(v) for v in pos)
    cox = tuple(map(tuple, coxeter_matrix(fs)))
    return Group(fs, rs.n, len(pos), gens, cox, sup, tuple(allr))


# ---------------------------------------------------------------- weak order


@dataclass
class WeakOrderLattice:
    group: Group
    perms: np.ndarray  # perms[w, r] = w(root r)
    inv: list[int]
    length: list[int]
    des: list[int]  # descent bitmask over generators
    down: list[tuple[int, ...]]  # down[w][s] = ws if s is a descent else -1
    up: list[tuple[int, ...]]
    index: dict[int, int]
    inverse: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.inv)

    @property
    def top(self) -> int:
        return self.size - 1

    def leq(self, u: int, v: int) -> bool:
        return self.inv[u] & ~self.inv[v] == 0

    def lower_covers(self, w: int) -> list[int]:
        return [x for x in self.down[w] if x >= 0]

    def upper_covers(self, w: int) -> list[int]:
        return [x for x in self.up[w] if x >= 0]

    def element(self, w: int) -> GroupElement:
        return GroupElement(self.inv[w], tuple(reduced_word(self, w)))

    def index_of_perm(self, p: Sequence[int]) -> int:
        N = self.group.n_pos
        mask = 0
        for r in p[N:]:
            if r < N:
                mask |= 1 << int(r)
        return self.index[mask]

    def multiply(self, u: int, v: int) -> int:
        return self.index_of_perm(self.perms[u][self.perms[v]])


def _masks_from_bool(b: np.ndarray) -> list[int]:
    if b.shape[1] == 0:
        return [0] * b.shape[0]
    packed = np.packbits(b, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _finish(group: Group, perms: np.ndarray) -> WeakOrderLattice:
    N, n = group.n_pos, group.n
    W = perms.shape[0]
    # inv(w) = positive images of negative roots
    neg_images = perms[:, N:]
    b = np.zeros((W, N), dtype=bool)
    rows, cols = np.nonzero(neg_images < N)
    b[rows, neg_images[rows, cols]] = True
    inv = _masks_from_bool(b)
    index = {m: k for k, m in enumerate(inv)}
    if len(index) != W:
        raise ValueError("duplicate inversion sets")
    length = [_popcount(m) for m in inv]
    simple_images = perms[:, :n].tolist()
    down, up, des = [], [], []
    for w in range(W):
        m = inv[w]
        d, u, dm = [-1] * n, [-1] * n, 0
        for s, r in enumerate(simple_images[w]):
            if r < N:
                u[s] = index[m | (1 << r)]
            else:
                d[s] = index[m ^ (1 << (r - N))]
                dm |= 1 << s
        down.append(tuple(d))
        up.append(tuple(u))
        des.append(dm)
    # inv(w^{-1}) = positive roots sent negative by w
    inv_of_inverse = _masks_from_bool(perms[:, :N] >= N)
    inverse = [index[m] for m in inv_of_inverse]
    return WeakOrderLattice(group, perms, inv, length, des, down, up, index, inverse)


def _bfs(group: Group, cap: int) -> np.ndarray:
    N, n = group.n_pos, group.n
    dtype = np.int16 if 2 * N < 32000 else np.int32
    gens = [np.array(g, dtype=np.intp) for g in group.generators]
    level = np.arange(2 * N, dtype=dtype)[None, :]
    masks = [0]
    chunks = [level]
    total = 1
    while level.shape[0]:
        nxt: dict[int, tuple[int, int]] = {}
        simple_images = level[:, :n]
        for s in range(n):
            col = simple_images[:, s].tolist()
            for k, r in enumerate(col):
                if r < N:
                    key = masks[k] | (1 << r)
                    if key not in nxt:
                        nxt[key] = (k, s)
        if not nxt:
            break
        keys = list(nxt)
        src = np.array([nxt[k][0] for k in keys], dtype=np.intp)
        gen = [nxt[k][1] for k in keys]
        new = np.empty((len(keys), 2 * N), dtype=dtype)
        for s in range(n):
            sel = np.array([g == s for g in gen])
            if sel.any():
                new[sel] = level[src[sel]][:, gens[s]]
        total += len(keys)
        if total > cap:
            raise CapExceeded(f"weak order of {group.name} exceeds {cap} elements")
        level, masks = new, keys
        chunks.append(level)
    return np.concatenate(chunks, axis=0)


def _cache_path(group: Group, cache_dir) -> Path:
    key = hashlib.sha1(repr((group.name, group.generators)).encode()).hexdigest()[:12]
    return Path(cache_dir) / f"weak_{group.name}_{key}_v{CACHE_VERSION}.npz"


def _load_cached(group: Group, path: Path):
    try:
        with np.load(path, allow_pickle=False) as data:
            if int(data["version"]) != CACHE_VERSION or str(data["name"]) != group.name:
                return None
            perms = data["perms"]
        N = group.n_pos
        if perms.ndim != 2 or perms.shape[1] != 2 * N or perms.shape[0] == 0:
            return None
        if not (np.sort(perms, axis=1) == np.arange(2 * N)).all():
            return None
        if not (perms[0] == np.arange(2 * N)).all():
            return None
        return _finish(group, perms)
    except Exception:
        return None


def weak_order_lattice(group: Group, cap: int = WEAK_ORDER_CAP, cache_dir=None) -> WeakOrderLattice:
    """Enumerate W by breadth-first right multiplication, elements sorted by length.

    ``cache_dir`` (or the BICAT_CACHE_DIR environment variable) stores the root
    permutations; unreadable or inconsistent cache files are rebuilt.
    """
    cache_dir = cache_dir or os.environ.get("BICAT_CACHE_DIR")
    path = None
    if cache_dir:
        path = _cache_path(group, cache_dir)
        if path.exists():
            lat = _load_cached(group, path)
            if lat is not None:
                if lat.size > cap:
                    raise CapExceeded(f"weak order of {group.name} exceeds {cap} elements")
                return lat
    perms = _bfs(group, cap)
    lat = _finish(group, perms)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(tmp, version=CACHE_VERSION, name=group.name, perms=perms)
        os.replace(tmp, path)
    return lat


# ---------------------------------------------------------------- queries


def join(L: WeakOrderLattice, u: int, v: int) -> int:
    """Least upper bound: descend from w0 while inv(u) | inv(v) stays inside."""
    need = L.inv[u] | L.inv[v]
    z = L.top
    moved = True
    while moved:
        moved = False
        for x in L.down[z]:
            if x >= 0 and need & ~L.inv[x] == 0:
                z, moved = x, True
                break
    return z


def meet(L: WeakOrderLattice, u: int, v: int) -> int:
    """Greatest lower bound: ascend from e while staying inside inv(u) & inv(v)."""
    room = L.inv[u] & L.inv[v]
    z = 0
    moved = True
    while moved:
        moved = False
        for x in L.up[z]:
            if x >= 0 and L.inv[x] & ~room == 0:
                z, moved = x, True
                break
    return z


def descents(L: WeakOrderLattice, w: int) -> list[int]:
    return [s for s in range(L.group.n) if L.des[w] >> s & 1]


def cover_reflections(L: WeakOrderLattice, w: int) -> list[int]:
    """Positive root of w s w^{-1} for each descent s."""
    N = L.group.n_pos
    return [int(L.perms[w, s]) - N for s in descents(L, w)]


def reduced_word(L: WeakOrderLattice, w: int) -> list[int]:
    word = []
    while w:
        s = (L.des[w] & -L.des[w]).bit_length() - 1
        word.append(s)
        w = L.down[w][s]
    return word[::-1]


def support(L: WeakOrderLattice, w: int) -> set[int]:
    return set(reduced_word(L, w))


def support_mask(L: WeakOrderLattice, w: int) -> int:
    """Generators in the support, read off the inversion set."""
    out = 0
    for s in range(L.group.n):
        if L.inv[w] & _roots_touching(L.group, s):
            out |= 1 << s
    return out


def _roots_touching(g: Group, s: int) -> int:
    table = getattr(g, "_touch", None)
    if table is None:
        table = [sum(1 << r for r, sup in enumerate(g.root_support) if sup >> t & 1) for t in range(g.n)]
        object.__setattr__(g, "_touch", table)
    return table[s]


def parabolic_mask(g: Group, J) -> int:
    jm = sum(1 << s for s in J)
    return sum(1 << r for r, sup in enumerate(g.root_support) if sup & ~jm == 0)


def parabolic_projection(L: WeakOrderLattice, w: int, J) -> int:
    """Largest element of W_J below w."""
    J = set(J)
    x = L.index[L.inv[w] & parabolic_mask(L.group, J)]
    for s in J:
        y = L.up[x][s]
        assert not (y >= 0 and L.leq(y, w)), "parabolic projection is not maximal"
    return x


def _joinand_greedy(L: WeakOrderLattice, w: int, bit: int) -> int:
    x = w
    moved = True
    while moved:
        moved = False
        for y in L.down[x]:
            if y >= 0 and L.inv[y] & bit:
                x, moved = y, True
                break
    return x


def _joinand_exhaustive(L: WeakOrderLattice, w: int, bit: int) -> int:
    seen = {w}
    queue = deque([w])
    minimal = []
    while queue:
        x = queue.popleft()
        below = [y for y in L.down[x] if y >= 0 and L.inv[y] & bit]
        if not below:
            minimal.append(x)
        for y in below:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    if len(minimal) != 1:
        raise NonUniqueMinimum(f"{len(minimal)} minimal elements carry the inversion")
    return minimal[0]


def canonical_joinands(L: WeakOrderLattice, w: int, exhaustive: bool = False) -> list[int]:
    """For each cover reflection t of w, the smallest element below w having t as an inversion."""
    out = []
    for r in cover_reflections(L, w):
        bit = 1 << r
        j = _joinand_exhaustive(L, w, bit) if exhaustive else _joinand_greedy(L, w, bit)
        if _popcount(L.des[j]) != 1:
            raise NonUniqueMinimum("canonical joinand is not join-irreducible")
        out.append(j)
    if exhaustive:
        for a in out:
            for b in out:
                assert a == b or not L.leq(a, b), "canonical joinands are not an antichain"
    return out


def absolute_interval_count(group: Group, c: Sequence[int], cap: int = 5000) -> int:
    """Size of [1, c] in absolute order, via reflection length."""
    L = weak_order_lattice(group, cap=cap)
    N = group.n_pos
    gens = [np.array(g) for g in group.generators]
    refl = set()
    for w in range(L.size):
        p = L.perms[w]
        pinv = np.argsort(p)
        for s in range(group.n):
            refl.add(L.index_of_perm(p[gens[s][pinv]]))
    refl = sorted(refl)
    assert len(refl) == N
    lt = [-1] * L.size
    lt[0] = 0
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for t in refl:
            y = L.multiply(x, t)
            if lt[y] < 0:
                lt[y] = lt[x] + 1
                queue.append(y)
    perm = np.arange(2 * N)
    for s in c:
        perm = perm[gens[s]]
    cidx = L.index_of_perm(perm)
    total = 0
    for w in range(L.size):
        if lt[w] + lt[L.multiply(L.inverse[w], cidx)] == lt[cidx]:
            total += 1
    return total


# ---------------------------------------------------------------- type A one-line notation


def _type_a_rank(L: WeakOrderLattice) -> int:
    spec = L.group.spec
    if len(spec) != 1 or spec[0].family != "A":
        raise UnsupportedSpec("one-line notation needs a type A lattice")
    return spec[0].rank


def element_from_permutation(L: WeakOrderLattice, perm: Sequence[int]) -> int:
    """Index of the permutation (one-line, values 1..n+1); inversions are value pairs out of order."""
    n = _type_a_rank(L)
    g = L.group
    lookup = getattr(g, "_pair_index", None)
    if lookup is None:
        lookup = {}
        for r, v in enumerate(g.roots[: g.n_pos]):
            nz = [k for k, x in enumerate(v) if x]
            lookup[(nz[0] + 1, nz[-1] + 2)] = r
        object.__setattr__(g, "_pair_index", lookup)
    if sorted(perm) != list(range(1, n + 2)):
        raise ValueError(f"not a permutation of 1..{n + 1}")
    pos = {v: k for k, v in enumerate(perm)}
    mask = 0
    for a in range(1, n + 2):
        for b in range(a + 1, n + 2):
            if pos[a] > pos[b]:
                mask |= 1 << lookup[(a, b)]
    return L.index[mask]


def permutation_of(L: WeakOrderLattice, w: int) -> tuple[int, ...]:
    n = _type_a_rank(L)
    line = list(range(1, n + 2))
    for s in reduced_word(L, w):
        line[s], line[s + 1] = line[s + 1], line[s]
    return tuple(line)
