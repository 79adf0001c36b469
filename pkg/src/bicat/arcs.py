"""Noncrossing arc diagrams for permutations and signed permutations.

Points are 1..n_points from bottom to top.  An arc records the points strictly
between its endpoints that it passes to the left of; it passes right of the rest.
Type B diagrams live on 2n points, with signed labels -n..-1, 1..n as aliases
for 1..2n; parity words (right-even, left-even) always refer to 1..2n.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import (
    CapExceeded,
    ConsistencyError,
    NoPreimage,
    NotAlternating,
    NotCentrallySymmetric,
    NotSigned,
    ParseError,
    SizeMismatch,
)

__all__ = [
    "Arc",
    "ArcDiagram",
    "delta",
    "delta_inverse",
    "classify_arc",
    "arcs_compatible",
    "is_noncrossing",
    "pi_map",
    "eta",
    "q_set",
    "uncrossed_points",
    "alternating_arcs",
    "alternating_diagrams",
    "enumerate_alternating",
    "central_symmetry",
    "pi_b",
    "to_signed",
    "avoids_bivincular",
    "barring",
    "is_sortable_by_moves",
    "signed_embed",
    "signed_predecessor_mirror",
    "signed_from_word",
    "serialize",
    "parse_diagram",
    "ARC_CAP",
]

ARC_CAP = 9


@dataclass(frozen=True, order=True)
class Arc:
    bottom: int
    top: int
    left: frozenset = frozenset()

    def __post_init__(self):
        if not self.bottom < self.top:
            raise ValueError("arc needs bottom < top")
        if any(not self.bottom < p < self.top for p in self.left):
            raise ValueError("left set must lie strictly between the endpoints")
        object.__setattr__(self, "left", frozenset(self.left))

    def interior(self) -> range:
        return range(self.bottom + 1, self.top)

    def passes_left_of(self, p: int) -> bool:
        return p in self.left


@dataclass(frozen=True)
class ArcDiagram:
    n_points: int
    arcs: tuple[Arc, ...]

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(sorted(self.arcs)))

    def __len__(self):
        return len(self.arcs)


def delta(p: Sequence[int]) -> ArcDiagram:
    """Arc diagram of a permutation: one arc per descent.

    >>> delta((2, 1)).arcs
    (Arc(bottom=1, top=2, left=frozenset()),)
    """
    n = len(p)
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError("not a permutation")
    pos = {v: k for k, v in enumerate(p)}
    arcs = []
    for i in range(n - 1):
        hi, lo = p[i], p[i + 1]
        if hi > lo:
            arcs.append(Arc(lo, hi, frozenset(j for j in range(lo + 1, hi) if pos[j] < i)))
    return ArcDiagram(n, tuple(arcs))


def delta_inverse(d: ArcDiagram) -> tuple[int, ...]:
    """The permutation whose arc diagram is d, rebuilt from its descending runs."""
    N = d.n_points
    tops = [a.top for a in d.arcs]
    bottoms = [a.bottom for a in d.arcs]
    if len(set(tops)) < len(tops) or len(set(bottoms)) < len(bottoms):
        raise NoPreimage("two arcs share an endpoint of the same kind")
    down = {a.top: a.bottom for a in d.arcs}
    bottom_set = set(bottoms)
    runs = []
    run_of = {}
    for v in range(N, 0, -1):
        if v in bottom_set:
            continue
        run = [v]
        while run[-1] in down:
            run.append(down[run[-1]])
        for x in run:
            run_of[x] = len(runs)
        runs.append(run)
    R = len(runs)
    before = [set() for _ in range(R)]  # before[r] = runs that must precede r
    for a in d.arcs:
        r = run_of[a.top]
        for j in a.interior():
            rj = run_of[j]
            if j in a.left:
                before[r].add(rj)
            else:
                before[rj].add(r)
    for r in range(R):
        if r in before[r]:
            raise NoPreimage("inconsistent side data")

    placed: list[int] = []
    used = [False] * R

    def extend() -> tuple[int, ...] | None:
        if len(placed) == R:
            line = tuple(v for r in placed for v in runs[r])
            return line if delta(line) == d else None
        for r in range(R):
            if used[r] or any(not used[b] for b in before[r]):
                continue
            if placed and runs[placed[-1]][-1] > runs[r][0]:
                continue
            used[r] = True
            placed.append(r)
            got = extend()
            if got is not None:
                return got
            placed.pop()
            used[r] = False
        return None

    out = extend()
    if out is None:
        raise NoPreimage("diagram is not the image of a permutation")
    return out


def classify_arc(a: Arc) -> str:
    """One of 'both', 'rightEven', 'leftEven', 'neither'."""
    if a.top == a.bottom + 1:
        return "both"
    right_even = all((p in a.left) == (p % 2 == 1) for p in a.interior())
    left_even = all((p in a.left) == (p % 2 == 0) for p in a.interior())
    if right_even:
        return "rightEven"
    if left_even:
        return "leftEven"
    return "neither"


def arcs_compatible(a: Arc, b: Arc) -> bool:
    """Whether two arcs can appear together in a noncrossing diagram."""
    if a.bottom == b.bottom or a.top == b.top:
        return False
    seen = set()
    for p in range(max(a.bottom, b.bottom), min(a.top, b.top) + 1):
        a_in = a.bottom < p < a.top
        b_in = b.bottom < p < b.top
        if a_in and b_in:
            la, lb = p in a.left, p in b.left
            if la == lb:
                continue
            seen.add(-1 if la else 1)  # -1: a runs left of b
        elif a_in:
            seen.add(-1 if p in a.left else 1)
        elif b_in:
            seen.add(1 if p in b.left else -1)
        if len(seen) == 2:
            return False
    return True


def is_noncrossing(d: ArcDiagram) -> bool:
    return all(arcs_compatible(a, b) for a, b in combinations(d.arcs, 2))


# ---------------------------------------------------------------- alternating arcs and subsets


def pi_map(d: ArcDiagram) -> tuple[frozenset, frozenset]:
    S, T = [], []
    for a in d.arcs:
        kind = classify_arc(a)
        if kind == "neither":
            raise NotAlternating(f"arc {a} is not alternating")
        if kind in ("both", "rightEven"):
            S.append(a.bottom)
            T.append(a.top - 1)
        else:
            S.append(a.top - 1)
            T.append(a.bottom)
    return frozenset(S), frozenset(T)


def q_set(S: Iterable[int], T: Iterable[int], n: int) -> list[int]:
    """Points q of [n+1] with no j such that s_j < q <= t_j or t_j < q <= s_j."""
    s, t = sorted(S), sorted(T)
    return [
        q
        for q in range(1, n + 2)
        if not any(a < q <= b or b < q <= a for a, b in zip(s, t))
    ]


def uncrossed_points(d: ArcDiagram) -> list[int]:
    """Points that no arc passes on either side (endpoints allowed)."""
    return [q for q in range(1, d.n_points + 1) if not any(a.bottom < q < a.top for a in d.arcs)]


def _alternating_arc(bottom: int, top: int, right_even: bool) -> Arc:
    odd_left = right_even
    return Arc(bottom, top, frozenset(p for p in range(bottom + 1, top) if (p % 2 == 1) == odd_left))


def _pair_block(bottoms: list[int], tops_minus_one: list[int]) -> list[tuple[int, int]]:
    bottoms = sorted(bottoms)
    rest = sorted(tops_minus_one)
    pairs = []
    for s in reversed(bottoms):
        cands = [t for t in rest if t >= s and (t - s) % 2 == 1]
        t = min(cands) if cands else rest[-1]
        rest.remove(t)
        pairs.append((s, t + 1))
    return pairs


def eta(S: Iterable[int], T: Iterable[int], n: int) -> ArcDiagram:
    """Inverse of pi_map on pairs of equal-size subsets of [n]."""
    S, T = frozenset(S), frozenset(T)
    if len(S) != len(T):
        raise SizeMismatch(f"|S|={len(S)} but |T|={len(T)}")
    if any(not 1 <= x <= n for x in S | T):
        raise ValueError("subsets must lie in [n]")
    Q = q_set(S, T, n)
    assert Q[0] == 1 and Q[-1] == n + 1
    arcs = []
    for lo, hi in zip(Q, Q[1:]):
        Si = [s for s in S if lo <= s < hi]
        Ti = [t for t in T if lo <= t < hi]
        if not Si and not Ti:
            continue
        if len(Si) != len(Ti):
            raise ConsistencyError(f"unbalanced block [{lo},{hi})")
        first = min(Si + Ti)
        if first in Si and first in Ti:
            assert hi == lo + 1
            arcs.append(Arc(lo, lo + 1))
        elif first in Si:
            arcs += [_alternating_arc(b, t, True) for b, t in _pair_block(Si, Ti)]
        else:
            arcs += [_alternating_arc(b, t, False) for b, t in _pair_block(Ti, Si)]
    d = ArcDiagram(n + 1, tuple(arcs))
    if pi_map(d) != (S, T):
        raise ConsistencyError("eta does not invert pi")
    return d


def alternating_arcs(n_points: int) -> list[Arc]:
    out = []
    for b in range(1, n_points):
        out.append(Arc(b, b + 1))
        for t in range(b + 2, n_points + 1):
            out.append(_alternating_arc(b, t, True))
            out.append(_alternating_arc(b, t, False))
    return out


def _compat_masks(arcs: list[Arc]) -> list[int]:
    masks = []
    for i, a in enumerate(arcs):
        m = 0
        for j, b in enumerate(arcs):
            if j > i and arcs_compatible(a, b):
                m |= 1 << j
        masks.append(m)
    return masks


def alternating_diagrams(n: int) -> Iterator[ArcDiagram]:
    """All noncrossing diagrams of alternating arcs on n+1 points."""
    arcs = alternating_arcs(n + 1)
    masks = _compat_masks(arcs)

    def rec(avail: int, chosen: list[int]):
        yield ArcDiagram(n + 1, tuple(arcs[i] for i in chosen))
        while avail:
            i = (avail & -avail).bit_length() - 1
            avail &= avail - 1
            chosen.append(i)
            yield from rec(avail & masks[i], chosen)
            chosen.pop()

    yield from rec((1 << len(arcs)) - 1, [])


def enumerate_alternating(n: int, cap: int = ARC_CAP) -> tuple[int, ...]:
    """Counts of alternating noncrossing diagrams on n+1 points by number of arcs."""
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the arc cap {cap}")
    arcs = alternating_arcs(n + 1)
    masks = _compat_masks(arcs)
    memo: dict[int, tuple[int, ...]] = {}

    def count(avail: int) -> tuple[int, ...]:
        if not avail:
            return (1,)
        if avail in memo:
            return memo[avail]
        i = (avail & -avail).bit_length() - 1
        rest = avail & (avail - 1)
        a, b = count(rest), count(rest & masks[i])
        out = [0] * max(len(a), len(b) + 1)
        for k, v in enumerate(a):
            out[k] += v
        for k, v in enumerate(b):
            out[k + 1] += v
        memo[avail] = tuple(out)
        return memo[avail]

    return count((1 << len(arcs)) - 1)


# ---------------------------------------------------------------- type B


def central_symmetry(d: ArcDiagram) -> ArcDiagram:
    """Half-turn of the picture: point p goes to N+1-p and left becomes right."""
    N = d.n_points
    out = []
    for a in d.arcs:
        left = frozenset(N + 1 - p for p in a.interior() if p not in a.left)
        out.append(Arc(N + 1 - a.top, N + 1 - a.bottom, left))
    return ArcDiagram(N, tuple(out))


def to_signed(p: int, n: int) -> int:
    """Internal point 1..2n to its signed label -n..-1, 1..n."""
    return p - n - 1 if p <= n else p - n


def pi_b(d: ArcDiagram) -> frozenset:
    """First component of pi_map in signed labels, for centrally symmetric diagrams."""
    if d.n_points % 2 or central_symmetry(d) != d:
        raise NotCentrallySymmetric("diagram is not centrally symmetric")
    n = d.n_points // 2
    S, _ = pi_map(d)
    return frozenset(to_signed(s, n) for s in S)


def signed_predecessor_mirror(S: Iterable[int], n: int) -> frozenset:
    """The set -S-1 in internal labels, where -1-1 means -1's predecessor, i.e. the label below -1.

    In internal points 1..2n this is the map s -> 2n - s.

    >>> sorted(signed_predecessor_mirror({1, 3}, 2))
    [1, 3]
    """
    return frozenset(2 * n - s for s in S)


def signed_embed(sp: Sequence[int]) -> tuple[int, ...]:
    """Full one-line x_{-n}..x_{-1} x_1..x_n of a signed permutation, on letters 1..2n."""
    n = len(sp)
    if sorted(abs(x) for x in sp) != list(range(1, n + 1)):
        raise NotSigned(f"{tuple(sp)} is not a signed permutation")
    full = [-x for x in reversed(sp)] + list(sp)
    return tuple(v + n + 1 if v < 0 else v + n for v in full)


def signed_from_word(word: Iterable[int], n: int) -> tuple[int, ...]:
    """Apply generators on the right: 0 negates x_1, i >= 1 swaps x_i and x_{i+1}."""
    x = list(range(1, n + 1))
    for s in word:
        if s == 0:
            x[0] = -x[0]
        else:
            x[s - 1], x[s] = x[s], x[s - 1]
    return tuple(x)


# ---------------------------------------------------------------- patterns


def avoids_bivincular(p: Sequence[int]) -> bool:
    """No descent x_i > x_{i+1} has values k, k+1 strictly inside it lying on the same side."""
    pos = {v: k for k, v in enumerate(p)}
    for i in range(len(p) - 1):
        hi, lo = p[i], p[i + 1]
        if hi <= lo:
            continue
        for k in range(lo + 1, hi - 1):
            if (pos[k] < i) == (pos[k + 1] < i):
                return False
    return True


def barring(order: Sequence[int], n: int) -> frozenset:
    """Overbarred values for a Coxeter element of A_n given as an order on generators 0..n-1.

    Value i (2 <= i <= n) is overbarred when s_i comes before s_{i-1}; generator g is s_{g+1}.
    """
    pos = {g: k for k, g in enumerate(order)}
    return frozenset(i for i in range(2, n + 1) if pos[i - 1] < pos[i - 2])


def is_sortable_by_moves(p: Sequence[int], overbarred: frozenset) -> bool:
    """Bottom of its Cambrian class: no lower cover differs by a barred 231 or 312 move."""
    n = len(p)
    for i in range(n - 1):
        hi, lo = p[i], p[i + 1]
        if hi <= lo:
            continue
        for j in range(n):
            v = p[j]
            if not lo < v < hi or not 2 <= v <= n - 1:
                continue
            if j < i and v in overbarred:
                return False
            if j > i + 1 and v not in overbarred:
                return False
    return True


# ---------------------------------------------------------------- text form


def serialize(d: ArcDiagram) -> str:
    lines = []
    for a in d.arcs:
        lines.append(f"{a.bottom} {a.top} L:{{{','.join(map(str, sorted(a.left)))}}}")
    return "\n".join(lines)


_LINE = re.compile(r"^\s*(\d+)\s+(\d+)\s+L:\{([\d,\s]*)\}\s*$")


def parse_diagram(text: str, n_points: int) -> ArcDiagram:
    arcs = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        m = _LINE.match(raw)
        if not m:
            raise ParseError(f"cannot parse arc line {raw!r}")
        left = frozenset(int(t) for t in m.group(3).replace(" ", "").split(",") if t)
        try:
            arcs.append(Arc(int(m.group(1)), int(m.group(2)), left))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    if any(a.top > n_points for a in arcs):
        raise ParseError("arc endpoint beyond the point set")
    return ArcDiagram(n_points, tuple(arcs))
