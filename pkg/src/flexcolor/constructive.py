"""Constructive colorers with satisfaction guarantees.

* :func:`multipartite_flex_color` grants at least ``ceil(|D|/k)`` requests on
  K_{n_1..n_k} from lists of size ``n_1 + ... + n_{k-1} + 1``.
* :func:`knn_flex_color` grants at least ``ceil(|D|/2)`` on K_{n,n}, n >= 4,
  from n-lists.
* star, degree-list and precoloring helpers used along the way.

Every outcome is checked before it is returned; a failed check is an
implementation bug and raises :class:`InternalInvariantError` with a dump.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from math import ceil
from typing import Sequence

from .exactsolve import is_colorable
from .graphcore import (
    Coloring,
    InputError,
    ListAssignment,
    MultipartiteGraph,
    Request,
    instance_to_json,
    is_proper,
    respects_lists,
    satisfied_count,
)


class InternalInvariantError(AssertionError):
    """A construction that should always succeed did not."""


def _dump(G, L, r, note: str) -> InternalInvariantError:
    payload = instance_to_json(G, L, r)
    return InternalInvariantError(f"{note}\ninstance: {json.dumps(payload, sort_keys=True)}")


@dataclass(frozen=True)
class FlexColorOutcome:
    coloring: Coloring
    satisfied: int
    guarantee: int
    strategy_used: str

    def to_json(self, L: ListAssignment) -> dict:
        return {
            "coloring": [[L.label(c) for c in part] for part in self.coloring.colors],
            "satisfied": self.satisfied,
            "guarantee": self.guarantee,
            "strategy_used": self.strategy_used,
        }


def _finish(G, L, r, colors, guarantee: int, strategy: str) -> FlexColorOutcome:
    f = Coloring(tuple(tuple(part) for part in colors))
    if not is_proper(G, f) or not respects_lists(L, f):
        raise _dump(G, L, r, f"{strategy}: produced an improper or off-list coloring {f.colors}")
    sat = satisfied_count(r, f)
    if sat < guarantee:
        raise _dump(G, L, r, f"{strategy}: satisfied {sat} < guarantee {guarantee}")
    return FlexColorOutcome(f, sat, guarantee, strategy)


# --- multipartite colorer ------------------------------------------------------------


def _greedy_last(lists, requests, used: set[int]) -> list[int]:
    """Color the last part avoiding ``used``, granting requests when possible."""
    out = []
    for i, lst in enumerate(lists):
        want = requests.get(i)
        if want is not None and want not in used:
            out.append(want)
        else:
            out.append(min(lst - used))
    return out


def multipartite_flex_color(G: MultipartiteGraph, L: ListAssignment, r: Request) -> FlexColorOutcome:
    """Best of the candidates f, g_1, ..., g_{k-1}; grants at least ceil(|D|/k) requests."""
    L.check_graph(G)
    k = G.num_parts
    if k < 2:
        raise InputError("need at least two parts")
    r.validate(L)
    normal, perm = G.normalized()
    sizes = normal.partite_sizes
    s = sum(sizes[:-1])
    if not L.is_k_assignment(s + 1):
        raise InputError(f"every list must have exactly {s + 1} colors on {G}")

    lists = [L.lists[perm[j]] for j in range(k)]
    req = [{i: c for (p, i), c in r.items() if p == perm[j]} for j in range(k)]
    last = k - 1
    pot_front = sorted(set().union(*(lst for j in range(last) for lst in lists[j])))
    count = {z: 0 for z in pot_front}
    for c in req[last].values():
        if c in count:
            count[c] += 1
    ordered = sorted(pot_front, key=lambda z: (-count[z], z))
    rank = {z: i for i, z in enumerate(ordered)}

    candidates: list[tuple[str, list[list[int]]]] = []

    # candidate f: lowest-demand colors on the first k-1 parts
    colors: list[list[int] | None] = [None] * k
    taken: dict[int, int] = {}  # color -> part using it
    for j in range(last):
        row = []
        for lst in lists[j]:
            free = [z for z in lst if taken.get(z, j) == j]
            z = max(free, key=rank.__getitem__)
            taken[z] = j
            row.append(z)
        colors[j] = row
    colors[last] = _greedy_last(lists[last], req[last], set(taken))
    candidates.append(("f", colors))

    # candidates g_j: honor the requests of part j
    for j in range(last):
        colors = [None] * k
        row = [req[j].get(i, min(lst)) for i, lst in enumerate(lists[j])]
        colors[j] = row
        a_set = set(row)
        nj = sizes[j]
        top = ordered[:nj]
        c_set = set(ordered[nj:s])
        ell = len(a_set & c_set)
        b_set = sorted(z for z in top if z not in a_set)[:ell]
        avoid = a_set | set(b_set) | c_set
        taken = {z: j for z in a_set}
        for m in range(last):
            if m == j:
                continue
            out = []
            for lst in lists[m]:
                free = [z for z in lst if taken.get(z, m) == m]
                preferred = [z for z in free if z not in avoid]
                z = min(preferred) if preferred else max(free, key=rank.__getitem__)
                taken[z] = m
                out.append(z)
            colors[m] = out
        colors[last] = _greedy_last(lists[last], req[last], set(taken))
        candidates.append((f"g{j + 1}", colors))

    best_name, best_colors, best_sat = None, None, -1
    for name, cand in candidates:
        sat = sum(1 for j in range(k) for i, c in req[j].items() if cand[j][i] == c)
        if sat > best_sat:
            best_name, best_colors, best_sat = name, cand, sat
    # map normalized parts back to the caller's order
    back = [None] * k
    for j in range(k):
        back[perm[j]] = best_colors[j]
    return _finish(G, L, r, back, ceil(len(r) / k), best_name)


# --- stars ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StarObstruction:
    leaf_singletons: tuple[int, ...]
    center_equals_union: bool = True


def star_color(center: frozenset[int], leaves: Sequence[frozenset[int]]):
    """Color K_{1,n} from lists, or return the unique obstruction.

    Returns ``(center_color, leaf_colors)`` or a :class:`StarObstruction`.
    """
    n = len(leaves)
    if len(center) < n or any(not lst for lst in leaves):
        raise InputError("star needs |L(center)| >= n and nonempty leaf lists")
    big = next((i for i, lst in enumerate(leaves) if len(lst) > 1), None)
    if big is not None:
        leaf = [min(lst) for lst in leaves]
        others = {leaf[i] for i in range(n) if i != big}
        x = min(center - others)
        leaf[big] = min(leaves[big] - {x})
        return x, leaf
    singles = [next(iter(lst)) for lst in leaves]
    if len(set(singles)) < n or center != set(singles):
        x = min(center - set(singles))
        return x, singles
    return StarObstruction(tuple(singles))


def star_obstruction_check(L: ListAssignment):
    """K_{1,n} with the center as part 0: a :class:`Coloring` or a :class:`StarObstruction`."""
    if len(L.lists) != 2 or len(L.lists[0]) != 1:
        raise InputError("expected a star K_{1,n} with the center as part 0")
    res = star_color(L.lists[0][0], L.lists[1])
    if isinstance(res, StarObstruction):
        return res
    x, leaf = res
    return Coloring(((x,), tuple(leaf)))


# --- degree lists on complete bipartite graphs --------------------------------------------


def degree_color_bipartite(G: MultipartiteGraph, L: ListAssignment) -> Coloring:
    """Proper L-coloring of K_{m,n}, m, n >= 2, from lists at least as long as the degrees."""
    L.check_graph(G)
    if G.num_parts != 2 or min(G.partite_sizes) < 2:
        raise InputError("degree coloring needs K_{m,n} with m, n >= 2")
    for v, lst in L.items():
        if len(lst) < G.degree(v):
            raise InputError(f"list of {v} is shorter than its degree {G.degree(v)}")
    ok, f = is_colorable(G, L)
    if not ok:
        raise _dump(G, L, None, "degree-choosability violated")
    return f


# --- K_{n,n} colorer ---------------------------------------------------------------


class _Frame:
    """Proof-position view of K_{n,n}: part ``sx`` plays X, vertices reordered."""

    def __init__(self, L: ListAssignment, r: Request, sx: int, xorder, yorder):
        self.sx, self.sy = sx, 1 - sx
        self.xorder, self.yorder = list(xorder), list(yorder)
        self.LX = [L.lists[sx][i] for i in self.xorder]
        self.LY = [L.lists[1 - sx][j] for j in self.yorder]
        self.rX = [r.entries.get((sx, i)) for i in self.xorder]
        self.rY = [r.entries.get((1 - sx, j)) for j in self.yorder]

    def colors(self, fx, fy) -> list[list[int]]:
        n = len(fx)
        out = [[None] * n, [None] * n]
        for pos, i in enumerate(self.xorder):
            out[self.sx][i] = fx[pos]
        for pos, j in enumerate(self.yorder):
            out[self.sy][j] = fy[pos]
        return out


def knn_flex_color(G: MultipartiteGraph, L: ListAssignment, r: Request) -> FlexColorOutcome:
    """Grant at least ceil(|D|/2) requests on K_{n,n}, n >= 4, with n-lists."""
    L.check_graph(G)
    if G.num_parts != 2 or G.partite_sizes[0] != G.partite_sizes[1]:
        raise InputError("knn colorer needs K_{n,n}")
    n = G.partite_sizes[0]
    if n < 4:
        raise InputError("knn colorer needs n >= 4 (K_{3,3} is settled by exhaustive search)")
    if not L.is_k_assignment(n):
        raise InputError(f"every list must have exactly {n} colors")
    r.validate(L)
    size = len(r)
    guarantee = ceil(size / 2)
    in_d = [[i for i in range(n) if (p, i) in r] for p in range(2)]
    if size >= 2 * n - 1:
        colors, tag = _knn_large(L, r, n, in_d)
    elif size >= 2 * n - 3:
        colors, tag = _knn_mid(G, L, r, n, in_d)
    else:
        colors, tag = _knn_small(L, r, n, in_d)
    return _finish(G, L, r, colors, guarantee, tag)


def _rest(n, first):
    return [i for i in range(n) if i not in first]


def _knn_large(L, r, n, in_d):
    # X is a side entirely inside D; the single missing vertex, if any, is y_n
    sx = 0 if len(in_d[0]) == n else 1
    sy = 1 - sx
    ys = in_d[sy] + _rest(n, in_d[sy])
    fr = _Frame(L, r, sx, range(n), ys)
    c = fr.rX
    if len(set(c)) < n:
        fy = [min(lst - set(c)) for lst in fr.LY]
        return fr.colors(list(c), fy), "knn:repeated-x-requests"
    ry1 = fr.rY[0]
    if ry1 in c:
        # move the x requesting r(y_1) into position n
        q = c.index(ry1)
        xs = [i for i in range(n) if i != q] + [q]
        fr = _Frame(L, r, sx, xs, ys)
        c = fr.rX
    front = set(c[: n - 1])
    star = star_color(fr.LX[n - 1] - {ry1}, [lst - front for lst in fr.LY[1:]])
    if not isinstance(star, StarObstruction):
        x, leaf = star
        return fr.colors(c[: n - 1] + [x], [ry1] + leaf), "knn:large-D-star"
    d = [None] + list(star.leaf_singletons)
    shared = [j for j in range(1, n) if fr.rY[j] is not None and fr.rY[j] in front]
    if shared:
        q = c.index(fr.rY[shared[0]])
        fy = [None] + [c[q]] * (n - 1)
        fy[0] = min(fr.LY[0] - {c[i] for i in range(n) if i != q})
        fx = list(c)
        fx[q] = min(fr.LX[q] - {c[q], fy[0]})
        return fr.colors(fx, fy), "knn:large-D-recolor-shared"
    # every requesting y_j (j >= 2) asks for its private color d_j
    t = next(
        (j for j in range(1, n) if fr.rY[j] is not None and fr.rY[j] == d[j] and d[j] != c[n - 1]),
        None,
    )
    if t is None:
        raise InternalInvariantError("knn: no usable private request on Y after the star obstruction")
    fy = [None] * n
    fy[t] = d[t]
    for j in range(1, n):
        if j != t:
            fy[j] = c[0]
    fy[0] = min(fr.LY[0] - set(c[1:]))
    fx = [None] + list(c[1:])
    fx[0] = min(fr.LX[0] - {fy[0], d[t], c[0]})
    return fr.colors(fx, fy), "knn:large-D-recolor-private"


def _knn_mid(G, L, r, n, in_d):
    sx = 0 if len(in_d[0]) >= n - 1 else 1
    sy = 1 - sx
    xs = in_d[sx] + _rest(n, in_d[sx])
    ys = in_d[sy] + _rest(n, in_d[sy])
    fr = _Frame(L, r, sx, xs, ys)
    c = fr.rX
    front = set(c[: n - 1])
    star = star_color(fr.LX[n - 1], [lst - front for lst in fr.LY])
    if not isinstance(star, StarObstruction):
        x, leaf = star
        return fr.colors(list(c[: n - 1]) + [x], leaf), "knn:mid-D-star"
    ry1 = fr.rY[0]
    granted = [i for i in range(n - 1) if c[i] != ry1][: n - 2]
    if len(granted) != n - 2:
        raise InternalInvariantError("knn: more than one x requests r(y_1)")
    used_x = {c[i] for i in granted}
    left_x = [i for i in range(n) if i not in granted]
    sub = ListAssignment(
        (
            tuple(fr.LX[i] - {ry1} for i in left_x),
            tuple(fr.LY[j] - used_x for j in range(1, n)),
        )
    )
    g = degree_color_bipartite(MultipartiteGraph((2, n - 1)), sub)
    fx = [None] * n
    for i in granted:
        fx[i] = c[i]
    for pos, i in enumerate(left_x):
        fx[i] = g.colors[0][pos]
    fy = [ry1] + list(g.colors[1])
    return fr.colors(fx, fy), "knn:mid-D-degree"


def _knn_small(L, r, n, in_d):
    size = len(in_d[0]) + len(in_d[1])
    sx = 0 if 2 * len(in_d[0]) >= size else 1
    fr = _Frame(L, r, sx, in_d[sx] + _rest(n, in_d[sx]), range(n))
    a = ceil(size / 2)
    granted = {fr.rX[i] for i in range(a)}
    sub = ListAssignment(
        (tuple(fr.LX[i] for i in range(a, n)), tuple(lst - granted for lst in fr.LY))
    )
    g = degree_color_bipartite(MultipartiteGraph((n - a, n)), sub)
    fx = [fr.rX[i] for i in range(a)] + list(g.colors[0])
    return fr.colors(fx, list(g.colors[1])), "knn:small-D-degree"


# --- precoloring ------------------------------------------------------------------


def precolor_choose(G: MultipartiteGraph, L: ListAssignment) -> Coloring:
    """Color K_{n,b} from a (t,n)-assignment with b < t^n."""
    L.check_graph(G)
    if G.num_parts != 2:
        raise InputError("precolor_choose needs K_{n,b}")
    n, b = G.partite_sizes
    t = len(L.lists[0][0])
    if not L.is_ab_assignment(t, n):
        raise InputError(f"expected a ({t},{n})-assignment on {G}")
    if b >= t ** n:
        raise InputError(f"precondition b < t^n fails: {b} >= {t}^{n}")
    X, Y = L.lists
    fx = None
    for i in range(n):
        for j in range(i + 1, n):
            common = X[i] & X[j]
            if common:
                z = min(common)
                fx = [min(lst) for lst in X]
                fx[i] = fx[j] = z
                break
        if fx is not None:
            break
    if fx is None:
        blocked = {frozenset(lst) for lst in Y}
        for combo in product(*(sorted(lst) for lst in X)):
            if frozenset(combo) not in blocked:
                fx = list(combo)
                break
    if fx is None:
        raise _dump(G, L, None, "precolor: every transversal is blocked despite b < t^n")
    used = set(fx)
    fy = [min(lst - used) for lst in Y]
    f = Coloring((tuple(fx), tuple(fy)))
    if not is_proper(G, f) or not respects_lists(L, f):
        raise _dump(G, L, None, "precolor: produced an invalid coloring")
    return f


def precolor_counterexample(t: int, n: int, b: int) -> ListAssignment:
    """A (t,n)-assignment of K_{n,b}, b >= t^n, with no proper coloring."""
    if min(t, n, b) < 1:
        raise InputError("t, n, b must be positive")
    if b < t ** n:
        raise InputError(f"need b >= t^n, got {b} < {t}^{n}")
    X = [frozenset(range(i * t, (i + 1) * t)) for i in range(n)]
    transversals = [frozenset(combo) for combo in product(*(sorted(lst) for lst in X))]
    Y = [transversals[j % len(transversals)] for j in range(b)]
    return ListAssignment((tuple(X), tuple(Y)))
