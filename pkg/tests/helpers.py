"""Brute-force oracles and instance generators shared by the tests.

The oracles deliberately avoid the package's search code: they enumerate
every list-respecting total coloring and check properness edge by edge.
"""

from __future__ import annotations

import random
from itertools import product

from flexcolor.graphcore import ListAssignment, MultipartiteGraph, Request


def edge_proper(sizes, colors) -> bool:
    """Properness by checking every cross-part vertex pair."""
    flat = [(p, c) for p, part in enumerate(colors) for c in part]
    for i, (p, c) in enumerate(flat):
        for q, d in flat[i + 1 :]:
            if p != q and c == d:
                return False
    return True


def all_colorings(L: ListAssignment):
    verts = [v for v, _ in L.items()]
    for choice in product(*(sorted(L[v]) for v in verts)):
        colors = [[None] * len(part) for part in L.lists]
        for (p, i), c in zip(verts, choice):
            colors[p][i] = c
        yield colors


def naive_max_satisfied(L: ListAssignment, r: Request):
    """None if not colorable, else the max number of granted requests."""
    best = None
    for colors in all_colorings(L):
        used = [set(part) for part in colors]
        if any(used[a] & used[b] for a in range(len(used)) for b in range(a + 1, len(used))):
            continue
        sat = sum(1 for (p, i), c in r.items() if colors[p][i] == c)
        if best is None or sat > best:
            best = sat
            if best == len(r):
                break
    return best


def naive_colorable(L: ListAssignment) -> bool:
    return naive_max_satisfied(L, Request({})) is not None


def random_lists(rng: random.Random, sizes, list_size, pot: int) -> ListAssignment:
    """Lists of a fixed size (int) or per-vertex size (callable) drawn from 0..pot-1."""
    parts = []
    for n in sizes:
        part = []
        for _ in range(n):
            k = list_size(rng) if callable(list_size) else list_size
            part.append(frozenset(rng.sample(range(pot), k)))
        parts.append(tuple(part))
    return ListAssignment(tuple(parts))


def random_request(rng: random.Random, L: ListAssignment, size: int | None = None, popular=None) -> Request:
    verts = [v for v, _ in L.items()]
    if size is None:
        size = rng.randint(1, len(verts))
    dom = rng.sample(verts, size)
    req = {}
    for v in dom:
        opts = [c for c in (popular or ()) if c in L[v]]
        req[v] = rng.choice(opts if opts and rng.random() < 0.7 else sorted(L[v]))
    return Request(req)


def shapes(max_parts: int, max_size: int, k_values=None):
    """Sorted partite-size tuples."""
    out = []

    def rec(prefix, k):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        lo = prefix[-1] if prefix else 1
        for n in range(lo, max_size + 1):
            rec(prefix + [n], k)

    for k in k_values or range(2, max_parts + 1):
        rec([], k)
    return out


# --- K_{n,n} instances steered into the star-obstruction branches -----------------------


def _fill(rng, base, n, pot):
    s = set(base)
    while len(s) < n:
        s.add(rng.randrange(pot))
    return frozenset(s)


def _shuffle(rng, X, Y, rX, rY, n, free=True):
    """Hide the designed frame; ``free=False`` keeps x_n, y_1 and the part order."""
    px, py = list(range(n)), list(range(n))
    if free:
        rng.shuffle(px)
        rng.shuffle(py)
    else:
        head, tail = px[: n - 1], py[1:]
        rng.shuffle(head)
        rng.shuffle(tail)
        px, py = head + px[n - 1 :], py[:1] + tail
    xl, yl, req = [None] * n, [None] * n, {}
    for a, i in enumerate(px):
        xl[i] = X[a]
        if rX[a] is not None:
            req[(0, i)] = rX[a]
    for a, j in enumerate(py):
        yl[j] = Y[a]
        if rY[a] is not None:
            req[(1, j)] = rY[a]
    if free and rng.random() < 0.5:
        xl, yl = yl, xl
        req = {(1 - p, i): c for (p, i), c in req.items()}
    return ListAssignment((tuple(xl), tuple(yl))), Request(req)


def knn_obstructed_large(rng: random.Random, n: int, private: bool = False):
    """|D| >= 2n-1 instance whose first star completion is obstructed."""
    pot = 3 * n
    cols = rng.sample(range(pot), 2 * n)
    c, d, extra = cols[: n - 1], cols[n - 1 : 2 * n - 2], cols[2 * n - 2]
    ry1 = rng.choice([extra] + d) if rng.random() < 0.3 else extra
    centre = frozenset(d) | {ry1}
    if len(centre) < n:
        centre = _fill(rng, centre, n, pot)
    X = [_fill(rng, [ci], n, pot) for ci in c] + [centre]
    Y = [_fill(rng, [ry1], n, pot)] + [frozenset(c) | {dj} for dj in d]
    rX = c + [rng.choice(sorted(centre))]
    if private:
        rY = [ry1] + list(d)
    else:
        rY = [ry1] + [rng.choice(sorted(Y[j])) if rng.random() < 0.8 else None for j in range(1, n)]
    return _shuffle(rng, X, Y, rX, rY, n, free=not private)


def knn_obstructed_mid(rng: random.Random, n: int):
    """|D| in {2n-3, 2n-2} instance whose star completion is obstructed."""
    pot = 3 * n
    cols = rng.sample(range(pot), 2 * n - 1)
    c, d = cols[: n - 1], cols[n - 1 :]
    X = [_fill(rng, [ci], n, pot) for ci in c] + [frozenset(d)]
    Y = [frozenset(c) | {dj} for dj in d]
    rY = [rng.choice(sorted(y)) if rng.random() < 0.7 else None for y in Y]
    rY[0] = rng.choice(sorted(Y[0]))
    extra = 2 * n - 2 - (n - 1) - sum(1 for v in rY if v is not None)
    for j in range(n):
        if extra > 0 and rY[j] is None:
            rY[j] = rng.choice(sorted(Y[j]))
            extra -= 1
    return _shuffle(rng, X, Y, c + [None], rY, n)


def knn_instance(rng: random.Random, n: int):
    """Mix of random and branch-steering K_{n,n} instances."""
    roll = rng.random()
    if roll < 0.15:
        return knn_obstructed_large(rng, n, private=rng.random() < 0.3)
    if roll < 0.3:
        return knn_obstructed_mid(rng, n)
    L = random_lists(rng, (n, n), n, rng.randint(n, n + 3))
    size = rng.randint(1, 2 * n)
    pop = rng.sample(range(n + 3), 2)
    return L, random_request(rng, L, size, popular=pop)


def graph_of(L: ListAssignment) -> MultipartiteGraph:
    return MultipartiteGraph(tuple(len(p) for p in L.lists))
