"""Exact oracles: L-colorability, maximum satisfied requests, and choosability.

Colorability and choosability both go through the transversal reduction: once
the non-covered parts are colored with pairwise disjoint color sets ``U_i``,
a vertex ``y`` of the covered part can be finished iff ``L(y)`` is not inside
their union.  Only inclusion-minimal unions matter.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Mapping, Sequence

from .canonical import (
    canonical_classes,
    columns_to_lists,
    raw_assignments,
)
from .cover import find_cover, hitting_sets, transversal_family
from .graphcore import (
    Coloring,
    InputError,
    ListAssignment,
    MultipartiteGraph,
    Request,
    Vertex,
    bits,
    to_mask,
)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def required_count(epsilon, domain_size: int) -> int:
    """Smallest integer ``s`` with ``s >= epsilon * |D|``, in exact arithmetic."""
    eps = as_fraction(epsilon)
    if not 0 <= eps <= 1:
        raise InputError(f"epsilon must lie in [0, 1], got {eps}")
    return ceil(eps * domain_size)


# --- L-colorability -----------------------------------------------------------


def _covered_part(G: MultipartiteGraph) -> int:
    # the largest part is decided by the subset test; ties go to the last one
    return max(range(G.num_parts), key=lambda p: (G.partite_sizes[p], p))


def is_colorable(G: MultipartiteGraph, L: ListAssignment) -> tuple[bool, Coloring | None]:
    """Decide L-colorability; returns ``(True, witness)`` or ``(False, None)``."""
    L.check_graph(G)
    masks = L.masks()
    if G.num_parts == 1:
        return True, Coloring((tuple(min(lst) for lst in L.lists[0]),))
    last = _covered_part(G)
    others = [p for p in range(G.num_parts) if p != last]
    pot = 0
    for part in masks:
        for m in part:
            pot |= m
    # fail-first: parts with fewer hitting sets first
    others.sort(key=lambda p: (len(hitting_sets(masks[p], pot)), p))
    chosen: dict[int, int] = {}

    def rec(i: int, used: int) -> bool:
        if i == len(others):
            return all(m & ~used for m in masks[last])
        p = others[i]
        for h in hitting_sets(masks[p], pot & ~used):
            chosen[p] = h
            if rec(i + 1, used | h):
                return True
        return False

    if not rec(0, 0):
        return False, None
    used = 0
    for h in chosen.values():
        used |= h
    colors = []
    for p in range(G.num_parts):
        if p == last:
            colors.append(tuple(next(bits(m & ~used)) for m in masks[p]))
        else:
            colors.append(tuple(next(bits(m & chosen[p])) for m in masks[p]))
    return True, Coloring(tuple(colors))


# --- maximum satisfied requests --------------------------------------------------


@dataclass(frozen=True)
class MaxSatResult:
    status: str  # "Solved" or "NotColorable"
    best: int | None = None
    witness: Coloring | None = None
    nodes: int = 0

    @property
    def solved(self) -> bool:
        return self.status == "Solved"


def max_satisfied(G: MultipartiteGraph, L: ListAssignment, r: Request) -> MaxSatResult:
    """Maximum of ``satisfied_count`` over proper L-colorings, by branch-and-bound.

    A proper coloring of a complete multipartite graph is determined up to
    satisfaction by which part owns each color; unowned colors never help, so
    every color is given to exactly one part.  Branching is on colors, heaviest
    request weight first.
    """
    L.check_graph(G)
    r.validate(L, nonempty=False)
    k = G.num_parts
    masks = L.masks()
    part_lists = [sorted(set(part)) for part in masks]
    pot = 0
    for part in masks:
        for m in part:
            pot |= m
    weight: dict[int, list[int]] = {c: [0] * k for c in bits(pot)}
    for (p, _), c in r.items():
        weight[c][p] += 1
    in_part = [0] * k
    for p in range(k):
        for m in part_lists[p]:
            in_part[p] |= m

    own = [0] * k
    undecided = 0
    for c in bits(pot):
        holders = [p for p in range(k) if in_part[p] >> c & 1]
        if len(holders) == 1:
            own[holders[0]] |= 1 << c
        else:
            undecided |= 1 << c
    order = sorted(bits(undecided), key=lambda c: (-max(weight[c]), -sum(weight[c]), c))
    best_val = -1
    best_own: list[int] | None = None
    nodes = 0

    def propagate(own: list[int], und: int):
        """Unit propagation on list feasibility; returns (own, und) or None."""
        own = list(own)
        changed = True
        while changed:
            changed = False
            for p in range(k):
                for m in part_lists[p]:
                    if m & own[p]:
                        continue
                    free = m & und
                    if not free:
                        return None
                    if free & (free - 1) == 0:
                        own[p] |= free
                        und &= ~free
                        changed = True
        return own, und

    def score(own: list[int]) -> int:
        total = 0
        for p in range(k):
            for c in bits(own[p]):
                total += weight[c][p]
        return total

    def rec(own: list[int], und: int):
        nonlocal best_val, best_own, nodes
        nodes += 1
        state = propagate(own, und)
        if state is None:
            return
        own, und = state
        current = score(own)
        bound = current + sum(max(weight[c]) for c in bits(und))
        if bound <= best_val:
            return
        if und == 0:
            best_val, best_own = current, list(own)
            return
        c = next(c for c in order if und >> c & 1)
        rest = und & ~(1 << c)
        for p in sorted(range(k), key=lambda p: (-weight[c][p], p)):
            if not in_part[p] >> c & 1:
                continue
            nxt = list(own)
            nxt[p] |= 1 << c
            rec(nxt, rest)

    rec(own, undecided)
    if best_own is None:
        return MaxSatResult("NotColorable", nodes=nodes)
    colors = []
    for p in range(k):
        row = []
        for i, m in enumerate(masks[p]):
            want = r.entries.get((p, i))
            if want is not None and best_own[p] >> want & 1:
                row.append(want)
            else:
                row.append(next(bits(m & best_own[p])))
        colors.append(tuple(row))
    return MaxSatResult("Solved", best_val, Coloring(tuple(colors)), nodes)


def epsilon_satisfiable(G: MultipartiteGraph, L: ListAssignment, r: Request, epsilon) -> bool:
    eps = as_fraction(epsilon)
    if not 0 <= eps <= 1:
        raise InputError(f"epsilon must lie in [0, 1], got {eps}")
    res = max_satisfied(G, L, r)
    if not res.solved:
        return False
    return res.best >= required_count(eps, len(r))


# --- choosability ------------------------------------------------------------------


@dataclass
class ChoosabilityVerdict:
    choosable: bool | None  # None when the budget ran out
    counterexample: ListAssignment | None = None
    nodes: int = 0
    classes: int = 0
    ms: int = 0
    method: str = "exhaustive"
    pot_bound: int | None = None
    bounded_pot: bool = False

    @property
    def status(self) -> str:
        if self.choosable is None:
            return "timeout"
        return "choosable" if self.choosable else "not_choosable"

    def to_json(self, include_time: bool = True) -> dict:
        out = {
            "choosable": self.choosable,
            "status": self.status,
            "method": self.method,
            "counterexample": None
            if self.counterexample is None
            else {
                "partite_sizes": [len(p) for p in self.counterexample.lists],
                "lists": self.counterexample.labelled_lists(),
            },
            "nodes": self.nodes,
            "classes": self.classes,
        }
        if self.bounded_pot:
            out["bounded_pot"] = self.pot_bound
        if include_time:
            out["ms"] = self.ms
        return out


@dataclass
class _Layout:
    """Row layout of the enumerated side plus the covered part."""

    G: MultipartiteGraph
    covered: int
    enum_parts: list[int]
    rows: list[Vertex] = field(default_factory=list)
    row_sizes: list[int] = field(default_factory=list)
    blocks: list[list[int]] = field(default_factory=list)
    covered_sizes: list[int] = field(default_factory=list)


def _layout(G: MultipartiteGraph, sizes: Mapping[Vertex, int], covered: int | None = None) -> _Layout:
    if covered is None:
        covered = _covered_part(G)
    enum_parts = [p for p in range(G.num_parts) if p != covered]
    lay = _Layout(G, covered, enum_parts)
    for p in enum_parts:
        block = []
        for i in range(G.partite_sizes[p]):
            block.append(len(lay.rows))
            lay.rows.append((p, i))
            lay.row_sizes.append(sizes[(p, i)])
        lay.blocks.append(block)
    lay.covered_sizes = [sizes[(covered, i)] for i in range(G.partite_sizes[covered])]
    return lay


def _assemble(lay: _Layout, columns: Sequence[int], blockers) -> ListAssignment:
    """Counterexample lists from enumerated columns and the blocker assignment."""
    row_lists = columns_to_lists(columns, len(lay.rows))
    n_colors = len(columns)
    lists: dict[Vertex, frozenset[int]] = {v: row_lists[j] for j, v in enumerate(lay.rows)}
    placed = {i: frozenset(bits(block)) for i, block in blockers}
    fresh = n_colors
    for i, b in enumerate(lay.covered_sizes):
        if i in placed:
            lists[(lay.covered, i)] = placed[i]
        elif b <= n_colors:
            lists[(lay.covered, i)] = frozenset(range(b))
        else:
            lists[(lay.covered, i)] = frozenset(range(n_colors)) | frozenset(range(fresh, fresh + b - n_colors))
    G = lay.G
    return ListAssignment(tuple(tuple(lists[(p, i)] for i in range(n)) for p, n in enumerate(G.partite_sizes)))


def _decide_class(lay: _Layout, columns: Sequence[int]):
    """Returns (counterexample or None, nodes) for one enumerated-side class."""
    row_lists = columns_to_lists(columns, len(lay.rows))
    parts = [[to_mask(row_lists[j]) for j in block] for block in lay.blocks]
    family = transversal_family(parts)
    res = find_cover(family, lay.covered_sizes)
    if res.blockers is None:
        return None, res.nodes
    return _assemble(lay, columns, res.blockers), res.nodes


def _worker(args):
    lay, batch, deadline = args
    out = []
    for idx, columns in batch:
        if deadline is not None and time.monotonic() > deadline:
            out.append((idx, 0, "timeout"))
            break
        cex, nodes = _decide_class(lay, columns)
        out.append((idx, nodes, cex))
        if cex is not None:
            break
    return out


def is_f_choosable(
    G: MultipartiteGraph,
    sizes: Mapping[Vertex, int],
    pot_bound: int | None = None,
    *,
    canonical: bool = True,
    budget_seconds: float | None = None,
    workers: int = 1,
    covered: int | None = None,
) -> ChoosabilityVerdict:
    """Exhaustive f-choosability decision over canonical classes.

    The enumerated side's pot is bounded by its total list size, so the search
    is complete without any pot bound.  When every size is below ``|V|`` the
    small-pot bound additionally caps the pot at ``|V| - 1`` colors.  A
    ``pot_bound`` caps it further and marks the verdict as bounded-pot.
    ``canonical=False`` enumerates raw lists over ``pot_bound`` colors instead.
    """
    start = time.monotonic()
    for v in G.vertices():
        if v not in sizes:
            raise InputError(f"no list size given for vertex {v}")
        if sizes[v] < 1:
            raise InputError(f"list sizes must be positive, got {sizes[v]} at {v}")
    lay = _layout(G, sizes, covered)
    max_cols = None
    if all(sizes[v] < G.num_vertices for v in G.vertices()):
        max_cols = G.num_vertices - 1
    bounded = False
    if pot_bound is not None and (max_cols is None or pot_bound < max_cols):
        max_cols, bounded = pot_bound, True
    verdict = ChoosabilityVerdict(True, pot_bound=max_cols if bounded else None, bounded_pot=bounded)
    deadline = None if budget_seconds is None else start + budget_seconds

    if not lay.rows:
        # single part: every vertex keeps its own color
        verdict.ms = int((time.monotonic() - start) * 1000)
        return verdict

    if canonical:
        classes = canonical_classes(lay.row_sizes, lay.blocks, max_cols)
    else:
        if pot_bound is None:
            raise InputError("raw enumeration needs an explicit pot_bound")
        classes = _raw_classes(lay.row_sizes, pot_bound)

    if workers <= 1:
        for idx, columns in enumerate(classes):
            if deadline is not None and time.monotonic() > deadline:
                verdict.choosable = None
                break
            verdict.classes += 1
            cex, nodes = _decide_class(lay, columns)
            verdict.nodes += nodes
            if cex is not None:
                verdict.choosable, verdict.counterexample = False, cex
                break
    else:
        _parallel_search(lay, list(enumerate(classes)), workers, deadline, verdict)
    verdict.ms = int((time.monotonic() - start) * 1000)
    return verdict


def _raw_classes(row_sizes: Sequence[int], pot: int):
    from .canonical import lists_to_columns

    for lists in raw_assignments(row_sizes, pot):
        yield lists_to_columns(lists)


def _parallel_search(lay, items, workers, deadline, verdict) -> None:
    """Fan out classes; merge by the least class index so output ignores scheduling."""
    chunk = max(1, len(items) // (workers * 8) or 1)
    batches = [items[i:i + chunk] for i in range(0, len(items), chunk)]
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for out in pool.map(_worker, [(lay, b, deadline) for b in batches]):
            results.extend(out)
    results.sort(key=lambda t: t[0])
    expected = 0
    for idx, nodes, cex in results:
        if idx != expected or cex == "timeout":
            # a batch stopped early before this index: the prefix is all we know
            verdict.choosable = None if cex == "timeout" or idx != expected else verdict.choosable
            break
        expected += 1
        verdict.classes += 1
        verdict.nodes += nodes
        if cex is not None:
            verdict.choosable, verdict.counterexample = False, cex
            return
    else:
        if expected != len(items):
            verdict.choosable = None


def precolor_choosable(t: int, n: int, b: int) -> bool:
    """K_{n,b} with t-lists on the n-part and n-lists on the b-part."""
    return b < t ** n


def is_ab_choosable(
    m: int,
    n: int,
    a: int,
    b: int,
    *,
    mode: str = "auto",
    budget_seconds: float | None = None,
    workers: int = 1,
) -> ChoosabilityVerdict:
    """(a,b)-choosability of K_{m,n}: a-lists on the m-part, b-lists on the n-part.

    ``mode`` is ``auto`` (shortcuts then search), ``shortcut`` or ``exhaustive``.
    """
    if min(m, n, a, b) < 1:
        raise InputError("m, n, a, b must all be positive")
    if mode not in ("auto", "shortcut", "exhaustive"):
        raise InputError(f"unknown mode {mode!r}")
    start = time.monotonic()
    if mode != "exhaustive":
        verdict = _ab_shortcut(m, n, a, b)
        if verdict is not None:
            verdict.ms = int((time.monotonic() - start) * 1000)
            return verdict
        if mode == "shortcut":
            raise InputError(f"no shortcut applies to ({m},{n},{a},{b}); use --mode exhaustive")
    G = MultipartiteGraph((m, n))
    sizes = {(0, i): a for i in range(m)}
    sizes.update({(1, j): b for j in range(n)})
    # enumerate the side with fewer vertices; ties enumerate the m-part
    covered = 1 if m <= n else 0
    return is_f_choosable(G, sizes, covered=covered, budget_seconds=budget_seconds, workers=workers)


def _ab_shortcut(m: int, n: int, a: int, b: int) -> ChoosabilityVerdict | None:
    # constructive imports this module, so the import stays local
    from .constructive import precolor_counterexample

    if b > m or a > n:
        # color the other side first, then finish greedily
        return ChoosabilityVerdict(True, method="degenerate")
    if b == m:
        ok = precolor_choosable(a, m, n)
        cex = None if ok else precolor_counterexample(a, m, n)
        return ChoosabilityVerdict(ok, cex, method="precolor")
    if a == n:
        ok = precolor_choosable(b, n, m)
        cex = None
        if not ok:
            L = precolor_counterexample(b, n, m)
            cex = ListAssignment((L.lists[1], L.lists[0]))
        return ChoosabilityVerdict(ok, cex, method="precolor")
    return None


def list_chromatic_number_small(G: MultipartiteGraph, *, limit: int = 10) -> int:
    """Least k such that G is k-choosable; guarded to ``|V| <= limit``."""
    if G.num_vertices > limit:
        raise InputError(f"{G} has {G.num_vertices} vertices; the exhaustive guardrail is {limit}")
    if G.num_parts == 1:
        return 1
    k = G.num_parts
    while True:
        sizes = {v: k for v in G.vertices()}
        if is_f_choosable(G, sizes).choosable:
            return k
        k += 1
