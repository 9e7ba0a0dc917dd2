"""Blocking-set cover: can opposite-part lists block every transversal?

Fix the lists on the enumerated side and let ``T`` be the family of minimal
color sets a proper coloring of that side can use.  A vertex ``y`` on the
covered side is blocked by a transversal ``S`` iff ``L(y) ⊆ S``.  The graph is
not colorable iff every member of ``T`` contains some covered-side list, so a
counterexample exists iff ``T`` can be covered by at most one blocker per
covered vertex, each blocker a subset of some ``S`` of that vertex's list size.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .canonical import popcount
from .graphcore import bits


def minimal_sets(family) -> list[int]:
    """Inclusion-minimal members of a family of bitmasks, sorted by (size, value)."""
    uniq = sorted(set(family), key=lambda m: (popcount(m), m))
    kept: list[int] = []
    for m in uniq:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def hitting_sets(lists: Sequence[int], avail: int) -> list[int]:
    """Minimal color sets hitting every list using only colors in ``avail``."""
    found = set()
    order = sorted(set(lists), key=lambda m: (popcount(m & avail), m))

    def rec(i: int, chosen: int):
        while i < len(order) and order[i] & chosen:
            i += 1
        if i == len(order):
            found.add(chosen)
            return
        for c in bits(order[i] & avail):
            rec(i + 1, chosen | 1 << c)

    if all(m & avail for m in order):
        rec(0, 0)
    return minimal_sets(found)


def transversal_family(parts: Sequence[Sequence[int]]) -> list[int]:
    """Minimal unions of pairwise disjoint hitting sets, one per part."""
    if not parts:
        return [0]
    pot = 0
    for part in parts:
        for m in part:
            pot |= m
    out = set()

    def rec(i: int, used: int):
        if i == len(parts):
            out.add(used)
            return
        for h in hitting_sets(parts[i], pot & ~used):
            rec(i + 1, used | h)

    rec(0, 0)
    return minimal_sets(out)


@dataclass
class CoverResult:
    blockers: list[tuple[int, int]] | None  # (covered-vertex index, blocker mask)
    nodes: int


def find_cover(family: Sequence[int], sizes: Sequence[int], node_limit: int | None = None) -> CoverResult:
    """Assign blockers to covered vertices (list sizes ``sizes``) covering every member.

    Returns the blocker list, or ``None`` when no cover exists.  ``node_limit``
    aborts with :class:`TimeoutError`.
    """
    family = list(family)
    n_sets = len(family)
    if n_sets == 0:
        # the empty coloring already hits nothing; only reachable for empty sides
        return CoverResult([], 0)
    full = (1 << n_sets) - 1
    distinct = sorted(set(sizes))
    counts0 = tuple(sum(1 for s in sizes if s == b) for b in distinct)
    cov_cache: dict[int, int] = {}

    def coverage(block: int) -> int:
        cov = cov_cache.get(block)
        if cov is None:
            cov = 0
            for j, s in enumerate(family):
                if block & s == block:
                    cov |= 1 << j
            cov_cache[block] = cov
        return cov

    options_cache: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def options(j: int, b: int) -> list[tuple[int, int]]:
        key = (j, b)
        opts = options_cache.get(key)
        if opts is None:
            members = list(bits(family[j]))
            seen = {}
            for combo in combinations(members, b):
                block = sum(1 << c for c in combo)
                cov = coverage(block)
                if cov not in seen:
                    seen[cov] = block
            # drop options whose coverage is strictly inside another's
            covs = sorted(seen, key=popcount, reverse=True)
            kept = []
            for cov in covs:
                if not any(k & cov == cov for k, _ in kept):
                    kept.append((cov, seen[cov]))
            opts = kept
            options_cache[key] = opts
        return opts

    failed: set[tuple[int, tuple[int, ...]]] = set()
    nodes = 0

    def rec(uncovered: int, counts: tuple[int, ...]):
        nonlocal nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise TimeoutError
        if uncovered == 0:
            return []
        if sum(counts) == 0:
            return None
        key = (uncovered, counts)
        if key in failed:
            return None
        # fail-first: the uncovered member with the fewest useful options
        best_opts = None
        for j in bits(uncovered):
            opts = []
            for bi, b in enumerate(distinct):
                if counts[bi] == 0:
                    continue
                for cov, block in options(j, b):
                    opts.append((popcount(cov & uncovered), bi, cov, block))
            if best_opts is None or len(opts) < len(best_opts):
                best_opts = opts
                if not opts:
                    break
        if not best_opts:
            failed.add(key)
            return None
        best_opts.sort(key=lambda t: (-t[0], t[1], t[3]))
        for _, bi, cov, block in best_opts:
            nxt = counts[:bi] + (counts[bi] - 1,) + counts[bi + 1:]
            sub = rec(uncovered & ~cov, nxt)
            if sub is not None:
                return [(bi, block)] + sub
        failed.add(key)
        return None

    found = rec(full, counts0)
    if found is None:
        return CoverResult(None, nodes)
    # map size classes back to concrete covered-vertex indices
    free = {b: [i for i, s in enumerate(sizes) if s == b] for b in distinct}
    blockers = []
    for bi, block in found:
        blockers.append((free[distinct[bi]].pop(0), block))
    return CoverResult(blockers, nodes)
