"""Canonical enumeration of list assignments up to symmetry.

A list assignment on ``R`` ordered vertices ("rows") is encoded by its color
incidence columns: column ``j`` is the bitmask of rows whose list contains
color ``j``.  Renaming colors permutes columns, so the assignment up to color
relabeling is exactly the multiset of columns, stored as a sorted tuple.
Vertex symmetries act on rows; the canonical representative of a class is the
lexicographically least sorted column tuple over the row-permutation group.
"""

from __future__ import annotations

from itertools import combinations, permutations, product
from typing import Iterator, Sequence


def popcount(x: int) -> int:
    return bin(x).count("1")


def row_symmetry_group(blocks: Sequence[Sequence[int]], sizes: Sequence[int]) -> list[tuple[int, ...]]:
    """Row permutations preserving the block (part) structure and list sizes.

    ``blocks`` lists the row indices of each part.  Rows may move within a part
    among rows of equal size, and whole parts with identical sorted size
    profiles may be exchanged.
    """
    n_rows = sum(len(b) for b in blocks)
    # within-part moves, per part
    within: list[list[dict[int, int]]] = []
    for block in blocks:
        by_size: dict[int, list[int]] = {}
        for r in block:
            by_size.setdefault(sizes[r], []).append(r)
        choices = []
        for rows in by_size.values():
            choices.append([dict(zip(rows, p)) for p in permutations(rows)])
        within.append([{k: v for d in combo for k, v in d.items()} for combo in product(*choices)])
    # whole-part moves between parts sharing a profile
    profile = [tuple(sorted(sizes[r] for r in block)) for block in blocks]
    part_perms = []
    for perm in permutations(range(len(blocks))):
        if all(profile[perm[i]] == profile[i] for i in range(len(blocks))):
            part_perms.append(perm)
    # canonical row order inside each block, sorted by size, to align blocks
    ordered = [sorted(block, key=lambda r: (sizes[r], r)) for block in blocks]
    group = set()
    for perm in part_perms:
        base = {}
        for i, block in enumerate(ordered):
            for src, dst in zip(block, ordered[perm[i]]):
                base[src] = dst
        for combo in product(*within):
            mapping = {}
            for d in combo:
                for r, s in d.items():
                    mapping[r] = base[s]
            group.add(tuple(mapping[r] for r in range(n_rows)))
    return sorted(group)


def _mask_tables(group: Sequence[tuple[int, ...]], n_rows: int) -> list[list[int]]:
    tables = []
    for perm in group:
        if perm == tuple(range(n_rows)):
            continue
        table = [0] * (1 << n_rows)
        for mask in range(1 << n_rows):
            out = 0
            for r in range(n_rows):
                if mask >> r & 1:
                    out |= 1 << perm[r]
            table[mask] = out
        tables.append(table)
    return tables


def canonical_form(columns: Sequence[int], tables: Sequence[Sequence[int]]) -> tuple[int, ...]:
    best = tuple(sorted(columns))
    for table in tables:
        image = tuple(sorted(table[c] for c in columns))
        if image < best:
            best = image
    return best


def is_canonical(columns: tuple[int, ...], tables: Sequence[Sequence[int]]) -> bool:
    for table in tables:
        if tuple(sorted(table[c] for c in columns)) < columns:
            return False
    return True


def column_multisets(sizes: Sequence[int], max_columns: int | None = None) -> Iterator[tuple[int, ...]]:
    """All nondecreasing column tuples with row ``r`` covered exactly ``sizes[r]`` times."""
    n_rows = len(sizes)
    full = (1 << n_rows) - 1
    remaining = list(sizes)
    cols: list[int] = []

    def alive() -> int:
        return sum(1 << r for r in range(n_rows) if remaining[r] > 0)

    def rec(start: int) -> Iterator[tuple[int, ...]]:
        live = alive()
        if live == 0:
            yield tuple(cols)
            return
        if max_columns is not None and len(cols) + max(remaining) > max_columns:
            return
        # the lowest live row must be hit by some later column, all of which are >= start
        for c in range(max(start, 1), full + 1):
            if c & ~live:
                continue
            cols.append(c)
            for r in range(n_rows):
                if c >> r & 1:
                    remaining[r] -= 1
            yield from rec(c)
            for r in range(n_rows):
                if c >> r & 1:
                    remaining[r] += 1
            cols.pop()

    yield from rec(1)


def canonical_classes(
    sizes: Sequence[int],
    blocks: Sequence[Sequence[int]],
    max_columns: int | None = None,
) -> Iterator[tuple[int, ...]]:
    """Canonical column tuples in increasing lexicographic order."""
    group = row_symmetry_group(blocks, sizes)
    tables = _mask_tables(group, len(sizes))
    for cols in column_multisets(sizes, max_columns):
        if is_canonical(cols, tables):
            yield cols


def columns_to_lists(columns: Sequence[int], n_rows: int) -> list[frozenset[int]]:
    lists: list[set[int]] = [set() for _ in range(n_rows)]
    for j, c in enumerate(columns):
        for r in range(n_rows):
            if c >> r & 1:
                lists[r].add(j)
    return [frozenset(s) for s in lists]


def lists_to_columns(lists: Sequence[frozenset[int]]) -> tuple[int, ...]:
    colors = sorted(set().union(*lists))
    return tuple(sorted(sum(1 << r for r, lst in enumerate(lists) if c in lst) for c in colors))


def raw_assignments(sizes: Sequence[int], pot: int) -> Iterator[list[frozenset[int]]]:
    """Every list assignment over colors ``0..pot-1``, no symmetry reduction."""
    choices = [[frozenset(c) for c in combinations(range(pot), s)] for s in sizes]
    for combo in product(*choices):
        yield list(combo)
