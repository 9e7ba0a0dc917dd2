"""Complete multipartite graphs, list assignments, requests and colorings.

Vertices are ``(part, index)`` pairs, serialized part-major.  Colors are dense
nonnegative integers; :meth:`ListAssignment.from_lists` remaps arbitrary
integer labels onto ``0..p-1`` and keeps the original labels for reporting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Vertex = tuple[int, int]


class InputError(ValueError):
    """Raised for malformed instances: vertex mismatches, bad lists, bad requests."""


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(colors: Iterable[int]) -> int:
    m = 0
    for c in colors:
        m |= 1 << c
    return m


@dataclass(frozen=True)
class MultipartiteGraph:
    """Complete multipartite graph K_{n_1,...,n_k} given by its partite sizes."""

    partite_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.partite_sizes)
        if not sizes:
            raise InputError("a graph needs at least one part")
        if any(n < 1 for n in sizes):
            raise InputError(f"partite sizes must be positive, got {sizes}")
        object.__setattr__(self, "partite_sizes", sizes)

    @property
    def num_parts(self) -> int:
        return len(self.partite_sizes)

    @property
    def num_vertices(self) -> int:
        return sum(self.partite_sizes)

    def vertices(self) -> list[Vertex]:
        return [(p, i) for p, n in enumerate(self.partite_sizes) for i in range(n)]

    def has_vertex(self, v: Vertex) -> bool:
        p, i = v
        return 0 <= p < self.num_parts and 0 <= i < self.partite_sizes[p]

    def adjacent(self, u: Vertex, v: Vertex) -> bool:
        return u[0] != v[0]

    def degree(self, v: Vertex) -> int:
        return self.num_vertices - self.partite_sizes[v[0]]

    def max_degree(self) -> int:
        return self.num_vertices - min(self.partite_sizes)

    def normalized(self) -> tuple["MultipartiteGraph", tuple[int, ...]]:
        """Parts sorted ascending by size; ``perm[i]`` is the original index of new part i."""
        perm = tuple(sorted(range(self.num_parts), key=lambda p: (self.partite_sizes[p], p)))
        return MultipartiteGraph(tuple(self.partite_sizes[p] for p in perm)), perm

    def __str__(self) -> str:
        return "K_{" + ",".join(map(str, self.partite_sizes)) + "}"


@dataclass(frozen=True)
class ListAssignment:
    """Per-vertex color lists, stored per part as tuples of frozensets.

    ``labels[c]`` is the original label of dense color ``c`` (identity when absent).
    """

    lists: tuple[tuple[frozenset[int], ...], ...]
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        lists = tuple(tuple(frozenset(int(c) for c in lst) for lst in part) for part in self.lists)
        for p, part in enumerate(lists):
            for i, lst in enumerate(part):
                if not lst:
                    raise InputError(f"list of vertex ({p}, {i}) is empty")
                if min(lst) < 0:
                    raise InputError(f"negative color in list of vertex ({p}, {i})")
        object.__setattr__(self, "lists", lists)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[Iterable[int]]]) -> "ListAssignment":
        """Build from arbitrary integer labels, remapping them densely in sorted order."""
        raw = [[list(lst) for lst in part] for part in lists]
        labels = sorted({c for part in raw for lst in part for c in lst})
        index = {c: i for i, c in enumerate(labels)}
        dense = tuple(tuple(frozenset(index[c] for c in lst) for lst in part) for part in raw)
        return cls(dense, tuple(labels))

    @classmethod
    def from_masks(cls, masks: Sequence[Sequence[int]]) -> "ListAssignment":
        return cls(tuple(tuple(frozenset(bits(m)) for m in part) for part in masks))

    def graph(self) -> MultipartiteGraph:
        return MultipartiteGraph(tuple(len(part) for part in self.lists))

    def __getitem__(self, v: Vertex) -> frozenset[int]:
        return self.lists[v[0]][v[1]]

    def items(self) -> Iterator[tuple[Vertex, frozenset[int]]]:
        for p, part in enumerate(self.lists):
            for i, lst in enumerate(part):
                yield (p, i), lst

    def masks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(to_mask(lst) for lst in part) for part in self.lists)

    def pot(self) -> frozenset[int]:
        return frozenset().union(*(lst for _, lst in self.items()))

    def pot_size(self) -> int:
        return len(self.pot())

    def is_k_assignment(self, k: int) -> bool:
        return all(len(lst) == k for _, lst in self.items())

    def is_ab_assignment(self, a: int, b: int) -> bool:
        if len(self.lists) != 2:
            return False
        return all(len(x) == a for x in self.lists[0]) and all(len(y) == b for y in self.lists[1])

    def label(self, c: int) -> int:
        return self.labels[c] if self.labels is not None else c

    def labelled_lists(self) -> list[list[list[int]]]:
        return [[sorted(self.label(c) for c in lst) for lst in part] for part in self.lists]

    def check_graph(self, G: MultipartiteGraph) -> None:
        if tuple(len(part) for part in self.lists) != G.partite_sizes:
            raise InputError(
                f"list assignment shape {[len(p) for p in self.lists]} does not match {G}"
            )


@dataclass(frozen=True)
class Request:
    """Partial map vertex -> requested color; its domain is ``D``."""

    entries: Mapping[Vertex, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "entries", {(int(p), int(i)): int(c) for (p, i), c in sorted(self.entries.items())}
        )

    def __hash__(self):
        return hash(tuple(self.entries.items()))

    @property
    def domain(self) -> list[Vertex]:
        return list(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, v: Vertex) -> int:
        return self.entries[v]

    def __contains__(self, v: Vertex) -> bool:
        return v in self.entries

    def items(self):
        return self.entries.items()

    def validate(self, L: ListAssignment, nonempty: bool = True) -> None:
        G = L.graph()
        if nonempty and not self.entries:
            raise InputError("request domain must be nonempty")
        for v, c in self.entries.items():
            if not G.has_vertex(v):
                raise InputError(f"request names unknown vertex {v}")
            if c not in L[v]:
                raise InputError(f"requested color {L.label(c)} is not in the list of {v}")


@dataclass(frozen=True)
class Coloring:
    """Total map vertex -> color, stored per part."""

    colors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(tuple(int(c) for c in part) for part in self.colors))

    @classmethod
    def from_dict(cls, G: MultipartiteGraph, f: Mapping[Vertex, int]) -> "Coloring":
        missing = [v for v in G.vertices() if v not in f]
        if missing:
            raise InputError(f"coloring misses vertices {missing}")
        return cls(tuple(tuple(f[(p, i)] for i in range(n)) for p, n in enumerate(G.partite_sizes)))

    def __getitem__(self, v: Vertex) -> int:
        return self.colors[v[0]][v[1]]

    def items(self) -> Iterator[tuple[Vertex, int]]:
        for p, part in enumerate(self.colors):
            for i, c in enumerate(part):
                yield (p, i), c

    def as_dict(self) -> dict[Vertex, int]:
        return dict(self.items())

    def shape(self) -> tuple[int, ...]:
        return tuple(len(part) for part in self.colors)


def _check_cover(G: MultipartiteGraph, f: Coloring) -> None:
    if f.shape() != G.partite_sizes:
        raise InputError(f"coloring shape {list(f.shape())} does not cover {G}")


def is_proper(G: MultipartiteGraph, f: Coloring) -> bool:
    """True iff the color sets used on distinct parts are pairwise disjoint."""
    _check_cover(G, f)
    seen: set[int] = set()
    for part in f.colors:
        used = set(part)
        if used & seen:
            return False
        seen |= used
    return True


def respects_lists(L: ListAssignment, f: Coloring) -> bool:
    if f.shape() != tuple(len(p) for p in L.lists):
        raise InputError("coloring and list assignment cover different vertex sets")
    return all(f[v] in lst for v, lst in L.items())


def satisfied_count(r: Request, f: Coloring) -> int:
    shape = f.shape()
    total = 0
    for (p, i), c in r.items():
        if not (0 <= p < len(shape) and 0 <= i < shape[p]):
            raise InputError(f"request vertex {(p, i)} is outside the coloring")
        total += f[(p, i)] == c
    return total


# --- invariants: closed forms with brute-force cross-checks -----------------

BRUTE_FORCE_LIMIT = 12


def _adjacency_masks(G: MultipartiteGraph) -> list[int]:
    vs = G.vertices()
    return [sum(1 << j for j, u in enumerate(vs) if G.adjacent(u, v)) for v in vs]


def _alpha_brute(adj: list[int], subset: int) -> int:
    """Maximum independent set inside ``subset`` by exhaustive branching."""
    if not subset:
        return 0
    v = (subset & -subset).bit_length() - 1
    rest = subset & ~(1 << v)
    skip = _alpha_brute(adj, rest)
    take = 1 + _alpha_brute(adj, rest & ~adj[v])
    return max(skip, take)


def independence_number_brute(G: MultipartiteGraph) -> int:
    adj = _adjacency_masks(G)
    return _alpha_brute(adj, (1 << G.num_vertices) - 1)


def independence_number(G: MultipartiteGraph, cross_check: bool = True) -> int:
    alpha = max(G.partite_sizes)
    if cross_check and G.num_vertices <= BRUTE_FORCE_LIMIT:
        brute = independence_number_brute(G)
        assert brute == alpha, f"independence number mismatch on {G}: {alpha} vs {brute}"
    return alpha


def hall_ratio_brute(G: MultipartiteGraph) -> Fraction:
    adj = _adjacency_masks(G)
    best = Fraction(0)
    for subset in range(1, 1 << G.num_vertices):
        ratio = Fraction(bin(subset).count("1"), _alpha_brute(adj, subset))
        if ratio > best:
            best = ratio
    return best


def hall_ratio(G: MultipartiteGraph, cross_check: bool = True) -> Fraction:
    """Hall ratio; equals the number of parts for complete multipartite graphs."""
    rho = Fraction(G.num_parts)
    if cross_check and G.num_vertices <= BRUTE_FORCE_LIMIT:
        brute = hall_ratio_brute(G)
        assert brute == rho, f"Hall ratio mismatch on {G}: {rho} vs {brute}"
    return rho


def coloring_number_brute(G: MultipartiteGraph) -> int:
    """1 + degeneracy, with degeneracy = max over vertex subsets of the minimum degree."""
    adj = _adjacency_masks(G)
    n = G.num_vertices
    degeneracy = 0
    for subset in range(1, 1 << n):
        low = min(bin(adj[v] & subset).count("1") for v in bits(subset))
        degeneracy = max(degeneracy, low)
    return degeneracy + 1


def coloring_number(G: MultipartiteGraph, cross_check: bool = True) -> int:
    sizes = sorted(G.partite_sizes)
    col = 1 + sum(sizes[:-1])
    if cross_check and G.num_vertices <= 10:
        brute = coloring_number_brute(G)
        assert brute == col, f"coloring number mismatch on {G}: {col} vs {brute}"
    return col


def chromatic_number(G: MultipartiteGraph) -> int:
    return G.num_parts


# --- JSON instance schema ---------------------------------------------------


@dataclass(frozen=True)
class Instance:
    graph: MultipartiteGraph
    lists: ListAssignment
    request: Request | None = None


def parse_instance(data) -> Instance:
    """Parse the instance schema; raises :class:`InputError` naming the offending field."""
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object")
    if "partite_sizes" not in data:
        raise InputError("missing field 'partite_sizes'")
    sizes = data["partite_sizes"]
    if not isinstance(sizes, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in sizes):
        raise InputError("'partite_sizes' must be a list of integers")
    G = MultipartiteGraph(tuple(sizes))
    raw = data.get("lists")
    if not isinstance(raw, list) or len(raw) != G.num_parts:
        raise InputError(f"'lists' must hold one array per part ({G.num_parts} parts)")
    for p, part in enumerate(raw):
        if not isinstance(part, list) or len(part) != G.partite_sizes[p]:
            raise InputError(f"'lists[{p}]' must hold {G.partite_sizes[p]} lists")
        for i, lst in enumerate(part):
            if not isinstance(lst, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in lst):
                raise InputError(f"'lists[{p}][{i}]' must be an array of integers")
            if len(set(lst)) != len(lst):
                raise InputError(f"'lists[{p}][{i}]' repeats a color")
    L = ListAssignment.from_lists(raw)
    request = None
    if "request" in data and data["request"] is not None:
        index = {c: i for i, c in enumerate(L.labels)}
        entries = {}
        if not isinstance(data["request"], list):
            raise InputError("'request' must be an array")
        for j, item in enumerate(data["request"]):
            try:
                v = (int(item["part"]), int(item["index"]))
                color = item["color"]
            except (KeyError, TypeError, ValueError):
                raise InputError(f"'request[{j}]' needs integer fields part, index, color") from None
            if not G.has_vertex(v):
                raise InputError(f"'request[{j}]' names unknown vertex {v}")
            if color not in index:
                raise InputError(f"'request[{j}]' color {color} is not in the list of {v}")
            if v in entries:
                raise InputError(f"'request[{j}]' repeats vertex {v}")
            entries[v] = index[color]
        request = Request(entries)
        request.validate(L)
    return Instance(G, L, request)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_instance(data)


def instance_to_json(G: MultipartiteGraph, L: ListAssignment, r: Request | None = None) -> dict:
    out = {"partite_sizes": list(G.partite_sizes), "lists": L.labelled_lists()}
    if r is not None:
        out["request"] = [
            {"part": p, "index": i, "color": L.label(c)} for (p, i), c in r.items()
        ]
    return out


def coloring_to_json(L: ListAssignment, f: Coloring) -> list[list[int]]:
    return [[L.label(c) for c in part] for part in f.colors]
