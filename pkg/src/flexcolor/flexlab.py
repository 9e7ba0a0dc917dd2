"""Flexibility-level reasoning on complete bipartite and multipartite graphs.

Bounds on ``eps(G, t)`` (the largest eps with G (t, eps)-flexible) come with
certificates.  Counterexample searches never claim flexibility: negative
results are either sampled or exhaustive over a stated pot bound.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

from .canonical import canonical_classes, columns_to_lists
from .constructive import InternalInvariantError
from .exactsolve import (
    as_fraction,
    is_ab_choosable,
    list_chromatic_number_small,
    max_satisfied,
    required_count,
)
from .graphcore import (
    InputError,
    ListAssignment,
    MultipartiteGraph,
    Request,
    chromatic_number,
    coloring_number,
    hall_ratio,
)
from . import witnesses

HALF = Fraction(1, 2)

# 3-choosable K_{m,n} for 3 <= m <= n: largest n per m
THREE_CHOOSABLE_MAX_N = {3: 26, 4: 20, 5: 12, 6: 10}
LITERATURE_K3N = "1/3 for K_{3,n}, 4<=n<=8, t=3"


@dataclass(frozen=True)
class Certificate:
    kind: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind}({self.detail})" if self.detail else self.kind


@dataclass(frozen=True)
class EpsilonBound:
    m: int
    n: int
    t: int
    lower: Fraction
    upper: Fraction
    lower_certificate: Certificate
    upper_certificate: Certificate
    witness: tuple[ListAssignment, Request] | None = None

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise InternalInvariantError(f"bad interval [{self.lower}, {self.upper}] for {self.m},{self.n},{self.t}")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def row(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "t": self.t,
            "lower": str(self.lower),
            "upper": str(self.upper),
            "lower_cert": str(self.lower_certificate),
            "upper_cert": str(self.upper_certificate),
        }


@dataclass
class FlexSearchReport:
    mode: str  # SampledNoCounterexample | BoundedPotExhausted | CounterexampleFound
    explored: int = 0
    pool_checked: int = 0
    counterexample: tuple[ListAssignment, Request] | None = None
    best: int | None = None
    required: int | None = None
    seed: int | None = None
    pot_bound: int | None = None
    exhausted: bool = False
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.mode == "CounterexampleFound"

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "explored": self.explored,
            "pool_checked": self.pool_checked,
            "seed": self.seed,
            "pot_bound": self.pot_bound,
            "exhausted": self.exhausted,
        }
        if self.counterexample is not None:
            L, r = self.counterexample
            out["counterexample"] = {
                "lists": L.labelled_lists(),
                "request": [{"part": p, "index": i, "color": L.label(c)} for (p, i), c in r.items()],
                "best": self.best,
                "required": self.required,
            }
        return out


# --- choosability facts for K_{m,n} ---------------------------------------------------


def list_chromatic_number_bipartite(m: int, n: int) -> int | None:
    """chi_l(K_{m,n}) when the 2- and 3-choosability characterizations settle it."""
    m, n = min(m, n), max(m, n)
    if m == 1 or (m == 2 and n <= 3):
        return 2
    if m == 2 or n <= THREE_CHOOSABLE_MAX_N.get(m, 0):
        return 3
    return None


def is_known_choosable(m: int, n: int, k: int) -> bool | None:
    m, n = min(m, n), max(m, n)
    if k >= m + 1:
        return True
    chi = list_chromatic_number_bipartite(m, n)
    if chi is not None:
        return k >= chi
    if k <= 3:
        return False
    return None


# --- connect classifier -------------------------------------------------------------


@dataclass
class ConnectResult:
    kind: str  # "Zero" or "AtLeastOneOverMN"
    lower: Fraction
    route: str | None = None
    witness: tuple[ListAssignment, Request] | None = None
    verdicts: dict = field(default_factory=dict)


def _ab(m: int, n: int, a: int, b: int):
    if m == 0 or n == 0:
        return None  # an empty side is always colorable
    return is_ab_choosable(m, n, a, b)


def lemma_connect_classify(m: int, n: int, k: int) -> ConnectResult:
    """Zero with a verified witness, or the 1/(m+n) lower bound."""
    if min(m, n) < 1 or k < 2:
        raise InputError("need m, n >= 1 and k >= 2")
    if is_known_choosable(m, n, k) is not True:
        raise InputError(f"K_{{{m},{n}}} is not known to be {k}-choosable")
    return _connect_cached(m, n, k)


@lru_cache(maxsize=None)
def _connect_cached(m: int, n: int, k: int) -> ConnectResult:
    # one non-choosable reduction already pins eps to 0, so stop at the first
    routes = (
        ("drop-x", f"K_{{{m - 1},{n}}} ({k},{k - 1})", (m - 1, n, k, k - 1)),
        ("drop-y", f"K_{{{m},{n - 1}}} ({k - 1},{k})", (m, n - 1, k - 1, k)),
    )
    verdicts: dict[str, str] = {}
    for route, label, args in routes:
        v = _ab(*args)
        verdicts[label] = "choosable" if v is None else v.status
        if v is not None and v.choosable is None:
            raise InternalInvariantError(f"choosability of {label} ran out of budget")
        if v is not None and not v.choosable:
            L, r = _connect_witness(route, v.counterexample)
            res = max_satisfied(MultipartiteGraph((m, n)), L, r)
            if not res.solved or res.best != 0:
                raise InternalInvariantError(f"connect witness for ({m},{n},{k}) grants {res.best} requests")
            return ConnectResult("Zero", Fraction(0), route, (L, r), verdicts)
    return ConnectResult("AtLeastOneOverMN", Fraction(1, m + n), verdicts=verdicts)


def _connect_witness(route: str, bad: ListAssignment) -> tuple[ListAssignment, Request]:
    X, Y = bad.lists
    c = max(bad.pot()) + 1
    if route == "drop-y":
        new_x = [lst | {c} for lst in X]
        new_y = [X[0] | {c}] + list(Y)
        vertex = (1, 0)
    else:
        new_y = [lst | {c} for lst in Y]
        new_x = [Y[0] | {c}] + list(X)
        vertex = (0, 0)
    L = ListAssignment((tuple(new_x), tuple(new_y)))
    return L, Request({vertex: c})


# --- bounds table ----------------------------------------------------------------


def _witness_bound(name: str) -> tuple[Fraction, Certificate, tuple[ListAssignment, Request]]:
    # no coloring grants more than `best` of |D| requests, so eps <= best/|D|
    entry = witnesses.get(name)
    value = Fraction(entry.claim.value, len(entry.request))
    return value, Certificate("Witness", name), (entry.assignment, entry.request)


def epsilon_bounds_bipartite(m: int, n: int, t: int) -> EpsilonBound:
    """Tightest certified interval for eps(K_{m,n}, t)."""
    if min(m, n, t) < 1:
        raise InputError("m, n, t must be positive")
    m, n = min(m, n), max(m, n)
    chi_upper = list_chromatic_number_bipartite(m, n)
    if t < m + 1 and not (m == n and n >= 4 and t >= n):
        if chi_upper is None:
            raise InputError(f"chi_l(K_{{{m},{n}}}) is not determined here; need t >= {m + 1}")
        if t < chi_upper:
            raise InputError(f"t = {t} is below the list chromatic number {chi_upper} of K_{{{m},{n}}}")
    return _bounds(m, n, t)


@lru_cache(maxsize=None)
def _bounds(m: int, n: int, t: int) -> EpsilonBound:
    lowers: list[tuple[Fraction, Certificate]] = []
    uppers: list[tuple[Fraction, Certificate]] = []
    witness = None
    if t >= m + 1:
        lowers.append((HALF, Certificate("ConstructiveThm1")))
    if m == n and n >= 4 and t >= n:
        lowers.append((HALF, Certificate("ConstructiveKNN")))
    if (m, n, t) == (3, 3, 3):
        lowers.append((HALF, Certificate("CaseAnalysis", "K_{3,3} with 3-lists")))
    if m == 3 and 4 <= n <= 8 and t == 3:
        lowers.append((Fraction(1, 3), Certificate("Literature", LITERATURE_K3N)))
    uppers.append((1 / hall_ratio(MultipartiteGraph((m, n)), cross_check=False), Certificate("HallRatio")))
    if m == 2 and n in (2, 3) and t == 2:
        value, cert, witness = _witness_bound(f"k2n_t2_n{n}")
        uppers.append((value, cert))
    if m == 3 and n in (7, 8) and t == 3:
        value, cert, witness = _witness_bound(f"k3n_t3_flex_n{n}")
        uppers.append((value, cert))
    best_lower = max((v for v, _ in lowers), default=Fraction(0))
    best_upper = min(v for v, _ in uppers)
    if t == 3 and best_lower < best_upper and m >= 2:
        res = lemma_connect_classify(m, n, 3)
        if res.kind == "Zero":
            uppers.append((Fraction(0), Certificate("LemmaConnect")))
            witness = res.witness
        else:
            lowers.append((res.lower, Certificate("LemmaConnect")))
    # monotone in t: flexibility at t carries over to t + 1
    if t > 2 and is_known_choosable(m, n, t - 1):
        prev = _bounds(m, n, t - 1)
        if prev.lower > 0:
            cert = prev.lower_certificate
            lowers.append((prev.lower, Certificate(cert.kind, cert.detail or f"t={prev.t}")))
    lowers.append((Fraction(0), Certificate("Choosability")))
    lower, lcert = max(lowers, key=lambda item: item[0])  # first maximal entry wins
    upper, ucert = min(uppers, key=lambda item: item[0])
    if ucert.kind not in ("Witness", "LemmaConnect"):
        witness = None
    return EpsilonBound(m, n, t, lower, upper, lcert, ucert, witness)


def bounds_table(max_t_extra: int = 1) -> list[EpsilonBound]:
    """Every (m, n, t) with m <= n, chi_l(K_{m,n}) known, and chi_l <= t <= m + 1 + extra."""
    rows = []
    for m in range(1, 7):
        top = {1: 26, 2: 26}.get(m, THREE_CHOOSABLE_MAX_N.get(m))
        for n in range(m, top + 1):
            chi = list_chromatic_number_bipartite(m, n)
            for t in range(chi, m + 2 + max_t_extra):
                rows.append(epsilon_bounds_bipartite(m, n, t))
    return rows


def bounds_csv(rows: list[EpsilonBound]) -> str:
    buf = io.StringIO()
    cols = ["m", "n", "t", "lower", "upper", "lower_cert", "upper_cert"]
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.row())
    return buf.getvalue()


# --- sampled and exhaustive flexibility checks ------------------------------------------


def adversarial_instance(G: MultipartiteGraph, k: int) -> tuple[ListAssignment, Request]:
    """All lists equal, one vertex per part requesting the same color."""
    lst = frozenset(range(k))
    L = ListAssignment(tuple(tuple(lst for _ in range(n)) for n in G.partite_sizes))
    return L, Request({(p, 0): 0 for p in range(G.num_parts)})


def _check(G, L, r, eps) -> tuple[bool, int | None, int]:
    """(is counterexample, best, required)."""
    need = required_count(eps, len(r))
    res = max_satisfied(G, L, r)
    if not res.solved:
        return True, None, need
    return res.best < need, res.best, need


def _verified_hit(report: FlexSearchReport, G, L, r, eps, best, need) -> FlexSearchReport:
    # independent re-check before anything is reported
    again = max_satisfied(G, L, r)
    if again.solved and again.best >= need:
        raise InternalInvariantError("counterexample failed re-verification")
    report.mode = "CounterexampleFound"
    report.counterexample = (L, r)
    report.best, report.required = best, need
    return report


def _random_request(rng: random.Random, G: MultipartiteGraph, L: ListAssignment) -> Request:
    verts = G.vertices()
    size = rng.randint(1, len(verts))
    dom = sorted(rng.sample(verts, size))
    return Request({v: rng.choice(sorted(L[v])) for v in dom})


def check_flexible_sampled(
    G: MultipartiteGraph,
    k: int,
    epsilon,
    trials: int,
    seed: int = 0,
    *,
    pot_bound: int | None = None,
    pool=(),
    adversarial: bool = True,
) -> FlexSearchReport:
    """Sample (L, r) pairs looking for a request that is not eps-satisfiable."""
    eps = as_fraction(epsilon)
    if not 0 <= eps <= 1:
        raise InputError(f"epsilon must lie in [0, 1], got {eps}")
    pot = pot_bound if pot_bound is not None else k * G.num_vertices
    if pot < k:
        raise InputError(f"pot bound {pot} is smaller than the list size {k}")
    report = FlexSearchReport("SampledNoCounterexample", seed=seed, pot_bound=pot)
    candidates = list(pool)
    if adversarial:
        candidates.append(adversarial_instance(G, k))
    for L, r in candidates:
        L.check_graph(G)
        report.pool_checked += 1
        hit, best, need = _check(G, L, r, eps)
        if hit:
            return _verified_hit(report, G, L, r, eps, best, need)
    rng = random.Random(seed)
    colors = range(pot)
    for _ in range(trials):
        L = ListAssignment(
            tuple(tuple(frozenset(rng.sample(colors, k)) for _ in range(n)) for n in G.partite_sizes)
        )
        r = _random_request(rng, G, L)
        report.explored += 1
        hit, best, need = _check(G, L, r, eps)
        if hit:
            return _verified_hit(report, G, L, r, eps, best, need)
    return report


def _all_requests(L: ListAssignment):
    verts = [v for v, _ in L.items()]
    for size in range(1, len(verts) + 1):
        for dom in combinations(verts, size):
            for cols in product(*(sorted(L[v]) for v in dom)):
                yield Request(dict(zip(dom, cols)))


def search_flexibility_counterexample(
    G: MultipartiteGraph,
    k: int,
    epsilon,
    budget: int,
    pot_bound: int,
    *,
    seed: int = 0,
    pool=(),
) -> FlexSearchReport:
    """Exhaustive bounded-pot search when it fits ``budget`` checks, else seeded local search."""
    eps = as_fraction(epsilon)
    if not 0 <= eps <= 1:
        raise InputError(f"epsilon must lie in [0, 1], got {eps}")
    if pot_bound < k:
        raise InputError(f"pot bound {pot_bound} is smaller than the list size {k}")
    report = FlexSearchReport("SampledNoCounterexample", seed=seed, pot_bound=pot_bound)
    for L, r in list(pool) + [adversarial_instance(G, k)]:
        L.check_graph(G)
        report.pool_checked += 1
        hit, best, need = _check(G, L, r, eps)
        if hit:
            return _verified_hit(report, G, L, r, eps, best, need)

    blocks, start = [], 0
    for size in G.partite_sizes:
        blocks.append(list(range(start, start + size)))
        start += size
    per_class = (k + 1) ** G.num_vertices - 1
    classes = []
    fits = True
    for cols in canonical_classes([k] * G.num_vertices, blocks, max_columns=pot_bound):
        classes.append(cols)
        if len(classes) * per_class > budget:
            fits = False
            break
    report.stats["requests_per_class"] = per_class
    if fits:
        for cols in classes:
            flat = columns_to_lists(cols, G.num_vertices)
            parts, at = [], 0
            for size in G.partite_sizes:
                parts.append(tuple(flat[at : at + size]))
                at += size
            L = ListAssignment(tuple(parts))
            for r in _all_requests(L):
                report.explored += 1
                hit, best, need = _check(G, L, r, eps)
                if hit:
                    return _verified_hit(report, G, L, r, eps, best, need)
        report.mode = "BoundedPotExhausted"
        report.exhausted = True
        report.stats["classes"] = len(classes)
        return report
    return _local_search(report, G, k, eps, budget, pot_bound, seed)


def _local_search(report, G, k, eps, budget, pot, seed) -> FlexSearchReport:
    rng = random.Random(seed)
    verts = G.vertices()

    def score(L, r):
        res = max_satisfied(G, L, r)
        need = required_count(eps, len(r))
        if not res.solved:
            return -1, None, need
        return res.best - need, res.best, need

    lists = {v: frozenset(rng.sample(range(pot), k)) for v in verts}
    req = {v: rng.choice(sorted(lists[v])) for v in rng.sample(verts, rng.randint(1, len(verts)))}

    def build(lists, req):
        L = ListAssignment(tuple(tuple(lists[(p, i)] for i in range(n)) for p, n in enumerate(G.partite_sizes)))
        return L, Request(req)

    cur = score(*build(lists, req))
    for _ in range(budget):
        report.explored += 1
        new_lists, new_req = dict(lists), dict(req)
        v = rng.choice(verts)
        if rng.random() < 0.5:
            out = rng.choice(sorted(new_lists[v]))
            spare = [c for c in range(pot) if c not in new_lists[v]]
            if not spare:
                continue
            new_lists[v] = (new_lists[v] - {out}) | {rng.choice(spare)}
            if new_req.get(v) == out:
                new_req[v] = rng.choice(sorted(new_lists[v]))
        elif v in new_req and len(new_req) > 1 and rng.random() < 0.3:
            del new_req[v]
        else:
            new_req[v] = rng.choice(sorted(new_lists[v]))
        L, r = build(new_lists, new_req)
        cand = score(L, r)
        if cand[0] < 0:
            return _verified_hit(report, G, L, r, eps, cand[1], cand[2])
        if cand[0] <= cur[0] or rng.random() < 0.05:
            lists, req, cur = new_lists, new_req, cand
    return report


# --- flexibility number and the inequality chain --------------------------------------


def flex_number_upper(partite_sizes) -> tuple[int, Certificate]:
    """Upper bound on the list flexibility number of a complete multipartite graph."""
    G = MultipartiteGraph(tuple(partite_sizes))
    if G.num_parts < 2:
        raise InputError("need at least two parts")
    best = (coloring_number(G, cross_check=False), Certificate("Col"))
    sizes = G.partite_sizes
    if G.num_parts == 2 and sizes[0] == sizes[1] and sizes[0] >= 3:
        n = sizes[0]
        cert = Certificate("ConstructiveKNN") if n >= 4 else Certificate("CaseAnalysis", "K_{3,3} with 3-lists")
        if n < best[0]:
            best = (n, cert)
    return best


def chain_check(G: MultipartiteGraph) -> tuple[int, int, int, int]:
    """(chi, chi_l, flex upper bound, max degree + 1), asserting the chain."""
    if G.num_vertices > 10:
        raise InputError(f"{G} has {G.num_vertices} vertices; the guardrail is 10")
    chain = (
        chromatic_number(G),
        list_chromatic_number_small(G),
        flex_number_upper(G.partite_sizes)[0],
        G.max_degree() + 1,
    )
    if list(chain) != sorted(chain):
        raise InternalInvariantError(f"chain violated on {G}: {chain}")
    return chain
