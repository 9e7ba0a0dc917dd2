"""Acceptance criteria 1-10, each recorded as one PASS/FAIL line in the summary."""

import random
import subprocess
import sys
import time
from fractions import Fraction
from math import ceil, prod

import pytest

from flexcolor.constructive import knn_flex_color, multipartite_flex_color
from flexcolor.exactsolve import is_ab_choosable, is_colorable, is_f_choosable, max_satisfied
from flexcolor.flexlab import (
    adversarial_instance,
    bounds_table,
    check_flexible_sampled,
    epsilon_bounds_bipartite,
    lemma_connect_classify,
)
from flexcolor.graphcore import MultipartiteGraph, is_proper, respects_lists
from flexcolor.witnesses import catalog, verify

from .helpers import knn_instance, naive_max_satisfied, random_lists, random_request, shapes

F = Fraction
HALF, THIRD, ZERO = F(1, 2), F(1, 3), F(0)


def _elapsed(start):
    return time.monotonic() - start


@pytest.mark.criterion(1)
def test_witness_suite(criterion):
    start = time.monotonic()
    reports = [verify(e) for e in catalog()]
    took = _elapsed(start)
    bad = [r.name for r in reports if not r.passed]
    criterion.detail = f"{len(reports)} entries, {len(bad)} failing, {took:.2f}s (limit 10s)"
    assert len(reports) == 9 and not bad and took < 10


@pytest.mark.criterion(2)
def test_precolor_boundary(criterion):
    times = []
    for args, expected in [((2, 8, 3, 2), True), ((2, 9, 3, 2), False)]:
        start = time.monotonic()
        v = is_ab_choosable(*args, mode="exhaustive", budget_seconds=60)
        times.append(_elapsed(start))
        assert v.choosable is expected, args
        if not expected:
            assert not is_colorable(MultipartiteGraph(args[:2]), v.counterexample)[0]
        start = time.monotonic()
        s = is_ab_choosable(*args, mode="shortcut")
        assert s.choosable is expected and _elapsed(start) < 1.0
    criterion.detail = f"exhaustive {times[0]:.2f}s / {times[1]:.2f}s (limit 60s each), shortcut instant"
    assert max(times) < 60


THM4_ROWS = [
    ((2, 8, 3, 2), True),
    ((2, 9, 3, 2), False),
    ((3, 6, 3, 2), True),
    ((3, 7, 3, 2), False),
    ((4, 4, 3, 2), True),
    ((4, 5, 3, 2), False),
    ((3, 7, 2, 3), True),
    ((3, 8, 2, 3), False),
    ((4, 5, 2, 3), True),
    ((4, 6, 2, 3), False),
]


@pytest.mark.criterion(3)
def test_choosability_boundary_rows(criterion):
    worst = 0.0
    wrong = []
    for args, expected in THM4_ROWS:
        start = time.monotonic()
        v = is_ab_choosable(*args, mode="exhaustive", budget_seconds=600)
        worst = max(worst, _elapsed(start))
        ok = v.choosable is expected
        if ok and not expected:
            ok = not is_colorable(MultipartiteGraph(args[:2]), v.counterexample)[0]
        if not ok:
            wrong.append(args)
    criterion.detail = f"{len(THM4_ROWS)} rows, {len(wrong)} mismatched, slowest {worst:.2f}s (limit 600s)"
    assert not wrong and worst < 600


@pytest.mark.criterion(4)
def test_k33_one_long_list(criterion):
    G = MultipartiteGraph((3, 3))
    start = time.monotonic()
    classes = 0
    for long in G.vertices():
        sizes = {v: 2 for v in G.vertices()}
        sizes[long] = 3
        v = is_f_choosable(G, sizes, pot_bound=5)
        classes += v.classes
        assert v.choosable is True, long
    took = _elapsed(start)
    criterion.detail = f"choosable for every placement of the 3-list, {classes} classes, {took:.2f}s (limit 10s)"
    assert took < 10


@pytest.mark.slow
@pytest.mark.criterion(5)
def test_multipartite_guarantee(criterion):
    per_shape = 10_000
    all_shapes = shapes(4, 4)
    start = time.monotonic()
    violations, oracle_runs = 0, 0
    for sizes in all_shapes:
        rng = random.Random(sum(n * 10**i for i, n in enumerate(sizes)))
        G = MultipartiteGraph(sizes)
        k = len(sizes)
        s = sum(sizes) - max(sizes)
        exact = G.num_vertices <= 8
        for _ in range(per_shape):
            L = random_lists(rng, sizes, s + 1, rng.randint(s + 1, 2 * s + 3))
            popular = rng.sample(range(s + 1), min(2, s + 1))
            r = random_request(rng, L, popular=popular)
            out = multipartite_flex_color(G, L, r)
            f = out.coloring
            ok = is_proper(G, f) and respects_lists(L, f) and out.satisfied >= ceil(len(r) / k)
            if ok and exact:
                oracle_runs += 1
                ok = out.satisfied <= max_satisfied(G, L, r).best
            violations += not ok
    took = _elapsed(start)
    criterion.detail = (
        f"{len(all_shapes)} shapes x {per_shape} instances, {oracle_runs} oracle checks, "
        f"{violations} violations, {took:.0f}s (limit 600s)"
    )
    assert violations == 0 and took < 600


@pytest.mark.slow
@pytest.mark.criterion(6)
def test_knn_guarantee(criterion):
    trials = 5000
    start = time.monotonic()
    violations = 0
    for n in (4, 5):
        rng = random.Random(4000 + n)
        G = MultipartiteGraph((n, n))
        for _ in range(trials):
            L, r = knn_instance(rng, n)
            out = knn_flex_color(G, L, r)
            f = out.coloring
            ok = is_proper(G, f) and respects_lists(L, f) and out.satisfied >= ceil(len(r) / 2)
            ok = ok and out.satisfied <= max_satisfied(G, L, r).best
            violations += not ok
    took = _elapsed(start)
    criterion.detail = f"K_4,4 and K_5,5 x {trials} trials, {violations} violations, {took:.0f}s (limit 600s)"
    assert violations == 0 and took < 600


def _interval(m, n, t):
    b = epsilon_bounds_bipartite(m, n, t)
    return b.lower, b.upper


@pytest.mark.slow
@pytest.mark.criterion(7)
def test_epsilon_tables(criterion):
    start = time.monotonic()
    bad = []

    def expect(cases, lo, hi):
        for c in cases:
            if _interval(*c) != (lo, hi):
                bad.append(c)

    # two-row parts
    expect([(2, 1, t) for t in range(2, 6)], HALF, HALF)
    expect([(2, 2, 2), (2, 3, 2)], ZERO, ZERO)
    expect([(2, n, t) for n in range(2, 27) for t in range(3, 5)], HALF, HALF)
    # three-row parts
    expect([(3, n, t) for n in range(3, 27) for t in (4, 5)], HALF, HALF)
    expect([(3, 3, 3)], HALF, HALF)
    expect([(3, n, 3) for n in range(4, 7)], THIRD, HALF)
    expect([(3, n, 3) for n in (7, 8)], THIRD, THIRD)
    expect([(3, n, 3) for n in range(9, 27)], ZERO, ZERO)
    # four to six rows
    expect([(4, n, 3) for n in range(7, 21)], ZERO, ZERO)
    for n in range(4, 7):
        lo, hi = _interval(4, n, 3)
        if not (lo >= F(1, 4 + n) and hi == HALF):
            bad.append((4, n, 3))

    # connect witnesses, re-verified from scratch
    zero_checks = 0
    for m, ns in [(3, range(9, 27)), (4, range(7, 21))]:
        for n in ns:
            res = lemma_connect_classify(m, n, 3)
            L, r = res.witness
            if not (res.kind == "Zero" and L.is_k_assignment(3) and max_satisfied(L.graph(), L, r).best == 0):
                bad.append(("connect", m, n))
            zero_checks += 1

    rows = bounds_table()
    for b in rows:
        if b.witness is not None:
            L, r = b.witness
            best = max_satisfied(MultipartiteGraph((b.m, b.n)), L, r).best
            if F(best, len(r)) > b.upper:
                bad.append(("table", b.m, b.n, b.t))
    took = _elapsed(start)
    criterion.detail = (
        f"{len(rows)} table rows, {zero_checks} zero witnesses at max_satisfied=0, "
        f"{len(bad)} mismatches, {took:.0f}s (limit 1800s)"
    )
    assert not bad, bad[:10]
    assert took < 1800


@pytest.mark.criterion(8)
def test_oracle_equivalence(criterion):
    rng = random.Random(88)
    start = time.monotonic()
    cases, disagreements = 0, 0
    while cases < 10_000:
        k = rng.randint(1, 4)
        sizes = [rng.randint(1, 3) for _ in range(k)]
        if sum(sizes) > 8:
            continue
        pot = rng.randint(1, 6)
        L = random_lists(rng, sizes, lambda g: g.randint(1, min(3, pot)), pot)
        if prod(len(lst) for _, lst in L.items()) > 4096:
            continue
        r = random_request(rng, L, rng.randint(0, sum(sizes)))
        res = max_satisfied(L.graph(), L, r)
        naive = naive_max_satisfied(L, r)
        got = res.best if res.solved else None
        disagreements += got != naive
        cases += 1
    took = _elapsed(start)
    criterion.detail = f"{cases} cases (|V|<=8, pot<=6), {disagreements} disagreements, {took:.0f}s"
    assert disagreements == 0


@pytest.mark.criterion(9)
def test_fundamental_sampled(criterion):
    G = MultipartiteGraph((2, 3))
    k = G.max_degree() + 1
    start = time.monotonic()
    rep = check_flexible_sampled(G, k, HALF, trials=10_000, seed=0)
    above = check_flexible_sampled(G, k, F(51, 100), trials=0, seed=0)
    L, r = above.counterexample if above.found else (None, None)
    adv = adversarial_instance(G, k)
    verified = above.found and (L, r) == adv and max_satisfied(G, L, r).best < ceil(F(51, 100) * len(r))
    took = _elapsed(start)
    criterion.detail = (
        f"eps=1/2: {rep.explored} samples, {rep.mode}; eps=51/100: "
        f"{'adversarial counterexample verified' if verified else 'no verified counterexample'}, {took:.0f}s"
    )
    assert k == 4
    assert rep.mode == "SampledNoCounterexample" and rep.explored == 10_000
    assert verified


def _reproduce(result, workers):
    cmd = [sys.executable, "-m", "flexcolor.cli", "reproduce", "--result", result, "--format", "json"]
    proc = subprocess.run(cmd + ["--workers", str(workers)], capture_output=True, check=False)
    return proc.returncode, proc.stdout


@pytest.mark.slow
@pytest.mark.criterion(10)
def test_reproduce_determinism(criterion):
    start = time.monotonic()
    mismatched, codes = [], {}
    for result in ("thm-3-2", "k2n", "k3n", "forfree", "witnesses"):
        runs = [_reproduce(result, 1), _reproduce(result, 1), _reproduce(result, 2)]
        codes[result] = runs[0][0]
        if len({out for _, out in runs}) != 1 or len({c for c, _ in runs}) != 1:
            mismatched.append(result)
    took = _elapsed(start)
    criterion.detail = f"5 tables x 3 runs (workers 1,1,2), {len(mismatched)} differing, exit codes {codes}, {took:.0f}s"
    assert not mismatched
    assert set(codes.values()) == {0}
