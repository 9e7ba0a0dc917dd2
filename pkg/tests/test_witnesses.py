import dataclasses
import hashlib
import time
from importlib import resources

import pytest

from flexcolor.graphcore import InputError, ListAssignment
from flexcolor.witnesses import (
    Claim,
    WitnessEntry,
    catalog,
    catalog_hash,
    dumps,
    get,
    load_catalog_doc,
    verify,
)

NAMES = [
    "k37_32",
    "k45_32",
    "k46_23",
    "k2n_t2_n2",
    "k2n_t2_n3",
    "k3n_t3_flex_n7",
    "k3n_t3_flex_n8",
    "precolor_t3_n2_b9",
    "precolor_t2_n2_b4",
]


def test_catalog_names():
    assert [e.name for e in catalog()] == NAMES


@pytest.mark.parametrize("name", NAMES)
def test_entry_verifies_quickly(name):
    start = time.monotonic()
    rep = verify(get(name))
    assert rep.passed, rep
    assert rep.diff == []
    assert time.monotonic() - start < 1.0


def test_measured_values():
    assert verify(get("k3n_t3_flex_n8")).measured == {"status": "Solved", "best": 1}
    assert verify(get("k2n_t2_n3")).measured == {"status": "Solved", "best": 0}
    assert verify(get("k45_32")).measured == {"colorable": False}
    assert verify(get("precolor_t2_n2_b4")).measured == {"colorable": False}


def test_printed_lists():
    e = get("k37_32")
    assert e.assignment.labelled_lists()[0][:2] == [[1, 2, 3], [1, 3, 4]]
    e = get("k3n_t3_flex_n7")
    assert e.assignment.labelled_lists()[0][:2] == [[1, 4, 5], [2, 6, 7]]
    assert [e.assignment.label(c) for _, c in e.request.items()] == [1, 2, 3]


def _with_lists(entry, lists):
    L = ListAssignment.from_lists(lists)
    req = entry.request
    if req is not None:
        back = {lab: c for c, lab in enumerate(L.labels)}
        req = type(req)({v: back[entry.assignment.label(c)] for v, c in req.items()})
    return dataclasses.replace(entry, assignment=L, request=req)


def test_tampered_entry_fails_with_diff():
    e = get("k37_32")
    lists = e.assignment.labelled_lists()
    lists[0][0] = [1, 2, 5]
    rep = verify(_with_lists(e, lists))
    assert not rep.passed
    assert rep.diff == ["lists[0][0]: [1, 2, 3] -> [1, 2, 5]"]


def test_every_single_color_mutation_of_k37_is_caught():
    e = get("k37_32")
    base = e.assignment.labelled_lists()
    slots = [(p, i, j) for p, part in enumerate(base) for i, lst in enumerate(part) for j in range(len(lst))]
    assert len(slots) == 3 * 3 + 7 * 2
    for p, i, j in slots:
        lists = [[list(lst) for lst in part] for part in base]
        old = lists[p][i][j]
        new = next(c for c in range(1, 9) if c not in lists[p][i])
        lists[p][i][j] = new
        lists[p][i].sort()
        rep = verify(_with_lists(e, lists))
        assert not rep.passed, (p, i, old, new)
        assert any(d.startswith(f"lists[{p}][{i}]") for d in rep.diff)


def test_renamed_entry_is_judged_by_its_claim_alone():
    e = get("k37_32")
    lists = e.assignment.labelled_lists()
    lists[1][0] = [6, 7]  # this y can always take a fresh color
    rep = verify(dataclasses.replace(_with_lists(e, lists), name="scratch"))
    assert not rep.passed and rep.diff == [] and rep.measured == {"colorable": True}


def test_catalog_roundtrip_is_byte_identical():
    raw = resources.files("flexcolor").joinpath("data/catalog.json").read_text(encoding="utf-8")
    doc = load_catalog_doc()
    assert dumps(doc) == raw
    rebuilt = {"format": doc["format"], "entries": [e.to_json() for e in catalog()]}
    assert dumps(rebuilt) == raw


def test_catalog_hash():
    raw = resources.files("flexcolor").joinpath("data/catalog.json").read_bytes()
    assert catalog_hash() == hashlib.sha256(raw).hexdigest()


def test_claim_validation():
    with pytest.raises(InputError):
        Claim("Bogus")
    with pytest.raises(InputError):
        Claim("NotColorable", 1)
    with pytest.raises(InputError):
        Claim("MaxSatisfiedAtMost")


def test_shape_mismatch_is_rejected():
    doc = get("k46_23").to_json()
    doc["shape"] = {"a": 3, "b": 3}
    with pytest.raises(InputError, match="shape"):
        WitnessEntry.from_json(doc)


def test_unknown_entry_name():
    with pytest.raises(InputError):
        get("nope")
