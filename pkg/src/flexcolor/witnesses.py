"""Catalog of explicit counterexample assignments and their machine checks.

The catalog is a JSON file shipped with the package.  Colors are stored as
printed (1-based labels) and remapped to dense ids on load; the generated
precoloring family is stored by its parameters.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

from .constructive import precolor_counterexample
from .exactsolve import is_colorable, max_satisfied
from .graphcore import InputError, ListAssignment, MultipartiteGraph, Request

CLAIM_KINDS = ("NotColorable", "MaxSatisfiedAtMost", "MaxSatisfiedEquals")


def _catalog_bytes() -> bytes:
    return resources.files("flexcolor").joinpath("data/catalog.json").read_bytes()


def catalog_hash() -> str:
    """sha256 of the shipped catalog file."""
    return hashlib.sha256(_catalog_bytes()).hexdigest()


def dumps(doc) -> str:
    """Canonical serialization used for the catalog file."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class Claim:
    kind: str
    value: int | None = None

    def __post_init__(self):
        if self.kind not in CLAIM_KINDS:
            raise InputError(f"unknown claim kind {self.kind!r}")
        if (self.kind == "NotColorable") != (self.value is None):
            raise InputError(f"claim {self.kind} takes {'no' if self.kind == 'NotColorable' else 'a'} value")

    def __str__(self) -> str:
        return self.kind if self.value is None else f"{self.kind}({self.value})"


@dataclass(frozen=True)
class WitnessEntry:
    name: str
    graph: MultipartiteGraph
    assignment: ListAssignment
    request: Request | None
    claim: Claim
    shape: dict = field(default_factory=dict)
    note: str = ""
    generator: dict | None = None

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "partite_sizes": list(self.graph.partite_sizes),
            "shape": dict(self.shape),
            "claim": {"kind": self.claim.kind}
            if self.claim.value is None
            else {"kind": self.claim.kind, "value": self.claim.value},
            "note": self.note,
            "request": None
            if self.request is None
            else [
                {"part": p, "index": i, "color": self.assignment.label(c)}
                for (p, i), c in self.request.items()
            ],
        }
        if self.generator is not None:
            out["generator"] = dict(self.generator)
        else:
            out["lists"] = self.assignment.labelled_lists()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "WitnessEntry":
        try:
            name = data["name"]
            sizes = tuple(data["partite_sizes"])
            claim = Claim(data["claim"]["kind"], data["claim"].get("value"))
            shape = dict(data.get("shape", {}))
            gen = data.get("generator")
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed witness entry: missing {exc}") from None
        if gen is not None:
            if gen.get("family") != "precolor":
                raise InputError(f"{name}: unknown generator family {gen.get('family')!r}")
            L = precolor_counterexample(gen["t"], gen["n"], gen["b"])
            # shift dense ids to 1-based labels so every entry prints alike
            L = ListAssignment.from_lists([[{c + 1 for c in lst} for lst in part] for part in L.lists])
        else:
            if "lists" not in data:
                raise InputError(f"{name}: entry needs lists or a generator")
            L = ListAssignment.from_lists(data["lists"])
        G = MultipartiteGraph(sizes)
        L.check_graph(G)
        req = None
        if data.get("request") is not None:
            back = {lab: c for c, lab in enumerate(L.labels)}
            try:
                req = Request({(e["part"], e["index"]): back[e["color"]] for e in data["request"]})
            except KeyError as exc:
                raise InputError(f"{name}: request color {exc} is not in any list") from None
            req.validate(L)
        entry = cls(name, G, L, req, claim, shape, data.get("note", ""), gen)
        entry.check_shape()
        return entry

    def check_shape(self) -> None:
        if "t" in self.shape:
            ok = self.assignment.is_k_assignment(self.shape["t"])
        elif "a" in self.shape:
            ok = self.assignment.is_ab_assignment(self.shape["a"], self.shape["b"])
        else:
            ok = True
        if not ok:
            raise InputError(f"{self.name}: list sizes do not match the declared shape {self.shape}")


def load_catalog_doc() -> dict:
    return json.loads(_catalog_bytes().decode("utf-8"))


def catalog() -> list[WitnessEntry]:
    return [WitnessEntry.from_json(e) for e in load_catalog_doc()["entries"]]


def get(name: str) -> WitnessEntry:
    for entry in catalog():
        if entry.name == name:
            return entry
    raise InputError(f"no catalog entry named {name!r}")


@dataclass
class VerificationReport:
    name: str
    passed: bool
    claim: str
    measured: dict
    diff: list[str]
    nodes: int

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "claim": self.claim,
            "measured": self.measured,
            "diff": self.diff,
            "nodes": self.nodes,
        }


def _diff(entry: WitnessEntry, ref: WitnessEntry) -> list[str]:
    a, b = entry.to_json(), ref.to_json()
    out = []
    for key in sorted(set(a) | set(b)):
        if key == "lists" and key in a and key in b:
            for p, (pa, pb) in enumerate(zip(a[key], b[key])):
                for i, (la, lb) in enumerate(zip(pa, pb)):
                    if la != lb:
                        out.append(f"lists[{p}][{i}]: {lb} -> {la}")
            if [len(p) for p in a[key]] != [len(p) for p in b[key]]:
                out.append("lists: part sizes differ")
        elif a.get(key) != b.get(key):
            out.append(f"{key}: {b.get(key)!r} -> {a.get(key)!r}")
    return out


def verify(entry: WitnessEntry) -> VerificationReport:
    """Run the exact solver on an entry; entries sharing a catalog name must match it."""
    entry.check_shape()
    G, L = entry.graph, entry.assignment
    claim = entry.claim
    if claim.kind == "NotColorable":
        ok, f = is_colorable(G, L)
        holds = not ok
        measured = {"colorable": ok}
        nodes = 0
    else:
        if entry.request is None:
            raise InputError(f"{entry.name}: {claim.kind} needs a request")
        res = max_satisfied(G, L, entry.request)
        nodes = res.nodes
        measured = {"status": res.status, "best": res.best}
        if not res.solved:
            holds = False
        elif claim.kind == "MaxSatisfiedAtMost":
            holds = res.best <= claim.value
        else:
            holds = res.best == claim.value
    diff: list[str] = []
    ref = next((e for e in catalog() if e.name == entry.name), None)
    if ref is not None:
        diff = _diff(entry, ref)
    return VerificationReport(entry.name, holds and not diff, str(claim), measured, diff, nodes)
