"""Instance and result file formats.

Weighted bipartite instances use a line format::

    c comment
    p bpm <n_left> <n_right> <m>
    e <l> <r> <weight>        (m lines, 0-based, weight decimal or num/den)
    w <l> <weight>            (optional offline vertex weight)

Online and Adwords instances are JSON.  Rationals in JSON are ``"num/den"``
strings so nothing passes through a float.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .graph import BipartiteInstance, InstanceError, Potential
from .online import AdwordsInstance, OnlineInstance


def fmt_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(tok, where: str = "") -> Fraction:
    if isinstance(tok, bool) or not isinstance(tok, (str, int)):
        raise InstanceError(f"{where}expected a rational string or integer, got {tok!r}")
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise InstanceError(f"{where}not a rational: {tok!r}") from None


def _int(tok, where):
    try:
        return int(tok)
    except ValueError:
        raise InstanceError(f"{where}not an integer: {tok!r}") from None


def parse_instance(text: str) -> tuple[BipartiteInstance, dict[int, Fraction] | None]:
    """Parse the line format; returns the instance and any offline weights."""
    header = None
    edges, seen = [], set()
    weights: dict[int, Fraction] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        where = f"line {no}: "
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if header is not None:
                raise InstanceError(where + "second header")
            if len(parts) != 5 or parts[1] != "bpm":
                raise InstanceError(where + "header must be 'p bpm <n_left> <n_right> <m>'")
            header = tuple(_int(t, where) for t in parts[2:])
            if min(header) < 0:
                raise InstanceError(where + "negative size in header")
        elif header is None:
            raise InstanceError(where + "data before the 'p' header")
        elif tag == "e":
            if len(parts) != 4:
                raise InstanceError(where + "edge line must be 'e <l> <r> <weight>'")
            l, r = _int(parts[1], where), _int(parts[2], where)
            if not (0 <= l < header[0] and 0 <= r < header[1]):
                raise InstanceError(where + f"edge ({l}, {r}) out of range")
            if (l, r) in seen:
                raise InstanceError(where + f"duplicate edge ({l}, {r})")
            seen.add((l, r))
            edges.append((l, r, parse_rational(parts[3], where)))
        elif tag == "w":
            if len(parts) != 3:
                raise InstanceError(where + "weight line must be 'w <l> <weight>'")
            l = _int(parts[1], where)
            if not 0 <= l < header[0]:
                raise InstanceError(where + f"offline vertex {l} out of range")
            if l in weights:
                raise InstanceError(where + f"duplicate weight for offline vertex {l}")
            weights[l] = parse_rational(parts[2], where)
        else:
            raise InstanceError(where + f"unknown line type {tag!r}")
    if header is None:
        raise InstanceError("missing 'p bpm' header")
    if len(edges) != header[2]:
        raise InstanceError(f"header promises {header[2]} edges, found {len(edges)}")
    inst = BipartiteInstance.from_weighted_edges(header[0], header[1], edges)
    return inst, (weights or None)


def format_instance(inst: BipartiteInstance, offline_weights=None, comment: str | None = None) -> str:
    lines = [f"c {comment}"] if comment else []
    lines.append(f"p bpm {inst.n_left} {inst.n_right} {len(inst.edges)}")
    for (l, r), w in zip(inst.edges, inst.weights):
        lines.append(f"e {l} {r} {fmt_rational(w)}")
    for l, w in sorted((offline_weights or {}).items()):
        lines.append(f"w {l} {fmt_rational(w)}")
    return "\n".join(lines) + "\n"


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None


def parse_online(text: str) -> OnlineInstance:
    doc = _load_json(text)
    if not isinstance(doc, dict) or "offline" not in doc or "arrivals" not in doc:
        raise InstanceError("online instance needs 'offline' and 'arrivals'")
    n = doc["offline"]
    if not isinstance(n, int) or n < 0:
        raise InstanceError("'offline' must be a nonnegative integer")
    arrivals = doc["arrivals"]
    if not isinstance(arrivals, list) or not all(
            isinstance(a, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in a)
            for a in arrivals):
        raise InstanceError("'arrivals' must be a list of integer lists")
    ws = doc.get("offline_weights")
    if ws is not None:
        if not isinstance(ws, dict):
            raise InstanceError("'offline_weights' must map offline vertex to weight")
        table = {_int(k, "offline_weights: "): parse_rational(v, "offline_weights: ")
                 for k, v in ws.items()}
        if set(table) != set(range(n)):
            raise InstanceError("'offline_weights' must give every offline vertex a weight")
        ws = tuple(table[i] for i in range(n))
    return OnlineInstance(n, tuple(tuple(a) for a in arrivals), ws)


def format_online(inst: OnlineInstance) -> str:
    doc = {"offline": inst.offline, "arrivals": [list(a) for a in inst.arrivals]}
    if inst.offline_weights is not None:
        doc["offline_weights"] = {str(i): fmt_rational(w)
                                  for i, w in enumerate(inst.offline_weights)}
    return dumps(doc)


def online_from_bipartite(inst: BipartiteInstance, offline_weights=None) -> OnlineInstance:
    """Left side offline, right side arriving in index order."""
    ws = None
    if offline_weights:
        if set(offline_weights) != set(range(inst.n_left)):
            raise InstanceError("'w' lines must cover every offline vertex")
        ws = tuple(offline_weights[i] for i in range(inst.n_left))
    return OnlineInstance(inst.n_left, inst.adj_right, ws)


def parse_adwords(text: str) -> AdwordsInstance:
    doc = _load_json(text)
    if not isinstance(doc, dict) or "budgets" not in doc or "queries" not in doc:
        raise InstanceError("Adwords instance needs 'budgets' and 'queries'")
    budgets = [parse_rational(b, "budgets: ") for b in doc["budgets"]]
    queries = []
    for q, item in enumerate(doc["queries"]):
        if not isinstance(item, dict) or not isinstance(item.get("bids"), dict):
            raise InstanceError(f"query {q}: expected {{'bids': {{...}}}}")
        queries.append({_int(k, f"query {q}: "): parse_rational(v, f"query {q}: ")
                        for k, v in item["bids"].items()})
    kw = {}
    if "bid_fraction_cap" in doc:
        kw["bid_fraction_cap"] = parse_rational(doc["bid_fraction_cap"], "bid_fraction_cap: ")
    return AdwordsInstance(tuple(budgets), tuple(queries), **kw)


def format_adwords(inst: AdwordsInstance) -> str:
    return dumps({
        "budgets": [fmt_rational(b) for b in inst.budgets],
        "queries": [{"bids": {str(i): fmt_rational(b) for i, b in q.items()}}
                    for q in inst.queries],
        "bid_fraction_cap": fmt_rational(inst.bid_fraction_cap),
    })


def potential_to_json(pi: Potential) -> dict[str, str]:
    return {repr(v): fmt_rational(x) for v, x in pi.items()}


def potential_from_json(doc, n_left: int, n_right: int) -> Potential:
    if not isinstance(doc, dict):
        raise InstanceError("potential must map vertex names to rationals")
    expected = {f"l{i}" for i in range(n_left)} | {f"r{j}" for j in range(n_right)}
    if set(doc) != expected:
        raise InstanceError("potential does not name exactly the instance's vertices")
    return Potential(tuple(parse_rational(doc[f"l{i}"]) for i in range(n_left)),
                     tuple(parse_rational(doc[f"r{j}"]) for j in range(n_right)))


def matching_to_json(m) -> list[list[int]]:
    return [list(e) for e in sorted(tuple(e) for e in m)]


def matching_from_json(doc) -> frozenset:
    if not isinstance(doc, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)
            for e in doc):
        raise InstanceError("matching must be a list of [l, r] pairs")
    return frozenset(tuple(e) for e in doc)
