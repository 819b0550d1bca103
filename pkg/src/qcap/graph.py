"""Storage graphs and the capacity-side computations on them.

A storage graph is a list of nodes, each with a positive rational size
``lambda``, plus a list of decoding sets (hyperedges).  The message must be
recoverable from every decoding set and hidden from its complement.  This
module validates graphs, decides feasibility, evaluates the intersection and
wheel upper bounds with checkable certificates, gives exact capacities for
small graphs and decides strong maximality.

All sizes are ``fractions.Fraction`` values; nothing here uses floats.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GraphValidationError, InvalidPartition, LimitExceeded, OutOfClass, ParseError


def parse_rational(value) -> Fraction:
    """Read ``"p"``, ``"p/q"``, an int or a Fraction; floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"sizes must be exact rationals, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            if "." in value or "e" in value.lower():
                raise ValueError
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not an exact rational: {value!r}") from exc
    raise ParseError(f"not an exact rational: {value!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class StorageGraph:
    """A validated storage graph.

    Build instances through :func:`validate_graph` or :func:`make_graph`;
    the constructor itself does not re-check invariants.
    """

    ids: tuple[int, ...]
    lambdas: tuple[Fraction, ...]
    decoding_sets: tuple[frozenset[int], ...]

    @property
    def N(self) -> int:
        return len(self.ids)

    def lam(self, node: int) -> Fraction:
        return self.lambdas[self.position(node)]

    def position(self, node: int) -> int:
        try:
            return self.ids.index(node)
        except ValueError:
            raise KeyError(f"unknown node id {node}") from None

    def lambda_sum(self, nodes: Iterable[int]) -> Fraction:
        """Total size of a node set; zero for the empty set."""
        total = Fraction(0)
        for n in set(nodes):
            total += self.lam(n)
        return total

    def complement(self, nodes: Iterable[int]) -> frozenset[int]:
        s = set(nodes)
        return frozenset(i for i in self.ids if i not in s)

    @property
    def normalization_warning(self) -> str | None:
        lo = min(self.lambdas)
        if lo != 1:
            return f"min lambda is {format_rational(lo)}, not 1 (formulas are scale-covariant)"
        return None

    def mask(self, nodes: Iterable[int]) -> int:
        m = 0
        for n in nodes:
            m |= 1 << self.position(n)
        return m

    def nodes_of_mask(self, m: int) -> frozenset[int]:
        return frozenset(self.ids[i] for i in range(self.N) if m >> i & 1)

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": i, "lambda": format_rational(l)} for i, l in zip(self.ids, self.lambdas)],
            "decoding_sets": [sorted(e) for e in self.decoding_sets],
        }

    @classmethod
    def from_json(cls, d: dict) -> "StorageGraph":
        return validate_graph(d)

    def with_lambdas(self, lambdas: Sequence) -> "StorageGraph":
        return make_graph(lambdas, self.decoding_sets, ids=self.ids)


def validate_graph(raw) -> StorageGraph:
    """Check a raw JSON-style graph and return it, or raise with every violation.

    Redundancy is reported, never silently removed.
    """
    if not isinstance(raw, dict) or "nodes" not in raw or "decoding_sets" not in raw:
        raise ParseError("graph must be an object with 'nodes' and 'decoding_sets'")
    violations: list[str] = []
    ids: list[int] = []
    lambdas: list[Fraction] = []
    for entry in raw["nodes"]:
        try:
            nid = entry["id"]
            if isinstance(nid, bool) or not isinstance(nid, int):
                raise ParseError(f"node id must be an integer, got {nid!r}")
            lam = parse_rational(entry["lambda"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed node entry {entry!r}") from exc
        if nid in ids:
            violations.append(f"duplicate node id {nid}")
            continue
        if lam <= 0:
            violations.append(f"node {nid} has non-positive size {format_rational(lam)}")
        ids.append(nid)
        lambdas.append(lam)
    sets: list[frozenset[int]] = []
    for raw_set in raw["decoding_sets"]:
        try:
            members = list(raw_set)
        except TypeError as exc:
            raise ParseError(f"malformed decoding set {raw_set!r}") from exc
        s = frozenset(members)
        if not s:
            violations.append("empty decoding set")
            continue
        if len(s) != len(members):
            violations.append(f"decoding set {sorted(s)} lists a node twice")
        unknown = sorted(x for x in s if x not in ids)
        if unknown:
            violations.append(f"decoding set {sorted(s)} references unknown nodes {unknown}")
        if s in sets:
            violations.append(f"duplicate decoding set {sorted(s)}")
            continue
        sets.append(s)
    for a, b in itertools.permutations(sets, 2):
        if a < b:
            violations.append(f"redundant decoding set {sorted(b)} contains {sorted(a)}")
    covered = set().union(*sets) if sets else set()
    for nid in ids:
        if nid not in covered:
            violations.append(f"node {nid} is redundant (in no decoding set)")
    if not ids:
        violations.append("graph has no nodes")
    if not sets:
        violations.append("graph has no decoding sets")
    if violations:
        raise GraphValidationError(violations)
    return StorageGraph(tuple(ids), tuple(lambdas), tuple(sets))


def make_graph(lambdas: Sequence, decoding_sets: Iterable[Iterable[int]], ids: Sequence[int] | None = None) -> StorageGraph:
    """Convenience wrapper: nodes are ``1..N`` unless ``ids`` is given."""
    lambdas = [parse_rational(l) if not isinstance(l, Fraction) else l for l in lambdas]
    ids = list(ids) if ids is not None else list(range(1, len(lambdas) + 1))
    raw = {
        "nodes": [{"id": i, "lambda": l} for i, l in zip(ids, lambdas)],
        "decoding_sets": [sorted(e) for e in decoding_sets],
    }
    return validate_graph(raw)


def _uniform(n: int, lambdas) -> list:
    return [1] * n if lambdas is None else list(lambdas)


def mds_graph(N: int, K: int, lambdas=None) -> StorageGraph:
    """M_{N,K}: every K-subset of N nodes is a decoding set."""
    return make_graph(_uniform(N, lambdas), itertools.combinations(range(1, N + 1), K))


def wheel_graph(N: int, lambdas=None) -> StorageGraph:
    """W_N: hub 1 with each spoke, plus the set of all spokes."""
    sets = [(1, j) for j in range(2, N + 1)] + [tuple(range(2, N + 1))]
    return make_graph(_uniform(N, lambdas), sets)


FANO_SETS = ((1, 2, 4), (4, 5, 6), (1, 3, 6), (2, 6, 7), (3, 4, 7), (1, 5, 7), (2, 3, 5))


def fano_graph(lambdas=None) -> StorageGraph:
    return make_graph(_uniform(7, lambdas), FANO_SETS)


def intersection_labels(Delta: int, m: int) -> list[tuple[int, ...]]:
    """Node labels of the intersection graph: m-subsets of [Delta], lex order."""
    return list(itertools.combinations(range(1, Delta + 1), m))


def intersection_graph(Delta: int, m: int, lambdas=None) -> StorageGraph:
    """Decoding set i holds every node whose label contains i."""
    labels = intersection_labels(Delta, m)
    sets = [[n + 1 for n, lab in enumerate(labels) if i in lab] for i in range(1, Delta + 1)]
    return make_graph(_uniform(len(labels), lambdas), sets)


# feasibility and bounds ----------------------------------------------------


def _edge_key(e: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(e))


def _ordered_pairs(g: StorageGraph) -> list[tuple[frozenset[int], frozenset[int]]]:
    edges = sorted(g.decoding_sets, key=_edge_key)
    return list(itertools.combinations(edges, 2))


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: tuple[frozenset[int], frozenset[int]] | None = None


def is_feasible(g: StorageGraph) -> FeasibilityResult:
    """Positive capacity iff every two decoding sets intersect."""
    for a, b in _ordered_pairs(g):
        if not a & b:
            return FeasibilityResult(False, (a, b))
    return FeasibilityResult(True)


@dataclass(frozen=True)
class BoundCertificate:
    """An upper bound and the witness that proves it.

    ``kind`` is ``"intersection"`` (witness: two decoding sets),
    ``"wheel"`` (witness: ``(parts, k)`` with the hub first and the remaining
    parts in ascending size order) or ``"small-exact"`` (witness: the single
    decoding set).
    """

    kind: str
    value: Fraction
    witness: tuple

    def to_json(self) -> dict:
        if self.kind == "wheel":
            parts, k = self.witness
            w = {"parts": [sorted(p) for p in parts], "k": k}
        else:
            w = [sorted(e) for e in self.witness]
        return {"kind": self.kind, "value": format_rational(self.value), "witness": w}

    @classmethod
    def from_json(cls, d: dict) -> "BoundCertificate":
        kind = d["kind"]
        if kind == "wheel":
            w = (tuple(frozenset(p) for p in d["witness"]["parts"]), int(d["witness"]["k"]))
        else:
            w = tuple(frozenset(e) for e in d["witness"])
        return cls(kind, parse_rational(d["value"]), w)


def intersection_bound(g: StorageGraph) -> BoundCertificate:
    """min over pairs of Lambda(e_i & e_j); ties go to the lexicographically first pair."""
    pairs = _ordered_pairs(g)
    if not pairs:
        raise OutOfClass("intersection bound needs at least two decoding sets")
    best = min(pairs, key=lambda ab: g.lambda_sum(ab[0] & ab[1]))
    return BoundCertificate("intersection", g.lambda_sum(best[0] & best[1]), best)


def _contains_edge(mask: int, edge_masks: Sequence[int]) -> bool:
    return any(e & ~mask == 0 for e in edge_masks)


def _order_spokes(g: StorageGraph, parts: Sequence[frozenset[int]]) -> list[frozenset[int]]:
    return sorted(parts, key=lambda p: (g.lambda_sum(p), min(p)))


def wheel_bound_eval(g: StorageGraph, partition: Sequence[Iterable[int]], k: int) -> Fraction:
    """Evaluate the wheel bound for one partition (hub first) and one k.

    Raises InvalidPartition with ``reason`` ``"not-a-partition"``,
    ``"k-range"`` or ``"coverage"``.
    """
    parts = [frozenset(p) for p in partition]
    seen: set[int] = set()
    for p in parts:
        if not p or p & seen or not p <= set(g.ids):
            raise InvalidPartition("not-a-partition", "parts must be non-empty, disjoint node sets")
        seen |= p
    if seen != set(g.ids):
        raise InvalidPartition("not-a-partition", "parts do not cover every node")
    n = len(parts)
    if not 2 <= k <= n - 2:
        raise InvalidPartition("k-range", f"k={k} outside [2, {n - 2}]")
    edges = [g.mask(e) for e in g.decoding_sets]
    hub = g.mask(parts[0])
    rest = [g.mask(p) for p in parts[1:]]
    if not all(_contains_edge(hub | r, edges) for r in rest) or not _contains_edge(
        sum(rest), edges
    ):
        raise InvalidPartition("coverage", "a hub union or the spoke union contains no decoding set")
    spokes = _order_spokes(g, parts[1:])
    total = g.lambda_sum(parts[0]) + sum((g.lambda_sum(p) for p in spokes[: k - 1]), Fraction(0))
    return total / (2 * k - 1)


def set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    """All set partitions, generated from restricted growth strings."""
    n = len(items)

    def grow(i: int, a: list[int], top: int):
        if i == n:
            parts: list[list[int]] = [[] for _ in range(top)]
            for x, blk in zip(items, a):
                parts[blk].append(x)
            yield parts
            return
        for blk in range(top + 1):
            a.append(blk)
            yield from grow(i + 1, a, max(top, blk + 1))
            a.pop()

    yield from grow(0, [], 0)


def _wheel_witness_key(parts: tuple[frozenset[int], ...], k: int):
    return (tuple(tuple(sorted(p)) for p in parts), k)


def wheel_bound_search(g: StorageGraph, max_nodes: int = 8) -> BoundCertificate | None:
    """Minimum wheel bound over every partition, hub choice and k.

    Returns None when no configuration satisfies the coverage condition.
    """
    if g.N > max_nodes:
        raise LimitExceeded(f"wheel search over {g.N} nodes exceeds max_nodes={max_nodes}")
    edges = [g.mask(e) for e in g.decoding_sets]
    best = None
    for raw_parts in set_partitions(list(g.ids)):
        n = len(raw_parts)
        if n < 4:
            continue
        parts = [frozenset(p) for p in raw_parts]
        masks = [g.mask(p) for p in parts]
        for h in range(n):
            hub = masks[h]
            others = [masks[i] for i in range(n) if i != h]
            if not all(_contains_edge(hub | r, edges) for r in others):
                continue
            if not _contains_edge(sum(others), edges):
                continue
            spokes = _order_spokes(g, [parts[i] for i in range(n) if i != h])
            ordered = (parts[h], *spokes)
            acc = g.lambda_sum(parts[h])
            for k in range(2, n - 1):
                acc += g.lambda_sum(spokes[k - 2])
                value = acc / (2 * k - 1)
                key = (value, _wheel_witness_key(ordered, k))
                if best is None or key < best[0]:
                    best = (key, ordered, k)
    if best is None:
        return None
    (value, _), ordered, k = best
    return BoundCertificate("wheel", value, (ordered, k))


def capacity_upper_bound(g: StorageGraph, max_nodes: int = 8) -> BoundCertificate:
    """Best of the intersection and wheel bounds (wheel only when N <= max_nodes)."""
    if len(g.decoding_sets) < 2:
        e = g.decoding_sets[0]
        return BoundCertificate("small-exact", g.lambda_sum(e), (e,))
    best = intersection_bound(g)
    if best.value > 0 and g.N <= max_nodes:
        w = wheel_bound_search(g, max_nodes)
        if w is not None and w.value < best.value:
            best = w
    return best


def evaluate_certificate(g: StorageGraph, cert: BoundCertificate) -> Fraction:
    """Recompute a certificate's value from its witness alone."""
    if cert.kind == "intersection":
        a, b = cert.witness
        if a not in g.decoding_sets or b not in g.decoding_sets or a == b:
            raise InvalidPartition("not-a-partition", "witness is not a pair of decoding sets")
        return g.lambda_sum(a & b)
    if cert.kind == "wheel":
        parts, k = cert.witness
        return wheel_bound_eval(g, parts, k)
    if cert.kind == "small-exact":
        (e,) = cert.witness
        if len(g.decoding_sets) != 1 or e != g.decoding_sets[0]:
            raise InvalidPartition("not-a-partition", "single-set witness does not match the graph")
        return g.lambda_sum(e)
    raise ValueError(f"unknown certificate kind {cert.kind!r}")


# exact capacity of small graphs -------------------------------------------


@dataclass(frozen=True)
class CapacityResult:
    value: Fraction
    formula: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = {"capacity": format_rational(self.value), "formula": self.formula}
        for key, val in self.detail.items():
            if isinstance(val, (list, tuple)):
                d[key] = [sorted(x) if isinstance(x, frozenset) else x for x in val]
            elif isinstance(val, frozenset):
                d[key] = sorted(val)
            else:
                d[key] = val
        return d


def three_set_regions(g: StorageGraph) -> dict[str, frozenset[int]]:
    """The centre and the three pairwise-only regions of a three-set graph."""
    e1, e2, e3 = g.decoding_sets
    return {
        "Q123": e1 & e2 & e3,
        "Q12": (e1 & e2) - e3,
        "Q13": (e1 & e3) - e2,
        "Q23": (e2 & e3) - e1,
    }


def find_wheel_hub(g: StorageGraph) -> int | None:
    """Hub id when g is a wheel W_N (N >= 4), else None."""
    if g.N < 4 or len(g.decoding_sets) != g.N:
        return None
    for h in g.ids:
        spokes = [i for i in g.ids if i != h]
        want = {frozenset((h, s)) for s in spokes} | {frozenset(spokes)}
        if set(g.decoding_sets) == want:
            return h
    return None


def find_w4_hub(g: StorageGraph) -> int | None:
    """Hub id when g is a four-node wheel, else None."""
    return find_wheel_hub(g) if g.N == 4 else None


def mds_parameter(g: StorageGraph) -> int | None:
    """K when the decoding sets are exactly all K-subsets of the nodes, else None."""
    sizes = {len(e) for e in g.decoding_sets}
    if len(sizes) != 1:
        return None
    K = sizes.pop()
    if len(g.decoding_sets) != math.comb(g.N, K):
        return None
    return K


def is_m43(g: StorageGraph) -> bool:
    return g.N == 4 and set(g.decoding_sets) == {frozenset(c) for c in itertools.combinations(g.ids, 3)}


def w4_capacity(l1: Fraction, l2: Fraction) -> Fraction:
    return min(l1, l2, (l1 + l2) / 3)


def capacity_small(g: StorageGraph) -> CapacityResult:
    """Exact capacity for N <= 4 or at most three decoding sets."""
    if g.N > 4 and len(g.decoding_sets) > 3:
        raise OutOfClass("exact capacity is only known here for N <= 4 or |E| <= 3")
    feas = is_feasible(g)
    if not feas.feasible:
        return CapacityResult(Fraction(0), "infeasible", {"witness": list(feas.witness)})
    E = g.decoding_sets
    if len(E) == 1:
        return CapacityResult(g.lambda_sum(E[0]), "single-set", {"set": E[0]})
    if len(E) == 2:
        return CapacityResult(g.lambda_sum(E[0] & E[1]), "two-set-intersection", {"intersection": E[0] & E[1]})
    if len(E) == 3:
        r = three_set_regions(g)
        value = g.lambda_sum(r["Q123"]) + min(g.lambda_sum(r[k]) for k in ("Q12", "Q13", "Q23"))
        return CapacityResult(value, "three-set-partition", {k: v for k, v in r.items()})
    hub = find_w4_hub(g)
    if hub is not None:
        spoke = min((i for i in g.ids if i != hub), key=lambda i: (g.lam(i), i))
        value = w4_capacity(g.lam(hub), g.lam(spoke))
        return CapacityResult(value, "wheel-W4", {"hub": hub, "smallest_spoke": spoke})
    if is_m43(g):
        two = sorted(g.lambdas)[:2]
        return CapacityResult(two[0] + two[1], "mds-M43", {})
    raise OutOfClass("four-node graph is neither W4 nor M43")  # pragma: no cover


# strong maximality ---------------------------------------------------------


@dataclass(frozen=True)
class MaximalityResult:
    strongly_maximal: bool
    witness: frozenset[int] | None
    reason: str

    def to_json(self) -> dict:
        return {
            "strongly_maximal": self.strongly_maximal,
            "witness": sorted(self.witness) if self.witness is not None else None,
            "reason": self.reason,
        }


def violates_maximality(g: StorageGraph, s: Iterable[int]) -> bool:
    """True iff s meets every decoding set without containing any of them."""
    s = frozenset(s)
    return all(s & e and not e <= s for e in g.decoding_sets)


def is_strongly_maximal(g: StorageGraph, max_nodes: int = 16) -> MaximalityResult:
    """Scan all node subsets; the witness is a largest, then lex-smallest, violator."""
    if g.N > max_nodes:
        raise LimitExceeded(f"subset scan over {g.N} nodes exceeds max_nodes={max_nodes}")
    feas = is_feasible(g)
    if not feas.feasible:
        return MaximalityResult(False, None, "infeasible")
    masks = np.arange(1 << g.N, dtype=np.int64)
    ok = np.zeros(masks.shape, dtype=bool)
    for e in g.decoding_sets:
        em = g.mask(e)
        inter = masks & em
        ok |= (inter == 0) | (inter == em)
    bad = masks[~ok]
    if bad.size == 0:
        return MaximalityResult(True, None, "every subset fully includes or excludes a decoding set")
    sizes = np.array([bin(int(x)).count("1") for x in bad])
    top = bad[sizes == sizes.max()]
    witness = min((g.nodes_of_mask(int(x)) for x in top), key=lambda s: sorted(s))
    return MaximalityResult(False, witness, "subset meets every decoding set without containing one")


def graph_digest(g: StorageGraph) -> str:
    return hashlib.sha256(json.dumps(g.to_json(), sort_keys=True).encode()).hexdigest()


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out
