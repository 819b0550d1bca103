"""Space sharing: combine component codes into a plan for a storage graph.

A plan is a list of components, each a code on its own small graph, used
``multiplicity`` times and placed on graph nodes by an embedding.  With a
global scaling kappa, the plan stores ``sum t_j k_j`` secret symbols in
nodes of ``kappa * lambda_i`` symbols each, so its rate is that sum over
kappa.  Unused storage is reported as leftover, never silently reassigned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .codes import (
    SecureCode,
    construct_mds_uniform,
    construct_wheel_component,
    plaintext_code,
    replicate,
    verify_code,
    verify_decoding,
    verify_security,
)
from .errors import OutOfClass, ParameterError
from .galois import FieldSpec, field_of_order, smallest_prime_power_at_least
from .graph import (
    StorageGraph,
    find_w4_hub,
    find_wheel_hub,
    format_rational,
    is_feasible,
    is_m43,
    make_graph,
    mds_graph,
    mds_parameter,
    parse_rational,
    three_set_regions,
    wheel_graph,
)


@dataclass(frozen=True)
class Component:
    code: SecureCode
    graph: StorageGraph
    multiplicity: int
    embedding: tuple[int, ...]  # embedding[i] = graph id for component node graph.ids[i]

    def embedded(self) -> dict[int, int]:
        return dict(zip(self.graph.ids, self.embedding))

    def to_json(self) -> dict:
        return {
            "code": self.code.to_json(),
            "graph": self.graph.to_json(),
            "multiplicity": self.multiplicity,
            "embedding": {str(c): g for c, g in self.embedded().items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "Component":
        g = StorageGraph.from_json(d["graph"])
        emb = d["embedding"]
        return cls(SecureCode.from_json(d["code"]), g, int(d["multiplicity"]),
                   tuple(int(emb[str(i)]) for i in g.ids))


@dataclass(frozen=True)
class AchievabilityPlan:
    graph: StorageGraph
    components: tuple[Component, ...]
    kappa: int
    case: str = ""

    @property
    def achieved_k(self) -> int:
        return sum(c.multiplicity * c.code.k for c in self.components)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.achieved_k, self.kappa)

    @property
    def per_node_usage(self) -> dict[int, int]:
        usage = {i: 0 for i in self.graph.ids}
        for comp in self.components:
            for w, gid in zip(comp.code.node_widths, comp.embedding):
                usage[gid] += comp.multiplicity * w
        return usage

    @property
    def leftover(self) -> dict[int, Fraction]:
        u = self.per_node_usage
        return {i: self.kappa * lam - u[i] for i, lam in zip(self.graph.ids, self.graph.lambdas)}

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "kappa": self.kappa,
            "rate": format_rational(self.rate),
            "graph": self.graph.to_json(),
            "components": [c.to_json() for c in self.components],
            "usage": {str(i): u for i, u in self.per_node_usage.items()},
            "leftover": {str(i): format_rational(v) for i, v in self.leftover.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "AchievabilityPlan":
        return cls(
            StorageGraph.from_json(d["graph"]),
            tuple(Component.from_json(c) for c in d["components"]),
            int(d["kappa"]),
            d.get("case", ""),
        )


def plan_rate(plan: AchievabilityPlan) -> Fraction:
    return plan.rate


def empty_plan(g: StorageGraph) -> AchievabilityPlan:
    return AchievabilityPlan(g, (), 1, "empty")


def validate_plan(plan: AchievabilityPlan) -> list[str]:
    """Every violated plan invariant, as readable messages (empty when valid)."""
    g = plan.graph
    problems = []
    for gid, left in plan.leftover.items():
        if left < 0:
            problems.append(f"node {gid} over capacity by {format_rational(-left)}")
    for j, comp in enumerate(plan.components):
        if comp.multiplicity < 0:
            problems.append(f"component {j} has negative multiplicity")
        if len(set(comp.embedding)) != len(comp.embedding) or not set(comp.embedding) <= set(g.ids):
            problems.append(f"component {j} embedding is not injective into the graph")
            continue
        if not verify_code(comp.code, comp.graph).passed:
            problems.append(f"component {j} fails verification on its own graph")
        back = {gid: cid for cid, gid in comp.embedded().items()}
        for e in g.decoding_sets:
            restricted = frozenset(back[x] for x in e if x in back)
            if not any(d <= restricted for d in comp.graph.decoding_sets):
                problems.append(f"component {j}: decoding set {sorted(e)} covers no component decoding set")
                continue
            if not verify_decoding(comp.code, comp.graph, restricted)[0]:
                problems.append(f"component {j}: embedded decoding fails for {sorted(e)}")
            if not verify_security(comp.code, comp.graph, restricted)[0]:
                problems.append(f"component {j}: embedded security fails for {sorted(e)}")
    return problems


def _lcm_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def _as_fractions(lams) -> list[Fraction]:
    return [v if isinstance(v, Fraction) else parse_rational(v) for v in lams]


# layered MDS ---------------------------------------------------------------


def _mds_plan_on(g: StorageGraph, N: int, K: int, field: FieldSpec) -> AchievabilityPlan:
    if not 2 * K > N:
        raise ParameterError(f"M_{{{N},{K}}} is infeasible (2K <= N)")
    if field.q < N:
        raise ParameterError(f"need q >= N = {N}, got q={field.q}")
    order = sorted(g.ids, key=lambda i: (g.lam(i), i))
    lam = [g.lam(i) for i in order]
    layers = 2 * K - N
    kappa = _lcm_denominators(lam[:layers])
    comps = []
    prev = Fraction(0)
    for j in range(1, layers + 1):
        t = kappa * (lam[j - 1] - prev)
        prev = lam[j - 1]
        n_j, k_j = N - j + 1, K - j + 1
        code = construct_mds_uniform(n_j, k_j, field)
        comps.append(Component(code, mds_graph(n_j, k_j), int(t), tuple(order[j - 1 :])))
    return AchievabilityPlan(g, tuple(comps), kappa, f"layered-{layers}")


def mds_nonuniform_plan(lambdas: Sequence, N: int, K: int, field: FieldSpec | None = None) -> AchievabilityPlan:
    """Layered space sharing over uniform MDS codes; rate is the sum of the 2K-N smallest sizes."""
    lambdas = _as_fractions(lambdas)
    if len(lambdas) != N:
        raise ParameterError(f"expected {N} sizes, got {len(lambdas)}")
    field = field or field_of_order(smallest_prime_power_at_least(N))
    return _mds_plan_on(mds_graph(N, K, lambdas), N, K, field)


def mds_plan_for_graph(g: StorageGraph, field: FieldSpec | None = None) -> AchievabilityPlan:
    K = mds_parameter(g)
    if K is None:
        raise OutOfClass("graph is not an MDS graph M_{N,K}")
    return _mds_plan_on(g, g.N, K, field or field_of_order(smallest_prime_power_at_least(g.N)))


# wheels --------------------------------------------------------------------


def _case_fits(g: StorageGraph, hub: int, spokes: list[int], widths: dict[int, tuple], weights) -> bool:
    if any(w < 0 for _, w in weights):
        return False
    use = {i: Fraction(0) for i in g.ids}
    for variant, w in weights:
        for gid, width in zip([hub] + spokes, widths[variant]):
            use[gid] += w * width
    return all(use[i] <= g.lam(i) for i in g.ids)


def wheel_capacity_expression(lams_hub: Fraction, spokes: list[Fraction]) -> Fraction:
    """Best known rate for the supported wheel cases (spokes ascending)."""
    N = len(spokes) + 1
    l1, l2 = lams_hub, spokes[0]
    if N == 4:
        return min(l1, l2, (l1 + l2) / 3)
    if N == 5:
        return min(l1, l2, (l1 + l2) / 3, (l1 + l2 + spokes[1]) / 5)
    return min(l1, l2, (l1 + (N - 3) * l2) / (2 * N - 5))


def _wheel_cases(N: int, l1: Fraction, sp: list[Fraction]):
    """Candidate (name, [(variant, weight)]) lists in tie-breaking order."""
    l2 = sp[0]
    if N == 5:
        l3 = sp[1]
        yield "case-4", [(1, (2 * (l1 + l2) - 3 * l3) / 5), (2, (4 * l2 - (l1 + l3)) / 5), (3, l3 - l2)]
        yield "case-3", [(2, (2 * l2 - l1) / 3), (3, (2 * l1 - l2) / 3)]
        if l3 <= 2 * l2:
            yield "case-2b", [(1, 2 * l2 - l3), (3, l3 - l2)]
        else:
            yield "case-2a", [(3, l2)]
        yield "case-1", [(2, l1)]
        return
    d = 2 * N - 5
    yield "mixed", [(1, (2 * l1 - l2) / d), (2, ((N - 2) * l2 - l1) / d)]
    yield "component-2", [(2, l1)]
    yield "component-1", [(1, l2)]


def _wheel_plan_on(g: StorageGraph, hub: int, field: FieldSpec | None) -> AchievabilityPlan:
    N = g.N
    spokes = sorted((i for i in g.ids if i != hub), key=lambda i: (g.lam(i), i))
    l1 = g.lam(hub)
    sp = [g.lam(i) for i in spokes]
    if N < 4:
        raise OutOfClass("wheel plans need N >= 4")
    if N >= 6 and len(set(sp[: N - 3])) != 1:
        raise OutOfClass("for N >= 6 only equal-tail wheels are supported")
    field = field or field_of_order(smallest_prime_power_at_least(N))
    variants = (1, 2, 3) if N == 5 else (1, 2)
    codes = {v: construct_wheel_component(N, v, field) for v in variants}
    widths = {v: codes[v].node_widths for v in variants}
    target = wheel_capacity_expression(l1, sp)
    for name, weights in _wheel_cases(N, l1, sp):
        if sum(w for _, w in weights) != target or not _case_fits(g, hub, spokes, widths, weights):
            continue
        kappa = _lcm_denominators(w for _, w in weights)
        comps = tuple(
            Component(codes[v], wheel_graph(N), int(w * kappa), tuple([hub] + spokes)) for v, w in weights
        )
        return AchievabilityPlan(g, comps, kappa, name)
    raise OutOfClass("no supported wheel case applies")  # pragma: no cover


def wheel_plan(lambdas: Sequence, N: int | None = None, field: FieldSpec | None = None) -> AchievabilityPlan:
    """Plan for the wheel with hub 1: N = 4, N = 5, or equal-tail spokes."""
    lambdas = _as_fractions(lambdas)
    N = N if N is not None else len(lambdas)
    if len(lambdas) != N:
        raise ParameterError(f"expected {N} sizes, got {len(lambdas)}")
    return _wheel_plan_on(wheel_graph(N, lambdas), 1, field)


def wheel_plan_for_graph(g: StorageGraph, field: FieldSpec | None = None) -> AchievabilityPlan:
    hub = find_wheel_hub(g)
    if hub is None:
        raise OutOfClass("graph is not a wheel")
    return _wheel_plan_on(g, hub, field)


# small graphs ----------------------------------------------------------------


def _direct_storage(g: StorageGraph, nodes, kappa: int) -> Component:
    nodes = sorted(nodes)
    widths = [int(kappa * g.lam(i)) for i in nodes]
    code = plaintext_code(field_of_order(2), widths)
    local = make_graph([g.lam(i) for i in nodes], [range(1, len(nodes) + 1)])
    return Component(code, local, 1, tuple(nodes))


def _split_columns(code: SecureCode, parts: list[list[int]]) -> SecureCode:
    """Divide each node's columns into consecutive runs of the given widths."""
    new_widths = []
    for w, split in zip(code.node_widths, parts):
        if sum(split) != w:
            raise ParameterError("split widths must add up to the node width")
        new_widths.extend(split)
    return SecureCode(code.field, code.k, code.delta, code.kappa, tuple(new_widths), code.A, code.B)


def _supernode_component(g: StorageGraph, groups: list[frozenset[int]], kappa: int, s: int) -> Component:
    base = replicate(construct_mds_uniform(3, 2, field_of_order(3)), s)
    members, parts, group_of = [], [], []
    for gi, grp in enumerate(groups):
        remaining, split = s, []
        for node in sorted(grp):
            take = min(remaining, int(kappa * g.lam(node)))
            if take:
                members.append(node)
                split.append(take)
                group_of.append(gi)
            remaining -= take
        parts.append(split)
    code = _split_columns(base, parts)
    ids = list(range(1, len(members) + 1))
    sets = [
        [c for c, gi in zip(ids, group_of) if gi in pair]
        for pair in ((0, 1), (0, 2), (1, 2))
    ]
    local = make_graph([g.lam(n) for n in members], sets)
    return Component(code, local, 1, tuple(members))


def small_graph_plan(g: StorageGraph, field: FieldSpec | None = None) -> AchievabilityPlan:
    """Capacity-achieving plan for N <= 4 or at most three decoding sets."""
    if g.N > 4 and len(g.decoding_sets) > 3:
        raise OutOfClass("small-graph plans need N <= 4 or |E| <= 3")
    if not is_feasible(g).feasible:
        raise ParameterError("graph is infeasible; capacity is zero")
    E = g.decoding_sets
    if len(E) == 1:
        kappa = _lcm_denominators(g.lam(i) for i in E[0])
        return AchievabilityPlan(g, (_direct_storage(g, E[0], kappa),), kappa, "single-set")
    if len(E) == 2:
        inter = E[0] & E[1]
        kappa = _lcm_denominators(g.lam(i) for i in inter)
        return AchievabilityPlan(g, (_direct_storage(g, inter, kappa),), kappa, "two-set-intersection")
    if len(E) == 3:
        r = three_set_regions(g)
        groups = [r["Q12"], r["Q13"], r["Q23"]]
        kappa = _lcm_denominators(g.lambdas)
        comps = []
        if r["Q123"]:
            comps.append(_direct_storage(g, r["Q123"], kappa))
        s = int(kappa * min(g.lambda_sum(grp) for grp in groups))
        if s:
            comps.append(_supernode_component(g, groups, kappa, s))
        return AchievabilityPlan(g, tuple(comps), kappa, "three-set-partition")
    hub = find_w4_hub(g)
    if hub is not None:
        return _wheel_plan_on(g, hub, field)
    if is_m43(g):
        return _mds_plan_on(g, 4, 3, field or field_of_order(4))
    raise OutOfClass("four-node graph is neither W4 nor M43")  # pragma: no cover
