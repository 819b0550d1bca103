import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcap import graph as G
from qcap.errors import GraphValidationError, InvalidPartition, LimitExceeded, OutOfClass, ParseError

F = Fraction


# independent oracles -------------------------------------------------------------


def partitions_oracle(items):
    """Set partitions via labelings with canonical first occurrence."""
    n = len(items)
    seen = set()
    for labels in itertools.product(range(n), repeat=n):
        blocks = {}
        for x, lab in zip(items, labels):
            blocks.setdefault(lab, []).append(x)
        key = frozenset(frozenset(b) for b in blocks.values())
        if key not in seen:
            seen.add(key)
            yield [sorted(b) for b in key]


def contains_edge(g, nodes):
    return any(e <= set(nodes) for e in g.decoding_sets)


def wheel_bound_oracle(g):
    """Minimum over partitions, hubs, spoke orderings and k, without any sorting trick."""
    best = None
    for parts in partitions_oracle(list(g.ids)):
        n = len(parts)
        if n < 4:
            continue
        for h in range(n):
            hub = set(parts[h])
            spokes = [parts[i] for i in range(n) if i != h]
            if not all(contains_edge(g, hub | set(s)) for s in spokes):
                continue
            if not contains_edge(g, set().union(*map(set, spokes))):
                continue
            for order in itertools.permutations(spokes):
                for k in range(2, n - 1):
                    v = (g.lambda_sum(hub) + sum(g.lambda_sum(s) for s in order[: k - 1])) / (2 * k - 1)
                    best = v if best is None else min(best, v)
    return best


def strongly_maximal_oracle(g):
    nodes = list(g.ids)
    for r in range(len(nodes) + 1):
        for s in itertools.combinations(nodes, r):
            s = set(s)
            if all(e & s for e in g.decoding_sets) and not any(e <= s for e in g.decoding_sets):
                return False
    return True


def antichains(n):
    """Every covering antichain of non-empty subsets of {1..n}."""
    subsets = [frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(range(1, n + 1), r)]
    out = []

    def grow(i, chosen):
        if i == len(subsets):
            if chosen and set().union(*chosen) == set(range(1, n + 1)):
                out.append(list(chosen))
            return
        grow(i + 1, chosen)
        s = subsets[i]
        if not any(s <= t or t <= s for t in chosen):
            chosen.append(s)
            grow(i + 1, chosen)
            chosen.pop()

    grow(0, [])
    return out


@st.composite
def small_graphs(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    sets = draw(st.lists(st.sets(st.integers(1, n), min_size=1), min_size=1, max_size=5))
    sets = {frozenset(s) for s in sets}
    sets = [s for s in sets if not any(t < s for t in sets)]
    nodes = sorted(set().union(*sets))
    rename = {v: i + 1 for i, v in enumerate(nodes)}
    lams = [F(draw(st.integers(1, 6)), draw(st.integers(1, 3))) for _ in nodes]
    return G.make_graph(lams, [sorted(rename[v] for v in s) for s in sets])


# parsing and validation ---------------------------------------------------------------


def test_parse_rational():
    assert G.parse_rational("3/4") == F(3, 4)
    assert G.parse_rational(2) == 2
    for bad in (0.5, "0.5", "1e3", True, None, "x"):
        with pytest.raises(ParseError):
            G.parse_rational(bad)


def test_validation_examples():
    w4 = G.wheel_graph(4)
    assert G.validate_graph(w4.to_json()) == w4
    nodes = [{"id": i, "lambda": "1"} for i in (1, 2, 3)]
    with pytest.raises(GraphValidationError) as err:
        G.validate_graph({"nodes": nodes, "decoding_sets": [[1, 2], [1, 2, 3]]})
    assert any("redundant decoding set" in v for v in err.value.violations)
    with pytest.raises(GraphValidationError) as err:
        G.validate_graph({"nodes": nodes, "decoding_sets": [[1, 2]]})
    assert any("node 3" in v for v in err.value.violations)


def test_validation_collects_every_violation():
    raw = {
        "nodes": [{"id": 1, "lambda": "1"}, {"id": 1, "lambda": "2"}, {"id": 2, "lambda": "-1"}],
        "decoding_sets": [[1, 9], [], [2]],
    }
    with pytest.raises(GraphValidationError) as err:
        G.validate_graph(raw)
    text = " | ".join(err.value.violations)
    for fragment in ("duplicate node id 1", "non-positive", "unknown nodes [9]", "empty decoding set"):
        assert fragment in text


def test_parse_errors():
    with pytest.raises(ParseError):
        G.validate_graph([])
    with pytest.raises(ParseError):
        G.validate_graph({"nodes": [{"id": "a", "lambda": 1}], "decoding_sets": [["a"]]})
    with pytest.raises(ParseError):
        G.validate_graph({"nodes": [{"id": 1, "lambda": 0.5}], "decoding_sets": [[1]]})


def test_lambda_sum_examples():
    assert G.wheel_graph(4).lambda_sum([]) == 0
    assert G.wheel_graph(4, [1, 2, 2, 2]).lambda_sum({1, 2}) == 3
    assert G.mds_graph(4, 3, [1, 2, 3, 4]).lambda_sum({1, 2}) == 3


def test_normalization_warning():
    assert G.wheel_graph(4).normalization_warning is None
    assert "not 1" in G.wheel_graph(4, [2, 2, 2, 2]).normalization_warning


@settings(max_examples=100, deadline=None)
@given(small_graphs())
def test_json_round_trip(g):
    assert G.StorageGraph.from_json(json.loads(json.dumps(g.to_json()))) == g


def test_families():
    assert len(G.mds_graph(5, 3).decoding_sets) == 10
    assert G.find_wheel_hub(G.wheel_graph(6)) == 1
    ig = G.intersection_graph(4, 2)
    assert ig.N == 6 and all(len(e) == 3 for e in ig.decoding_sets)
    # every pair of decoding sets meets in exactly the nodes labelled by that pair
    assert all(len(a & b) == 1 for a, b in itertools.combinations(ig.decoding_sets, 2))
    assert G.mds_parameter(G.mds_graph(6, 4)) == 4
    assert G.mds_parameter(G.wheel_graph(4)) is None


# feasibility and bounds --------------------------------------------------------------


def test_feasibility_examples():
    g = G.make_graph([1, 1, 1, 1], [[1, 2], [3, 4]])
    r = G.is_feasible(g)
    assert not r.feasible and set(r.witness) == {frozenset({1, 2}), frozenset({3, 4})}
    assert G.is_feasible(G.wheel_graph(4)).feasible
    assert G.is_feasible(G.make_graph([1, 1], [[1, 2]])).feasible


def test_intersection_bound_examples():
    c = G.intersection_bound(G.wheel_graph(5))
    assert c.value == 1 and c.witness == (frozenset({1, 2}), frozenset({1, 3}))
    assert G.intersection_bound(G.fano_graph([1, 2, 2, 2, 2, 2, 2])).value == 1
    assert G.intersection_bound(G.intersection_graph(5, 3)).value == 3
    with pytest.raises(OutOfClass):
        G.intersection_bound(G.make_graph([1], [[1]]))


def test_wheel_bound_eval_examples():
    w4 = G.wheel_graph(4, [F(1), F(2), F(2), F(2)])
    assert G.wheel_bound_eval(w4, [{1}, {2}, {3}, {4}], 2) == F(1 + 2, 3)
    w6 = G.wheel_graph(6)
    assert G.wheel_bound_eval(w6, [{i} for i in range(1, 7)], 4) == F(4, 7)
    with pytest.raises(InvalidPartition) as err:
        G.wheel_bound_eval(G.mds_graph(4, 3), [{1}, {2}, {3}, {4}], 2)
    assert err.value.reason == "coverage"


def test_wheel_bound_eval_rejections():
    w4 = G.wheel_graph(4)
    cases = [
        ([{1}, {2}, {3}], 2, "not-a-partition"),
        ([{1, 2}, {2}, {3}, {4}], 2, "not-a-partition"),
        ([{1}, {2}, {3}, {4}], 3, "k-range"),
        ([{1}, set(), {2}, {3}, {4}], 2, "not-a-partition"),
    ]
    for parts, k, reason in cases:
        with pytest.raises(InvalidPartition) as err:
            G.wheel_bound_eval(w4, parts, k)
        assert err.value.reason == reason


@pytest.mark.parametrize("lams", [(1, 2, 3, 4, 5), (2, 1, 1, 3, 1), (1, 1, 1, 1, 1)])
def test_wheel_bound_eval_invariant_under_spoke_order(lams):
    g = G.wheel_graph(5, lams)
    parts = [{1}, {2}, {3}, {4}, {5}]
    values = {G.wheel_bound_eval(g, [parts[0], *perm], k) for perm in itertools.permutations(parts[1:])
              for k in (2, 3)}
    assert len(values) == 2


def test_wheel_bound_search_examples():
    c = G.wheel_bound_search(G.wheel_graph(5))
    assert c.value == F(3, 5)
    parts, k = c.witness
    assert k == 3 and all(len(p) == 1 for p in parts)
    c = G.wheel_bound_search(G.mds_graph(5, 4))
    assert c is None or c.value >= 3
    assert G.wheel_bound_search(G.wheel_graph(4, [1, 2, 2, 2])).value == 1
    with pytest.raises(LimitExceeded):
        G.wheel_bound_search(G.mds_graph(9, 5))


def test_set_partitions_bell_numbers():
    bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140]
    for n, b in enumerate(bell):
        parts = list(G.set_partitions(list(range(n))))
        assert len(parts) == b
        assert len({frozenset(frozenset(p) for p in x) for x in parts}) == b


@pytest.mark.parametrize("g", [G.wheel_graph(4), G.wheel_graph(5, [2, 1, 3, 1, 2]), G.fano_graph(),
                               G.mds_graph(5, 3), G.intersection_graph(4, 2),
                               G.make_graph([1, 2, 1, 1, 3], [[1, 2], [1, 3, 4], [2, 3, 5], [1, 5]])],
                         ids=["W4", "W5", "fano", "M53", "I42", "mixed"])
def test_wheel_search_matches_oracle(g):
    c = G.wheel_bound_search(g)
    expected = wheel_bound_oracle(g)
    assert (c.value if c else None) == expected
    if c:
        assert G.evaluate_certificate(g, c) == c.value


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=5))
def test_wheel_search_matches_oracle_random(g):
    c = G.wheel_bound_search(g)
    assert (c.value if c else None) == wheel_bound_oracle(g)


def test_upper_bound_examples():
    assert G.capacity_upper_bound(G.make_graph([1, 1, 1, 1], [[1, 2], [3, 4]])).value == 0
    assert G.capacity_upper_bound(G.wheel_graph(4)).value == F(2, 3)
    assert G.capacity_upper_bound(G.fano_graph()).value == 1
    single = G.capacity_upper_bound(G.make_graph([2, 3], [[1, 2]]))
    assert single.kind == "small-exact" and single.value == 5


@settings(max_examples=150, deadline=None)
@given(small_graphs(max_n=6))
def test_certificates_reevaluate(g):
    c = G.capacity_upper_bound(g)
    back = G.BoundCertificate.from_json(json.loads(json.dumps(c.to_json())))
    assert G.evaluate_certificate(g, back) == c.value
    if not G.is_feasible(g).feasible:
        assert c.value == 0


def test_certificate_rejects_foreign_witness():
    g = G.wheel_graph(4)
    bogus = G.BoundCertificate("intersection", F(0), (frozenset({1, 2}), frozenset({3, 4})))
    with pytest.raises(InvalidPartition):
        G.evaluate_certificate(g, bogus)


# exact capacity for small graphs ----------------------------------------------------------


def test_capacity_small_examples():
    assert G.capacity_small(G.make_graph([2, 1, 1], [[1, 2], [1, 3]])).value == 2
    assert G.capacity_small(G.wheel_graph(4, [1, 2, 2, 2])).value == 1
    assert G.capacity_small(G.mds_graph(4, 3, [1, 2, 3, 4])).value == 3
    r = G.capacity_small(G.wheel_graph(4, [1, 2, 2, 2]))
    assert r.to_json()["capacity"] == "1"
    with pytest.raises(OutOfClass):
        G.capacity_small(G.fano_graph())


def test_every_graph_on_four_nodes_is_covered():
    residual = set()
    for n in range(1, 5):
        for sets in antichains(n):
            g = G.make_graph([1] * n, [sorted(s) for s in sets])
            r = G.capacity_small(g)
            assert r.value <= G.capacity_upper_bound(g).value
            if len(sets) > 3 and G.is_feasible(g).feasible:
                residual.add(r.formula)
    assert residual == {"wheel-W4", "mds-M43"}


@settings(max_examples=200, deadline=None)
@given(small_graphs(max_n=4))
def test_capacity_small_below_upper_bound(g):
    assert G.capacity_small(g).value <= G.capacity_upper_bound(g).value


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_n=6))
def test_two_sets_capacity_is_intersection(g):
    if len(g.decoding_sets) == 2:
        assert G.capacity_small(g).value == G.intersection_bound(g).value


def test_scale_covariance():
    g = G.wheel_graph(5, [3, 1, 2, 2, 5])
    h = g.with_lambdas([2 * x for x in g.lambdas])
    assert G.capacity_upper_bound(h).value == 2 * G.capacity_upper_bound(g).value


# strong maximality ---------------------------------------------------------------


def test_maximality_examples():
    assert G.is_strongly_maximal(G.mds_graph(3, 2)).strongly_maximal
    r = G.is_strongly_maximal(G.mds_graph(5, 4))
    assert not r.strongly_maximal and r.witness == frozenset({1, 2, 3})
    assert not G.is_strongly_maximal(G.intersection_graph(4, 2)).strongly_maximal
    r = G.is_strongly_maximal(G.make_graph([1] * 4, [[1, 2], [3, 4]]))
    assert not r.strongly_maximal and r.reason == "infeasible"
    with pytest.raises(LimitExceeded):
        G.is_strongly_maximal(G.wheel_graph(8), max_nodes=7)


@settings(max_examples=200, deadline=None)
@given(small_graphs(max_n=6))
def test_maximality_matches_oracle(g):
    r = G.is_strongly_maximal(g)
    expected = G.is_feasible(g).feasible and strongly_maximal_oracle(g)
    assert r.strongly_maximal == expected
    if r.witness is not None:
        assert G.violates_maximality(g, r.witness)
