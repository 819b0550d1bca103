"""Acceptance criteria 1-11.  Every comparison is exact (Fraction or int)."""

import itertools
import json
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from catalog import (
    INTERSECTION_PARAMS,
    MDS_PARAMS,
    W5_SAMPLES,
    constructed_codes,
    intersection_field,
    mds_code,
)
from qcap import codes as C
from qcap import composer as P
from qcap import graph as G
from qcap import quantum as Q
from qcap.errors import DecompositionError, LimitExceeded
from qcap.galois import field_of_order
from qcap.matrix import MatrixFq

F = Fraction
ORACLE_CAP = 1 << 20


def _w4_expected(l1, l2):
    return min(l1, l2, (l1 + l2) / 3)


def _w5_expected(lams):
    l1, *spokes = (F(x) for x in lams)
    s = sorted(spokes)
    return min(l1, s[0], (l1 + s[0]) / 3, (l1 + s[0] + s[1]) / 5)


# criterion 1 ------------------------------------------------------------------


@pytest.mark.parametrize("N,K", MDS_PARAMS)
def test_criterion_01_mds_uniform(N, K):
    code = mds_code(N, K)
    g = G.mds_graph(N, K)
    assert code.q >= N
    assert C.verify_code(code, g).passed
    assert code.rate == 2 * K - N
    if N <= 4:
        assert G.capacity_small(g).value == 2 * K - N
        assert G.capacity_upper_bound(g).value == 2 * K - N


# criterion 2 ------------------------------------------------------------------


def test_criterion_02_nonuniform_mds():
    plan = P.mds_nonuniform_plan([1, 2, 3, 4], 4, 3)
    assert plan.rate == 3
    assert P.validate_plan(plan) == []
    g = G.mds_graph(4, 3, [1, 2, 3, 4])
    assert G.capacity_small(g).value == 3


# criterion 3 ------------------------------------------------------------------


W4_GRID = [(F(a), F(b)) for a in ("1/2", "1", "3/2", "2", "3", "5") for b in (1, 2)]


@pytest.mark.parametrize("l1,l2", W4_GRID)
def test_criterion_03_w4_grid(l1, l2):
    plan = P.wheel_plan([l1, l2, l2, l2])
    expected = _w4_expected(l1, l2)
    assert plan.rate == expected
    assert P.validate_plan(plan) == []
    assert G.capacity_small(G.wheel_graph(4, [l1, l2, l2, l2])).value == expected


def test_criterion_03_w4_uniform():
    assert P.wheel_plan([1, 1, 1, 1]).rate == F(2, 3)
    assert G.capacity_small(G.wheel_graph(4)).value == F(2, 3)


# criterion 4 ------------------------------------------------------------------


@pytest.mark.parametrize("N", range(4, 9))
def test_criterion_04_uniform_wheel(N):
    plan = P.wheel_plan([1] * N)
    target = F(N - 2, 2 * N - 5)
    assert plan.rate == target
    assert P.validate_plan(plan) == []
    cert = G.wheel_bound_search(G.wheel_graph(N))
    assert cert is not None and cert.value == target


@pytest.mark.parametrize("lams", W5_SAMPLES, ids=lambda x: "-".join(str(v) for v in x))
def test_criterion_04_w5_samples(lams):
    plan = P.wheel_plan(lams)
    assert plan.rate == _w5_expected(lams)
    assert P.validate_plan(plan) == []
    assert G.capacity_upper_bound(G.wheel_graph(5, lams)).value == plan.rate


# criterion 5 ------------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 4])
def test_criterion_05_fano_even(q):
    report = C.verify_code(C.construct_fano(field_of_order(q)), G.fano_graph())
    assert len(report.checks) == 7
    assert all(c.decode_ok for c in report.checks)
    assert all(c.security_ok for c in report.checks)


def test_criterion_05_fano_ternary_fails():
    code = C.fano_code_matrices(field_of_order(3))
    g = G.fano_graph()
    e = {4, 5, 6}
    assert g.complement(e) == {1, 2, 3, 7}
    assert not C.verify_decoding(code, g, e)[0]
    assert not C.verify_security(code, g, e)[0]


def test_criterion_05_fano_oracle():
    code = C.construct_fano(field_of_order(2))
    g = G.fano_graph()
    results = C.oracle_all(code, g)
    assert results[0].assignments == 16
    for o in results:
        assert o.decoding_ok == C.verify_decoding(code, g, o.edge)[0]
        assert o.security_ok == C.verify_security(code, g, o.edge)[0]


# criterion 6 ------------------------------------------------------------------


@pytest.mark.parametrize("Delta,m", INTERSECTION_PARAMS)
def test_criterion_06_intersection(Delta, m):
    f = intersection_field(Delta, m)
    assert f.q > C.intersection_field_bound(Delta, m)
    code = C.construct_intersection(Delta, m, f, seed=1, max_retries=20)
    g = G.intersection_graph(Delta, m)
    assert C.verify_code(code, g).passed
    assert code.rate == comb(Delta - 2, m - 2)
    assert C.alignment_ranks(code, g) == [code.delta] * len(g.decoding_sets)


def test_criterion_06_intersection42_fixture():
    code = C.intersection42_fixture(field_of_order(2))
    g = G.intersection_graph(4, 2)
    assert C.verify_code(code, g).passed
    assert code.rate == 1
    assert C.alignment_ranks(code, g) == [code.delta] * 4


def test_criterion_06_expected_fields():
    assert [intersection_field(d, m).q for d, m in INTERSECTION_PARAMS] == [8, 11, 23, 37]


# criterion 7 ------------------------------------------------------------------


def _agrees(code, g):
    for o in C.oracle_all(code, g, ORACLE_CAP):
        if o.decoding_ok != C.verify_decoding(code, g, o.edge)[0]:
            return False
        if o.security_ok != C.verify_security(code, g, o.edge)[0]:
            return False
    return True


def _small_enough(code):
    return code.q ** (code.k + code.delta) <= ORACLE_CAP


@pytest.mark.parametrize("entry", [c for c in constructed_codes() if _small_enough(c[1])], ids=lambda c: c[0])
def test_criterion_07_oracle_equivalence(entry):
    _, code, g, _ = entry
    assert _agrees(code, g)


def _mutate(code, rng):
    M = code.stacked.data.copy()
    r, c = rng.integers(M.shape[0]), rng.integers(M.shape[1])
    M[r, c] = (M[r, c] + 1 + rng.integers(code.q - 1)) % code.q if code.q > 2 else 1 - M[r, c]
    return C.SecureCode(code.field, code.k, code.delta, code.kappa, code.node_widths,
                        MatrixFq(code.field, M[: code.k]), MatrixFq(code.field, M[code.k :]))


def test_criterion_07_random_mutations():
    rng = np.random.default_rng(20240607)
    g = G.wheel_graph(4)
    verdicts = set()
    for i in range(100):
        base = C.w4_fixture(field_of_order(2 if i % 2 == 0 else 3))
        mutated = _mutate(base, rng)
        assert _agrees(mutated, g)
        verdicts.add(C.verify_code(mutated, g).passed)
    assert False in verdicts  # the sample exercises failing codes


# criterion 8 ------------------------------------------------------------------


QUANTUM_CASES = {
    "w4-f2": lambda: (C.w4_fixture(field_of_order(2)), G.wheel_graph(4)),
    "fano-f2": lambda: (C.construct_fano(field_of_order(2)), G.fano_graph()),
    "i42-f2": lambda: (C.intersection42_fixture(field_of_order(2)), G.intersection_graph(4, 2)),
    "m32": lambda: (mds_code(3, 2), G.mds_graph(3, 2)),
    "m43": lambda: (mds_code(4, 3), G.mds_graph(4, 3)),
}


@pytest.mark.parametrize("name", list(QUANTUM_CASES))
def test_criterion_08_quantum(name):
    code, g = QUANTUM_CASES[name]()
    for e in g.decoding_sets:
        cert = Q.verify_quantum_recovery(code, g, e)
        assert cert.factorization_ok and cert.relabeling_bijective
        assert cert.support_size == code.q**code.delta
        try:
            assert Q.verify_quantum_security(code, g, e)
        except LimitExceeded:
            pass


def _quantum_passes(code, g):
    for e in g.decoding_sets:
        try:
            cert = Q.verify_quantum_recovery(code, g, e)
        except DecompositionError:
            return False
        if not (cert.factorization_ok and cert.security_ok):
            return False
    return True


def test_criterion_08_mutated_w4_fails():
    base = C.w4_fixture(field_of_order(2))
    g = G.wheel_graph(4)
    M = base.stacked.data
    failures = 0
    for r, c in itertools.product(range(M.shape[0]), range(M.shape[1])):
        flipped = M.copy()
        flipped[r, c] ^= 1
        code = C.SecureCode(base.field, 1, 3, 1, base.node_widths,
                            MatrixFq(base.field, flipped[:1]), MatrixFq(base.field, flipped[1:]))
        quantum_ok = _quantum_passes(code, g)
        assert quantum_ok == C.verify_code(code, g).passed
        failures += not quantum_ok
    # flipping the message coefficient of the hub symbol b1 -> a+b1 breaks security
    flipped = M.copy()
    flipped[0, 0] ^= 1
    code = C.SecureCode(base.field, 1, 3, 1, base.node_widths,
                        MatrixFq(base.field, flipped[:1]), MatrixFq(base.field, flipped[1:]))
    assert not _quantum_passes(code, g)
    assert failures > 0


# criterion 9 ------------------------------------------------------------------


def _random_graph(rng):
    """Valid graph on at most 6 nodes: an antichain of sets, relabelled onto their union."""
    N = int(rng.integers(2, 7))
    drawn = set()
    for _ in range(int(rng.integers(1, 5))):
        size = int(rng.integers(1, N + 1))
        drawn.add(frozenset(int(x) for x in rng.choice(N, size, replace=False)))
    sets = [s for s in drawn if not any(t < s for t in drawn)]
    nodes = sorted(set().union(*sets))
    rename = {v: i + 1 for i, v in enumerate(nodes)}
    lambdas = [F(int(rng.integers(1, 5)), int(rng.integers(1, 4))) for _ in nodes]
    return G.make_graph(lambdas, sorted(sorted(rename[v] for v in s) for s in sets))


def test_criterion_09_feasibility_dichotomy():
    rng = np.random.default_rng(9)
    seen = {True: 0, False: 0}
    for _ in range(200):
        g = _random_graph(rng)
        feasible = G.is_feasible(g).feasible
        seen[feasible] += 1
        if feasible:
            code = C.construct_feasibility(g)
            assert C.verify_code(code, g).passed
            assert C.fits_graph(code, g)
        else:
            with pytest.raises(Exception):
                C.construct_feasibility(g)
            assert G.capacity_upper_bound(g).value == 0
    assert seen[True] > 20 and seen[False] > 20


# criterion 10 -----------------------------------------------------------------


MAXIMAL = (
    [(f"M{2 * K - 1}{K}", G.mds_graph(2 * K - 1, K)) for K in range(2, 5)]
    + [(f"W{N}", G.wheel_graph(N)) for N in range(4, 9)]
    + [("fano", G.fano_graph()), ("intersection-3-2", G.intersection_graph(3, 2))]
)
NOT_MAXIMAL = (
    [(f"M{N}{K}", G.mds_graph(N, K)) for N, K in MDS_PARAMS if 2 * K - N > 1]
    + [("intersection-4-2", G.intersection_graph(4, 2)), ("intersection-5-3", G.intersection_graph(5, 3))]
)


@pytest.mark.parametrize("name,g", MAXIMAL, ids=[n for n, _ in MAXIMAL])
def test_criterion_10_strongly_maximal(name, g):
    r = G.is_strongly_maximal(g)
    assert r.strongly_maximal and r.witness is None


@pytest.mark.parametrize("name,g", NOT_MAXIMAL, ids=[n for n, _ in NOT_MAXIMAL])
def test_criterion_10_not_maximal(name, g):
    r = G.is_strongly_maximal(g)
    assert not r.strongly_maximal
    assert r.witness is not None and G.violates_maximality(g, r.witness)


# criterion 11 -----------------------------------------------------------------


def _criteria_graphs():
    gs = [G.mds_graph(N, K) for N, K in MDS_PARAMS]
    gs.append(G.mds_graph(4, 3, [1, 2, 3, 4]))
    gs += [G.wheel_graph(4, [a, b, b, b]) for a, b in W4_GRID]
    gs += [G.wheel_graph(N) for N in range(4, 9)]
    gs += [G.wheel_graph(5, lams) for lams in W5_SAMPLES]
    gs += [G.fano_graph()] + [G.intersection_graph(d, m) for d, m in INTERSECTION_PARAMS]
    rng = np.random.default_rng(9)
    gs += [_random_graph(rng) for _ in range(200)]
    return gs


def _plans():
    out = [P.mds_nonuniform_plan([1, 2, 3, 4], 4, 3)]
    out += [P.wheel_plan([a, b, b, b]) for a, b in W4_GRID]
    out += [P.wheel_plan([1] * N) for N in range(4, 9)]
    out += [P.wheel_plan(lams) for lams in W5_SAMPLES]
    out += [P.mds_plan_for_graph(G.mds_graph(N, K)) for N, K in MDS_PARAMS if N <= 5]
    return out


def test_criterion_11_certificates_from_witness():
    for g in _criteria_graphs():
        cert = G.capacity_upper_bound(g)
        doc = json.loads(json.dumps(cert.to_json()))
        graph_doc = json.loads(json.dumps(g.to_json()))
        again = G.evaluate_certificate(G.validate_graph(graph_doc), G.BoundCertificate.from_json(doc))
        assert again == G.parse_rational(doc["value"])
        if len(g.decoding_sets) >= 2 and g.N <= 8:
            w = G.wheel_bound_search(g)
            if w is not None:
                wd = json.loads(json.dumps(w.to_json()))
                assert G.evaluate_certificate(g, G.BoundCertificate.from_json(wd)) == w.value


def test_criterion_11_plans_from_json():
    for plan in _plans():
        doc = json.loads(json.dumps(plan.to_json()))
        back = P.AchievabilityPlan.from_json(doc)
        assert P.validate_plan(back) == []
        assert back.rate == G.parse_rational(doc["rate"])
        assert {str(k): v for k, v in back.per_node_usage.items()} == doc["usage"]
