"""Command line front end.

Every command prints one JSON report to stdout:
``{"command", "inputs_digest", "results", "status"}``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import codes as C
from . import composer as P
from . import graph as G
from . import quantum as Q
from .errors import ParameterError, ParseError, QcapError
from .galois import field_of_order, make_field, smallest_prime_power_at_least

EXIT_HELP = """exit codes:
  0  every requested check passed
  1  a check failed (infeasible graph, failed verification, non-maximal graph)
  2  bad command line
  3  unreadable or malformed input file
  4  graph violates a structural invariant
  5  enumeration limit exceeded
  6  parameters outside the supported range
  7  code invalid for a decoding set (quantum decoder cannot be built)
  8  randomized construction exhausted its retries
  9  code and graph dimensions do not match
  10 any other error

environment:
  QCAP_ORACLE_LIMIT  default enumeration cap for 'code oracle' (default 1048576)
"""


def _read_json(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(raw), raw
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


class _Inputs:
    """Loads files and accumulates the digest of everything read."""

    def __init__(self):
        self.h = hashlib.sha256()

    def load(self, path: str):
        data, raw = _read_json(path)
        self.h.update(hashlib.sha256(raw).digest())
        return data

    def graph(self, path: str) -> G.StorageGraph:
        return G.validate_graph(self.load(path))

    def code(self, path: str) -> C.SecureCode:
        return C.SecureCode.from_json(self.load(path))

    @property
    def digest(self) -> str:
        return self.h.hexdigest()


def _oracle_limit(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("QCAP_ORACLE_LIMIT")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ParameterError(f"QCAP_ORACLE_LIMIT must be an integer, got {env!r}") from exc
    return C.DEFAULT_ORACLE_LIMIT


def _field_from_args(args, default_q: int):
    if args.q is not None:
        if args.p is not None or args.deg is not None:
            raise ParameterError("give either --q or --p/--deg, not both")
        return field_of_order(args.q)
    if args.p is not None:
        return make_field(args.p, args.deg or 1)
    return field_of_order(default_q)


# graph commands --------------------------------------------------------------


def cmd_graph(args, inp: _Inputs):
    g = inp.graph(args.file)
    action = args.action
    if action == "validate":
        return {"valid": True, "nodes": g.N, "decoding_sets": len(g.decoding_sets),
                "warning": g.normalization_warning}, True
    if action == "feasible":
        r = G.is_feasible(g)
        w = [sorted(x) for x in r.witness] if r.witness else None
        return {"feasible": r.feasible, "witness": w}, r.feasible
    if action == "bounds":
        out = {"feasible": G.is_feasible(g).feasible}
        out["intersection"] = G.intersection_bound(g).to_json() if len(g.decoding_sets) >= 2 else None
        wheel = G.wheel_bound_search(g, args.max_nodes) if g.N <= args.max_nodes else None
        out["wheel"] = wheel.to_json() if wheel else None
        out["upper_bound"] = G.capacity_upper_bound(g, args.max_nodes).to_json()
        return out, True
    if action == "capacity":
        return G.capacity_small(g).to_json(), True
    if action == "maximal":
        r = G.is_strongly_maximal(g, args.max_nodes_maximal)
        return r.to_json(), r.strongly_maximal
    raise AssertionError(action)  # pragma: no cover


# code commands ---------------------------------------------------------------


def _require(value, flag: str, family: str):
    if value is None:
        raise ParameterError(f"--family {family} needs {flag}")
    return value


def _construct(args, inp: _Inputs):
    fam = args.family
    if fam == "mds":
        n = _require(args.n, "--n", fam)
        K = _require(args.k_param, "--k-param", fam)
        f = _field_from_args(args, smallest_prime_power_at_least(n))
        return C.construct_mds_uniform(n, K, f), G.mds_graph(n, K)
    if fam == "wheel":
        n = _require(args.n, "--n", fam)
        v = _require(args.variant, "--variant", fam)
        default = {1: n, 2: 2 if n == 4 else n - 1, 3: 2}.get(v, 2)
        f = _field_from_args(args, smallest_prime_power_at_least(default))
        return C.construct_wheel_component(n, v, f), G.wheel_graph(n)
    if fam == "fano":
        return C.construct_fano(_field_from_args(args, 2)), G.fano_graph()
    if fam == "intersection":
        d = _require(args.delta, "--delta", fam)
        m = _require(args.m, "--m", fam)
        seed = _require(args.seed, "--seed", fam)
        f = _field_from_args(args, smallest_prime_power_at_least(C.intersection_field_bound(d, m) + 1))
        return C.construct_intersection(d, m, f, seed, args.max_retries), G.intersection_graph(d, m)
    if fam == "feasibility":
        g = inp.graph(_require(args.graph, "--graph", fam))
        return C.construct_feasibility(g), g
    raise AssertionError(fam)  # pragma: no cover


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def cmd_code(args, inp: _Inputs):
    if args.action == "construct":
        code, g = _construct(args, inp)
        _write_json(args.output, code.to_json())
        if args.graph_out:
            _write_json(args.graph_out, g.to_json())
        report = C.verify_code(code, g)
        return {
            "family": args.family,
            "field": code.field.to_json(),
            "k": code.k,
            "delta": code.delta,
            "kappa": code.kappa,
            "node_widths": list(code.node_widths),
            "rate": G.format_rational(code.rate),
            "verified": report.passed,
            "output": args.output,
        }, report.passed
    g_code = inp.code(args.code)
    g = inp.graph(args.graph)
    if args.action == "verify":
        r = C.verify_code(g_code, g)
        return r.to_json(), r.passed
    if args.action == "oracle":
        results = C.oracle_all(g_code, g, _oracle_limit(args.limit))
        rank = C.verify_code(g_code, g).checks
        rows = []
        for o, rc in zip(results, rank):
            row = o.to_json()
            row["agrees_with_rank"] = o.decoding_ok == rc.decode_ok and o.security_ok == rc.security_ok
            rows.append(row)
        ok = all(o.decoding_ok and o.security_ok for o in results)
        return {"assignments": results[0].assignments if results else 0, "sets": rows}, ok
    raise AssertionError(args.action)  # pragma: no cover


def cmd_quantum(args, inp: _Inputs):
    code = inp.code(args.code)
    g = inp.graph(args.graph)
    limit = args.limit
    rows, ok = [], True
    for e in g.decoding_sets:
        try:
            cert = Q.verify_quantum_recovery(code, g, e, limit)
            row = cert.to_json()
        except QcapError as exc:
            if exc.exit_code != 7:
                raise
            row = {"edge": sorted(e), "recovery": False, "security": None, "support_size": None,
                   "error": str(exc)}
            try:
                row["security"] = Q.verify_quantum_security(code, g, e, limit)
            except QcapError:
                pass
        ok &= bool(row["recovery"]) and bool(row["security"])
        rows.append(row)
    return {"sets": rows}, ok


def cmd_plan(args, inp: _Inputs):
    g = inp.graph(args.file)
    f = field_of_order(args.q) if args.q is not None else None
    if args.kind == "mds":
        plan = P.mds_plan_for_graph(g, f)
    elif args.kind == "wheel":
        plan = P.wheel_plan_for_graph(g, f)
    else:
        plan = P.small_graph_plan(g, f)
    problems = P.validate_plan(plan)
    out = plan.to_json()
    out["problems"] = problems
    return out, not problems


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcap",
        description="Capacity bounds, secure-storage codes and CSS checks for storage graphs.",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--pretty", action="store_true", help="indent the JSON report")
    sub = p.add_subparsers(dest="group", required=True)

    pg = sub.add_parser("graph", help="storage-graph analyses")
    pg.add_argument("action", choices=["validate", "feasible", "bounds", "capacity", "maximal"])
    pg.add_argument("file")
    pg.add_argument("--max-nodes", type=int, default=8, help="node cap for the wheel-bound search")
    pg.add_argument("--max-nodes-maximal", type=int, default=16, help="node cap for the maximality scan")

    pc = sub.add_parser("code", help="construct and verify codes")
    csub = pc.add_subparsers(dest="action", required=True)
    cc = csub.add_parser("construct")
    cc.add_argument("--family", required=True, choices=["mds", "wheel", "fano", "intersection", "feasibility"])
    cc.add_argument("--n", type=int)
    cc.add_argument("--k-param", type=int, dest="k_param")
    cc.add_argument("--variant", type=int)
    cc.add_argument("--delta", type=int)
    cc.add_argument("--m", type=int)
    cc.add_argument("--q", type=int)
    cc.add_argument("--p", type=int)
    cc.add_argument("--deg", type=int)
    cc.add_argument("--seed", type=int)
    cc.add_argument("--max-retries", type=int, default=20)
    cc.add_argument("--graph", help="input graph for --family feasibility")
    cc.add_argument("-o", "--output", required=True)
    cc.add_argument("--graph-out", help="also write the matching graph here")
    for name in ("verify", "oracle"):
        cv = csub.add_parser(name)
        cv.add_argument("code")
        cv.add_argument("graph")
        if name == "oracle":
            cv.add_argument("--limit", type=int)

    pq = sub.add_parser("quantum", help="coset-state checks of the CSS code")
    qsub = pq.add_subparsers(dest="action", required=True)
    qc = qsub.add_parser("check")
    qc.add_argument("code")
    qc.add_argument("graph")
    qc.add_argument("--limit", type=int, default=Q.DEFAULT_SUPPORT_LIMIT)

    pp = sub.add_parser("plan", help="space-sharing plans")
    pp.add_argument("kind", choices=["mds", "wheel", "small"])
    pp.add_argument("file")
    pp.add_argument("--q", type=int, help="field order for the component codes")
    return p


HANDLERS = {"graph": cmd_graph, "code": cmd_code, "quantum": cmd_quantum, "plan": cmd_plan}


def _command_name(args) -> str:
    parts = [args.group]
    for attr in ("action", "kind"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    """Parse argv, execute, and return (report, exit code)."""
    return _execute(build_parser().parse_args(argv))


def _execute(args) -> tuple[dict, int]:
    inp = _Inputs()
    try:
        results, ok = HANDLERS[args.group](args, inp)
        status, code = ("ok", 0) if ok else ("fail", 1)
    except QcapError as exc:
        results = {"error": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "violations"):
            results["violations"] = exc.violations
        status, code = "error", exc.exit_code
    report = {"command": _command_name(args), "inputs_digest": inp.digest, "results": results, "status": status}
    return report, code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    report, code = _execute(args)
    json.dump(report, sys.stdout, sort_keys=True, indent=2 if args.pretty else None)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
