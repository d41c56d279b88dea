"""Command-line front end: run computations, verify constructions, manage facts.

Exit codes: 0 = proved/ok, 1 = refuted (witness emitted) or failed check,
2 = budget exhausted, 3 = usage error.  Every verb is deterministic.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import catalog, constructions, search, subsum
from .group import AbelianGroup, parse_group_spec
from .sequence import Sequence, write_sequence
from .search import (
    Certificate,
    SearchConfig,
    STATUS_EXHAUSTED,
    STATUS_PROVED,
    STATUS_REFUTED,
    TOOL_VERSION,
    status_exit_code,
)

USAGE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def cache_dir() -> Path:
    env = os.environ.get("ZEROSUM_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "zerosum"


def _cache_key(verb: str, group_spec: str, cfg: SearchConfig, extra: str = "") -> str:
    blob = "|".join(
        [
            TOOL_VERSION,
            verb,
            group_spec,
            str(cfg.node_budget),
            str(cfg.time_budget),
            cfg.symmetry_level,
            extra,
        ]
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _cache_read(key: str) -> Certificate | None:
    path = cache_dir() / f"{key}.json"
    if not path.exists():
        return None
    try:
        cert = Certificate.from_json(path.read_text(encoding="utf-8"))
    except (ValueError, KeyError, json.JSONDecodeError):
        return None
    return cert


def _cache_write(key: str, cert: Certificate) -> None:
    d = cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{key}.json").write_text(cert.to_json(), encoding="utf-8")
    _record_fact(cert)


def _record_fact(cert: Certificate) -> None:
    fact = catalog.fact_from_certificate(cert)
    if fact is None:
        return
    path = cache_dir() / "facts.jsonl"
    store = catalog.FactStore.load(path) if path.exists() else catalog.FactStore()
    try:
        store.add(fact)
    except catalog.FactConflictError:
        raise
    store.save(path)


def _config_from_args(args) -> SearchConfig:
    return SearchConfig(
        node_budget=getattr(args, "budget_nodes", 0) or 0,
        time_budget=getattr(args, "budget_secs", 0.0) or 0.0,
        symmetry_level=getattr(args, "symmetry", None) or "coord_perms+scalar",
        parallel_width=getattr(args, "width", None) or 1,
    )


def _emit(cert: Certificate, args) -> None:
    if getattr(args, "json", None):
        Path(args.json).write_text(cert.to_json(), encoding="utf-8")
    if cert.witness is not None and cert.status == STATUS_REFUTED:
        print("witness:")
        print(write_sequence(cert.witness), end="")


def _known_values(group: AbelianGroup) -> dict[str, int]:
    """Catalog-backed invariant values for the group, if any."""
    out: dict[str, int] = {}
    for fact in catalog.instantiate_for(group.moduli):
        if fact.kind == catalog.KIND_INVARIANT:
            out.setdefault(fact.detail[0], fact.detail[1])
    return out


# -- verbs ----------------------------------------------------------------------


def _cmd_invariant(args) -> int:
    group = parse_group_spec(args.group)
    cfg = _config_from_args(args)
    key = _cache_key("invariant", group.spec(), cfg, args.kind)
    cert = None if args.no_cache else _cache_read(key)
    cached = cert is not None
    if cert is None:
        value, cert = search.invariant_value(group, args.kind, cfg)
        if not args.no_cache:
            _cache_write(key, cert)
    value = cert.claim["value"]
    suffix = " (cached)" if cached else f" nodes={cert.nodes} time={cert.wall_time_s:.1f}s"
    qualifier = "" if cert.status == STATUS_PROVED else " (lower bound)"
    print(f"{args.kind}({group.spec()}) = {value}{qualifier} [{cert.status}]{suffix}")
    known = _known_values(group).get(args.kind)
    if known is not None and cert.status == STATUS_PROVED and known != value:
        print(f"WARNING: search disagrees with the cataloged value {known}")
        return 1
    _emit(cert, args)
    return status_exit_code(cert.status)


def _cmd_c0(args) -> int:
    group = parse_group_spec(args.group)
    cfg = _config_from_args(args)
    known = _known_values(group)
    d_value = known.get("D")
    eta_value = known.get("eta")
    if d_value is None:
        d_value, d_cert = search.invariant_value(group, "D", cfg)
        if d_cert.status != STATUS_PROVED:
            print("could not establish D(G) within budget")
            return 2
    if eta_value is None:
        eta_value, e_cert = search.invariant_value(group, "eta", cfg)
        if e_cert.status != STATUS_PROVED:
            print("could not establish eta(G) within budget")
            return 2
    lo, hi = d_value + 1, eta_value - 1
    if args.t is not None:
        cert = search.c0_contains(group, args.t, cfg, d_value=d_value, eta_value=eta_value)
        member = cert.claim["member"]
        verdict = {True: "in C0", False: "NOT in C0", None: "undecided"}[member]
        print(
            f"t={args.t} {verdict} ({group.spec()}) [{cert.status}] nodes={cert.nodes}"
        )
        _emit(cert, args)
        return status_exit_code(cert.status)
    members, certs = search.compute_c0(group, cfg, d_value=d_value, eta_value=eta_value)
    if lo > hi:
        print(f"C0({group.spec()}) = {{}} (empty range: D+1={lo} > eta-1={hi})")
        return 0
    print(f"C0({group.spec()}) = {{{', '.join(map(str, members))}}}  range [{lo}, {hi}]")
    for t in sorted(certs):
        cert = certs[t]
        extra = f" witness length {cert.witness.length}" if cert.witness else ""
        print(f"  t={t}: {cert.status} nodes={cert.nodes}{extra}")
    if args.json:
        payload = {
            "format": "zerosum.c0/1",
            "tool_version": TOOL_VERSION,
            "group": group.spec(),
            "range": [lo, hi],
            "members": members,
            "certificates": {str(t): certs[t].payload() for t in sorted(certs)},
        }
        Path(args.json).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    statuses = {cert.status for cert in certs.values()}
    if STATUS_EXHAUSTED in statuses:
        return 2
    return 0


def _cmd_enumerate(args) -> int:
    if args.kind != "short-free":
        print(f"unsupported enumeration kind {args.kind!r}", file=sys.stderr)
        return USAGE_ERROR
    group = parse_group_spec(args.group)
    cfg = _config_from_args(args)
    report = search.enumerate_short_free(group, args.len, cfg, collect=bool(args.dump))
    print(
        f"short-free sequences of length {args.len} over {group.spec()}: "
        f"{report.count} representative(s) [{report.status}] nodes={report.nodes}"
    )
    if args.dump:
        text = "\n".join(write_sequence(s) for s in report.items)
        Path(args.dump).write_text(text, encoding="utf-8")
    return 0 if report.status == STATUS_PROVED else 2


def _cmd_check_property(args) -> int:
    group = parse_group_spec(args.group)
    cfg = _config_from_args(args)
    known = _known_values(group)
    if args.property == "C":
        cert = search.check_property_C(group, cfg, eta_value=known.get("eta"))
    elif args.property == "D":
        cert = search.check_property_D(group, cfg, s_value=known.get("s"))
    else:
        if args.c is None:
            print("check-property D0 requires --c", file=sys.stderr)
            return USAGE_ERROR
        cert = search.check_property_D0(group, args.c, cfg)
    holds = cert.claim["holds"]
    verdict = {True: "holds", False: "fails", None: "undecided"}[holds]
    c_text = f" (c = {cert.claim['c']})" if cert.claim.get("c") is not None else ""
    print(
        f"Property {args.property}{c_text} {verdict} for {group.spec()} "
        f"[{cert.status}] nodes={cert.nodes}"
    )
    _emit(cert, args)
    return status_exit_code(cert.status)


def _construct_outputs(args) -> tuple[list[Sequence], dict]:
    name = args.name
    n, r = args.n, args.r
    if name == "span":
        return [constructions.build_span_sequence(n, r)], {"n": n, "r": r}
    if name == "span-merge":
        if args.axis is None or args.m is None:
            raise ValueError("span-merge requires --axis and --m")
        return (
            [constructions.build_span_merged(n, r, args.axis, args.m)],
            {"n": n, "r": r, "axis": args.axis, "m": args.m},
        )
    if name == "cap3":
        return [constructions.ternary_cap_rank3()], {}
    if name == "cap4":
        return [constructions.ternary_cap_rank4()], {}
    if name == "cap4-trims":
        return [w for _, w in constructions.excluded_window_witnesses()], {}
    fam = constructions.build_family(name, n, r)
    return list(fam.members()), {"n": n, "r": r}


def _verify_construction(args, outputs: list[Sequence]) -> None:
    name = args.name
    if name == "span":
        seq = outputs[0]
        n, r = args.n, args.r
        assert seq.length == (2**r - 1) * (n - 1)
        alpha = constructions.alpha_r(n, r).value
        diag = seq.group.element([1] * r)
        assert seq.sum == alpha * diag
        assert subsum.find_short_zero_sum(seq) is None
    elif name == "span-merge":
        seq = outputs[0]
        n, r = args.n, args.r
        assert seq.length == (2**r - 1) * (n - 1) - args.m + 1
        assert subsum.find_short_zero_sum(seq) is None
    elif name == "cap3":
        seq = outputs[0]
        assert seq.length == 8 and seq.is_squarefree()
        assert subsum.find_short_zero_sum(seq) is None
    elif name == "cap4":
        seq = outputs[0]
        assert seq.length == 20 and seq.is_squarefree()
        assert subsum.find_zero_sum_exact_length(seq, 3) is None
    elif name == "cap4-trims":
        lengths = sorted(s.length for s in outputs)
        assert lengths == list(range(30, 37))
        for seq in outputs:
            assert seq.is_zero_sum()
            assert subsum.find_short_zero_sum(seq) is None
    else:
        constructions.verify_family(constructions.build_family(name, args.n, args.r))


def _cmd_construct(args) -> int:
    outputs, params = _construct_outputs(args)
    if args.verify:
        _verify_construction(args, outputs)
        cfg = _config_from_args(args)
        cert = Certificate(
            claim={
                "type": "construction",
                "name": args.name,
                "params": params,
                "members": len(outputs),
                "verified": True,
            },
            status=STATUS_PROVED,
            group_spec=outputs[0].group.spec(),
            witness=None,
            nodes=0,
            symmetry_level="none",
            config=cfg,
        )
        print(f"construct {args.name}: {len(outputs)} member(s), all claims verified")
        _emit(cert, args)
    text = "\n".join(write_sequence(s) for s in outputs)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    elif not args.verify:
        print(text, end="")
    else:
        lengths = sorted({s.length for s in outputs})
        print(f"lengths: {lengths}")
    return 0


def _witness_valid(cert: Certificate) -> bool:
    claim = cert.claim
    witness = cert.witness
    if witness is None:
        return False
    if claim["type"] == "c0_membership":
        t = claim["t"]
        return (
            witness.length == t
            and witness.is_zero_sum()
            and subsum.find_short_zero_sum(witness) is None
        )
    if claim["type"] == "invariant":
        kind = claim["invariant"]
        if witness.length != claim["extremal_length"]:
            return False
        if kind in ("f", "g") and not witness.is_squarefree():
            return False
        if kind == "D":
            return subsum.find_nonempty_zero_sum(witness) is None
        if kind in ("eta", "f"):
            return subsum.find_short_zero_sum(witness) is None
        exp = witness.group.exponent
        return subsum.find_zero_sum_exact_length(witness, exp) is None
    if claim["type"] == "property":
        n = witness.group.exponent
        if claim["property"] == "C":
            return subsum.find_short_zero_sum(witness) is None
        return subsum.find_zero_sum_exact_length(witness, n) is None
    return False


def _cmd_certify(args) -> int:
    text = Path(args.certificate).read_text(encoding="utf-8")
    cert = Certificate.from_json(text)
    if cert.status == STATUS_REFUTED:
        if cert.witness is None:
            print("refuted certificate carries no sequence witness; nothing to re-check")
            return 0
        ok = _witness_valid(cert)
        print(f"witness re-validation: {'VALID' if ok else 'INVALID'}")
        return 0 if ok else 1
    if cert.status == STATUS_PROVED:
        claim = cert.claim
        group = parse_group_spec(cert.group_spec)
        cfg = cert.config
        if claim["type"] == "invariant":
            _, fresh = search.invariant_value(group, claim["invariant"], cfg)
        elif claim["type"] == "c0_membership":
            fresh = search.c0_contains(group, claim["t"], cfg)
        elif claim["type"] == "property":
            prop = claim["property"]
            if prop == "C":
                fresh = search.check_property_C(group, cfg)
            elif prop == "D":
                fresh = search.check_property_D(group, cfg)
            else:
                fresh = search.check_property_D0(group, claim["c"], cfg)
        else:
            print(f"cannot replay claims of type {claim['type']!r}")
            return 1
        same = fresh.to_json() == cert.to_json()
        print(f"replay: {'IDENTICAL' if same else 'MISMATCH'}")
        return 0 if same else 1
    print("budget-exhausted certificate: nothing to validate")
    return 2


def _cmd_facts(args) -> int:
    store = catalog.FactStore()
    store.add_all(catalog.builtin_facts())
    if args.group:
        group = parse_group_spec(args.group)
        store.add_all(catalog.instantiate_for(group.moduli))
    path = cache_dir() / "facts.jsonl"
    if path.exists() and not args.no_cache:
        for fact in catalog.FactStore.load(path):
            store.add(fact)
    if args.infer:
        derived = catalog.infer(store)
        print(f"derived {len(derived)} new fact(s)")
    report = catalog.consistency_check(store)
    shown = 0
    for fid in sorted(store.facts):
        fact = store.facts[fid]
        if args.provenance and fact.provenance.source != args.provenance:
            continue
        subject = "C" + "xC".join(map(str, fact.subject)) if fact.subject else "?"
        print(
            f"{fid}  {subject:>14}  {fact.kind:<18} {str(fact.detail):<24} "
            f"{fact.provenance.source}:{fact.provenance.reference}"
        )
        shown += 1
    print(f"{shown} fact(s); consistency: {'ok' if report.ok else 'VIOLATIONS'}")
    for v in report.violations:
        print(f"  violation: {v}")
    return 0 if report.ok else 1


# -- repro tables -----------------------------------------------------------------


def _row(name: str, ok: bool, detail: str, t0: float) -> bool:
    status = "pass" if ok else "FAIL"
    print(f"{name:<28} {status}  {detail}  ({time.monotonic() - t0:.1f}s)")
    return ok


def _repro_thmA(args, cfg) -> bool:
    t0 = time.monotonic()
    group = parse_group_spec("C3^3")
    d, _ = search.invariant_value(group, "D", cfg)
    eta, _ = search.invariant_value(group, "eta", cfg)
    cert = search.c0_contains(group, 14, cfg, d_value=d, eta_value=eta)
    return _row("length-14 membership", cert.status == STATUS_PROVED, f"t=14 {cert.status}", t0)


def _repro_thmB(args, cfg) -> bool:
    q = args.q or 3
    t0 = time.monotonic()
    group = parse_group_spec(f"C{q}^2")
    d, d_cert = search.invariant_value(group, "D", cfg)
    eta, e_cert = search.invariant_value(group, "eta", cfg)
    if d_cert.status != STATUS_PROVED or e_cert.status != STATUS_PROVED:
        return _row(f"square window q={q}", False, "invariants not established", t0)
    window = range(2 * q, 3 * q - 1)
    targets = [t for t in window if d + 1 <= t <= eta - 1]
    members, certs = search.compute_c0_at(group, targets, cfg)
    ok = all(certs[t].status == STATUS_PROVED for t in targets)
    covered = [t for t in window if t >= eta]
    detail = f"[{2*q},{3*q-2}]: {len(targets)} searched, {len(covered)} at/above eta"
    return _row(f"square window q={q}", ok, detail, t0)


def _repro_thm13(args, cfg) -> bool:
    spec = args.group or "C2^3"
    t0 = time.monotonic()
    group = parse_group_spec(spec)
    predicted = _predicted_c0(group)
    if predicted is None:
        return _row(f"C0({spec})", False, "no cataloged determination to compare", t0)
    known = _known_values(group)
    members, _ = search.compute_c0(
        group, cfg, d_value=known.get("D"), eta_value=known.get("eta")
    )
    ok = members == predicted
    return _row(f"C0({spec})", ok, f"search {members} vs predicted {predicted}", t0)


def _predicted_c0(group: AbelianGroup) -> list[int] | None:
    facts = catalog.instantiate_for(group.moduli)
    values = {f.detail[0]: f.detail[1] for f in facts if f.kind == catalog.KIND_INVARIANT}
    for f in facts:
        if f.kind == catalog.KIND_EQUALS:
            return sorted(f.detail)
        if f.kind == catalog.KIND_FULL_RANGE and "D" in values and "eta" in values:
            return list(range(values["D"] + 1, values["eta"]))
    return None


def _repro_lemma47(args, cfg) -> bool:
    t0 = time.monotonic()
    group = parse_group_spec("C3^3")
    report = search.enumerate_short_free(
        group, 16, cfg, checks=("sum_zero",), per_element=2
    )
    ok = report.status == STATUS_PROVED and not report.violations["sum_zero"]
    return _row(
        "extremal sums vanish",
        ok,
        f"{report.count} representatives, {len(report.violations['sum_zero'])} nonzero",
        t0,
    )


def _repro_prop410(args, cfg) -> bool:
    t0 = time.monotonic()
    group = parse_group_spec("C3^4")
    witnesses = constructions.excluded_window_witnesses()
    ok = sorted(t for t, _ in witnesses) == list(range(30, 37))
    for t, seq in witnesses:
        ok = ok and seq.length == t and seq.is_zero_sum()
        ok = ok and subsum.find_short_zero_sum(seq) is None
    _, certs = search.compute_c0_at(group, list(range(30, 37)), cfg)
    ok = ok and all(c.status == STATUS_REFUTED for c in certs.values())
    return _row("excluded window [30,36]", ok, "7 witnesses verified", t0)


def _repro_propertyC(args, cfg) -> bool:
    spec = args.group or "C3^3"
    t0 = time.monotonic()
    group = parse_group_spec(spec)
    cert = search.check_property_C(group, cfg, eta_value=_known_values(group).get("eta"))
    return _row(f"property C ({spec})", cert.status == STATUS_PROVED, cert.status, t0)


_REPRO_TABLES = {
    "thmA": _repro_thmA,
    "thmB": _repro_thmB,
    "thm13": _repro_thm13,
    "lemma47": _repro_lemma47,
    "prop410": _repro_prop410,
    "propertyC": _repro_propertyC,
}


def _cmd_repro(args) -> int:
    cfg = _config_from_args(args)
    ok = _REPRO_TABLES[args.table](args, cfg)
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------------


def _add_common(p) -> None:
    p.add_argument("--budget-nodes", type=int, default=0, help="node budget per subtree")
    p.add_argument("--budget-secs", type=float, default=0.0, help="time budget per subtree")
    p.add_argument("--symmetry", choices=(
        "none", "translations", "coord_perms", "scalar", "coord_perms+scalar", "full_small"
    ), default=None, help="symmetry reduction level")
    p.add_argument("--width", type=int, default=None, help="parallel width (never changes results)")
    p.add_argument("--json", metavar="PATH", help="write the certificate as JSON")
    p.add_argument("--no-cache", action="store_true", help="skip the certificate cache")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zerosum", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("invariant", help="compute D, eta, s, f or g by exhaustive search")
    p.add_argument("group")
    p.add_argument("kind", choices=search.INVARIANT_KINDS)
    _add_common(p)
    p.set_defaults(fn=_cmd_invariant)

    p = sub.add_parser("c0", help="decide C0 membership with certificates")
    p.add_argument("group")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=int, default=None)
    g.add_argument("--all", action="store_true")
    _add_common(p)
    p.set_defaults(fn=_cmd_c0)

    p = sub.add_parser("enumerate", help="enumerate short-free sequences up to symmetry")
    p.add_argument("group")
    p.add_argument("--kind", required=True)
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--dump", metavar="PATH", help="write representatives to a file")
    _add_common(p)
    p.set_defaults(fn=_cmd_enumerate)

    p = sub.add_parser("check-property", help="check Property C, D or D0")
    p.add_argument("group")
    p.add_argument("property", choices=("C", "D", "D0"))
    p.add_argument("--c", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_check_property)

    p = sub.add_parser("construct", help="emit a named construction, optionally verified")
    p.add_argument("name", choices=(
        "span", "span-merge", "cap3", "cap4", "cap4-trims",
        "zero-block", "slide", "pivot", "braid",
        "span-carve-block", "span-carve-axes", "span-carve-axes-x", "span-carve-mixed",
        "lift",
    ))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--axis", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", metavar="PATH")
    _add_common(p)
    p.set_defaults(fn=_cmd_construct)

    p = sub.add_parser("certify", help="re-validate a witness or replay an exhaustive run")
    p.add_argument("certificate")
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("facts", help="list, filter and infer facts")
    p.add_argument("--infer", action="store_true")
    p.add_argument("--provenance", choices=("cited", "paper", "search", "rule"))
    p.add_argument("--group", default=None)
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(fn=_cmd_facts)

    p = sub.add_parser("repro", help="run a named reproduction job")
    p.add_argument("table", choices=sorted(_REPRO_TABLES))
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--group", default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_repro)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
