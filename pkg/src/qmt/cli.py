"""The ``qmt`` command line.

Exit codes: 0 success, 1 bad input, 2 broken internal invariant (including
an oracle disagreement).  Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import coevents as ce
from . import generators, oracle, topos
from .errors import InputError, InternalError, OracleMismatch, QMTError
from .grainings import Partition, build_poset, poset_dot, sub_poset
from .io import EXAMPLES, example, parse
from .measure import kolmogorov_violation, psd_diagnostic, quantum_sum_rule_check
from .valuations import cl, format_valuation, homs, pooled

VALUATION_SETS = {"vd": "V_D", "vc": "V_C", "vpd": "V_PD", "vpdc": "V_PD-preclusive"}
POSETS = {"bd": "D", "bpd": "PD", "bo": "O", "be": "E"}


def _num(x) -> str:
    return str(x)


def _report(argv, tf, flags, result, diagnostics=None) -> dict:
    return {
        "command": list(argv),
        "fingerprint": tf.fingerprint() if tf is not None else None,
        "flags": flags,
        "result": result,
        "diagnostics": diagnostics or {},
    }


def _parse_partition(text: str, labels) -> Partition:
    """``"a|b,c"``: blocks separated by ``|``, labels by ``,``."""
    blocks = [[x.strip() for x in block.split(",") if x.strip()] for block in text.split("|")]
    return Partition.from_labels(labels, blocks)


def cmd_check(args, tf):
    t = tf.theory
    witness = kolmogorov_violation(t)
    violations = quantum_sum_rule_check(t)
    result = {
        "histories": list(t.labels),
        "mode": t.mode,
        "measure": {t.fmt(A): _num(t.mu(A)) for A in range(t.full + 1)},
        "null_events": [t.fmt(A) for A in t.null_events()],
        "kolmogorov": witness is None,
        "kolmogorov_witness": None if witness is None else [t.fmt(A) for A in witness],
        "quantum_sum_rule_violations": len(violations),
    }
    diag = {"psd": psd_diagnostic(t)}
    if t.mode == "float":
        diag["tolerance"] = f"zero tests use |x| <= {t.eps}"
    if violations:
        raise InternalError("quantum sum rule fails for a decoherence-matrix theory",
                            witness=[t.fmt(A) for A in violations[0]])
    return result, diag


def _tags(poset, i, designated):
    out = []
    if poset.decoherent[i]:
        out.append("D")
    if poset.separable[i]:
        out.append("P")
    if poset.decoherent[i] and poset.separable[i]:
        out.append("PD")
    for tag, members in designated.items():
        if members is not None and poset.elements[i] in members:
            out.append(tag)
    return out


def cmd_partitions(args, tf):
    t = tf.theory
    poset = build_poset(t)
    designated = {tag: tf.designated(tag, poset) for tag in ("O", "E")}
    tags = {tag: sub_poset(poset, tag) for tag in ("D", "P", "PD")}
    chosen = None
    if args.tag:
        chosen = tags[args.tag.upper()].members
    rows = []
    for i, p in enumerate(poset.elements):
        if chosen is not None and p not in chosen:
            continue
        rows.append({"partition": p.format(t.labels), "tags": _tags(poset, i, designated)})
    result = {
        "count": len(rows),
        "total": len(poset),
        "sizes": {f"B_{k}": len(v) for k, v in tags.items()},
        "partitions": rows,
    }
    if args.dot:
        Path(args.dot).write_text(poset_dot(poset, chosen), encoding="utf-8")
        result["dot"] = args.dot
    return result, {}


def cmd_coevents(args, tf):
    t = tf.theory
    poset = build_poset(t)
    if args.scheme in ("m", "cons-m"):
        res = ce.SCHEMES[args.scheme](t, args.mode, poset)
    else:
        res = ce.SCHEMES[args.scheme](t, args.reading, poset)
    rows = []
    for c in res.coevents:
        rows.append({
            "dual": t.fmt(c.dual),
            "preclusive": ce.is_preclusive(t, c),
            "classical_on": {p.format(t.labels): v for p, v in zip(res.b_d, res.classicality[c.dual])},
        })
    result = {"scheme": res.name, "coevents": rows, "b_d": [p.format(t.labels) for p in res.b_d]}
    diag = {"empty_scheme": res.empty}
    flags = {"mode": res.mode, "reading": res.reading}
    return result, diag, flags


def cmd_valuations(args, tf):
    t = tf.theory
    kind = VALUATION_SETS[args.set]
    if args.partition:
        p = _parse_partition(args.partition, t.labels)
        preclusive_only = kind in ("V_C", "V_PD-preclusive")
        members = cl(t, p) if preclusive_only else homs(p)
    else:
        members = list(pooled(t, kind))
    rows = []
    for phi in members:
        keep = {v.block for v in cl(t, phi.partition)}
        rows.append({
            "valuation": format_valuation(phi, t.labels),
            "partition": phi.partition.format(t.labels),
            "block": t.fmt(phi.block),
            "preclusive": phi.block in keep,
            "truth_table": {t.fmt(B): v for B, v in phi.truth_table().items()},
        })
    return {"set": kind, "count": len(rows), "valuations": rows}, {}


def _poset_members(code, tf, poset):
    tag = POSETS[code]
    if tag in ("O", "E"):
        members = tf.designated(tag, poset)
        if members is None:
            key = "observable" if tag == "O" else "experiment"
            raise InputError(f"--poset {code} needs an {key!r} list in the theory file")
        return members.members
    return sub_poset(poset, tag).members


TABLE_LIMIT = 64


def cmd_topos(args, tf):
    t = tf.theory
    poset = build_poset(t)
    members = _poset_members(args.poset, tf, poset)
    if args.subobject == "literal":
        Q = None
    elif args.subobject.startswith("q="):
        code = args.subobject[2:]
        if code not in POSETS:
            raise InputError(f"unknown generator poset {code!r}; use one of {', '.join(POSETS)}")
        Q = _poset_members(code, tf, poset)
    else:
        raise InputError("--subobject is 'literal' or 'q=<poset>'")
    emb = topos.h_map(t, members, Q)
    P = emb.poset
    F = emb.subobject.parent
    laws = {
        "functor": F.law_violations(),
        "subobject": emb.subobject.violations(),
        "characteristic": topos.characteristic_violations(F, emb.subobject),
        "heyting": emb.algebra.violations(),
    }
    if any(laws.values()):
        raise InternalError("topos laws violated", **{k: v[:5] for k, v in laws.items()})

    def upper(mask):
        return [p.format(t.labels) for p in P.members(mask)]

    alg = emb.algebra
    algebra = {
        "size": len(alg),
        "carrier": [upper(m) for m in alg.carrier],
        "top": upper(alg.top) if alg.top is not None else None,
        "bottom": upper(alg.bottom) if alg.bottom is not None else None,
        "ambient_divergences": len(alg.divergences),
    }
    diag = {"degenerate": emb.degenerate, "injective": emb.injective}
    if len(alg) <= TABLE_LIMIT:
        pos = {m: k for k, m in enumerate(alg.carrier)}
        algebra["meet"] = [[pos[a & b] for b in alg.carrier] for a in alg.carrier]
        algebra["join"] = [[pos[a | b] for b in alg.carrier] for a in alg.carrier]
        algebra["implies"] = [[pos[alg.implies(a, b)] for b in alg.carrier] for a in alg.carrier]
    else:
        diag["tables_omitted"] = f"carrier has {len(alg)} elements (> {TABLE_LIMIT})"
    result = {
        "elements": [p.format(t.labels) for p in P.elements],
        "dot": P.to_dot(lambda p: p.format(t.labels)),
        "global_elements": [
            {"valuation": format_valuation(phi, t.labels), "upper_set": upper(emb.images[phi].mask)}
            for phi in emb.valuations
        ],
        "collisions": [
            {"upper_set": upper(m), "valuations": [format_valuation(phi, t.labels) for phi in group]}
            for m, group in emb.collisions()
        ],
        "algebra": algebra,
    }
    if args.dot:
        Path(args.dot).write_text(result["dot"], encoding="utf-8")
    return result, diag


def cmd_oracle(args, tf):
    theories = []
    if tf is not None:
        theories.append(("file", tf.theory))
    if args.random:
        for k, t in enumerate(generators.suite(args.random, seed=args.seed, max_n=args.max_n)):
            theories.append((f"seed={args.seed}#{k}", t))
    if not theories:
        raise InputError("give a theory file or --random N")
    diffs = {}
    for name, t in theories:
        d = oracle.full_diff(t)
        bad = {k: v for k, v in d.items() if v}
        if bad:
            diffs[name] = bad
    result = {"theories": len(theories), "seed": args.seed if args.random else None, "diffs": diffs}
    return result, {}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")

    parser = argparse.ArgumentParser(prog="qmt", parents=[common],
                                     description="Quantum measure theory and consistent-histories valuations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a theory and test the sum rules")
    p.add_argument("theory")

    p = sub.add_parser("partitions", parents=[common], help="the graining poset with D/P/PD tags")
    p.add_argument("theory")
    p.add_argument("--tag", choices=["d", "p", "pd"])
    p.add_argument("--dot", metavar="OUT")

    p = sub.add_parser("coevents", parents=[common], help="coevent schemes")
    p.add_argument("theory")
    p.add_argument("--scheme", choices=list(ce.SCHEMES), required=True)
    p.add_argument("--mode", choices=list(ce.MODES), default="primitive")
    p.add_argument("--reading", choices=list(ce.READINGS), default="literal")

    p = sub.add_parser("valuations", parents=[common], help="pooled homomorphic valuations")
    p.add_argument("theory")
    p.add_argument("--set", choices=list(VALUATION_SETS), default="vd")
    p.add_argument("--partition", metavar="BLOCKS", help='one partition, e.g. "a|b,c"')

    p = sub.add_parser("topos", parents=[common], help="varying-set embedding into a Heyting algebra")
    p.add_argument("theory")
    p.add_argument("--poset", choices=list(POSETS), default="bd")
    p.add_argument("--subobject", default="literal", help="literal or q=<poset>")
    p.add_argument("--dot", metavar="OUT")

    p = sub.add_parser("oracle", parents=[common], help="diff fast paths against naive recomputation")
    p.add_argument("theory", nargs="?")
    p.add_argument("--random", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=4)

    p = sub.add_parser("examples", parents=[common], help="write an example theory file")
    p.add_argument("name", choices=list(EXAMPLES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("-o", "--output")
    return parser


COMMANDS = {
    "check": cmd_check,
    "partitions": cmd_partitions,
    "coevents": cmd_coevents,
    "valuations": cmd_valuations,
    "topos": cmd_topos,
    "oracle": cmd_oracle,
}


def _text(value, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and v:
                sub_lines = _text(v, indent + 1)
                lines.append(f"{pad}- " + sub_lines[0].lstrip())
                lines += sub_lines[1:]
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(value))
    return lines


def _scalar(v) -> str:
    if isinstance(v, str) and "\n" in v:
        return "|\n" + v
    if v == [] or v == {}:
        return "[]" if v == [] else "{}"
    return json.dumps(v) if not isinstance(v, str) else v


def run(argv) -> tuple[int, str, str]:
    """Execute a command line; returns ``(exit_code, stdout, stderr)``."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    try:
        if args.command == "examples":
            tf = example(args.name, seed=args.seed, n=args.n)
            text = tf.dumps()
            if args.output:
                Path(args.output).write_text(text, encoding="utf-8")
                return 0, "", ""
            return 0, text, ""
        tf = parse(args.theory) if getattr(args, "theory", None) else None
        out = COMMANDS[args.command](args, tf)
        result, diag = out[0], out[1]
        flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "theory", "json")}
        if len(out) > 2:
            flags.update(out[2])
        report = _report(argv, tf, flags, result, diag)
        if args.json:
            stdout = json.dumps(report, indent=2, sort_keys=True) + "\n"
        else:
            stdout = "\n".join(_text(report)) + "\n"
        if args.command == "oracle" and result["diffs"]:
            first = next(iter(result["diffs"].items()))
            err = OracleMismatch("fast path disagrees with the naive oracle", theory=first[0], diff=first[1])
            return 2, stdout, json.dumps(err.to_dict(), sort_keys=True) + "\n"
        return 0, stdout, ""
    except QMTError as exc:
        code = 2 if isinstance(exc, InternalError) else 1
        return code, "", json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n"


def main(argv=None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
