"""Command-line interface: ``cdgraph group|graph|verify|scan``.

Exit codes: 0 clean, 1 when a theorem check fails, 2 on usage, parse,
build or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

from . import graph as gr
from . import verifier as vf
from .classes import conjugacy_classes
from .constructors import InvalidSpec, ParseError, build, builtin_corpus, parse_spec, spec_from_obj
from .permgroup import CapExceeded, center_mask, is_prime
from .verdict import FAILS, HOLDS, INCONCLUSIVE, NOT_APPLICABLE

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SUITE_ALIASES = {
    "thma": "THM-A", "cordiam": "COR-DIAM", "thmb": "THM-B", "discord": "DISC-ORD",
    "discpreg": "DISC-PREG", "props": "PROP-S", "prop25": "PROP-S", "fms": "FMS-EQ",
    "fmseq": "FMS-EQ", "conjc": "CONJ-C",
}

SCAN_CHECKS = ("THM-A", "COR-DIAM", "THM-B", "DISC-PREG", "PROP-S", "FMS-EQ")


class UsageError(Exception):
    pass


def _resolve_spec(text: str):
    """Inline JSON, a path to a JSON file, or a builtin corpus name."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return stripped, None
    corpus = dict(builtin_corpus())
    if stripped in corpus:
        return corpus[stripped], stripped
    try:
        with open(text, encoding="utf-8") as fh:
            return fh.read(), None
    except OSError as exc:
        raise UsageError(f"cannot read spec {text!r}: {exc.strerror}") from None


def _load_group(text: str):
    raw, name = _resolve_spec(text)
    spec = parse_spec(raw) if isinstance(raw, str) else raw
    return build(spec, name=name)


def _prime(value: str) -> int:
    p = int(value)
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{value} is not a prime")
    return p


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _suite(value: str) -> tuple[str, ...]:
    if value.strip().lower() == "all":
        return vf.ALL_CHECKS
    out = []
    for item in value.split(","):
        key = item.strip()
        cid = SUITE_ALIASES.get(key.lower().replace("-", "").replace("_", ""), key.upper())
        if cid not in vf.ALL_CHECKS:
            raise argparse.ArgumentTypeError(f"unknown check {item!r}")
        out.append(cid)
    return tuple(c for c in vf.ALL_CHECKS if c in out)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cdgraph-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# group


def cmd_group(args) -> int:
    G = _load_group(args.spec)
    table = conjugacy_classes(G)
    rows = [{"size": c.size, "rep": c.rep.cycle_string(), "primes": c.primes.sorted(),
             "order": c.order} for c in table]
    report = {"group": vf.group_label(G), "order": G.order, "degree": G.degree,
              "center_order": int(center_mask(G).sum()), "classes": rows}
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
        return EXIT_OK
    print(f"group: {report['group']}")
    print(f"order: {G.order}")
    print(f"degree: {G.degree}")
    print(f"center order: {report['center_order']}")
    print(f"classes: {len(rows)}")
    for r in rows:
        primes = "{" + ",".join(map(str, r["primes"])) + "}"
        print(f"  size={r['size']} order={r['order']} primes={primes} rep={r['rep']}")
    return EXIT_OK


# --------------------------------------------------------------------------
# graph


def cmd_graph(args) -> int:
    G = _load_group(args.spec)
    g = gr.build_graph(conjugacy_classes(G), None if args.ordinary else args.prime)
    d = gr.diameter_json(g)
    print(f"group: {vf.group_label(G)}")
    print(f"mode: {g.mode}")
    for v, c in enumerate(g.classes):
        print(f"  v{v}: size={c.size} rep={c.rep.cycle_string()}")
    for (i, j), label in sorted(g.edges.items()):
        print(f"  v{i} -- v{j} primes={','.join(map(str, label.sorted()))}")
    print(f"{len(g)} vertices, {len(g.edges)} edges, {len(g.components)} components, "
          f"diameter {json.dumps(d).strip(chr(34))}")
    if args.dot:
        _write_atomic(args.dot, gr.to_dot(g, vf.group_label(G)))
    if args.json:
        _write_atomic(args.json, gr.dumps(g))
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def _count(verdicts) -> dict:
    out = {k: 0 for k in (HOLDS, FAILS, INCONCLUSIVE, NOT_APPLICABLE)}
    for v in verdicts:
        out[v.conclusion] += 1
    return out


def cmd_verify(args) -> int:
    G = _load_group(args.spec)
    primes = sorted(G.primes) if args.all_primes else [args.prime]
    checks = args.suite
    verdicts = vf.run_suite(G, primes, [c for c in checks if c in vf.THEOREM_CHECKS], args.budget)
    conj = vf.run_suite(G, primes, [c for c in checks if c in vf.CONJECTURE_CHECKS], args.budget)
    timing = not args.no_timing
    report = {
        "group": vf.group_label(G),
        "verdicts": [v.to_json(timing) for v in verdicts],
        "conjecture": [v.to_json(timing) for v in conj],
    }
    print(json.dumps(report, sort_keys=True, indent=2))
    c = _count(verdicts)
    print(f"{len(verdicts)} verdicts: {c[HOLDS]} holds, {c[FAILS]} fails, "
          f"{c[INCONCLUSIVE]} inconclusive, {c[NOT_APPLICABLE]} not-applicable", file=sys.stderr)
    for v in conj:
        if v.failed:
            print(f"POTENTIAL COUNTEREXAMPLE ({v.check_id}, p={v.prime}): "
                  f"{_dump(v.witnesses['counterexample'])}", file=sys.stderr)
    return EXIT_FAIL if c[FAILS] else EXIT_OK


# --------------------------------------------------------------------------
# scan


def scan_group(name: str, spec_obj: dict, budget: int | None = None) -> list[dict]:
    """One record per prime dividing the group order."""
    G = build(spec_obj, name=name)
    disc = vf.check_disc_ordinary(G, budget)
    records = []
    for p in sorted(G.primes):
        g = vf._graph(G, p)
        verdicts = vf.run_suite(G, [p], SCAN_CHECKS, budget)
        conj = vf.check_conjecture_C(G, p, budget)
        pairs = gr.distance_pairs(g, 3)
        records.append({
            "group": name,
            "spec": spec_obj,
            "order": G.order,
            "prime": p,
            "vertices": len(g),
            "sizes": sorted(g.sizes),
            "components": len(g.components),
            "diameter": gr.diameter_json(g),
            "diameter3_pairs": [
                {"classes": [g.classes[i].index, g.classes[j].index],
                 "sizes": [g.classes[i].size, g.classes[j].size]} for i, j in pairs],
            "disconnected": len(g.components) >= 2,
            "verdicts": {v.check_id: v.conclusion for v in [disc, *verdicts]},
            "failures": [v.to_json(timing=False) for v in [disc, *verdicts] if v.failed],
            "conjecture": {"CONJ-C": conj.conclusion,
                           **({"witness": conj.to_json(timing=False)["witnesses"]}
                              if conj.failed else {})},
        })
    return records


def _scan_task(item):
    name, spec_obj, budget = item
    return scan_group(name, spec_obj, budget)


def _read_corpus(source: str) -> list[tuple[str, dict]]:
    if source == "builtin":
        return [(n, s.to_json()) for n, s in builtin_corpus()]
    try:
        with open(source, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read corpus {source!r}: {exc.strerror}") from None
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            name, spec = obj["name"], obj["spec"]
            if not isinstance(name, str):
                raise TypeError("name must be a string")
            out.append((name, spec_from_obj(spec).to_json()))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{source}:{lineno}: bad corpus line ({exc})") from None
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise UsageError(f"{source}: duplicate group names")
    return sorted(out, key=lambda t: t[0])


def run_scan(corpus: list[tuple[str, dict]], jobs: int = 1, budget: int | None = None) -> list[dict]:
    items = [(n, s, budget) for n, s in corpus]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_scan_task, items))
    else:
        chunks = [_scan_task(i) for i in items]
    records = [r for chunk in chunks for r in chunk]
    return sorted(records, key=lambda r: (r["group"], r["prime"]))


def scan_summary(records: list[dict]) -> list[str]:
    lines = [f"{len(records)} records"]
    d3 = [r for r in records if r["diameter3_pairs"]]
    lines.append(f"diameter-3 instances: {len(d3)}")
    for r in d3:
        sizes = sorted({tuple(x["sizes"]) for x in r["diameter3_pairs"]})
        lines.append(f"  {r['group']} p={r['prime']} size pairs {[list(s) for s in sizes]}")
    disc = [r for r in records if r["disconnected"]]
    lines.append(f"disconnected instances: {len(disc)}")
    for r in disc:
        lines.append(f"  {r['group']} p={r['prime']} sizes {sorted(set(r['sizes']))}")
    fails = [r for r in records if r["failures"]]
    lines.append(f"theorem check fails: {len(fails)}")
    for r in fails:
        ids = sorted(f["check_id"] for f in r["failures"])
        lines.append(f"  {r['group']} p={r['prime']} {','.join(ids)}")
    inconclusive = sum(1 for r in records for c in r["verdicts"].values() if c == INCONCLUSIVE)
    lines.append(f"inconclusive verdicts: {inconclusive}")
    conj = [r for r in records if r["conjecture"]["CONJ-C"] == FAILS]
    lines.append(f"conjecture C fails: {len(conj)}")
    for r in conj:
        lines.append(f"  POTENTIAL COUNTEREXAMPLE {r['group']} p={r['prime']}")
    return lines


def cmd_scan(args) -> int:
    corpus = _read_corpus(args.corpus)
    records = run_scan(corpus, args.jobs, args.budget)
    text = "".join(_dump(r) + "\n" for r in records)
    if args.out:
        try:
            _write_atomic(args.out, text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out!r}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
    stream = sys.stdout if args.out else sys.stderr
    for line in scan_summary(records):
        print(line, file=stream)
    return EXIT_FAIL if any(r["failures"] for r in records) else EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="print order, centre and class table")
    p.add_argument("spec", help="inline JSON spec, path to a spec file, or a builtin corpus name")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("graph", help="build the common-divisor graph")
    p.add_argument("spec")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--prime", type=_prime)
    mode.add_argument("--ordinary", action="store_true")
    p.add_argument("--dot", metavar="PATH")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="run verification checks")
    p.add_argument("spec")
    primes = p.add_mutually_exclusive_group(required=True)
    primes.add_argument("--prime", type=_prime)
    primes.add_argument("--all-primes", action="store_true")
    p.add_argument("--suite", type=_suite, default=vf.ALL_CHECKS,
                   help="'all' or a comma list such as thmA,thmB,conjC")
    p.add_argument("--budget", type=_positive, default=None)
    p.add_argument("--no-timing", action="store_true", help="omit elapsed_ms")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="scan a corpus into JSONL records")
    p.add_argument("--corpus", default="builtin", help="'builtin' or a JSONL file")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--budget", type=_positive, default=None)
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: parse error: {exc}", file=sys.stderr)
    except (UsageError, InvalidSpec, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
