"""Command-line front end.

Exit codes: 0 success, 2 input errors, 3 cap violations.  All output is
deterministic for fixed inputs and seeds.
"""

from __future__ import annotations

import argparse
import random
import sys
from collections import Counter

from cyclograph import cyclomap, isomorph
from cyclograph.cyclomap import (build_register, brute_graph, component_necklace,
                                 crl_list, dot_export, parse_mapping,
                                 parse_vertex, register_components,
                                 tree_of_vertex, vertex_name)
from cyclograph.errors import CapExceeded, MappingFormatError


def _load(path: str) -> cyclomap.CyclotomicMapping:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_mapping(fh.read())
    except OSError as exc:
        raise MappingFormatError(f"{path}: {exc}") from exc


def _print_header(m: cyclomap.CyclotomicMapping, out) -> None:
    ctx = m.field
    poly = "" if ctx.n == 1 else \
        f" poly={cyclomap.render_poly(ctx.modulus)}"
    print(f"q={ctx.q} p={ctx.p} n={ctx.n}{poly} d={m.d} s={m.s}", file=out)


def cmd_analyze(args, out) -> int:
    m = _load(args.spec)
    _print_header(m, out)
    try:
        reg = build_register(m, sign_cap=args.sign_cap)
        crl = crl_list(m, max_cycles=args.cycle_cap)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    print("crl {", file=out)
    for r, l in sorted(crl, key=lambda rl: (rl[1], -1 if rl[0] is None else rl[0])):
        print(f"  ({vertex_name(r)}, {l})", file=out)
    print("}", file=out)
    print("partitions {", file=out)
    for i in range(m.d):
        if i in reg.transient:
            P = reg.transient[i].partition
        else:
            P = reg.periodic[i].full_partition()
        print(f"  C{i}: {P.render()}", file=out)
    print("}", file=out)
    print("trees {", file=out)
    for n in range(len(reg.trees)):
        print(f"  {reg.trees.render(n)}   # size {reg.trees.size(n)}"
              f" height {reg.trees.height(n)}", file=out)
    print(f"  tree(0F) = T{reg.zero_tree}", file=out)
    print("}", file=out)
    comps: Counter = Counter()
    for r, l in crl:
        neck = component_necklace(reg, r, l, enum_cap=args.enum_cap)
        comps[(neck.beads, l)] += 1
    print("components {", file=out)
    for (beads, l), mult in sorted(comps.items()):
        body = ",".join(f"T{b}" for b in beads)
        print(f"  ([{body}], {l}) x{mult}", file=out)
    print("}", file=out)
    return 0


def cmd_crl(args, out) -> int:
    m = _load(args.spec)
    _print_header(m, out)
    try:
        crl = crl_list(m, max_cycles=args.cycle_cap)
    except CapExceeded:
        print("crl-census {", file=out)
        for l, e in sorted(cyclomap.crl_census(m).items()):
            print(f"  (len {l}) x{e}", file=out)
        print("}", file=out)
        return 0
    print("crl {", file=out)
    for r, l in sorted(crl, key=lambda rl: (rl[1], -1 if rl[0] is None else rl[0])):
        print(f"  ({vertex_name(r)}, {l})", file=out)
    print("}", file=out)
    return 0


def cmd_register(args, out) -> int:
    m = _load(args.spec)
    _print_header(m, out)
    try:
        reg = build_register(m, sign_cap=args.sign_cap)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    for i in range(m.d):
        if i in reg.transient:
            data = reg.transient[i]
            print(f"C{i} (transient): {data.partition.render()}", file=out)
            for nu, n in sorted(data.blocks.items(),
                                key=lambda kv: tuple(0 if s else 1 for s in kv[0])):
                print(f"  {_sign_str(nu)} -> T{n}", file=out)
        else:
            data = reg.periodic[i]
            print(f"C{i} (periodic, cycle {list(data.cycle)}, H={data.H}, "
                  f"height={data.height}): {data.full_partition().render()}",
                  file=out)
            for h in range(data.H + 1):
                for nu, n in sorted(data.blocks[h].items(),
                                    key=lambda kv: tuple(0 if s else 1
                                                         for s in kv[0])):
                    print(f"  h={h} {_sign_str(nu)} -> T{n}", file=out)
    print("trees {", file=out)
    for n in range(len(reg.trees)):
        print(f"  {reg.trees.render(n)}   # size {reg.trees.size(n)}", file=out)
    print(f"  tree(0F) = T{reg.zero_tree}", file=out)
    print("}", file=out)
    return 0


def _sign_str(nu) -> str:
    return "".join("+" if s else "-" for s in nu) if nu else "()"


def cmd_component(args, out) -> int:
    m = _load(args.spec)
    try:
        reg = build_register(m, sign_cap=args.sign_cap)
        r = parse_vertex(args.rep, m.q)
        neck = component_necklace(reg, r, args.length, enum_cap=args.enum_cap)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    body = ",".join(f"T{b}" for b in neck.beads)
    sizes = ",".join(str(reg.trees.size(b)) for b in neck.beads)
    print(f"necklace [{body}] length {neck.length} (tree sizes [{sizes}])",
          file=out)
    return 0


def cmd_iso(args, out) -> int:
    m1 = _load(args.spec1)
    m2 = _load(args.spec2)
    verdict = isomorph.iso_decide(m1, m2, bounded_cap=args.bounded_cap,
                                  sign_cap=args.sign_cap,
                                  oracle_cap=args.oracle_cap)
    print(verdict.render(), file=out)
    return 0


def cmd_dot(args, out) -> int:
    m = _load(args.spec)
    try:
        print(dot_export(m, cap=args.dot_cap), end="", file=out)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    return 0


def _check_mapping(m: cyclomap.CyclotomicMapping, args, out,
                   corrupt: bool = False) -> bool:
    """Register/CRL/necklace outputs vs brute force; prints PASS/FAIL lines."""
    try:
        bg = brute_graph(m, oracle_cap=args.oracle_cap)
        reg = build_register(m, sign_cap=args.sign_cap)
    except CapExceeded as exc:
        print(f"  SKIP (cap): {exc}", file=out)
        return True
    ok = True
    bad_vertex = None
    keymap = {}
    for v in range(m.q):
        lbl = None if v == bg.zero_id else v
        keymap[v] = reg.tree_key(tree_of_vertex(reg, lbl))
        if corrupt:
            keymap[v] = b"corrupt" if v == 0 else keymap[v]
        if keymap[v] != bg.tree_key[v]:
            ok = False
            bad_vertex = v
            break
    print(f"  trees    {'PASS' if ok else 'FAIL at ' + vertex_name(None if bad_vertex == bg.zero_id else bad_vertex)}",
          file=out)
    crl_ok = Counter(l for _, l in crl_list(m, max_cycles=args.cycle_cap)) \
        == bg.crl_census()
    print(f"  crl      {'PASS' if crl_ok else 'FAIL'}", file=out)
    neck_ok = register_components(reg, max_cycles=args.cycle_cap,
                                  enum_cap=args.enum_cap) == bg.components()
    print(f"  necklace {'PASS' if neck_ok else 'FAIL'}", file=out)
    return ok and crl_ok and neck_ok


def cmd_oracle_check(args, out) -> int:
    if args.spec:
        m = _load(args.spec)
        print(f"checking {args.spec}", file=out)
        all_ok = _check_mapping(m, args, out)
    else:
        rng = random.Random(args.seed)
        qs = [q for q in cyclomap.prime_powers_upto(args.max_q) if q > 2]
        all_ok = True
        for k in range(args.random):
            m = cyclomap.random_mapping(rng, qs=qs)
            print(f"mapping {k}: q={m.q} d={m.d}", file=out)
            all_ok = _check_mapping(m, args, out) and all_ok
    print("PASS" if all_ok else "FAIL", file=out)
    return 0 if all_ok else 1


def cmd_mpe_table(args, out) -> int:
    mx, avg = isomorph.mpe_table(args.limit)
    print(f"K={args.limit} max={mx} avg={avg:.4f}", file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cyclograph",
        description="Functional-graph analysis of coset-wise monomial maps of F_q")
    ap.add_argument("--sign-cap", type=int, default=cyclomap.DEFAULT_SIGN_CAP,
                    help="max sign bits per partition tuple")
    ap.add_argument("--cycle-cap", type=int, default=cyclomap.DEFAULT_CYCLE_CAP,
                    help="max enumerated cycles in a CRL list")
    ap.add_argument("--enum-cap", type=int, default=cyclomap.DEFAULT_ENUM_CAP,
                    help="max cycle length walked directly for necklaces")
    ap.add_argument("--oracle-cap", type=int, default=cyclomap.DEFAULT_ORACLE_CAP,
                    help="max q for the brute-force oracle")
    ap.add_argument("--dot-cap", type=int, default=4096,
                    help="max q for DOT export")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("analyze", help="full analysis of a mapping spec")
    p.add_argument("spec")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("crl", help="cycle representatives and lengths")
    p.add_argument("spec")
    p.set_defaults(fn=cmd_crl)

    p = sub.add_parser("register", help="partition-tree register dump")
    p.add_argument("spec")
    p.set_defaults(fn=cmd_register)

    p = sub.add_parser("component", help="necklace of one component")
    p.add_argument("spec")
    p.add_argument("--rep", required=True, help="representative (w^<k> or 0F)")
    p.add_argument("--len", dest="length", type=int, required=True)
    p.set_defaults(fn=cmd_component)

    p = sub.add_parser("iso", help="graph-isomorphism decision")
    p.add_argument("spec1")
    p.add_argument("spec2")
    p.add_argument("--bounded-cap", type=int, default=16)
    p.set_defaults(fn=cmd_iso)

    p = sub.add_parser("dot", help="DOT export of the functional graph")
    p.add_argument("spec")
    p.set_defaults(fn=cmd_dot)

    p = sub.add_parser("oracle-check", help="verify pipeline against brute force")
    p.add_argument("spec", nargs="?", default=None)
    p.add_argument("--random", type=int, default=20)
    p.add_argument("--max-q", type=int, default=512)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(fn=cmd_oracle_check)

    p = sub.add_parser("mpe-table", help="max/average of mpe(2^v-1)")
    p.add_argument("--limit", type=int, default=100)
    p.set_defaults(fn=cmd_mpe_table)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except MappingFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
