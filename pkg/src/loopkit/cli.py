"""``loopkit`` command line: generate loops, check identities, run the suites.

Every subcommand writes one JSON report (stdout, or ``--report FILE``) and
exits 0 when every check holds, 1 when one fails and 2 on usage or input
errors.  Reports carry no timestamps and ``elapsed_ms`` is null unless
``--timing`` is passed, so identical runs give identical bytes.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import formats
from .constructions import RingSpec, SigmaSpec, make_ring, make_sigma, paper_example_loop, small_loop_corpus
from .core import CayleyLoop, cyclic_group
from .dsl import catalog, check_named, check_text
from .errors import LoopError, ParseError, PreconditionFailed
from .holomorph import (SigmaLift, THEOREMS, VARIANTS, build_holomorph, check_robinson_remark,
                        lift_sigma, subloop_embedding_ok, verify_holomorph_theorem)
from .perm import Perm, is_closed_group
from .reports import digest, run_report
from .search import (automorphism_group, brute_automorphisms, brute_bryant_schneider,
                     brute_pseudo_automorphisms, bryant_schneider_group, pseudo_automorphisms)
from . import suites, twins

GRAMMAR = """identity  := term '=' term { ';' term '=' term }
term      := factor { ('*' | '\\\\' | '/') factor }      (left associative)
factor    := atom { '^r' | '^l' }                       (right / left inverse)
atom      := x | y | z | u | v | w | s '(' term ')' | s2 '(' term ')' | '(' term ')'
catalog   := """ + ", ".join(name for name, _, _ in catalog())

SUITES = ("thm1", "thm2", "thm3", "thm4", "thm4_1", "cor4_2", "thm5", "thm6", "thm7",
          "a1", "a2", "a3", "a4", "a4_1", "a4_2", "t1", "t2", "t3", "t4", "robinson",
          "alpha1", "alpha2", "alpha3")

# short names for the formula-backed example loops
EXAMPLE_REFS = {"ex_m2f3": "m2:3", "ex_m2f2": "m2:2", "ex_zn3": "zn:3"}


class UsageError(Exception):
    pass


# -- input resolution ----------------------------------------------------------


def _file_input(path: str) -> tuple[str, dict]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return data.decode(), {"path": path, "digest": digest(data)}


def resolve_loop(ref: str, normalize: bool = False):
    """A loop file, an example reference (``ex_m2f3``, ``ex:zn:5``) or ``zN``."""
    ring = EXAMPLE_REFS.get(ref) or (ref[3:] if ref.startswith("ex:") else None)
    if ring is not None:
        return paper_example_loop(ring), {"path": ref, "digest": digest(ring.encode())}
    if ref[:1] == "z" and ref[1:].isdigit() and not os.path.exists(ref):
        L = cyclic_group(int(ref[1:]))
        return L, {"path": ref, "digest": digest(formats.format_loop(L).encode())}
    text, rec = _file_input(ref)
    return formats.parse_loop(text, normalize=normalize, path=ref), rec


def resolve_sigma(L, ref: str | None):
    if ref is None:
        return make_sigma(L, "identity"), []
    if ref.startswith("builtin:"):
        return make_sigma(L, SigmaSpec.parse(ref)), [{"path": ref, "digest": digest(ref.encode())}]
    text, rec = _file_input(ref)
    m = formats.parse_map(text, path=ref)
    if m.n != L.order:
        raise UsageError(f"{ref}: sigma has {m.n} images, loop has order {L.order}")
    return m, [rec]


def resolve_perm(L, ref: str) -> tuple[Perm, dict]:
    text, rec = _file_input(ref)
    p = formats.parse_perm(text, path=ref)
    if p.n != L.order:
        raise UsageError(f"{ref}: permutation has {p.n} points, loop has order {L.order}")
    return p, rec


def resolve_auts(L, ref: str) -> tuple[list[Perm], list[dict]]:
    if ref == "full":
        return automorphism_group(L), []
    text, rec = _file_input(ref)
    auts = formats.parse_auts(text, path=ref)
    if auts and auts[0].n != L.order:
        raise UsageError(f"{ref}: automorphisms act on {auts[0].n} points, loop has order {L.order}")
    return auts, [rec]


def _materialized(L) -> CayleyLoop:
    if L.order > 4096:
        raise UsageError(f"this command needs a Cayley table; order {L.order} is too large")
    return L.materialize()


# -- subcommands -------------------------------------------------------------


def cmd_gen(args) -> tuple[list, list]:
    if args.paper_example:
        if not args.ring:
            raise UsageError("--paper-example needs --ring m2:3|m2:2|zn:N")
        ring = make_ring(RingSpec.parse(args.ring))  # raises AxiomViolation on a bad ring
        L = paper_example_loop(ring)
        checks = [{"name": "ring-axioms", "holds": True, "size": ring.size},
                  {"name": "loop", "holds": True, "order": L.order, "ring": args.ring}]
        if args.out:
            T = L.materialize()
            formats.write_loop(args.out, T)
            back = formats.read_loop(args.out)
            checks.append({"name": "round-trip", "holds": bool((back.table == T.table).all()),
                           "path": args.out})
        return [{"path": f"ring:{args.ring}", "digest": digest(args.ring.encode())}], checks
    if args.corpus is None:
        raise UsageError("gen needs --paper-example or --corpus ORDER")
    filters = []
    for f in args.filter or []:
        want = not f.startswith("!")
        name, _, sig = f.lstrip("!").partition(":")
        filters.append((name, SigmaSpec.parse(sig) if sig else None, want))
    loops = small_loop_corpus(args.corpus, tuple(filters))
    checks = [{"name": "corpus", "holds": True, "order": args.corpus, "count": len(loops),
               "filters": list(args.filter or [])}]
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for L in loops:
            path = out / f"{L.name}.loop"
            formats.write_loop(path, L)
            same = bool((formats.read_loop(path).table == L.table).all())
            checks.append({"name": f"round-trip:{L.name}", "holds": same, "path": str(path)})
    return [], checks


def cmd_check(args):
    L, rec = resolve_loop(args.loop, args.normalize)
    sigma, srecs = resolve_sigma(L, args.sigma) if args.sigma else (None, [])
    binding = {"s": sigma} if sigma is not None else None
    try:
        if args.identity:
            r = check_named(L, args.identity, binding, mode=args.mode, workers=args.workers)
        else:
            r = check_text(L, args.expr, binding, mode=args.mode, workers=args.workers, name=args.expr)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    return [rec, *srecs], [r.to_record()]


def cmd_group(args):
    L, rec = resolve_loop(args.loop, args.normalize)
    L = _materialized(L)
    kind = args.command
    if kind == "aut":
        perms = brute_automorphisms(L) if args.brute else automorphism_group(L)
        elements = [list(p.images) for p in perms]
    elif kind == "bs":
        perms = brute_bryant_schneider(L) if args.brute else bryant_schneider_group(L)
        elements = [list(p.images) for p in perms]
    else:
        ps = brute_pseudo_automorphisms(L) if args.brute else pseudo_automorphisms(L)
        perms = [p.psi for p in ps]
        elements = [{"psi": list(p.psi.images), "companions": sorted(p.companions)} for p in ps]
    checks = [{"name": kind, "holds": True, "mode": "brute" if args.brute else "search",
               "size": len(perms), "elements": elements},
              {"name": f"{kind}:closure", "holds": is_closed_group(perms)}]
    return [rec], checks


def cmd_holomorph(args):
    Q, rec = resolve_loop(args.loop, args.normalize)
    Q = _materialized(Q)
    auts, arecs = resolve_auts(Q, args.auts)
    H = build_holomorph(Q, auts)
    checks = [{"name": "holomorph", "holds": True, "order": H.order, "auts": len(H.auts)},
              {"name": "embedding", "holds": subloop_embedding_ok(H)}]
    srecs = []
    if args.lift:
        sigma, srecs = resolve_sigma(Q, args.sigma)
        need_sigma = args.lift in ("pointwise", "thm5", "thm7")
        spec = SigmaLift(args.lift, sigma if need_sigma else None,
                         None if args.lift == "pointwise" else args.gamma, args.g)
        lift = lift_sigma(H, spec)
        r = check_named(H, "gen-right-bol", {"s": lift}, workers=args.workers)
        checks.append({**r.to_record(), "name": f"gen-right-bol[{args.lift}]"})
    if args.out:
        formats.write_loop(args.out, H.materialize())
    return [rec, *arecs, *srecs], checks


def _needs_g(args) -> int:
    if args.g is None:
        raise UsageError(f"--suite {args.suite} needs --g IDX")
    return args.g


def cmd_verify(args):
    L, rec = resolve_loop(args.loop, args.normalize)
    L = _materialized(L)
    inputs = [rec]
    suite = args.suite
    if suite in ("thm1", "thm2", "thm3", "thm4", "alpha2", "a1", "a3", "a4_2",
                 "thm4_1", "cor4_2", "thm5", "thm6", "thm7"):
        sigma, srecs = resolve_sigma(L, args.sigma)
        inputs += srecs
    if suite in ("thm4_1", "cor4_2", "thm5", "thm6", "thm7", "robinson", "alpha1"):
        auts, arecs = resolve_auts(L, args.auts)
        inputs += arecs
    try:
        if suite in THEOREMS:
            return inputs, [verify_holomorph_theorem(suite, L, auts, sigma, args.gamma).to_record()]
        if suite == "robinson":
            return inputs, [check_robinson_remark(L, auts).to_record()]
        rep = {
            "thm1": lambda: suites.theorem1(L, sigma),
            "thm2": lambda: suites.theorem2(L, sigma),
            "thm3": lambda: suites.theorem3(L, sigma),
            "thm4": lambda: suites.theorem4(L, sigma),
            "alpha1": lambda: suites.lemma_alpha1(L, auts),
            "alpha2": lambda: suites.lemma_alpha2(L, sigma),
            "alpha3": lambda: suites.lemma_alpha3(L),
            "a1": lambda: twins.verify_thm_a1(L, sigma),
            "a2": lambda: twins.verify_cor_a2(L, _needs_g(args)),
            "a3": lambda: twins.verify_thm_a3(L, sigma),
            "a4": lambda: twins.verify_cor_a4(L, _needs_g(args)),
            "a4_1": lambda: twins.verify_lemma_a4_1(L),
            "a4_2": lambda: twins.verify_lemma_a4_2(L, sigma),
            "t1": lambda: twins.verify_cor_t("t1", L, _needs_g(args), args.gamma),
            "t2": lambda: twins.verify_cor_t("t2", L, _needs_g(args), args.gamma),
            "t3": lambda: twins.verify_cor_t("t3", L, _needs_g(args), args.gamma),
            "t4": lambda: twins.verify_cor_t("t4", L, _needs_g(args), args.gamma),
        }[suite]()
    except PreconditionFailed as exc:
        return inputs, [{"name": f"{suite}:precondition", "holds": False,
                         "identity": exc.identity, "detail": exc.detail}]
    return inputs, rep.to_records()


def cmd_twins(args):
    L, rec = resolve_loop(args.loop, args.normalize)
    L = _materialized(L)
    alpha, arec = resolve_perm(L, args.alpha)
    beta, brec = resolve_perm(L, args.beta)
    w = twins.are_twins(L, alpha, beta)
    x = twins.sim(L, alpha, beta)
    checks = [{"name": "twins", "holds": w is not None,
               **({"witness": {"psi": list(w.psi.images), "x": w.x, "y": w.y}} if w else {})},
              {"name": "sim", "holds": x is not None, **({"witness": {"x": x}} if x is not None else {})}]
    return [rec, arec, brec], checks


# -- parser --------------------------------------------------------------------


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _workers(text: str) -> int:
    if text == "max":
        return os.cpu_count() or 1
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="FILE", help="write the JSON report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="record wall time in elapsed_ms")
    common.add_argument("--workers", type=_workers, default=1, metavar="N|max")
    common.add_argument("--normalize", action="store_true", help="relabel loop files so identity is 0")

    p = argparse.ArgumentParser(prog="loopkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="emit loop files")
    g.add_argument("--paper-example", action="store_true", help="the ring-built example loop")
    g.add_argument("--ring", metavar="m2:3|m2:2|zn:N")
    g.add_argument("--out", metavar="FILE", help="materialize the example into a LOOP file")
    g.add_argument("--corpus", type=int, metavar="ORDER")
    g.add_argument("--filter", action="append", metavar="[!]NAME[:sigma]")
    g.add_argument("--out-dir", metavar="DIR")

    c = sub.add_parser("check", parents=[common], help="check an identity", epilog=GRAMMAR,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    c.add_argument("--loop", required=True, metavar="FILE|ex_m2f3")
    what = c.add_mutually_exclusive_group(required=True)
    what.add_argument("--identity", metavar="NAME")
    what.add_argument("--expr", metavar="DSL")
    c.add_argument("--sigma", metavar="FILE|builtin:NAME")
    c.add_argument("--mode", default="exhaustive", metavar="exhaustive|sample:COUNT:SEED")

    for name, text in (("aut", "automorphism group"), ("ps", "pseudo-automorphisms"),
                       ("bs", "Bryant-Schneider group")):
        q = sub.add_parser(name, parents=[common], help=text)
        q.add_argument("--loop", required=True)
        q.add_argument("--brute", action="store_true", help="definition-level search over all n! maps")

    h = sub.add_parser("holomorph", parents=[common], help="build a holomorph and test a lifted sigma")
    h.add_argument("--loop", required=True)
    h.add_argument("--auts", default="full", metavar="full|FILE")
    h.add_argument("--lift", choices=VARIANTS)
    h.add_argument("--sigma", metavar="FILE|builtin:NAME")
    h.add_argument("--gamma", type=_nonneg, default=0, metavar="IDX")
    h.add_argument("--g", type=_nonneg, metavar="IDX")
    h.add_argument("--out", metavar="FILE")

    v = sub.add_parser("verify", parents=[common], help="run a theorem suite on one loop")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--loop", required=True)
    v.add_argument("--sigma", metavar="FILE|builtin:NAME")
    v.add_argument("--auts", default="full", metavar="full|FILE")
    v.add_argument("--gamma", type=_nonneg, default=0, metavar="IDX")
    v.add_argument("--g", type=_nonneg, metavar="IDX")

    t = sub.add_parser("twins", parents=[common], help="test whether two maps are twins")
    t.add_argument("--alpha", required=True)
    t.add_argument("--beta", required=True)
    t.add_argument("--loop", required=True)
    return p


HANDLERS = {"gen": cmd_gen, "check": cmd_check, "aut": cmd_group, "ps": cmd_group, "bs": cmd_group,
            "holomorph": cmd_holomorph, "verify": cmd_verify, "twins": cmd_twins}


# flags that choose scheduling or where the report goes; they never change a result
_UNRECORDED = {"--workers": 1, "--report": 1, "--timing": 0}


def recorded_command(argv: list[str]) -> list[str]:
    """The argv written into a report, minus flags that cannot affect its checks."""
    out, skip = [], 0
    for arg in argv:
        if skip:
            skip -= 1
            continue
        flag = arg.split("=", 1)[0]
        if flag in _UNRECORDED:
            skip = 0 if "=" in arg else _UNRECORDED[flag]
            continue
        out.append(arg)
    return out


def run_command(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        inputs, checks = HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"loopkit: {exc}\n\n{GRAMMAR}", file=sys.stderr)
        return 2
    except (UsageError, LoopError, ValueError, IndexError) as exc:
        print(f"loopkit: {exc}", file=sys.stderr)
        return 2
    elapsed = round((time.perf_counter() - start) * 1000) if args.timing else None
    text = run_report(recorded_command(argv), inputs, checks, elapsed)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if all(c["holds"] for c in checks) else 1


def main() -> None:
    sys.exit(run_command())
