"""Command-line interface.

Exit codes: 0 holds / accepted / proved, 1 fails / rejected / no proof,
2 usage or input error, 3 inconclusive (budget exhausted or search bound hit).
Every report is deterministic for fixed arguments.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import itertools
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import corpus
from .calculus.derivation import LinearDerivation, Statement, TreeDerivation
from .calculus.formats import (
    derivation_to_json,
    format_claim,
    format_derivation,
    parse_derivation,
    tree_to_dot,
)
from .calculus.rules import SETSET, HSystem, dump_system, format_rule
from .calculus.search import BUDGET, NO_PROOF, SearchConfig, prove, prove_setset_analytic
from .calculus.verify import rule_sound, verify_derivation
from .formula import (
    SIG_ANDORNEG,
    SIGNATURES,
    Formula,
    Var,
    formulas_up_to,
    parse_formula,
    parse_formula_list,
    render_formula,
    sorted_vars,
    variables,
)
from .semantics import consequence_holds, check_monadicity, evaluate, valuations
from .transforms import (
    TransformError,
    dualize_system,
    ensure_lifts_named,
    lift_rule,
    or_convert_system,
    translate_bk,
)

OK, FAIL, USAGE, INCONCLUSIVE_EXIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CommandOutcome:
    code: int
    report: str = ""
    error: str = ""


# --- statement families -----------------------------------------------------


@dataclass
class CompareReport:
    system: str
    matrix: str
    statements: int = 0
    agreements: int = 0
    proved: int = 0
    disagreements: list = field(default_factory=list)
    budget: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.budget


def statement_family(
    n_vars: int = 2, depth: int = 1, sides: int = 2, sample: int = 0, seed: int = 0, sig=SIG_ANDORNEG
) -> list[Statement]:
    """All statements whose sides are sets of at most ``sides`` formulas of depth at most ``depth``.

    With ``sample`` > 0, ``sample`` seeded formulas one level deeper each add
    three statements: as lone antecedent, as lone succedent, and next to a
    shallow formula with another shallow formula on the right.
    """
    atoms = [Var(n) for n in ("p", "q", "r", "s")[:n_vars]]
    pool = formulas_up_to(atoms, depth, sig)
    sets = [tuple(c) for k in range(sides + 1) for c in itertools.combinations(pool, k)]
    out = [Statement.of(a, b) for a in sets for b in sets]
    if sample:
        deeper = [f for f in formulas_up_to(atoms, depth + 1, sig) if f not in set(pool)]
        rng = random.Random(seed)
        for f in rng.sample(deeper, min(sample, len(deeper))):
            x, y = rng.choice(pool), rng.choice(pool)
            out.extend([Statement.of([f], []), Statement.of([], [f]), Statement.of([f, x], [y])])
    return out


def compare(sys_: HSystem, matrix, family: Sequence[Statement], cfg: Optional[SearchConfig] = None) -> CompareReport:
    """Run the analytic search and the truth-table check on every statement of ``family``."""
    rep = CompareReport(sys_.name, matrix.name)
    for claim in family:
        rep.statements += 1
        res = prove_setset_analytic(sys_, claim, cfg)
        holds = consequence_holds(matrix, claim.antecedent, claim.succedent).holds
        if res.status == BUDGET:
            rep.budget.append(claim)
        elif res.proved == holds:
            rep.agreements += 1
        else:
            rep.disagreements.append((claim, res.proved, holds))
        rep.proved += res.proved
    return rep


# --- helpers ------------------------------------------------------------------


def _system(name: str) -> HSystem:
    try:
        return corpus.get_system(name)
    except corpus.CorpusError as exc:
        raise UsageError(str(exc.args[0])) from None


def _matrix(name: str):
    try:
        return corpus.get_matrix(name)
    except corpus.CorpusError as exc:
        raise UsageError(str(exc.args[0])) from None


def _formulas(text: str, sig=SIG_ANDORNEG) -> list[Formula]:
    try:
        return parse_formula_list(text, sig)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _formula(text: str, sig=SIG_ANDORNEG) -> Formula:
    try:
        return parse_formula(text, sig)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _valuation_text(v) -> str:
    return ", ".join(f"{x.name}={val}" for x, val in sorted(v.items(), key=lambda kv: kv[0].name))


def _config(args) -> SearchConfig:
    kw = {}
    for name in ("max_nodes", "max_steps", "max_universe"):
        val = getattr(args, name, None)
        if val is not None:
            kw[name] = val
    if getattr(args, "universe", None):
        kw["universe"] = _formulas(args.universe)
    try:
        return SearchConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(d, claim: Statement, system: str, fmt: str) -> str:
    if fmt == "json":
        return derivation_to_json(d, claim, system)
    if fmt == "dot":
        if not isinstance(d, TreeDerivation):
            raise UsageError("dot output is only available for tree derivations")
        return tree_to_dot(d)
    return format_derivation(d, claim, system)


def _write(out: list[str], text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        out.append(f"wrote {path}")
    else:
        out.append(text.rstrip("\n"))


def _load_derivation_text(source: str) -> str:
    p = Path(source)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    stem = p.name[:-4] if p.name.endswith(".drv") else p.name
    if stem in corpus.derivation_ids():
        e = corpus.get_derivation(stem)
        return format_derivation(e.derivation, e.claim, e.system)
    raise UsageError(f"no such derivation file or corpus entry: {source}")


# --- commands -------------------------------------------------------------------


def cmd_parse(args, out):
    sig = SIGNATURES.get(args.signature)
    if sig is None:
        raise UsageError(f"unknown signature {args.signature!r}")
    f = _formula(args.formula, sig)
    out.append(render_formula(f))
    out.append("variables: " + ", ".join(v.name for v in sorted_vars(variables(f))))
    out.append(f"size: {f.size}")
    return OK


def cmd_eval(args, out):
    m = _matrix(args.matrix)
    f = _formula(args.formula)
    vs = sorted_vars(variables(f))
    if args.valuation is not None:
        v = {}
        for part in filter(None, (s.strip() for s in args.valuation.split(","))):
            name, _, val = part.partition("=")
            if val.strip() not in m.algebra.carrier:
                raise UsageError(f"bad value in {part!r}; carrier is {', '.join(m.algebra.carrier)}")
            v[Var(name.strip())] = val.strip()
        missing = [x.name for x in vs if x not in v]
        if missing:
            raise UsageError("no value for " + ", ".join(missing))
        val = evaluate(f, m.algebra, v)
        out.append(f"{val} ({'designated' if val in m.designated else 'undesignated'})")
        return OK
    header = " ".join(x.name for x in vs)
    out.append(f"{header} | {render_formula(f)}" if header else render_formula(f))
    for v in valuations(vs, m.algebra.carrier):
        val = evaluate(f, m.algebra, v)
        mark = "*" if val in m.designated else " "
        row = " ".join(v[x] for x in vs)
        out.append(f"{row} | {val}{mark}" if row else f"{val}{mark}")
    return OK


def cmd_entails(args, out):
    m = _matrix(args.matrix)
    lhs, rhs = _formulas(args.lhs), _formulas(args.rhs)
    verdict = consequence_holds(m, lhs, rhs)
    claim = format_claim(Statement.of(lhs, rhs))
    if verdict.holds:
        out.append(f"holds in {m.name}: {claim}")
        return OK
    out.append(f"fails in {m.name}: {claim}")
    out.append("countermodel: " + _valuation_text(verdict.countermodel))
    return FAIL


def cmd_rule_sound(args, out):
    s = _system(args.system)
    m = _matrix(args.matrix or corpus.SYSTEM_MATRIX.get(s.name, ""))
    rules = [s.rule(args.rule)] if args.rule else list(s.rules)
    if args.rule and not s.has_rule(args.rule):
        raise UsageError(f"{args.rule} is not a rule of {s.name}")
    bad = 0
    for r in rules:
        v = rule_sound(m, r)
        if v.holds:
            out.append(f"{r.name}: sound")
        else:
            bad += 1
            out.append(f"{r.name}: unsound, countermodel {_valuation_text(v.countermodel)}")
    out.append(f"{len(rules) - bad}/{len(rules)} rules of {s.name} sound for {m.name}")
    return OK if bad == 0 else FAIL


def cmd_monadic(args, out):
    m = _matrix(args.matrix)
    theta = _formulas(args.theta)
    try:
        report = check_monadicity(m, theta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for (x, y), sep in report.items():
        out.append(f"{x}/{y}: {render_formula(sep) if sep is not None else 'no separator'}")
    missing = sum(sep is None for sep in report.values())
    out.append("monadic" if not missing else f"{missing} pair(s) without separator")
    return OK if not missing else FAIL


def cmd_prove(args, out):
    s = _system(args.system)
    claim = Statement.of(_formulas(args.lhs, s.signature), _formulas(args.rhs, s.signature))
    if s.kind != SETSET and len(claim.succedent) != 1:
        raise UsageError(f"{s.name} is Set-Fmla: give exactly one formula in --rhs")
    if args.analytic and s.kind != SETSET:
        raise UsageError(f"--analytic needs a Set-Set system; {s.name} is Set-Fmla")
    res = prove(s, claim, _config(args))
    if res.proved:
        _write(out, _emit(res.proof, claim, s.name, args.format), args.output)
        return OK
    out.append(f"{res.status}: {format_claim(claim)} in {s.name}")
    if res.witness is not None:
        out.append("saturated label: " + (", ".join(render_formula(f) for f in res.witness) or "(empty)"))
    if res.note:
        out.append(f"note: {res.note}")
    return FAIL if res.status == NO_PROOF else INCONCLUSIVE_EXIT


def cmd_verify(args, out):
    text = _load_derivation_text(args.file)
    hint = args.system
    if hint is None:
        head = [ln for ln in text.splitlines() if ln.startswith("system:")]
        if not head:
            raise UsageError("derivation has no 'system:' header; pass --system")
        hint = head[0].split(":", 1)[1].strip()
    s = _system(hint)
    try:
        _, claim, d = parse_derivation(text, s.signature, frozenset(s.derived))
        if isinstance(d, LinearDerivation) and ensure_lifts_named(s, d.rule_names()):
            _, claim, d = parse_derivation(text, s.signature, frozenset(s.derived))
    except TransformError as exc:
        raise UsageError(f"cannot rebuild lifted rule: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"cannot parse derivation: {exc}") from None
    v = verify_derivation(s, d, claim, expand=args.expand)
    out.append(f"{v} ({format_claim(claim)} in {s.name})")
    return OK if v.accepted else FAIL


def cmd_transform(args, out):
    s = _system(args.system)
    try:
        if args.kind == "dualize":
            res = dualize_system(s)
        elif args.kind == "or-convert":
            conv = or_convert_system(s)
            res = conv.system
            if conv.discarded:
                out.append("# discarded trivial images: " + ", ".join(conv.discarded))
        else:
            if not args.rule:
                raise UsageError("lift needs --rule")
            if not s.has_rule(args.rule):
                raise UsageError(f"{args.rule} is not a rule of {s.name}")
            out.append(format_rule(lift_rule(s.rule(args.rule), args.mode)))
            return OK
    except TransformError as exc:
        raise UsageError(str(exc)) from None
    out.append(dump_system(res).rstrip("\n"))
    return OK


def cmd_translate_bk(args, out):
    star = _system("R_BK_star")
    h = _system("H_BK")
    text = _load_derivation_text(args.file)
    try:
        _, claim, t = parse_derivation(text, star.signature)
    except ValueError as exc:
        raise UsageError(f"cannot parse derivation: {exc}") from None
    if not isinstance(t, TreeDerivation):
        raise UsageError("translate-bk needs a tree derivation in R_BK_star")
    try:
        d = translate_bk(star, h, t, claim)
    except TransformError as exc:
        out.append(f"rejected: {exc}")
        return FAIL
    target = Statement.of(claim.antecedent, claim.succedent)
    _write(out, _emit(d, target, h.name, args.format), args.output)
    return OK


def cmd_compare(args, out):
    s = _system(args.system)
    m = _matrix(args.matrix)
    if s.kind != SETSET:
        raise UsageError("compare needs a Set-Set system")
    if not 1 <= args.vars <= 4 or args.depth < 0 or args.sides < 0:
        raise UsageError("family bounds out of range (vars 1..4, depth >= 0, sides >= 0)")
    fam = statement_family(args.vars, args.depth, args.sides, args.sample, args.seed, s.signature)
    rep = compare(s, m, fam, _config(args))
    out.append(f"{s.name} vs {m.name}: {rep.statements} statements, {rep.proved} provable")
    out.append(f"agreements: {rep.agreements}")
    out.append(f"disagreements: {len(rep.disagreements)}")
    for claim, proved, holds in rep.disagreements[: args.show]:
        tag = "proved but invalid" if proved else "valid but not proved"
        out.append(f"  {format_claim(claim)}: {tag}")
    out.append(f"budget exhausted: {len(rep.budget)}")
    return OK if rep.ok else FAIL


def cmd_systems(args, out):
    if args.action == "list":
        for sid in corpus.SYSTEM_IDS:
            s = _system(sid)
            extra = f", {len(s.derived)} derived" if s.derived else ""
            out.append(f"{sid}: {s.kind}, {len(s.rules)} rules{extra}, matrix {corpus.SYSTEM_MATRIX[sid]}")
        return OK
    if not args.id:
        raise UsageError("systems show needs a system id")
    s = _system(args.id)
    out.append(dump_system(s).rstrip("\n"))
    for name, entry in s.derived.items():
        out.append(f"# derived {format_rule(entry.schema)}")
    return OK


def cmd_corpus(args, out):
    root = Path(args.dir) / "corpus"
    written = corpus.export(root)
    out.append(f"exported {len(written)} files under {root}")
    return OK


# --- argument parsing -----------------------------------------------------------


def _add_budget(p):
    p.add_argument("--max-nodes", type=int, default=None, help="node budget of the analytic search")
    p.add_argument("--max-steps", type=int, default=None, help="step budget of the Set-Fmla search")
    p.add_argument("--max-universe", type=int, default=None, help="cap on the Set-Fmla search universe")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wkhilbert", description="Weak-Kleene Hilbert systems toolkit.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("parse", help="parse and pretty-print a formula")
    p.add_argument("formula")
    p.add_argument("--signature", default="and-or-neg", choices=sorted(SIGNATURES))
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="evaluate a formula in a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--valuation", help="e.g. 'p=u, q=t'; without it a truth table is printed")
    p.add_argument("formula")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("entails", help="Set-Set consequence by truth tables")
    p.add_argument("--matrix", required=True)
    p.add_argument("--lhs", default="")
    p.add_argument("--rhs", default="")
    p.set_defaults(func=cmd_entails)

    p = sub.add_parser("rule-sound", help="check the rules of a system against a matrix")
    p.add_argument("--system", required=True)
    p.add_argument("--matrix", help="defaults to the matrix the system is meant for")
    p.add_argument("--rule")
    p.set_defaults(func=cmd_rule_sound)

    p = sub.add_parser("monadic", help="look for one-variable separators")
    p.add_argument("--matrix", required=True)
    p.add_argument("--theta", default="x, ~x")
    p.set_defaults(func=cmd_monadic)

    p = sub.add_parser("prove", help="search for a proof")
    p.add_argument("--system", required=True)
    p.add_argument("--lhs", default="")
    p.add_argument("--rhs", default="")
    p.add_argument("--analytic", action="store_true", help="require the analytic Set-Set search")
    p.add_argument("--universe", help="explicit search universe (comma separated)")
    p.add_argument("--format", default="text", choices=("text", "json", "dot"))
    p.add_argument("-o", "--output")
    _add_budget(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="check a derivation file")
    p.add_argument("file", help="derivation file or corpus derivation id")
    p.add_argument("--system", help="defaults to the file's system header")
    p.add_argument("--expand", action="store_true", help="expand derived and chained steps first")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transform", help="transform a system")
    p.add_argument("kind", choices=("dualize", "or-convert", "lift"))
    p.add_argument("--system", required=True)
    p.add_argument("--rule")
    p.add_argument("--mode", default="or", choices=("or", "imp"))
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("translate-bk", help="turn an R_BK_star tree into an H_BK derivation")
    p.add_argument("file", help="tree derivation file or corpus derivation id")
    p.add_argument("--format", default="text", choices=("text", "json"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate_bk)

    p = sub.add_parser("compare", help="search against truth tables over a statement family")
    p.add_argument("--system", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--sides", type=int, default=2)
    p.add_argument("--sample", type=int, default=0, help="seeded deeper formulas to add")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--show", type=int, default=10, help="disagreements to print")
    _add_budget(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("systems", help="list or show shipped systems")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_systems)

    p = sub.add_parser("corpus", help="corpus operations")
    p.add_argument("action", choices=("export",))
    p.add_argument("dir", nargs="?", default=".")
    p.set_defaults(func=cmd_corpus)
    return ap


def run(argv: Sequence[str]) -> CommandOutcome:
    ap = build_parser()
    err = io.StringIO()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(err):
            args = ap.parse_args(list(argv))
    except SystemExit as exc:
        return CommandOutcome(USAGE if exc.code else OK, "", err.getvalue())
    out: list[str] = []
    try:
        code = args.func(args, out)
    except UsageError as exc:
        return CommandOutcome(USAGE, "\n".join(out), f"error: {exc}\n")
    except OSError as exc:
        return CommandOutcome(USAGE, "\n".join(out), f"error: {exc}\n")
    report = "\n".join(out)
    return CommandOutcome(code, report + "\n" if report else "")


def main(argv: Optional[Sequence[str]] = None) -> int:
    res = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.report)
    sys.stderr.write(res.error)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
