"""Text, JSON and DOT renderings of derivations, and the derivation file parsers."""

from __future__ import annotations

import json
import re
from typing import Optional, Union

from ..formula import SIG_ANDORNEG, Formula, Signature, Var, parse_formula, parse_formula_list, render_formula
from .derivation import (
    ChainApp,
    DerivedApp,
    LinearDerivation,
    Premise,
    RuleApp,
    Statement,
    Step,
    TreeDerivation,
    TreeNode,
)


class DerivationFormatError(ValueError):
    pass


def _side(fs) -> str:
    return ", ".join(render_formula(f) for f in fs) if fs else "-"


def format_claim(claim: Statement) -> str:
    return f"{_side(claim.antecedent)} |- {_side(claim.succedent)}"


def parse_claim(text: str, sig: Signature = SIG_ANDORNEG) -> Statement:
    if "|-" not in text:
        raise DerivationFormatError(f"claim {text!r} has no '|-'")
    lhs, _, rhs = text.partition("|-")
    try:
        return Statement.of(parse_formula_list(lhs, sig), parse_formula_list(rhs, sig))
    except ValueError as exc:
        raise DerivationFormatError(f"bad claim {text!r}: {exc}") from exc


def format_subst(s) -> str:
    if not s:
        return "{}"
    items = sorted(s.items(), key=lambda kv: kv[0].name)
    return "{" + ", ".join(f"{v.name} := {render_formula(t)}" for v, t in items) + "}"


def parse_subst(text: str, sig: Signature = SIG_ANDORNEG) -> dict[Var, Formula]:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise DerivationFormatError(f"substitution {text!r} must be braced")
    body = body[1:-1].strip()
    out: dict[Var, Formula] = {}
    if not body:
        return out
    for part in body.split(","):
        name, sep, value = part.partition(":=")
        name = name.strip()
        if not sep or not re.fullmatch(r"[a-z][a-z0-9_]*", name):
            raise DerivationFormatError(f"bad substitution entry {part.strip()!r}")
        out[Var(name)] = parse_formula(value.strip(), sig)
    return out


# --- linear ------------------------------------------------------------------


def format_step(i: int, step: Step) -> str:
    j = step.just
    if isinstance(j, Premise):
        return f"{i}. premise {render_formula(j.formula)}"
    refs = "[" + ",".join(str(r) for r in j.refs) + "]"
    if isinstance(j, ChainApp):
        substs = j.substs or ()
        body = f"chain {','.join(j.rules)} {refs}" + "".join(" " + format_subst(s) for s in substs)
    else:
        body = f"{j.rule} {refs} {format_subst(j.subst)}"
    if step.formula is not None:
        body += f" => {render_formula(step.formula)}"
    return f"{i}. {body}"


def format_linear(d: LinearDerivation, claim: Statement, system: Optional[str] = None) -> str:
    lines = [f"system: {system or d.system}", f"claim: {format_claim(claim)}"]
    lines.extend(format_step(i, s) for i, s in enumerate(d.steps, 1))
    lines.append(f"qed {len(d.steps)}")
    return "\n".join(lines) + "\n"


_STEP_RE = re.compile(r"^(\d+)\.\s+(.*)$")
_RULE_RE = re.compile(r"^(?P<name>[A-Za-z0-9_+'*-]+)\s*\[(?P<refs>[^\]]*)\](?P<rest>.*)$")


def _split_rest(rest: str) -> tuple[list[str], Optional[str]]:
    formula = None
    if "=>" in rest:
        rest, _, formula = rest.partition("=>")
        formula = formula.strip()
    substs = re.findall(r"\{[^}]*\}", rest)
    leftover = re.sub(r"\{[^}]*\}", "", rest).strip()
    if leftover:
        raise DerivationFormatError(f"unexpected text {leftover!r}")
    return substs, formula


def _parse_refs(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise DerivationFormatError(f"bad reference list [{text}]") from None


def parse_step(body: str, sig: Signature, derived_names=frozenset()) -> Step:
    if body.startswith("premise "):
        f = parse_formula(body[len("premise ") :].strip(), sig)
        return Step(Premise(f), f)
    chain = body.startswith("chain ")
    if chain:
        body = body[len("chain ") :].strip()
        names, _, body = body.partition(" ")
        m = _RULE_RE.match("X " + body.strip())
    else:
        m = _RULE_RE.match(body)
    if not m:
        raise DerivationFormatError(f"cannot read step {body!r}")
    refs = _parse_refs(m.group("refs"))
    texts, ftext = _split_rest(m.group("rest"))
    substs = [parse_subst(t, sig) for t in texts]
    formula = parse_formula(ftext, sig) if ftext else None
    if chain:
        rules = tuple(n.strip() for n in names.split(",") if n.strip())
        if substs and len(substs) != len(rules):
            raise DerivationFormatError("a chain needs one substitution per rule or none")
        return Step(ChainApp(rules, refs, tuple(substs) if substs else None), formula)
    if len(substs) > 1:
        raise DerivationFormatError("a rule step takes at most one substitution")
    name = m.group("name")
    sub = substs[0] if substs else None
    just = DerivedApp(name, refs, sub) if name in derived_names else RuleApp(name, refs, sub)
    return Step(just, formula)


def parse_linear(text: str, sig: Signature = SIG_ANDORNEG, derived_names=frozenset()):
    """Returns (system id, claim, derivation)."""
    system = claim = None
    steps: list[Step] = []
    qed = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("system:"):
                system = line.partition(":")[2].strip()
            elif line.startswith("claim:"):
                claim = parse_claim(line.partition(":")[2], sig)
            elif line.startswith("qed"):
                qed = int(line.split()[1])
            else:
                m = _STEP_RE.match(line)
                if not m:
                    raise DerivationFormatError(f"unexpected {line!r}")
                if int(m.group(1)) != len(steps) + 1:
                    raise DerivationFormatError(f"step number {m.group(1)} out of sequence")
                steps.append(parse_step(m.group(2).strip(), sig, derived_names))
        except (ValueError, IndexError) as exc:
            raise DerivationFormatError(f"line {lineno}: {exc}") from exc
    if system is None or claim is None:
        raise DerivationFormatError("missing 'system:' or 'claim:' header")
    if qed is None:
        raise DerivationFormatError("missing 'qed N' footer")
    if qed != len(steps):
        raise DerivationFormatError(f"qed {qed} does not match {len(steps)} steps")
    return system, claim, LinearDerivation(tuple(steps), system)


# --- tree --------------------------------------------------------------------


def format_tree(d: TreeDerivation, claim: Statement, system: Optional[str] = None) -> str:
    lines = [f"system: {system or d.system}", f"claim: {format_claim(claim)}"]
    if set(d.root_label) != set(claim.antecedent):
        lines.append(f"root: {_side(d.root_label)}")
    lines.append("node {")
    _emit_node(d.root, 1, lines)
    lines.append("}")
    lines.append("qed")
    return "\n".join(lines) + "\n"


def _emit_node(node: TreeNode, depth: int, lines: list[str]):
    pad = "  " * depth
    if node.rule is None:
        lines.append(f"{pad}close {render_formula(node.close)}")
        return
    lines.append(f"{pad}rule {node.rule} {format_subst(node.subst)}")
    if node.star:
        lines.append(f"{pad}star")
    for f, child in node.branches:
        lines.append(f"{pad}branch {render_formula(f)} {{")
        _emit_node(child, depth + 1, lines)
        lines.append(f"{pad}}}")


def parse_tree(text: str, sig: Signature = SIG_ANDORNEG):
    """Returns (system id, claim, derivation)."""
    system = claim = None
    root_label = None
    body: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("system:"):
            system = line.partition(":")[2].strip()
        elif line.startswith("claim:"):
            claim = parse_claim(line.partition(":")[2], sig)
        elif line.startswith("root:"):
            root_label = tuple(parse_formula_list(line.partition(":")[2], sig))
        elif line == "qed":
            continue
        else:
            body.append((lineno, line))
    if system is None or claim is None:
        raise DerivationFormatError("missing 'system:' or 'claim:' header")
    if not body or body[0][1] != "node {" or body[-1][1] != "}":
        raise DerivationFormatError("tree body must be a single 'node { ... }' block")
    pos, root = _parse_block(body, 1, sig)
    if pos != len(body) - 1:
        raise DerivationFormatError(f"line {body[pos][0]}: trailing content after the root node")
    label = root_label if root_label is not None else claim.antecedent
    return system, claim, TreeDerivation(tuple(label), root, system)


def _parse_block(body, pos: int, sig: Signature) -> tuple[int, TreeNode]:
    """Parse node contents starting at ``pos``; returns the index of the closing brace."""
    try:
        lineno, line = body[pos]
    except IndexError:
        raise DerivationFormatError("unexpected end of tree") from None
    if line.startswith("close "):
        f = parse_formula(line[len("close ") :].strip(), sig)
        pos += 1
        _expect_close(body, pos)
        return pos, TreeNode(close=f)
    if not line.startswith("rule "):
        raise DerivationFormatError(f"line {lineno}: expected 'rule' or 'close', got {line!r}")
    rest = line[len("rule ") :].strip()
    name, _, sub_text = rest.partition(" ")
    subst = parse_subst(sub_text, sig) if sub_text.strip() else {}
    pos += 1
    if pos < len(body) and body[pos][1] == "star":
        pos += 1
        _expect_close(body, pos)
        return pos, TreeNode(name, subst, star=True)
    branches = []
    while pos < len(body) and body[pos][1].startswith("branch "):
        lineno, line = body[pos]
        if not line.endswith("{"):
            raise DerivationFormatError(f"line {lineno}: branch line must end with '{{'")
        f = parse_formula(line[len("branch ") : -1].strip(), sig)
        pos, child = _parse_block(body, pos + 1, sig)
        branches.append((f, child))
        pos += 1
    _expect_close(body, pos)
    if not branches:
        raise DerivationFormatError(f"line {lineno}: rule node without 'star' or branches")
    return pos, TreeNode(name, subst, tuple(branches))


def _expect_close(body, pos: int):
    if pos >= len(body) or body[pos][1] != "}":
        where = body[pos][0] if pos < len(body) else "end"
        raise DerivationFormatError(f"line {where}: expected '}}'")


def parse_derivation(text: str, sig: Signature = SIG_ANDORNEG, derived_names=frozenset()):
    """Detect the format from the body and parse it."""
    if re.search(r"^\s*node\s*\{", text, re.M):
        return parse_tree(text, sig)
    return parse_linear(text, sig, derived_names)


def format_derivation(d: Union[LinearDerivation, TreeDerivation], claim: Statement, system: Optional[str] = None) -> str:
    if isinstance(d, TreeDerivation):
        return format_tree(d, claim, system)
    return format_linear(d, claim, system)


# --- JSON and DOT ------------------------------------------------------------


def _subst_json(s) -> dict:
    return {v.name: render_formula(t) for v, t in sorted((s or {}).items(), key=lambda kv: kv[0].name)}


def _node_json(node: TreeNode) -> dict:
    if node.rule is None:
        return {"close": render_formula(node.close)}
    out = {"rule": node.rule, "subst": _subst_json(node.subst)}
    if node.star:
        out["star"] = True
    else:
        out["branches"] = [{"formula": render_formula(f), "node": _node_json(c)} for f, c in node.branches]
    return out


def derivation_to_json(d: Union[LinearDerivation, TreeDerivation], claim: Statement, system: Optional[str] = None) -> str:
    data: dict = {
        "system": system or d.system,
        "claim": {
            "antecedent": [render_formula(f) for f in claim.antecedent],
            "succedent": [render_formula(f) for f in claim.succedent],
        },
    }
    if isinstance(d, TreeDerivation):
        data["kind"] = "tree"
        data["root_label"] = [render_formula(f) for f in d.root_label]
        data["root"] = _node_json(d.root)
    else:
        data["kind"] = "linear"
        steps = []
        for i, step in enumerate(d.steps, 1):
            j = step.just
            entry: dict = {"line": i, "formula": render_formula(step.formula) if step.formula else None}
            if isinstance(j, Premise):
                entry["premise"] = True
            elif isinstance(j, ChainApp):
                entry["chain"] = list(j.rules)
                entry["refs"] = list(j.refs)
                entry["substs"] = [_subst_json(s) for s in (j.substs or ())]
            else:
                entry["rule"] = j.rule
                entry["derived"] = isinstance(j, DerivedApp)
                entry["refs"] = list(j.refs)
                entry["subst"] = _subst_json(j.subst)
            steps.append(entry)
        data["steps"] = steps
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace('"', '\\"')


def tree_to_dot(d: TreeDerivation) -> str:
    lines = ["digraph derivation {", "  node [shape=box, fontname=monospace];"]
    counter = [0]

    def walk(node: TreeNode, label_text: str) -> str:
        me = f"n{counter[0]}"
        counter[0] += 1
        text = label_text
        if node.rule is not None:
            text += f"\\n{node.rule} {format_subst(node.subst)}"
        else:
            text += f"\\nclosed by {render_formula(node.close)}"
        lines.append(f'  {me} [label="{_dot_escape(text)}"];')
        if node.star:
            star = f"n{counter[0]}"
            counter[0] += 1
            lines.append(f'  {star} [label="*", shape=plaintext];')
            lines.append(f"  {me} -> {star};")
        for f, child in node.branches:
            kid = walk(child, "+ " + render_formula(f))
            lines.append(f"  {me} -> {kid};")
        return me

    walk(d.root, "{" + ", ".join(render_formula(f) for f in d.root_label) + "}")
    lines.append("}")
    return "\n".join(lines) + "\n"
