"""Shipped matrices, systems and derivations.

Everything lives as plain text under ``data/`` and is parsed on first use.
The starred Set-Set system and the Set-Fmla system for BK are assembled from
R_BK; the latter also carries the registry of derived rules BK25 to BK30.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Union

from ..calculus.derivation import LinearDerivation, Statement, TreeDerivation, normalize
from ..calculus.formats import format_derivation, parse_derivation
from ..calculus.rules import HSystem, RuleSchema, dump_system, load_system
from ..calculus.verify import check_derived, rule_sound, verify_derivation
from ..formula import parse_formula_list
from ..semantics import BK, CL, M_PRIME, PWK, WK, Matrix, dump_matrix
from ..transforms import assemble_bk_systems, deduction_transform, lifted_derivation_scheme


class CorpusError(KeyError):
    pass


MATRICES = {
    "CL2": CL,
    "WK": Matrix("WK", WK, frozenset()),
    "PWK": PWK,
    "BK": BK,
    "Mprime": M_PRIME,
}
ALIASES = {"CL": "CL2", "M'": "Mprime", "R_BK*": "R_BK_star"}

SYSTEM_IDS = ("SF-CL", "SS-CL", "R_PWK", "H_PWK", "R_BK", "R_BK_star", "H_BK")

# system id -> matrix its rules are sound for
SYSTEM_MATRIX = {
    "SF-CL": "CL2",
    "SS-CL": "CL2",
    "R_PWK": "PWK",
    "H_PWK": "PWK",
    "R_BK": "BK",
    "R_BK_star": "BK",
    "H_BK": "BK",
}


@dataclass(frozen=True)
class DerivationEntry:
    id: str
    system: str
    claim: Statement
    derivation: Union[LinearDerivation, TreeDerivation]
    note: str = ""


DERIVATION_NOTES = {
    "cl-p-imp-p": "five-step proof of p -> p in SF-CL",
    "sscl-excluded-middle": "excluded middle in SS-CL",
    "sscl-demorgan": "~(p & q) |- ~p, ~q in SS-CL",
    "bk-demorgan": "De Morgan tree in the starred Set-Set system for BK",
    "bk25": "derivation of BK25",
    "bk26": "derivation of BK26 (BK2 then BK20)",
    "bk27": "derivation of BK27 (BK21 and BK23)",
    "bk28": "derivation of BK28",
    "bk29-core": "first half of the derivation of BK29",
    "bk29-mirror": "reconstructed mirror of the first half of BK29",
    "bk29": "derivation of BK29 through BK29a and BK29b",
    "bk30": "derivation of BK30",
    "bk3-double-lift": "double lift of BK3 (generated scheme)",
    "bk4-double-lift": "double lift of BK4 (generated scheme)",
    "bk12-double-lift": "double lift of BK12 (generated scheme)",
}

# derived rules of H_BK: name -> (antecedent, conclusion, derivation id or None)
DERIVED_BK = (
    ("BK25", "p | q", "~p | (p | q)", "bk25"),
    ("BK26", "~p | q, p", "q", "bk26"),
    ("BK27", "(p | q) | r", "p | (q | r)", "bk27"),
    ("BK28", "~p | r, ~q | r", "~(p | q) | r", "bk28"),
    ("BK29a", "~p | ~q, ~q | ~~q", "~~p | ~(p & q)", None),
    ("BK29b", "~p | ~q, ~p | ~~p", "~~q | ~(p & q)", None),
    ("BK29", "~p | ~q", "~(p & q)", "bk29"),
    ("BK30", "~p | q", "~(q & ~q)", "bk30"),
)

DOUBLE_LIFTS = {"bk3-double-lift": "BK3", "bk4-double-lift": "BK4", "bk12-double-lift": "BK12"}

_systems: dict[str, HSystem] = {}


def _data(kind: str, name: str) -> str:
    return resources.files(__package__).joinpath("data", kind, name).read_text(encoding="utf-8")


def _canon(id: str) -> str:
    return ALIASES.get(id, id)


def get_matrix(id: str) -> Matrix:
    try:
        return MATRICES[_canon(id)]
    except KeyError:
        raise CorpusError(f"unknown matrix {id!r}; known: {', '.join(MATRICES)}") from None


def get_system(id: str, fresh: bool = False) -> HSystem:
    """The named system; H_BK comes with its derived-rule registry checked."""
    id = _canon(id)
    if id not in SYSTEM_IDS:
        raise CorpusError(f"unknown system {id!r}; known: {', '.join(SYSTEM_IDS)}")
    if not fresh and id in _systems:
        return _systems[id]
    if id in ("R_BK_star", "H_BK"):
        star, h = assemble_bk_systems(get_system("R_BK", fresh=True))
        if id == "H_BK":
            _register_bk_derived(h)
        sys = star if id == "R_BK_star" else h
    else:
        sys = load_system(_data("systems", f"{id}.sys"))
    if not fresh:
        _systems[id] = sys
    return sys


def _read_linear(sys: HSystem, id: str) -> tuple[Statement, LinearDerivation]:
    _, claim, d = parse_derivation(_data("derivations", f"{id}.drv"), sys.signature)
    return claim, d


def _register_bk_derived(h: HSystem) -> None:
    for name, ante, concl, source in DERIVED_BK:
        schema = RuleSchema(name, tuple(parse_formula_list(ante)), tuple(parse_formula_list(concl)), "setfmla")
        if source is not None:
            _, template = _read_linear(h, source)
            template = normalize(h, template)
        else:
            half = "bk29-core" if name == "BK29a" else "bk29-mirror"
            _, core = _read_linear(h, half)
            disj, delta = schema.antecedent[0], schema.antecedent[0].args[0 if name == "BK29a" else 1]
            template = deduction_transform(h, core, disj, delta)
        h.register(schema, template, DERIVATION_NOTES.get(source or "", "deduction transform of half of BK29"))
        v = check_derived(h, name)
        if not v.accepted:
            raise CorpusError(f"derived rule {name} does not verify: {v}")


def derivation_ids() -> list[str]:
    return list(DERIVATION_NOTES)


def get_derivation(id: str) -> DerivationEntry:
    if id not in DERIVATION_NOTES:
        raise CorpusError(f"unknown derivation {id!r}")
    if id in DOUBLE_LIFTS:
        h = get_system("H_BK")
        d = lifted_derivation_scheme(h, DOUBLE_LIFTS[id])
        return DerivationEntry(id, "H_BK", Statement.of(d.premises, [d.conclusion]), d, DERIVATION_NOTES[id])
    text = _data("derivations", f"{id}.drv")
    head = text.split("system:", 1)[1].split("\n", 1)[0].strip()
    sys = get_system(head)
    system, claim, d = parse_derivation(text, sys.signature)
    return DerivationEntry(id, system, claim, d, DERIVATION_NOTES[id])


def validate() -> dict[str, list[str]]:
    """Load-time checks: rule soundness and derivation validity.  Returns failures."""
    problems: dict[str, list[str]] = {"rules": [], "derivations": []}
    for sid in SYSTEM_IDS:
        sys = get_system(sid)
        m = get_matrix(SYSTEM_MATRIX[sid])
        for r in sys.rules:
            if not rule_sound(m, r).holds:
                problems["rules"].append(f"{sid}:{r.name}")
    for did in derivation_ids():
        e = get_derivation(did)
        v = verify_derivation(get_system(e.system), e.derivation, e.claim)
        if not v.accepted:
            problems["derivations"].append(f"{did}: {v}")
    return problems


def export(root: Union[str, Path]) -> list[Path]:
    """Write every matrix, system and derivation under ``root``."""
    root = Path(root)
    written = []
    for kind in ("matrices", "systems", "derivations"):
        (root / kind).mkdir(parents=True, exist_ok=True)
    for mid, m in MATRICES.items():
        p = root / "matrices" / f"{mid}.mat"
        p.write_text(dump_matrix(Matrix(mid, m.algebra, m.designated)), encoding="utf-8")
        written.append(p)
    for sid in SYSTEM_IDS:
        p = root / "systems" / f"{sid}.sys"
        p.write_text(dump_system(get_system(sid)), encoding="utf-8")
        written.append(p)
    for did in derivation_ids():
        e = get_derivation(did)
        p = root / "derivations" / f"{did}.drv"
        p.write_text(format_derivation(e.derivation, e.claim, e.system), encoding="utf-8")
        written.append(p)
    return written


__all__ = [
    "CorpusError",
    "DerivationEntry",
    "derivation_ids",
    "export",
    "get_derivation",
    "get_matrix",
    "get_system",
    "validate",
]
