"""H-systems, derivations, verification and proof search."""

from .derivation import (
    ChainApp,
    DerivedApp,
    LinearDerivation,
    Premise,
    ProofBuilder,
    ProofError,
    RuleApp,
    Statement,
    Step,
    TreeDerivation,
    TreeNode,
    expand_derivation,
    expand_derived,
    instantiate,
)
from .formats import (
    DerivationFormatError,
    derivation_to_json,
    format_claim,
    format_derivation,
    parse_claim,
    parse_derivation,
    tree_to_dot,
)
from .rules import SETFMLA, SETSET, DerivedRule, HSystem, RuleSchema, dump_system, load_system, satisfies_containment
from .search import (
    BUDGET,
    INCONCLUSIVE,
    NO_PROOF,
    PROVED,
    SearchConfig,
    SearchResult,
    prove,
    prove_setfmla_bounded,
    prove_setset_analytic,
    star_universe,
)
from .verify import Verdict, check_derived, check_registry, rule_sound, verify_derivation

__all__ = [
    "ChainApp",
    "DerivedApp",
    "LinearDerivation",
    "Premise",
    "ProofBuilder",
    "ProofError",
    "RuleApp",
    "Statement",
    "Step",
    "TreeDerivation",
    "TreeNode",
    "expand_derivation",
    "expand_derived",
    "instantiate",
    "DerivationFormatError",
    "derivation_to_json",
    "format_claim",
    "format_derivation",
    "parse_claim",
    "parse_derivation",
    "tree_to_dot",
    "SETFMLA",
    "SETSET",
    "DerivedRule",
    "HSystem",
    "RuleSchema",
    "dump_system",
    "load_system",
    "satisfies_containment",
    "BUDGET",
    "INCONCLUSIVE",
    "NO_PROOF",
    "PROVED",
    "SearchConfig",
    "SearchResult",
    "prove",
    "prove_setfmla_bounded",
    "prove_setset_analytic",
    "star_universe",
    "Verdict",
    "check_derived",
    "check_registry",
    "rule_sound",
    "verify_derivation",
]
