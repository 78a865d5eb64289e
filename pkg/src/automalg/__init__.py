"""Equations and coequations for deterministic and lasso automata.

The subpackages follow the constructions: :mod:`core` holds one-sorted
automata, :mod:`monoid` transition congruences and machines,
:mod:`equations` nuc, free, mupl and cofree, :mod:`lasso` the two-sorted
versions, :mod:`omega` γ-equivalence, admissibility and Wilke congruences,
and :mod:`oracle` brute-force reference computations used by the tests.
"""

from .core import (
    AcceptingDfa,
    Alphabet,
    AlphabetMismatch,
    AutomatonError,
    ContractViolation,
    Dfa,
    LawResult,
    PointedDfa,
    SizeGuardError,
)
from .lasso import Lasso, LassoAutomaton
from .monoid import CongruenceRep

__all__ = [
    "AcceptingDfa",
    "Alphabet",
    "AlphabetMismatch",
    "AutomatonError",
    "CongruenceRep",
    "ContractViolation",
    "Dfa",
    "Lasso",
    "LassoAutomaton",
    "LawResult",
    "PointedDfa",
    "SizeGuardError",
]
