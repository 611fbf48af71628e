# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""Quantifier elimination for the three theories, innermost quantifier first."""

from enum import Enum
from functools import partial

from pseudofinite_workbench.formula import Formula, Signature, check_signature, rename_bound_apart
from pseudofinite_workbench.logger import setup_logger
from pseudofinite_workbench.normal_forms import DEFAULT_DNF_CAP, eliminate_innermost
from pseudofinite_workbench.qe_pair import eliminate_exists_pair, simplify_pair
from pseudofinite_workbench.qe_str import eliminate_exists_str
from pseudofinite_workbench.star import eliminate_exists_star

logger = setup_logger(__name__)


class Theory(Enum):
    """Theories with an existential eliminator."""

    TREE = "tree"
    PAIR = "pair"
    STAR = "star"

    @property
    def signature(self) -> Signature:
        return Signature(self.value)


def eliminate_quantifiers(
    f: Formula,
    theory: Theory,
    cap: int = DEFAULT_DNF_CAP,
    completed: bool = True,
    fin: int | None = None,
) -> Formula:
    """
    Quantifier-free equivalent of ``f`` in ``theory``.

    Args:
        f: A formula in the theory's signature.
        theory: Which eliminator to use for each existential.
        cap: DNF literal budget.
        completed: For the tree theory, keep the sort conditions on linked parameters.
        fin: For the pair theory, the index of C_fin in the finite model the result is meant
            for; closed class conditions are read in the infinite model when omitted.

    Returns:
        A quantifier-free formula with the same free variables or fewer.

    Raises:
        SignatureError: If ``f`` is outside the theory's signature.
        DnfCapExceeded: If a DNF expansion grows past ``cap``.
    """
    check_signature(f, theory.signature)
    if theory is Theory.TREE:
        eliminator = partial(eliminate_exists_str, completed=completed)
    elif theory is Theory.PAIR:
        eliminator = partial(eliminate_exists_pair, cap=cap, fin=fin)
    else:
        eliminator = eliminate_exists_star
    logger.debug(f"Eliminating quantifiers in the {theory.value} theory")
    result = eliminate_innermost(rename_bound_apart(f), eliminator, cap)
    return simplify_pair(result, fin) if theory is Theory.PAIR else result
