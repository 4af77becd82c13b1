from typing import Dict

from ..lib.command import CommandInterface, register_commands
from ..lib.descent import (
    cocycle_witness,
    covering_datum_to_squares,
    datum_to_six,
    make_descent_datum,
    relation_witnesses,
    six_to_datum,
    squares_to_covering_datum,
)
from ..lib.finset import cartesian_witness, comparison_map


class CheckCartesian(CommandInterface):
    def run(self, report, instance, options):
        sq = instance.get("squares", "square")
        witness = cartesian_witness(sq)
        compare, _ = comparison_map(sq)
        report.details["apex"] = len(sq.apex)
        report.details["comparison"] = compare.assignment
        if witness is not None:
            report.fail(witness, "comparison map into the fiber product is not bijective")


class CheckCocycle(CommandInterface):
    def run(self, report, instance, options):
        cd = instance.get("data", "datum")
        witness = cocycle_witness(cd)
        if witness is not None:
            report.fail(witness, "p23*phi∘p12*phi differs from p13*phi")


class EquivCovering(CommandInterface):
    """
    phi -> (q1, q2) -> phi is the identity.
    """

    def run(self, report, instance, options):
        cd = instance.get("data", "datum")
        squares = covering_datum_to_squares(cd)
        back = squares_to_covering_datum(cd.cover, (squares.square1, squares.square2))
        report.details["q2"] = squares.q2.assignment
        witness = back.phi.first_difference(cd.phi)
        if witness is not None:
            report.fail(witness, "recovered covering datum differs")


class EquivDescent(CommandInterface):
    """
    phi -> (q1, q2, q12, q13, q23) -> phi is the identity.
    """

    def run(self, report, instance, options):
        cd = instance.get("data", "datum")
        presentation = datum_to_six(make_descent_datum(cd))
        report.details["relations"] = {
            name: witness is None
            for name, witness in relation_witnesses(presentation).items()
        }
        report.details["q23"] = presentation.q23.assignment
        witness = six_to_datum(presentation).phi.first_difference(cd.phi)
        if witness is not None:
            report.fail(witness, "recovered descent datum differs")


check_commands: Dict[str, CommandInterface] = {
    "check-cartesian": CheckCartesian(),
    "check-cocycle": CheckCocycle(),
    "equiv-covering": EquivCovering(),
    "equiv-descent": EquivDescent(),
}
register_commands(check_commands)
