from typing import Dict

from ..lib.command import CommandInterface, register_commands
from ..lib.descent import make_descent_datum
from ..lib.galois import (
    action_to_datum,
    datum_to_action,
    descend_object,
    galois_triple_check,
    galois_witness,
    GaloisCover,
)
from ..lib.morphisms import (
    descend_morphism,
    DescendedMorphismProblem,
    EquivariantPair,
    is_invariant,
)


class GaloisCheck(CommandInterface):
    """
    theta: Γ × S' -> S'' is bijective and the triple squares commute.
    """

    def run(self, report, instance, options):
        action = instance.get("actions", "action")
        report.details["group"] = action.group.name
        witness = galois_witness(action.cover, action)
        if witness is not None:
            report.fail(witness, "theta: Γ × S' -> S'' is not bijective")
            return
        galois_triple_check(GaloisCover(action.cover, action), strict=True)


class CompileAction(CommandInterface):
    def run(self, report, instance, options):
        ca = instance.get("compatible", "compatible")
        dd = action_to_datum(ca)
        report.details["phi"] = dd.phi.assignment


class RecoverAction(CommandInterface):
    """
    Reads the datum and the Galois action on its cover, and emits rho(σ) for
    every σ.
    """

    def run(self, report, instance, options):
        cd = instance.get("data", "datum")
        action = instance.get("actions", "action")
        g = GaloisCover(action.cover, action)
        ca = datum_to_action(g, cd.obj, make_descent_datum(cd))
        report.details["rho"] = {
            sigma: auto.assignment for sigma, auto in zip(ca.group, ca.rho)
        }


class Descend(CommandInterface):
    def run(self, report, instance, options):
        ca = instance.get("compatible", "compatible")
        y, theta_desc = descend_object(ca)
        report.details["Y"] = list(y.x.elements)
        report.details["pi_Y"] = y.pi.assignment
        report.details["theta_desc"] = theta_desc.assignment


class DescendMorphism(CommandInterface):
    def run(self, report, instance, options):
        rho1, rho2, delta = instance.get("morphisms", "morphism")
        pair = EquivariantPair(rho1, rho2)
        report.details["invariant"] = is_invariant(delta, pair)
        psi = descend_morphism(DescendedMorphismProblem.from_descents(pair, delta))
        report.details["psi"] = psi.assignment


action_commands: Dict[str, CommandInterface] = {
    "galois-check": GaloisCheck(),
    "compile-action": CompileAction(),
    "recover-action": RecoverAction(),
    "descend": Descend(),
    "descend-morphism": DescendMorphism(),
}
register_commands(action_commands)
