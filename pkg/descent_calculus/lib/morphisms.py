"""
The Γ-action on Hom_S'(X1, X2) and the descent of invariant morphisms to
the base.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Tuple

from .descent import CoveredObject, DescentDatum, pullback_morphism
from .errors import InconsistentProblem, NotInvariant, NotOverSPrime, VerificationFailed
from .finset import (
    base_change,
    compose,
    compose_all,
    coproduct_map,
    decode_pair,
    encode_pair,
    identity,
    invert,
    maps_over,
    SetMap,
)
from .galois import (
    action_to_datum,
    canonical_action,
    CompatibleAction,
    coproduct_action,
    descend_object,
    GaloisCover,
)
from .init_helper import get_logger

logger = get_logger()


@dataclass(frozen=True)
class EquivariantPair:
    rho1: CompatibleAction
    rho2: CompatibleAction

    def __post_init__(self):
        if self.rho1.base != self.rho2.base:
            raise InconsistentProblem("actions live on different Galois covers")

    @property
    def base(self) -> GaloisCover:
        return self.rho1.base

    @property
    def x1(self) -> CoveredObject:
        return self.rho1.obj

    @property
    def x2(self) -> CoveredObject:
        return self.rho2.obj

    @cached_property
    def phi1(self) -> DescentDatum:
        return action_to_datum(self.rho1)

    @cached_property
    def phi2(self) -> DescentDatum:
        return action_to_datum(self.rho2)


def _check_over_s_prime(delta: SetMap, pair: EquivariantPair):
    if delta.dom != pair.x1.x or delta.cod != pair.x2.x:
        raise NotOverSPrime("morphism is not a map X1 -> X2", delta.dom.label)
    witness = compose(delta, pair.x2.pi).first_difference(pair.x1.pi)
    if witness is not None:
        raise NotOverSPrime("morphism does not commute with the structure maps", witness)


def hom_over(x1: CoveredObject, x2: CoveredObject) -> Iterator[SetMap]:
    """
    Every S'-morphism X1 -> X2.
    """
    return maps_over(x1.pi, x2.pi)


def act_on_hom(sigma: str, delta: SetMap, pair: EquivariantPair) -> SetMap:
    """
    σ·delta = rho2(σ)∘delta∘rho1(σ)^-1.
    """
    _check_over_s_prime(delta, pair)
    return compose_all(invert(pair.rho1.of(sigma)), delta, pair.rho2.of(sigma))


def invariance_witness(
    delta: SetMap, pair: EquivariantPair
) -> Optional[Tuple[str, str]]:
    """
    The first (σ, x) with (σ·delta)(x) != delta(x).
    """
    for sigma in pair.base.group:
        x = act_on_hom(sigma, delta, pair).first_difference(delta)
        if x is not None:
            return sigma, x
    return None


def is_invariant(delta: SetMap, pair: EquivariantPair) -> bool:
    return invariance_witness(delta, pair) is None


def poq_witness(delta: SetMap, pair: EquivariantPair) -> Optional[str]:
    """
    First element of p1*X1 where phi2∘p1*(delta) and p2*(delta)∘phi1 differ.
    """
    _check_over_s_prime(delta, pair)
    cover = pair.base.cover
    pulled1 = pullback_morphism(delta, pair.x1, pair.x2, cover, 1)
    pulled2 = pullback_morphism(delta, pair.x1, pair.x2, cover, 2)
    left = compose(pulled1, pair.phi2.phi)
    right = compose(pair.phi1.phi, pulled2)
    return left.first_difference(right)


def poq_commutes(delta: SetMap, pair: EquivariantPair) -> bool:
    return poq_witness(delta, pair) is None


def poq_commutes_via_geq(delta: SetMap, pair: EquivariantPair) -> bool:
    """
    ∐rho2(σ)∘(1_Γ × delta) = delta∘∐rho1(σ) as maps Γ × X1 -> X2.
    """
    _check_over_s_prime(delta, pair)
    group = pair.base.group
    spread_delta = coproduct_map([delta] * len(group), group.elements)
    left = compose(spread_delta, coproduct_action(pair.rho2))
    right = compose(coproduct_action(pair.rho1), delta)
    return left.first_difference(right) is None


@dataclass(frozen=True)
class DescendedMorphismProblem:
    """
    delta: X1 -> X2 over S' transported along theta_i: X_i -> Y_i' to
    epsilon = theta2∘delta∘theta1^-1.
    """

    pair: EquivariantPair
    y1: CoveredObject
    y2: CoveredObject
    theta1: SetMap
    theta2: SetMap
    delta: SetMap
    epsilon: SetMap

    @classmethod
    def from_descents(
        cls, pair: EquivariantPair, delta: SetMap
    ) -> "DescendedMorphismProblem":
        y1, theta1 = descend_object(pair.rho1)
        y2, theta2 = descend_object(pair.rho2)
        epsilon = compose_all(invert(theta1), delta, theta2)
        return cls(pair, y1, y2, theta1, theta2, delta, epsilon)


def _check_problem(p: DescendedMorphismProblem):
    try:
        _check_over_s_prime(p.delta, p.pair)
    except NotOverSPrime as err:
        raise InconsistentProblem(str(err), err.witness)
    for name, theta in (("theta1", p.theta1), ("theta2", p.theta2)):
        if not theta.is_bijective():
            raise InconsistentProblem(f"{name} is not bijective", theta.dom.label)
    if p.theta1.dom != p.pair.x1.x or p.theta2.dom != p.pair.x2.x:
        raise InconsistentProblem("theta does not start at the equivariant objects")
    if p.epsilon.dom != p.theta1.cod or p.epsilon.cod != p.theta2.cod:
        raise InconsistentProblem("epsilon is not a map Y1' -> Y2'")
    expected = compose_all(invert(p.theta1), p.delta, p.theta2)
    witness = p.epsilon.first_difference(expected)
    if witness is not None:
        raise InconsistentProblem("epsilon is not theta2∘delta∘theta1^-1", witness)


def descend_morphism(p: DescendedMorphismProblem) -> SetMap:
    """
    The unique psi: Y1 -> Y2 with epsilon = psi ×_S S', defined on the point
    of Y1' over the least element of each fiber of f and verified everywhere.
    """
    _check_problem(p)
    g = p.pair.base
    c1 = canonical_action(p.y1, g)
    c2 = canonical_action(p.y2, g)
    if c1.obj.x != p.epsilon.dom or c2.obj.x != p.epsilon.cod:
        raise InconsistentProblem("epsilon does not connect the base changes of Y1, Y2")
    for sigma in g.group:
        transported = compose_all(invert(c1.of(sigma)), p.epsilon, c2.of(sigma))
        witness = transported.first_difference(p.epsilon)
        if witness is not None:
            logger.info(f"epsilon is not invariant under {sigma}")
            raise NotInvariant("epsilon is not Γ-invariant", (sigma, witness))

    f = g.cover.f
    assignment = {}
    for y in p.y1.x:
        s = min(f.fiber(p.y1.pi(y)))
        assignment[y] = decode_pair(p.epsilon(encode_pair(y, s)))[0]
    psi = SetMap.from_dict(p.y1.x, p.y2.x, assignment)
    witness = compose(psi, p.y2.pi).first_difference(p.y1.pi)
    if witness is not None:
        raise VerificationFailed("descended morphism is not over S", witness)
    witness = base_change(psi, p.y1.pi, p.y2.pi, f).first_difference(p.epsilon)
    if witness is not None:
        raise VerificationFailed("epsilon differs from psi ×_S S'", witness)
    return psi


def descend_equivariant(pair: EquivariantPair, delta: SetMap) -> SetMap:
    return descend_morphism(DescendedMorphismProblem.from_descents(pair, delta))


def functoriality_witness(
    rho1: CompatibleAction,
    rho2: CompatibleAction,
    rho3: CompatibleAction,
    delta12: SetMap,
    delta23: SetMap,
) -> Optional[Tuple[str, str]]:
    """
    Descent of the identity of X1 must be the identity of Y1, and the descent
    of delta23∘delta12 the composite of the two descents. Returns the first
    violation as (law, element) or None.
    """
    y1 = descend_object(rho1).y
    psi11 = descend_equivariant(EquivariantPair(rho1, rho1), identity(rho1.obj.x))
    witness = psi11.first_difference(identity(y1.x))
    if witness is not None:
        return "identity", witness
    psi12 = descend_equivariant(EquivariantPair(rho1, rho2), delta12)
    psi23 = descend_equivariant(EquivariantPair(rho2, rho3), delta23)
    psi13 = descend_equivariant(
        EquivariantPair(rho1, rho3), compose(delta12, delta23)
    )
    witness = psi13.first_difference(compose(psi12, psi23))
    if witness is not None:
        return "composite", witness
    return None
