"""
Galois coverings: a cover f: S' -> S with a group Γ of S-automorphisms of S'
such that theta: Γ × S' -> S'', (σ, s) -> (s, σs) is bijective.

Γ × A is the coproduct of |Γ| copies of A tagged by group elements, with
elements "(σ|a)"; Γ × Γ × A has elements "(σ|(τ|a))".
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from .descent import (
    base_change_to_s_prime,
    build_products,
    Cover,
    CoveredObject,
    CoveringDatum,
    datum_to_six,
    DescentDatum,
    effectivity_witness,
    make_descent_datum,
    PAIRS,
    pullback_along,
)
from .errors import (
    ActionNotOverS,
    BaseMismatch,
    GaloisSquareFails,
    IncompatibleAction,
    InvalidGroup,
    NotBijective,
    NotGalois,
    ResultNotHomomorphism,
    VerificationFailed,
)
from .finset import (
    compose,
    compose_all,
    copair,
    coproduct,
    coproduct_of_squares,
    decode_pair,
    encode_pair,
    encode_tuple,
    FinSet,
    identity,
    invert,
    is_cartesian,
    is_well_formed,
    SetMap,
    Square,
)
from .init_helper import get_logger

logger = get_logger()


@dataclass(frozen=True)
class FiniteGroup:
    """
    A group given by its full multiplication table:
    table[i][j] is elements[i] * elements[j].
    """

    elements: Tuple[str, ...]
    table: Tuple[Tuple[str, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        table = tuple(tuple(row) for row in self.table)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "table", table)
        n = len(elements)
        if n == 0:
            raise InvalidGroup("a group has at least one element")
        if len(set(elements)) != n:
            raise InvalidGroup("group elements are not distinct", elements)
        for elem in elements:
            if not is_well_formed(elem) or elem.startswith("("):
                raise InvalidGroup("group elements must be plain identifiers", elem)
        if len(table) != n or any(len(row) != n for row in table):
            raise InvalidGroup("multiplication table has the wrong shape", self.name)
        members = set(elements)
        for row in table:
            for prod in row:
                if prod not in members:
                    raise InvalidGroup("multiplication is not closed", prod)
        # identity and inverse lookups raise InvalidGroup when they do not exist
        self.identity
        self._inverses
        for a, b, c in itertools.product(elements, repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                raise InvalidGroup("multiplication is not associative", (a, b, c))

    @classmethod
    def from_table(
        cls, elements: Sequence[str], table: Mapping[Tuple[str, str], str], name: str = ""
    ) -> "FiniteGroup":
        return cls(
            tuple(elements),
            tuple(tuple(table[(a, b)] for b in elements) for a in elements),
            name,
        )

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {elem: idx for idx, elem in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def mul(self, a: str, b: str) -> str:
        return self.table[self._index[a]][self._index[b]]

    @cached_property
    def identity(self) -> str:
        for e in self.elements:
            if all(self.mul(e, a) == a and self.mul(a, e) == a for a in self.elements):
                return e
        raise InvalidGroup("no identity element", self.name)

    @cached_property
    def _inverses(self) -> Dict[str, str]:
        result = {}
        for a in self.elements:
            inverse = next(
                (b for b in self.elements if self.mul(a, b) == self.identity), None
            )
            if inverse is None or self.mul(inverse, a) != self.identity:
                raise InvalidGroup("element has no inverse", a)
            result[a] = inverse
        return result

    def inverse(self, a: str) -> str:
        return self._inverses[a]


def trivial_group() -> FiniteGroup:
    return FiniteGroup(("e",), (("e",),), "C1")


def cyclic_group(n: int) -> FiniteGroup:
    """
    C_n with elements e, g, g2, ..., g{n-1}.
    """
    names = ["e", "g"] + [f"g{k}" for k in range(2, n)]
    names = names[:n]
    return FiniteGroup(
        tuple(names),
        tuple(tuple(names[(i + j) % n] for j in range(n)) for i in range(n)),
        f"C{n}",
    )


def symmetric_group(n: int) -> FiniteGroup:
    """
    S_n on {0, ..., n-1}; elements are one-line notations "p012", ... and
    (a*b)(i) = a(b(i)).
    """
    perms = list(itertools.permutations(range(n)))
    names = {perm: "p" + "".join(str(i) for i in perm) for perm in perms}

    def mul(a, b):
        return tuple(a[b[i]] for i in range(n))

    return FiniteGroup(
        tuple(names[p] for p in perms),
        tuple(tuple(names[mul(a, b)] for b in perms) for a in perms),
        f"S{n}",
    )


def gamma_times(group: FiniteGroup, finset: FinSet) -> FinSet:
    union, _ = coproduct(
        [finset] * len(group), group.elements, f"{group.name or 'G'}x{finset.label}"
    )
    return union


@dataclass(frozen=True)
class GroupActionOnCover:
    """
    act[k] is the S-automorphism of S' given by group.elements[k].
    """

    group: FiniteGroup
    cover: Cover
    act: Tuple[SetMap, ...]

    def __post_init__(self):
        act = tuple(self.act)
        object.__setattr__(self, "act", act)
        if len(act) != len(self.group):
            raise InvalidGroup("one automorphism per group element is required")
        f = self.cover.f
        for sigma, auto in zip(self.group.elements, act):
            if auto.dom != f.dom or auto.cod != f.dom:
                raise ActionNotOverS("automorphism is not a map S' -> S'", sigma)
            if not auto.is_bijective():
                raise NotBijective("action element is not bijective", sigma)
            witness = compose(auto, f).first_difference(f)
            if witness is not None:
                raise ActionNotOverS(f"{sigma} does not commute with f", (sigma, witness))
        if self.of(self.group.identity) != identity(f.dom):
            raise InvalidGroup("identity does not act trivially", self.group.identity)
        for sigma, tau in itertools.product(self.group.elements, repeat=2):
            expected = compose(self.of(tau), self.of(sigma))
            if self.of(self.group.mul(sigma, tau)) != expected:
                raise InvalidGroup("action is not a homomorphism", (sigma, tau))

    @classmethod
    def from_mapping(
        cls, group: FiniteGroup, cover: Cover, act: Mapping[str, SetMap]
    ) -> "GroupActionOnCover":
        return cls(group, cover, tuple(act[sigma] for sigma in group.elements))

    def of(self, sigma: str) -> SetMap:
        return self.act[self.group._index[sigma]]

    @property
    def a(self) -> SetMap:
        """
        Γ × S' -> S', (σ, s) -> σs.
        """
        return copair(self.act, self.cover.s_prime, self.group.elements)

    @property
    def b(self) -> SetMap:
        """
        Γ × S' -> S', (σ, s) -> s.
        """
        s_prime = self.cover.s_prime
        return copair([identity(s_prime)] * len(self.group), s_prime, self.group.elements)


def theta_map(action: GroupActionOnCover) -> SetMap:
    """
    theta = (b, a)_S: Γ × S' -> S'', (σ, s) -> (s, σs).
    """
    double, _ = build_products(action.cover)
    source = gamma_times(action.group, action.cover.s_prime)

    def apply(elem):
        sigma, s = decode_pair(elem)
        return encode_pair(s, action.of(sigma)(s))

    return SetMap.from_function(source, double.s2, apply)


def galois_witness(cover: Cover, action: GroupActionOnCover) -> Optional[str]:
    """
    An element of S'' hit twice (or not at all) by theta, None if theta is
    bijective.
    """
    if action.cover != cover:
        raise ActionNotOverS("action is defined on a different cover")
    theta = theta_map(action)
    seen = set()
    for image in theta.images:
        if image in seen:
            return image
        seen.add(image)
    return next((elem for elem in theta.cod if elem not in seen), None)


def is_galois(cover: Cover, action: GroupActionOnCover) -> bool:
    return galois_witness(cover, action) is None


def fibers_are_torsors(cover: Cover, action: GroupActionOnCover) -> bool:
    """
    Every fiber of f is a single free Γ-orbit.
    """
    for s in cover.base:
        fiber = cover.f.fibers[s]
        point = fiber[0]
        orbit = [action.of(sigma)(point) for sigma in action.group]
        if sorted(orbit) != sorted(fiber):
            return False
    return True


@dataclass(frozen=True)
class GaloisCover:
    cover: Cover
    action: GroupActionOnCover

    def __post_init__(self):
        witness = galois_witness(self.cover, self.action)
        if witness is not None:
            raise NotGalois("theta is not bijective", witness)

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    @cached_property
    def theta(self) -> SetMap:
        return theta_map(self.action)

    @cached_property
    def theta_inverse(self) -> SetMap:
        return invert(self.theta)

    @cached_property
    def varrho(self) -> SetMap:
        """
        Γ × Γ × S' -> S''', (σ, τ, s) -> (s, τs, (στ)s).
        """
        _, triple = build_products(self.cover)
        group = self.group
        source = gamma_times(group, gamma_times(group, self.cover.s_prime))

        def apply(elem):
            sigma, rest = decode_pair(elem)
            tau, s = decode_pair(rest)
            return encode_tuple(
                s, self.action.of(tau)(s), self.action.of(group.mul(sigma, tau))(s)
            )

        return SetMap.from_function(source, triple.s3, apply)

    def sigma_between(self, s: str, t: str) -> str:
        """
        The unique σ with t = σs.
        """
        sigma, _ = decode_pair(self.theta_inverse(encode_pair(s, t)))
        return sigma


def galois_cover_from_torsor(base: FinSet, group: FiniteGroup) -> GaloisCover:
    """
    S' = S × Γ with f the projection and σ(s, τ) = (s, στ).
    """
    s_prime = FinSet(
        tuple(encode_pair(s, tau) for s in base for tau in group), f"{base.label}xG"
    )
    f = SetMap.from_function(s_prime, base, lambda elem: decode_pair(elem)[0])
    cover = Cover(f)

    def translate(sigma):
        def apply(elem):
            s, tau = decode_pair(elem)
            return encode_pair(s, group.mul(sigma, tau))

        return SetMap.from_function(s_prime, s_prime, apply)

    action = GroupActionOnCover(group, cover, tuple(translate(sigma) for sigma in group))
    return GaloisCover(cover, action)


def _tilde_p(g: GaloisCover, jk: str) -> SetMap:
    group = g.group
    s_prime = g.cover.s_prime
    source = g.varrho.dom
    target = g.theta.dom

    def apply(elem):
        sigma, rest = decode_pair(elem)
        tau, s = decode_pair(rest)
        if jk == "12":
            return encode_pair(tau, s)
        if jk == "13":
            return encode_pair(group.mul(sigma, tau), s)
        return encode_pair(sigma, g.action.of(tau)(s))

    return SetMap.from_function(source, target, apply)


def galois_triple_check(g: GaloisCover, strict: bool = False) -> bool:
    """
    varrho is bijective and p_jk∘varrho = theta∘p~_jk for jk in 12, 13, 23.
    With strict set, the first failing square raises GaloisSquareFails.
    """
    failures: List[str] = []
    if not g.varrho.is_bijective():
        failures.append("varrho")
    _, triple = build_products(g.cover)
    for jk in PAIRS:
        left = compose(g.varrho, triple.p(jk))
        right = compose(_tilde_p(g, jk), g.theta)
        if left.first_difference(right) is not None:
            failures.append(f"comm{jk}")
    if failures:
        logger.info(f"galois triple check failed: {failures}")
        if strict:
            raise GaloisSquareFails("Galois triple check failed", failures[0])
        return False
    return True


@dataclass(frozen=True)
class CompatibleAction:
    """
    rho[k] is the S-automorphism of X given by group.elements[k], lying over
    the action on S': pi∘rho(σ) = σ∘pi.
    """

    base: GaloisCover
    obj: CoveredObject
    rho: Tuple[SetMap, ...]

    def __post_init__(self):
        rho = tuple(self.rho)
        object.__setattr__(self, "rho", rho)
        group = self.base.group
        if self.obj.base != self.base.cover.s_prime:
            raise BaseMismatch("object does not lie over S'", self.obj.base.label)
        if len(rho) != len(group):
            raise IncompatibleAction("one automorphism per group element is required")
        pi = self.obj.pi
        for sigma, auto in zip(group.elements, rho):
            if auto.dom != self.obj.x or auto.cod != self.obj.x:
                raise IncompatibleAction("rho(σ) is not a map X -> X", sigma)
            if not auto.is_bijective():
                raise IncompatibleAction("rho(σ) is not bijective", sigma)
            witness = compose(auto, pi).first_difference(
                compose(pi, self.base.action.of(sigma))
            )
            if witness is not None:
                raise IncompatibleAction(
                    f"rho({sigma}) does not lie over {sigma}", (sigma, witness)
                )
        witness = homomorphism_witness(group, rho, self.obj.x)
        if witness is not None:
            raise IncompatibleAction("rho is not a homomorphism", witness)

    @classmethod
    def from_mapping(
        cls, base: GaloisCover, obj: CoveredObject, rho: Mapping[str, SetMap]
    ) -> "CompatibleAction":
        return cls(base, obj, tuple(rho[sigma] for sigma in base.group.elements))

    @property
    def group(self) -> FiniteGroup:
        return self.base.group

    def of(self, sigma: str) -> SetMap:
        return self.rho[self.group._index[sigma]]


def homomorphism_witness(
    group: FiniteGroup, maps: Sequence[SetMap], carrier: FinSet
) -> Optional[Tuple[str, ...]]:
    lookup = dict(zip(group.elements, maps))
    if lookup[group.identity] != identity(carrier):
        return (group.identity,)
    for sigma, tau in itertools.product(group.elements, repeat=2):
        if lookup[group.mul(sigma, tau)] != compose(lookup[tau], lookup[sigma]):
            return (sigma, tau)
    return None


def coproduct_action(ca: CompatibleAction) -> SetMap:
    """
    ∐ rho(σ): Γ × X -> X.
    """
    return copair(ca.rho, ca.obj.x, ca.group.elements)


def srho_squares(ca: CompatibleAction) -> List[Square]:
    """
    For every σ the square rho(σ) over σ; each is cartesian since both
    horizontal arrows are bijections.
    """
    pi = ca.obj.pi
    return [
        Square(ca.of(sigma), pi, ca.base.action.of(sigma), pi) for sigma in ca.group
    ]


def act2_square(ca: CompatibleAction) -> Square:
    """
    The coproduct of the rho(σ) squares:
        Γ × X --∐rho(σ)--> X
          |                |
        Γ × S' ----a-----> S'
    """
    return coproduct_of_squares(srho_squares(ca), ca.obj.pi, ca.group.elements)


def srho_squares_cartesian(ca: CompatibleAction) -> bool:
    return all(is_cartesian(sq) for sq in srho_squares(ca)) and is_cartesian(
        act2_square(ca)
    )


def _theta_x(base: GaloisCover, obj: CoveredObject) -> SetMap:
    double, _ = build_products(base.cover)
    x2 = pullback_along(obj, double.p1, "p1*X")
    pi = obj.pi

    def apply(elem):
        sigma, x = decode_pair(elem)
        s = pi(x)
        return encode_pair(x, encode_pair(s, base.action.of(sigma)(s)))

    return SetMap.from_function(gamma_times(base.group, obj.x), x2.carrier, apply)


def _varrho_x(base: GaloisCover, obj: CoveredObject) -> SetMap:
    double, triple = build_products(base.cover)
    x2 = pullback_along(obj, double.p1, "p1*X")
    x3 = pullback_along(x2.as_object(), triple.p12, "X'''")
    group = base.group
    act = base.action.of
    pi = obj.pi

    def apply(elem):
        sigma, rest = decode_pair(elem)
        tau, x = decode_pair(rest)
        s = pi(x)
        t = act(tau)(s)
        u = act(group.mul(sigma, tau))(s)
        return encode_pair(encode_pair(x, encode_pair(s, t)), encode_tuple(s, t, u))

    return SetMap.from_function(
        gamma_times(group, gamma_times(group, obj.x)), x3.carrier, apply
    )


class LiftedIsomorphisms(NamedTuple):
    theta_x: SetMap
    varrho_x: SetMap


def theta_lift(ca: CompatibleAction) -> LiftedIsomorphisms:
    """
    theta_X'': Γ × X -> X'', (σ, x) -> (x, pi(x), σpi(x)) and
    varrho_X''': Γ × Γ × X -> X''', (σ, τ, x) -> (x, pi(x), τpi(x), (στ)pi(x)).
    """
    theta_x = _theta_x(ca.base, ca.obj)
    varrho_x = _varrho_x(ca.base, ca.obj)
    for name, fn in (("theta_X''", theta_x), ("varrho_X'''", varrho_x)):
        if not fn.is_bijective():
            raise VerificationFailed(f"{name} is not bijective", fn.dom.label)
    return LiftedIsomorphisms(theta_x, varrho_x)


def _tilde_q(ca: CompatibleAction, jk: str, source: FinSet, target: FinSet) -> SetMap:
    group = ca.group

    def apply(elem):
        sigma, rest = decode_pair(elem)
        tau, x = decode_pair(rest)
        if jk == "12":
            return encode_pair(tau, x)
        if jk == "13":
            return encode_pair(group.mul(sigma, tau), x)
        return encode_pair(sigma, ca.of(tau)(x))

    return SetMap.from_function(source, target, apply)


def _gamma_pi(ca: CompatibleAction, depth: int) -> SetMap:
    """
    1_Γ × pi (depth 1) or 1_Γ × 1_Γ × pi (depth 2).
    """
    group = ca.group
    source, target = ca.obj.x, ca.base.cover.s_prime
    for _ in range(depth):
        source, target = gamma_times(group, source), gamma_times(group, target)

    def apply(elem):
        if depth == 1:
            sigma, x = decode_pair(elem)
            return encode_pair(sigma, ca.obj.pi(x))
        sigma, rest = decode_pair(elem)
        tau, x = decode_pair(rest)
        return encode_tuple(sigma, tau, ca.obj.pi(x))

    return SetMap.from_function(source, target, apply)


def qt_squares(ca: CompatibleAction) -> Dict[str, Square]:
    """
    The squares
        Γ × Γ × X --q~jk--> Γ × X
            |                 |
        Γ × Γ × S' --p~jk--> Γ × S'
    for jk in 12, 13, 23.
    """
    lifted = theta_lift(ca)
    gamma_x, gamma_gamma_x = lifted.theta_x.dom, lifted.varrho_x.dom
    gamma_pi, gamma_gamma_pi = _gamma_pi(ca, 1), _gamma_pi(ca, 2)
    return {
        jk: Square(
            _tilde_q(ca, jk, gamma_gamma_x, gamma_x),
            gamma_gamma_pi,
            _tilde_p(ca.base, jk),
            gamma_pi,
        )
        for jk in PAIRS
    }


def qt_squares_cartesian(ca: CompatibleAction) -> bool:
    return all(is_cartesian(square) for square in qt_squares(ca).values())


def _verify(name: str, left: SetMap, right: SetMap):
    witness = left.first_difference(right)
    if witness is not None:
        raise VerificationFailed(f"{name} does not hold", witness)


def action_to_datum(ca: CompatibleAction) -> DescentDatum:
    """
    phi(x, pi(x), s) = (rho(σ)x, pi(x), s) where σ is the unique element
    with s = σpi(x).
    """
    base = ca.base
    if not is_galois(base.cover, base.action):
        raise NotGalois("base cover is not Galois", galois_witness(base.cover, base.action))
    cd = CoveringDatum.from_fibers(
        ca.obj, base.cover, lambda x, s, t: ca.of(base.sigma_between(s, t))(x)
    )
    lifted = theta_lift(ca)
    spread = coproduct_action(ca)
    frame = cd.frame
    q2 = compose(cd.phi, frame.pulled[2].proj)
    _verify("q2 = ∐rho(σ)∘theta_X''^-1", q2, compose(invert(lifted.theta_x), spread))

    if not srho_squares_cartesian(ca):
        raise VerificationFailed("the action squares are not cartesian")
    dd = make_descent_datum(cd)
    presentation = datum_to_six(dd)

    gamma_x = lifted.theta_x.dom
    gamma_gamma_x = lifted.varrho_x.dom
    varrho_inverse = invert(lifted.varrho_x)
    tilde = {jk: _tilde_q(ca, jk, gamma_gamma_x, gamma_x) for jk in PAIRS}
    for jk in PAIRS:
        _verify(
            f"q{jk} = theta_X''∘q~{jk}∘varrho_X'''^-1",
            presentation.q(jk),
            compose_all(varrho_inverse, tilde[jk], lifted.theta_x),
        )
    _verify(
        "q1∘theta_X''∘q~23 = ∐rho(σ)∘q~12",
        compose_all(tilde["23"], lifted.theta_x, presentation.q1),
        compose(tilde["12"], spread),
    )
    _verify(
        "∐rho(σ)∘q~23 = ∐rho(σ)∘q~13",
        compose(tilde["23"], spread),
        compose(tilde["13"], spread),
    )
    failed = [jk for jk, square in qt_squares(ca).items() if not is_cartesian(square)]
    if failed:
        raise VerificationFailed(f"square q~{failed[0]} is not cartesian", failed[0])
    logger.debug(f"compiled action of {ca.group.name} on {ca.obj.x.label}")
    return dd


def datum_to_action(
    g: GaloisCover, obj: CoveredObject, dd: DescentDatum
) -> CompatibleAction:
    """
    ∐rho(σ) = p_2,X ∘ phi ∘ theta_X''.
    """
    if dd.obj != obj or dd.cover != g.cover:
        raise BaseMismatch("descent datum belongs to a different object or cover")
    theta_x = _theta_x(g, obj)
    p2x = dd.datum.frame.pulled[2]
    spread = compose_all(theta_x, dd.phi, p2x.proj)
    rho = tuple(
        SetMap.from_function(obj.x, obj.x, lambda x, s=sigma: spread(encode_pair(s, x)))
        for sigma in g.group
    )
    witness = homomorphism_witness(g.group, rho, obj.x)
    if witness is not None:
        raise ResultNotHomomorphism("recovered action is not a homomorphism", witness)
    return CompatibleAction(g, obj, rho)


def orbit_partition(ca: CompatibleAction) -> Dict[str, str]:
    """
    Maps every element of X to the minimum element of its Γ-orbit.
    """
    graph = nx.Graph()
    graph.add_nodes_from(ca.obj.x.elements)
    for auto in ca.rho:
        graph.add_edges_from(auto.items())
    representative = {}
    for component in nx.connected_components(graph):
        rep = min(component)
        for x in component:
            representative[x] = rep
    return representative


class DescendedObject(NamedTuple):
    y: CoveredObject
    theta_desc: SetMap


def descend_object(ca: CompatibleAction) -> DescendedObject:
    """
    Y = X/Γ over S with theta_desc(x) = ([x], pi(x)). An orbit [x] is
    represented by its minimum element.
    """
    base = ca.base
    if not is_galois(base.cover, base.action):
        raise NotGalois("base cover is not Galois", galois_witness(base.cover, base.action))
    f = base.cover.f
    if not fibers_are_torsors(base.cover, base.action):
        raise VerificationFailed("fibers of f are not single Γ-orbits")

    representative = orbit_partition(ca)
    y_set = FinSet(tuple(set(representative.values())), "Y")
    pi_y = SetMap.from_function(y_set, f.cod, lambda rep: f(ca.obj.pi(rep)))
    y = CoveredObject(y_set, pi_y)
    y_prime = base_change_to_s_prime(y, base.cover)
    theta_desc = SetMap.from_function(
        ca.obj.x,
        y_prime.x,
        lambda x: encode_pair(representative[x], ca.obj.pi(x)),
    )
    if not theta_desc.is_bijective():
        raise VerificationFailed("theta_desc is not bijective", ca.obj.x.label)
    dd = action_to_datum(ca)
    witness = effectivity_witness(dd, y, theta_desc)
    if witness is not None:
        raise VerificationFailed("descended object does not carry the datum", witness)
    logger.debug(f"{ca.obj.x.label} descends to {len(y_set)} orbits")
    return DescendedObject(y, theta_desc)


def canonical_action(y: CoveredObject, g: GaloisCover) -> CompatibleAction:
    """
    ∐(1_Y × σ) on Y' = Y ×_S S'.
    """
    if y.base != g.cover.base:
        raise BaseMismatch("object does not lie over S", y.base.label)
    y_prime = base_change_to_s_prime(y, g.cover)

    def translate(sigma):
        act = g.action.of(sigma)

        def apply(elem):
            point, s = decode_pair(elem)
            return encode_pair(point, act(s))

        return SetMap.from_function(y_prime.x, y_prime.x, apply)

    return CompatibleAction(g, y_prime, tuple(translate(sigma) for sigma in g.group))
