"""
Covering data and descent data relative to a cover f: S' -> S, and their
presentation by cartesian squares.

Notation used throughout:
  - S'' = S' ×_S S' with elements "(s|t)", S''' with elements "(s1|(s2|s3))";
  - p_i*X = X ×_{S',p_i} S'' with elements "(x|(s|t))";
  - X'' = p_1*X and X''' = p_12*X'' with elements "((x|(s1|s2))|(s1|(s2|s3)))".

The identifications between iterated pullbacks induced by the relations among
the projections of S''' are explicit re-encoding bijections, so every equality
of maps checked here is a comparison of image tuples.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Dict, Iterator, NamedTuple, Optional, Tuple

from .errors import (
    BaseMismatch,
    CocycleFails,
    InvalidDatum,
    NotBijective,
    NotCartesian,
    NotSurjective,
    RelationViolated,
    TopEdgeNotProjection,
    VerificationFailed,
)
from .finset import (
    base_change,
    cartesian_witness,
    comparison_map,
    compose,
    compose_all,
    decode_pair,
    decode_tuple,
    encode_pair,
    fiber_product,
    FinSet,
    identity,
    invert,
    is_cartesian,
    maps_over,
    paste_squares,
    SetMap,
    Square,
)
from .init_helper import get_logger

logger = get_logger()

PAIRS = ("12", "13", "23")


@dataclass(frozen=True)
class Cover:
    """
    A surjective map f: S' -> S.
    """

    f: SetMap

    def __post_init__(self):
        if not self.f.is_surjective():
            missing = next(s for s in self.f.cod if not self.f.fibers[s])
            raise NotSurjective("cover is not surjective", missing)

    @property
    def s_prime(self) -> FinSet:
        return self.f.dom

    @property
    def base(self) -> FinSet:
        return self.f.cod


@dataclass(frozen=True)
class DoubleProduct:
    s2: FinSet
    p1: SetMap
    p2: SetMap
    witness: Square

    def projection(self, i: int) -> SetMap:
        return self.p1 if i == 1 else self.p2


@dataclass(frozen=True)
class TripleProduct:
    s3: FinSet
    p12: SetMap
    p13: SetMap
    p23: SetMap
    pr1: SetMap
    pr2: SetMap
    pr3: SetMap
    witness: Square

    def p(self, jk: str) -> SetMap:
        return {"12": self.p12, "13": self.p13, "23": self.p23}[jk]

    def pr(self, m: int) -> SetMap:
        return (self.pr1, self.pr2, self.pr3)[m - 1]


def _check_equal(name: str, left: SetMap, right: SetMap, error=VerificationFailed):
    witness = left.first_difference(right)
    if witness is not None:
        raise error(f"relation {name} does not hold", witness)


@lru_cache(maxsize=128)
def build_products(cover: Cover) -> Tuple[DoubleProduct, TripleProduct]:
    f = cover.f
    double = fiber_product(f, f, "S''")
    s2 = double.apex
    p1, p2 = double.pr1, double.pr2
    can = Square(p1, p2, f, f)
    if not is_cartesian(can):
        raise VerificationFailed("S'' square is not cartesian", cartesian_witness(can))

    triple = fiber_product(f, compose(p1, f), "S'''")
    s3 = triple.apex

    def projection(*idx):
        def apply(elem):
            parts = decode_tuple(elem, 3)
            return encode_pair(parts[idx[0]], parts[idx[1]])

        return SetMap.from_function(s3, s2, apply)

    def coordinate(m):
        return SetMap.from_function(s3, cover.s_prime, lambda e: decode_tuple(e, 3)[m])

    p12, p13, p23 = projection(0, 1), projection(0, 2), projection(1, 2)
    pr1, pr2, pr3 = coordinate(0), coordinate(1), coordinate(2)
    for name, left, right, common in (
        ("eqs1", compose(p12, p1), compose(p13, p1), pr1),
        ("eqs2", compose(p23, p1), compose(p12, p2), pr2),
        ("eqs3", compose(p23, p2), compose(p13, p2), pr3),
    ):
        _check_equal(name, left, right)
        _check_equal(name, left, common)
    witness = Square(p12, p23, p1, p2)
    if not is_cartesian(witness):
        raise VerificationFailed("S''' square is not cartesian", cartesian_witness(witness))
    logger.debug(f"built products |S''|={len(s2)}, |S'''|={len(s3)}")
    return (
        DoubleProduct(s2, p1, p2, can),
        TripleProduct(s3, p12, p13, p23, pr1, pr2, pr3, witness),
    )


@dataclass(frozen=True)
class CoveredObject:
    """
    A set with a structure map pi: X -> B (B is S' or S).
    """

    x: FinSet
    pi: SetMap

    def __post_init__(self):
        if self.pi.dom != self.x:
            raise BaseMismatch("structure map does not start at the carrier", self.x.label)

    @property
    def base(self) -> FinSet:
        return self.pi.cod


@dataclass(frozen=True)
class Pullback:
    carrier: FinSet
    structural: SetMap
    proj: SetMap
    square: Square

    def as_object(self) -> CoveredObject:
        return CoveredObject(self.carrier, self.structural)


@lru_cache(maxsize=1024)
def pullback_along(obj: CoveredObject, g: SetMap, label: str = "") -> Pullback:
    if obj.pi.cod != g.cod:
        raise BaseMismatch(
            f"cannot pull {obj.x.label} back along a map into {g.cod.label}",
            g.cod.label,
        )
    product = fiber_product(obj.pi, g, label)
    return Pullback(product.apex, product.pr2, product.pr1, product.square)


class _Frame:
    """
    The pullbacks of X along the projections of S'' and S''' together with
    the re-encoding bijections among them, built once per (object, cover).
    """

    def __init__(self, obj: CoveredObject, cover: Cover):
        if obj.pi.cod != cover.s_prime:
            raise BaseMismatch("object does not lie over S'", obj.pi.cod.label)
        self.obj = obj
        self.cover = cover
        self.double, self.triple = build_products(cover)
        self.pulled = {
            i: pullback_along(obj, self.double.projection(i), f"p{i}*X") for i in (1, 2)
        }
        # X ×_{S', pr_m} S''' for m = 1, 2, 3
        self.flat = {
            m: fiber_product(obj.pi, self.triple.pr(m), f"X{m}'''") for m in (1, 2, 3)
        }

    @property
    def x2(self) -> Pullback:
        return self.pulled[1]

    @cached_property
    def x3(self):
        return fiber_product(self.x2.structural, self.triple.p12, "X'''")

    def iterated(self, i: int, jk: str):
        """
        p_jk*p_i*X with elements "((x|s'')|s''')".
        """
        return fiber_product(self.pulled[i].structural, self.triple.p(jk))

    def flatten(self, i: int, jk: str) -> SetMap:
        """
        The identification p_jk*p_i*X = X ×_{pr_m} S''' where pr_m = p_i∘p_jk.
        """
        m = int(jk[0]) if i == 1 else int(jk[1])
        source = self.iterated(i, jk).apex
        target = self.flat[m].apex

        def apply(elem):
            inner, s3 = decode_pair(elem)
            x, _ = decode_pair(inner)
            return encode_pair(x, s3)

        result = SetMap.from_function(source, target, apply)
        if not result.is_bijective():
            raise VerificationFailed("pullback identification is not bijective", jk)
        return result

    def pull_datum(self, phi: SetMap, jk: str) -> SetMap:
        """
        p_jk*phi transported to X ×_{pr_j} S''' -> X ×_{pr_k} S'''.
        """
        pulled = base_change(
            phi, self.pulled[1].structural, self.pulled[2].structural, self.triple.p(jk)
        )
        return compose_all(invert(self.flatten(1, jk)), pulled, self.flatten(2, jk))


@lru_cache(maxsize=256)
def _frame(obj: CoveredObject, cover: Cover) -> _Frame:
    return _Frame(obj, cover)


def pulled_objects(obj: CoveredObject, cover: Cover) -> Tuple[Pullback, Pullback]:
    """
    p_1*X and p_2*X.
    """
    frame = _frame(obj, cover)
    return frame.pulled[1], frame.pulled[2]


@dataclass(frozen=True)
class CoveringDatum:
    """
    An S''-isomorphism phi: p_1*X -> p_2*X.
    """

    obj: CoveredObject
    cover: Cover
    phi: SetMap

    def __post_init__(self):
        frame = _frame(self.obj, self.cover)
        source, target = frame.pulled[1], frame.pulled[2]
        if self.phi.dom != source.carrier or self.phi.cod != target.carrier:
            raise InvalidDatum("datum is not a map p1*X -> p2*X")
        if not self.phi.is_bijective():
            raise InvalidDatum("datum is not bijective", self.phi.dom.label)
        witness = compose(self.phi, target.structural).first_difference(
            source.structural
        )
        if witness is not None:
            raise InvalidDatum("datum is not a map over S''", witness)

    @classmethod
    def from_fibers(
        cls,
        obj: CoveredObject,
        cover: Cover,
        fn: Callable[[str, str, str], str],
    ) -> "CoveringDatum":
        """
        Builds phi from fn(x, s, t) = x' with pi(x) = s and pi(x') = t.
        """
        source = _frame(obj, cover).pulled[1]
        target = _frame(obj, cover).pulled[2]

        def apply(elem):
            x, s2 = decode_pair(elem)
            s, t = decode_pair(s2)
            return encode_pair(fn(x, s, t), s2)

        return cls(obj, cover, SetMap.from_function(source.carrier, target.carrier, apply))

    @property
    def frame(self) -> _Frame:
        return _frame(self.obj, self.cover)

    def fiber_map(self, x: str, t: str) -> str:
        """
        The image of x in the fiber over t, i.e. the first coordinate of
        phi(x, pi(x), t).
        """
        s = self.obj.pi(x)
        return decode_pair(self.phi(encode_pair(x, encode_pair(s, t))))[0]


@dataclass(frozen=True)
class DescentDatum:
    datum: CoveringDatum
    cocycle_verified: bool

    @property
    def phi(self) -> SetMap:
        return self.datum.phi

    @property
    def obj(self) -> CoveredObject:
        return self.datum.obj

    @property
    def cover(self) -> Cover:
        return self.datum.cover


class CoveringSquares(NamedTuple):
    q1: SetMap
    q2: SetMap
    square1: Square
    square2: Square


def covering_datum_to_squares(cd: CoveringDatum) -> CoveringSquares:
    frame = cd.frame
    x2, p2x = frame.pulled[1], frame.pulled[2]
    q1 = x2.proj
    q2 = compose(cd.phi, p2x.proj)
    square1 = Square(q1, x2.structural, frame.double.p1, cd.obj.pi)
    square2 = Square(q2, x2.structural, frame.double.p2, cd.obj.pi)
    for idx, square in ((1, square1), (2, square2)):
        if not is_cartesian(square):
            raise VerificationFailed(
                f"square {idx} of the datum is not cartesian", cartesian_witness(square)
            )
    return CoveringSquares(q1, q2, square1, square2)


def squares_to_covering_datum(
    cover: Cover, squares: Tuple[Square, Square]
) -> CoveringDatum:
    """
    Recovers phi from the pair of cartesian squares for i = 1, 2. phi is the
    comparison map of the second square; the inverse psi is built from the
    comparison map of the canonical pullback square and both composites are
    checked to be identities.
    """
    square1, square2 = squares[0], squares[1]
    obj = CoveredObject(square2.pi.dom, square2.pi)
    frame = _frame(obj, cover)
    x2, p2x = frame.pulled[1], frame.pulled[2]
    witness = square1.u.first_difference(x2.proj)
    if witness is not None:
        raise TopEdgeNotProjection("q1 is not the projection p_{1,X}", witness)
    for idx, square, p in ((1, square1, frame.double.p1), (2, square2, frame.double.p2)):
        if square.v != x2.structural or square.w != p:
            raise InvalidDatum(f"square {idx} does not lie over p{idx}", idx)
        if not is_cartesian(square):
            raise NotCartesian(f"square {idx} is not cartesian", cartesian_witness(square))

    compare, _ = comparison_map(square2)
    phi = SetMap(compare.dom, p2x.carrier, compare.images)
    canonical, _ = comparison_map(p2x.square)
    psi = compose(canonical, invert(compare))
    _check_equal("phi∘psi = 1", compose(psi, phi), identity(p2x.carrier))
    _check_equal("psi∘phi = 1", compose(phi, psi), identity(x2.carrier))
    return CoveringDatum(obj, cover, phi)


def cocycle_witness(cd: CoveringDatum) -> Optional[str]:
    """
    First element of X ×_{pr_1} S''' where p_23*phi ∘ p_12*phi and p_13*phi
    disagree, None if the cocycle condition holds.
    """
    frame = cd.frame
    p12_phi = frame.pull_datum(cd.phi, "12")
    p23_phi = frame.pull_datum(cd.phi, "23")
    p13_phi = frame.pull_datum(cd.phi, "13")
    return compose(p12_phi, p23_phi).first_difference(p13_phi)


def cocycle_holds(cd: CoveringDatum) -> bool:
    return cocycle_witness(cd) is None


def make_descent_datum(cd: CoveringDatum) -> DescentDatum:
    witness = cocycle_witness(cd)
    if witness is not None:
        raise CocycleFails("covering datum violates the cocycle condition", witness)
    return DescentDatum(cd, True)


def enumerate_covering_data(obj: CoveredObject, cover: Cover) -> Iterator[CoveringDatum]:
    """
    Every S''-isomorphism p_1*X -> p_2*X.
    """
    frame = _frame(obj, cover)
    for phi in maps_over(
        frame.pulled[1].structural, frame.pulled[2].structural, bijective=True
    ):
        yield CoveringDatum(obj, cover, phi)


@dataclass(frozen=True)
class SixDiagramPresentation:
    """
    Maps q1, q2: X'' -> X and q12, q13, q23: X''' -> X'' forming the squares

        X''' --q_jk--> X'' --q_i--> X
          |             |           |
        S''' --p_jk--> S'' --p_i--> S'
    """

    obj: CoveredObject
    cover: Cover
    q1: SetMap
    q2: SetMap
    q12: SetMap
    q13: SetMap
    q23: SetMap

    @property
    def frame(self) -> _Frame:
        return _frame(self.obj, self.cover)

    def q(self, name: str) -> SetMap:
        return getattr(self, f"q{name}")

    @cached_property
    def squares(self) -> Dict[str, Square]:
        frame = self.frame
        x2_structural = frame.x2.structural
        x3_structural = frame.x3.pr2
        result = {
            str(i): Square(self.q(str(i)), x2_structural, frame.double.projection(i), self.obj.pi)
            for i in (1, 2)
        }
        for jk in PAIRS:
            result[jk] = Square(self.q(jk), x3_structural, frame.triple.p(jk), x2_structural)
        return result

    def diagrams(self) -> Dict[Tuple[str, str], Square]:
        return {
            (str(i), jk): paste_squares(self.squares[jk], self.squares[str(i)])
            for i in (1, 2)
            for jk in PAIRS
        }


def _canonical_q(frame: _Frame, jk: str) -> SetMap:
    """
    p_jk,X'' for jk in (12, 13), read through X''' = p_12*X'' = p_13*X''.
    """
    x3 = frame.x3
    if jk == "12":
        return x3.pr1
    p13 = frame.triple.p13

    def apply(elem):
        inner, s3 = decode_pair(elem)
        x, _ = decode_pair(inner)
        return encode_pair(x, p13(s3))

    return SetMap.from_function(x3.apex, frame.x2.carrier, apply)


def _p12_phi_to_p23(frame: _Frame, phi: SetMap) -> SetMap:
    """
    p_23,X'' ∘ p_12*phi, using the identification p_12*p_2*X = p_23*X''.
    """
    p12_phi = base_change(
        phi, frame.pulled[1].structural, frame.pulled[2].structural, frame.triple.p12
    )
    p23 = frame.triple.p23
    target = frame.iterated(1, "23")

    def reencode(elem):
        inner, s3 = decode_pair(elem)
        x, _ = decode_pair(inner)
        return encode_pair(encode_pair(x, p23(s3)), s3)

    identify = SetMap.from_function(p12_phi.cod, target.apex, reencode)
    return compose_all(p12_phi, identify, target.pr1)


def relation_witnesses(p: SixDiagramPresentation) -> Dict[str, Optional[str]]:
    return {
        "eq1": compose(p.q12, p.q1).first_difference(compose(p.q13, p.q1)),
        "eq2": compose(p.q23, p.q1).first_difference(compose(p.q12, p.q2)),
        "eq3": compose(p.q23, p.q2).first_difference(compose(p.q13, p.q2)),
    }


def _check_squares(p: SixDiagramPresentation):
    for name, square in p.squares.items():
        witness = cartesian_witness(square)
        if witness is not None:
            raise NotCartesian(f"square q{name} is not cartesian", (name, witness))
    for (i, jk), diagram in p.diagrams().items():
        witness = cartesian_witness(diagram)
        if witness is not None:
            raise NotCartesian(f"diagram (q{i}, q{jk}) is not cartesian", (i, jk, witness))


def _eq3_chain(frame: _Frame, phi: SetMap, p: SixDiagramPresentation):
    """
    q2∘q23 = p_2,X ∘ p_23,p_2*X ∘ p_23*phi ∘ p_12*phi
           = p_2,X ∘ p_13,p_2*X ∘ p_13*phi = q2∘q13,
    read on X ×_{pr_1} S'''.
    """
    # X''' and p_12*p_1*X are the same set.
    start = invert(frame.flatten(1, "12"))
    third = SetMap.from_function(
        frame.flat[3].apex, frame.obj.x, lambda e: decode_pair(e)[0]
    )
    left = compose(start, compose(p.q23, p.q2))
    middle = compose_all(
        frame.pull_datum(phi, "12"), frame.pull_datum(phi, "23"), third
    )
    cocycle_side = compose(frame.pull_datum(phi, "13"), third)
    right = compose(start, compose(p.q13, p.q2))
    for name, a, b in (
        ("q2∘q23 = p2X∘p23*phi∘p12*phi", left, middle),
        ("p23*phi∘p12*phi = p13*phi", middle, cocycle_side),
        ("p2X∘p13*phi = q2∘q13", cocycle_side, right),
    ):
        witness = a.first_difference(b)
        if witness is not None:
            raise RelationViolated(f"eq3 chain broken at {name}", witness)


def induced_presentation(cd: CoveringDatum) -> SixDiagramPresentation:
    """
    The maps q1, q2, q12, q13 and q23 = p_23,X'' ∘ p_12*phi of any covering
    datum; the relations are not checked.
    """
    frame = cd.frame
    squares = covering_datum_to_squares(cd)
    return SixDiagramPresentation(
        cd.obj,
        cd.cover,
        squares.q1,
        squares.q2,
        _canonical_q(frame, "12"),
        _canonical_q(frame, "13"),
        _p12_phi_to_p23(frame, cd.phi),
    )


def datum_to_six(dd: DescentDatum) -> SixDiagramPresentation:
    cd = dd.datum
    witness = cocycle_witness(cd)
    if not dd.cocycle_verified or witness is not None:
        raise CocycleFails("datum is not a descent datum", witness)
    frame = cd.frame
    presentation = induced_presentation(cd)
    _check_squares(presentation)
    for relation, witness in relation_witnesses(presentation).items():
        if witness is not None:
            raise RelationViolated(f"relation {relation} fails", (relation, witness))
    _eq3_chain(frame, cd.phi, presentation)
    logger.debug(f"six diagram presentation built for {cd.obj.x.label}")
    return presentation


def six_to_datum(p: SixDiagramPresentation) -> DescentDatum:
    frame = p.frame
    _check_squares(p)
    witness = p.q1.first_difference(frame.x2.proj)
    if witness is not None:
        raise TopEdgeNotProjection("q1 is not the projection p_{1,X}", witness)
    for jk in ("12", "13"):
        witness = p.q(jk).first_difference(_canonical_q(frame, jk))
        if witness is not None:
            raise RelationViolated(f"q{jk} is not the canonical projection", (f"q{jk}", witness))
    witnesses = relation_witnesses(p)
    # eq1 follows from eqs1, q1, q12 and q13, so it only fails on a malformed frame.
    if witnesses["eq1"] is not None:
        raise VerificationFailed("eq1 fails for canonical projections", witnesses["eq1"])
    for relation in ("eq2", "eq3"):
        if witnesses[relation] is not None:
            raise RelationViolated(
                f"relation {relation} fails", (relation, witnesses[relation])
            )

    cd = squares_to_covering_datum(p.cover, (p.squares["1"], p.squares["2"]))
    # g: the comparison map of the q23 square into p_23*X''; it must be p_12*phi.
    compare, _ = comparison_map(p.squares["23"])
    target = frame.iterated(1, "23")
    g = SetMap(compare.dom, target.apex, compare.images)
    witness = compose(g, target.pr1).first_difference(_p12_phi_to_p23(frame, cd.phi))
    if witness is not None:
        raise RelationViolated("q23 differs from p_23,X'' ∘ p_12*phi", ("q23", witness))
    _eq3_chain(frame, cd.phi, p)
    return make_descent_datum(cd)


def canonical_datum(y: CoveredObject, cover: Cover) -> DescentDatum:
    """
    c_Y on Y' = Y ×_S S': c_Y(y, s, (s, t)) = (y, t, (s, t)).
    """
    y_prime = base_change_to_s_prime(y, cover)
    cd = CoveringDatum.from_fibers(
        y_prime, cover, lambda point, s, t: encode_pair(decode_pair(point)[0], t)
    )
    return make_descent_datum(cd)


def base_change_to_s_prime(y: CoveredObject, cover: Cover) -> CoveredObject:
    """
    Y' = Y ×_S S' over S'.
    """
    if y.base != cover.base:
        raise BaseMismatch("object does not lie over S", y.base.label)
    return pullback_along(y, cover.f, "Y'").as_object()


def pullback_morphism(
    h: SetMap, source: CoveredObject, target: CoveredObject, cover: Cover, i: int
) -> SetMap:
    """
    p_i*(h): p_i*A -> p_i*C for an S'-morphism h: A -> C.
    """
    double, _ = build_products(cover)
    return base_change(h, source.pi, target.pi, double.projection(i))


def effectivity_witness(
    dd: DescentDatum, y: CoveredObject, theta: SetMap
) -> Optional[str]:
    """
    First element where p_2*(theta)∘phi and c_Y∘p_1*(theta) disagree, None if
    theta: X -> Y' makes the datum isomorphic to c_Y.
    """
    canonical = canonical_datum(y, dd.cover)
    y_prime = canonical.obj
    if not theta.is_bijective():
        raise NotBijective("theta is not bijective", theta.dom.label)
    witness = compose(theta, y_prime.pi).first_difference(dd.obj.pi)
    if witness is not None:
        raise BaseMismatch("theta is not a map over S'", witness)
    left = compose(dd.phi, pullback_morphism(theta, dd.obj, y_prime, dd.cover, 2))
    right = compose(pullback_morphism(theta, dd.obj, y_prime, dd.cover, 1), canonical.phi)
    return left.first_difference(right)


def effectivity_holds(dd: DescentDatum, y: CoveredObject, theta: SetMap) -> bool:
    return effectivity_witness(dd, y, theta) is None
