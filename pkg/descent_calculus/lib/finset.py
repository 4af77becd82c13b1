"""
Finite sets with total maps, the category every construction of the library
lives in. Elements are strings; composite elements (pairs of fiber products,
tagged summands of coproducts) use the canonical encoding "(a|b)", so that
repeated constructions produce identical carriers and map equality is a plain
comparison of image tuples.
"""

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    CodomainMismatch,
    CompositionMismatch,
    DuplicateElement,
    InvalidMap,
    NonCommutingSquare,
    NotBijective,
    NotCartesian,
    RightEdgeMismatch,
)
from .init_helper import get_logger

logger = get_logger()

RESERVED_CHARS = frozenset("()|")


def encode_pair(a: str, b: str) -> str:
    return f"({a}|{b})"


def encode_tuple(*parts: str) -> str:
    """
    Right nested encoding: encode_tuple(a, b, c) == "(a|(b|c))".
    """
    if len(parts) < 2:
        raise InvalidMap("a tuple encoding needs at least two parts", parts)
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = encode_pair(part, result)
    return result


def decode_pair(element: str) -> Tuple[str, str]:
    if len(element) < 5 or element[0] != "(" or element[-1] != ")":
        raise InvalidMap("element is not a pair encoding", element)
    depth = 0
    body = element[1:-1]
    for idx, char in enumerate(body):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char == "|" and depth == 0:
            return body[:idx], body[idx + 1 :]
    raise InvalidMap("element is not a pair encoding", element)


def decode_tuple(element: str, arity: int) -> Tuple[str, ...]:
    parts = []
    rest = element
    for _ in range(arity - 1):
        head, rest = decode_pair(rest)
        parts.append(head)
    parts.append(rest)
    return tuple(parts)


def is_well_formed(element: str) -> bool:
    if not element:
        return False
    if element[0] == "(":
        try:
            left, right = decode_pair(element)
        except InvalidMap:
            return False
        return is_well_formed(left) and is_well_formed(right)
    return not (RESERVED_CHARS & set(element))


@dataclass(frozen=True)
class FinSet:
    """
    A finite set. Elements are kept sorted, so two sets with the same members
    compare equal whatever order they were given in. The label is only a name
    for reports and does not take part in equality.
    """

    elements: Tuple[str, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        elements = tuple(sorted(self.elements))
        for prev, curr in zip(elements, elements[1:]):
            if prev == curr:
                raise DuplicateElement(f"duplicate element in {self.label!r}", curr)
        for elem in elements:
            if not isinstance(elem, str) or not is_well_formed(elem):
                raise InvalidMap(f"malformed element in {self.label!r}", elem)
        object.__setattr__(self, "elements", elements)

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {elem: idx for idx, elem in enumerate(self.elements)}

    def position(self, elem: str) -> int:
        try:
            return self._positions[elem]
        except KeyError:
            raise InvalidMap(f"element not in {self.label or 'set'}", elem) from None

    def __contains__(self, elem) -> bool:
        return elem in self._positions

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def relabel(self, label: str) -> "FinSet":
        return FinSet(self.elements, label)


EMPTY = FinSet((), "empty")


@dataclass(frozen=True)
class SetMap:
    """
    A total map dom -> cod, stored as the tuple of images in the order of
    dom.elements.
    """

    dom: FinSet
    cod: FinSet
    images: Tuple[str, ...]

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != len(self.dom):
            raise InvalidMap("map is not total", self.dom.label)
        for elem, image in zip(self.dom.elements, images):
            if image not in self.cod:
                raise InvalidMap(
                    f"image of {elem} outside {self.cod.label or 'codomain'}", image
                )
        object.__setattr__(self, "images", images)

    @classmethod
    def from_dict(
        cls, dom: FinSet, cod: FinSet, assignment: Mapping[str, str]
    ) -> "SetMap":
        missing = [elem for elem in dom if elem not in assignment]
        if missing:
            raise InvalidMap("map is not total", missing[0])
        extra = [elem for elem in assignment if elem not in dom]
        if extra:
            raise InvalidMap("assignment on an element outside the domain", extra[0])
        return cls(dom, cod, tuple(assignment[elem] for elem in dom.elements))

    @classmethod
    def from_function(
        cls, dom: FinSet, cod: FinSet, fn: Callable[[str], str]
    ) -> "SetMap":
        return cls(dom, cod, tuple(fn(elem) for elem in dom.elements))

    def __call__(self, elem: str) -> str:
        return self.images[self.dom.position(elem)]

    @property
    def assignment(self) -> Dict[str, str]:
        return dict(zip(self.dom.elements, self.images))

    def items(self) -> Iterator[Tuple[str, str]]:
        return zip(self.dom.elements, self.images)

    def fiber(self, target: str) -> List[str]:
        return [elem for elem, image in self.items() if image == target]

    @cached_property
    def fibers(self) -> Dict[str, List[str]]:
        result: Dict[str, List[str]] = {target: [] for target in self.cod}
        for elem, image in self.items():
            result[image].append(elem)
        return result

    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    def is_surjective(self) -> bool:
        return len(set(self.images)) == len(self.cod)

    def is_bijective(self) -> bool:
        return len(self.dom) == len(self.cod) and self.is_injective()

    def first_difference(self, other: "SetMap") -> Optional[str]:
        """
        The first domain element where the two maps disagree, None if equal.
        """
        if self.dom != other.dom or self.cod != other.cod:
            return self.dom.elements[0] if len(self.dom) else "<endpoints>"
        for elem, left, right in zip(self.dom.elements, self.images, other.images):
            if left != right:
                return elem
        return None


def identity(finset: FinSet) -> SetMap:
    return SetMap(finset, finset, finset.elements)


def compose(f: SetMap, g: SetMap) -> SetMap:
    """
    Returns g∘f.
    """
    if f.cod != g.dom:
        raise CompositionMismatch(
            f"cannot compose {f.dom.label}->{f.cod.label} with "
            f"{g.dom.label}->{g.cod.label}",
            f.cod.label,
        )
    return SetMap(f.dom, g.cod, tuple(g(image) for image in f.images))


def compose_all(*maps: SetMap) -> SetMap:
    """
    compose_all(f, g, h) == h∘g∘f, i.e. maps are listed in the order they apply.
    """
    result = maps[0]
    for nxt in maps[1:]:
        result = compose(result, nxt)
    return result


def invert(f: SetMap) -> SetMap:
    if not f.is_bijective():
        witness = next(
            (image for image, count in Counter(f.images).items() if count > 1),
            None,
        )
        if witness is None:
            witness = next(elem for elem in f.cod if elem not in set(f.images))
        raise NotBijective(f"{f.dom.label}->{f.cod.label} is not bijective", witness)
    inverse = {image: elem for elem, image in f.items()}
    return SetMap.from_dict(f.cod, f.dom, inverse)


def compose_and_invert(
    f: Optional[SetMap] = None,
    g: Optional[SetMap] = None,
    finset: Optional[FinSet] = None,
) -> SetMap:
    """
    compose_and_invert(f, g) is g∘f, compose_and_invert(f) is f⁻¹ and
    compose_and_invert(finset=A) is 1_A.
    """
    if finset is not None:
        return identity(finset)
    if f is None:
        raise InvalidMap("nothing to compose or invert")
    if g is None:
        return invert(f)
    return compose(f, g)


@dataclass(frozen=True)
class Square:
    """
    The commutative square

        Z --u--> U
        |        |
        v        pi
        |        |
        V --w--> W
    """

    u: SetMap
    v: SetMap
    w: SetMap
    pi: SetMap

    def __post_init__(self):
        if (
            self.u.dom != self.v.dom
            or self.u.cod != self.pi.dom
            or self.v.cod != self.w.dom
            or self.w.cod != self.pi.cod
        ):
            raise NonCommutingSquare("square endpoints are inconsistent")
        witness = compose(self.u, self.pi).first_difference(compose(self.v, self.w))
        if witness is not None:
            raise NonCommutingSquare("square does not commute", witness)

    @property
    def apex(self) -> FinSet:
        return self.u.dom


@dataclass(frozen=True)
class FiberProductResult:
    apex: FinSet
    pr1: SetMap
    pr2: SetMap
    f: SetMap
    g: SetMap

    @property
    def square(self) -> Square:
        return Square(self.pr1, self.pr2, self.g, self.f)


def fiber_product(f: SetMap, g: SetMap, label: str = "") -> FiberProductResult:
    """
    X ×_S T for f: X -> S and g: T -> S, with elements "(x|t)".
    """
    if f.cod != g.cod:
        raise CodomainMismatch(
            f"fiber product needs a common codomain, got {f.cod.label} and {g.cod.label}"
        )
    by_image = g.fibers
    elements = [
        encode_pair(x, t) for x, image in f.items() for t in by_image[image]
    ]
    apex = FinSet(tuple(elements), label or f"{f.dom.label}x{g.dom.label}")
    pr1 = SetMap.from_function(apex, f.dom, lambda elem: decode_pair(elem)[0])
    pr2 = SetMap.from_function(apex, g.dom, lambda elem: decode_pair(elem)[1])
    return FiberProductResult(apex, pr1, pr2, f, g)


def comparison_map(sq: Square) -> Tuple[SetMap, FiberProductResult]:
    """
    The canonical map Z -> U ×_W V, z -> (u(z), v(z)).
    """
    product = fiber_product(sq.pi, sq.w)
    compare = SetMap.from_function(
        sq.apex, product.apex, lambda z: encode_pair(sq.u(z), sq.v(z))
    )
    return compare, product


def is_cartesian(sq: Square) -> bool:
    compare, _ = comparison_map(sq)
    return compare.is_bijective()


def cartesian_witness(sq: Square) -> Optional[str]:
    """
    An element of Z or of U ×_W V at which the comparison map fails to be a
    bijection, None if the square is cartesian.
    """
    compare, product = comparison_map(sq)
    seen: Dict[str, str] = {}
    for z, image in compare.items():
        if image in seen:
            return z
        seen[image] = z
    for elem in product.apex:
        if elem not in seen:
            return elem
    return None


def is_cartesian_by_cones(sq: Square, test_sizes: Sequence[int] = (1, 2)) -> bool:
    """
    Universal property checked directly: for every test set T of the given
    sizes and every cone (a: T -> U, b: T -> V) with pi∘a = w∘b there is
    exactly one h: T -> Z with u∘h = a and v∘h = b.
    """
    pairs = [
        (x, y)
        for x in sq.u.cod
        for y in sq.v.cod
        if sq.pi(x) == sq.w(y)
    ]
    for size in test_sizes:
        factorizations = Counter(
            tuple((sq.u(z), sq.v(z)) for z in h)
            for h in itertools.product(sq.apex.elements, repeat=size)
        )
        for cone in itertools.product(pairs, repeat=size):
            if factorizations[cone] != 1:
                return False
    return True


def transport_square(sq: Square, psi: SetMap) -> Square:
    if not is_cartesian(sq):
        raise NotCartesian("square to transport is not cartesian", cartesian_witness(sq))
    if not psi.is_bijective():
        raise NotBijective("transport map is not a bijection", psi.dom.label)
    return Square(compose(psi, sq.u), compose(psi, sq.v), sq.w, sq.pi)


def is_iso_square(sq: Square) -> bool:
    """
    Both horizontal arrows bijective; such a square is always cartesian.
    """
    return sq.u.is_bijective() and sq.w.is_bijective()


def paste_squares(left: Square, right: Square) -> Square:
    """
    Horizontal pasting

        Z --u1--> U1 --u2--> U
        |         |          |
        V --w1--> W1 --w2--> W

    where left.pi is right.v.
    """
    if left.pi != right.v:
        raise CompositionMismatch("squares do not share the middle edge")
    return Square(
        compose(left.u, right.u), left.v, compose(left.w, right.w), right.pi
    )


def coproduct(
    parts: Sequence[FinSet], tags: Optional[Sequence[str]] = None, label: str = ""
) -> Tuple[FinSet, List[SetMap]]:
    """
    Disjoint union with elements "(tag|x)"; tags default to summand indices.
    """
    tags = list(tags) if tags is not None else [str(idx) for idx in range(len(parts))]
    if len(tags) != len(parts) or len(set(tags)) != len(tags):
        raise InvalidMap("coproduct tags must be distinct, one per summand", tags)
    elements = [encode_pair(tag, x) for tag, part in zip(tags, parts) for x in part]
    union = FinSet(tuple(elements), label or "+".join(p.label for p in parts))
    injections = [
        SetMap.from_function(part, union, lambda x, tag=tag: encode_pair(tag, x))
        for tag, part in zip(tags, parts)
    ]
    return union, injections


def _summand(union_elem: str, tags: Sequence[str]) -> Tuple[int, str]:
    tag, elem = decode_pair(union_elem)
    return list(tags).index(tag), elem


def copair(
    maps: Sequence[SetMap],
    cod: FinSet,
    tags: Optional[Sequence[str]] = None,
) -> SetMap:
    """
    [f_1, ..., f_n]: ∐ A_i -> B for maps f_i: A_i -> B.
    """
    for fn in maps:
        if fn.cod != cod:
            raise CodomainMismatch("copairing needs a common codomain", fn.cod.label)
    tags = list(tags) if tags is not None else [str(idx) for idx in range(len(maps))]
    union, _ = coproduct([fn.dom for fn in maps], tags)

    def apply(elem):
        idx, x = _summand(elem, tags)
        return maps[idx](x)

    return SetMap.from_function(union, cod, apply)


def coproduct_map(
    maps: Sequence[SetMap], tags: Optional[Sequence[str]] = None
) -> SetMap:
    """
    ∐ f_i: ∐ A_i -> ∐ B_i.
    """
    tags = list(tags) if tags is not None else [str(idx) for idx in range(len(maps))]
    dom, _ = coproduct([fn.dom for fn in maps], tags)
    cod, _ = coproduct([fn.cod for fn in maps], tags)

    def apply(elem):
        idx, x = _summand(elem, tags)
        return encode_pair(tags[idx], maps[idx](x))

    return SetMap.from_function(dom, cod, apply)


def coproduct_of_squares(
    sqs: Sequence[Square],
    right_edge: Optional[SetMap] = None,
    tags: Optional[Sequence[str]] = None,
) -> Square:
    """
    Given squares (g_i, e_i, k_i, pi) sharing the right edge pi: U -> W, returns
    (∐g_i, ∐e_i, ∐k_i, pi). It is cartesian when every summand is.
    """
    if right_edge is None:
        if not sqs:
            raise RightEdgeMismatch("an empty coproduct needs a designated right edge")
        right_edge = sqs[0].pi
    for idx, sq in enumerate(sqs):
        if sq.pi != right_edge:
            raise RightEdgeMismatch("squares do not share the right edge", idx)
    logger.debug(f"coproduct of {len(sqs)} squares over {right_edge.cod.label}")
    top = copair([sq.u for sq in sqs], right_edge.dom, tags)
    left = coproduct_map([sq.v for sq in sqs], tags)
    bottom = copair([sq.w for sq in sqs], right_edge.cod, tags)
    return Square(top, left, bottom, right_edge)


def base_change(h: SetMap, alpha: SetMap, gamma: SetMap, g: SetMap) -> SetMap:
    """
    h ×_B B': A ×_B B' -> C ×_B B' for objects alpha: A -> B, gamma: C -> B,
    a morphism h: A -> C over B (gamma∘h = alpha) and g: B' -> B.
    """
    witness = compose(h, gamma).first_difference(alpha)
    if witness is not None:
        raise NonCommutingSquare("morphism is not over the base", witness)
    source = fiber_product(alpha, g)
    target = fiber_product(gamma, g)

    def apply(elem):
        a, b = decode_pair(elem)
        return encode_pair(h(a), b)

    return SetMap.from_function(source.apex, target.apex, apply)


def maps_over(
    alpha: SetMap, beta: SetMap, bijective: bool = False
) -> Iterator[SetMap]:
    """
    All maps h: A -> B with beta∘h = alpha (bijections only if requested).
    """
    if alpha.cod != beta.cod:
        raise CodomainMismatch("maps over different bases")
    source_fibers = alpha.fibers
    target_fibers = beta.fibers
    bases = [b for b in alpha.cod if source_fibers[b]]
    if bijective:
        if any(len(source_fibers[b]) != len(target_fibers[b]) for b in alpha.cod):
            return
        choices = [itertools.permutations(target_fibers[b]) for b in bases]
    else:
        choices = [
            itertools.product(target_fibers[b], repeat=len(source_fibers[b]))
            for b in bases
        ]
    for combination in itertools.product(*[list(c) for c in choices]):
        assignment = {}
        for b, images in zip(bases, combination):
            assignment.update(zip(source_fibers[b], images))
        yield SetMap.from_dict(alpha.dom, beta.dom, assignment)


def find_isomorphism(alpha: SetMap, beta: SetMap) -> Optional[SetMap]:
    """
    A bijection h: A -> B with beta∘h = alpha, or None if there is none.
    Fibers are matched in order, so h is the first map maps_over yields.
    """
    if alpha.cod != beta.cod:
        raise CodomainMismatch("maps over different bases")
    source_fibers = alpha.fibers
    target_fibers = beta.fibers
    assignment = {}
    for b in alpha.cod:
        if len(source_fibers[b]) != len(target_fibers[b]):
            return None
        assignment.update(zip(source_fibers[b], target_fibers[b]))
    return SetMap.from_dict(alpha.dom, beta.dom, assignment)

