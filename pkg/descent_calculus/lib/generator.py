import itertools
from typing import Any, Dict, Iterator, List, Optional, Sequence, Union

import numpy as np

from .descent import Cover, CoveredObject, CoveringDatum
from .finset import (
    decode_pair,
    fiber_product,
    FinSet,
    SetMap,
    Square,
)
from .galois import (
    CompatibleAction,
    FiniteGroup,
    GaloisCover,
    GroupActionOnCover,
    orbit_partition,
)
from .init_helper import get_logger
from .morphisms import EquivariantPair

logger = get_logger()


def full_range(a: int, b: int, s: int = 1):
    """
    Returns inclusive range: a <= x <= b, by step of s
    """
    return range(a, b + 1, s)


class TableProduct:
    """
    TableProduct takes a dict whose values are either repeatable iterables
    (range, list, tuple) or plain values, and generates one dict per element
    of the Cartesian product of the iterable values. Each generated dict is
    a fresh copy, and iterating twice yields the same sequence.

    grid = TableProduct({"base": full_range(1, 2), "fiber": [1, 2], "seed": 0})
    for sizes in grid:
        print(sizes)
    """

    def __init__(self, table: Dict[str, Any]):
        self.table: Dict[str, Any] = table

    def __iter__(self) -> Iterator[Dict[str, Any]]:
        keys = [key for key, val in self.table.items() if type(val) in iterable_types]
        for values in itertools.product(*[self.table[key] for key in keys]):
            result = dict(self.table)
            result.update(zip(keys, values))
            yield result

    def __len__(self) -> int:
        count = 1
        for val in self.table.values():
            if type(val) in iterable_types:
                count *= len(val)
        return count


iterable_types = {range, list, tuple}


def make_rng(seed: Union[int, Sequence[int]]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _pick(rng: np.random.Generator, items: Sequence[Any]) -> Any:
    return items[int(rng.integers(len(items)))]


def cover_from_fiber_sizes(sizes: Sequence[int]) -> Cover:
    """
    S = {s0, ...} and S' = {a0, ...} with sizes[i] points over s_i.
    """
    base = FinSet(tuple(f"s{i}" for i in range(len(sizes))), "S")
    assignment = {}
    for i, size in enumerate(sizes):
        for _ in range(size):
            assignment[f"a{len(assignment)}"] = f"s{i}"
    s_prime = FinSet(tuple(assignment), "S'")
    return Cover(SetMap.from_dict(s_prime, base, assignment))


def small_covers(max_base: int, max_fiber: int) -> Iterator[Cover]:
    """
    Every cover with |S| <= max_base and fibers of size <= max_fiber, up to
    relabeling (fiber sizes non-decreasing).
    """
    for base_size in full_range(1, max_base):
        for sizes in itertools.combinations_with_replacement(
            full_range(1, max_fiber), base_size
        ):
            yield cover_from_fiber_sizes(sizes)


def random_cover(rng: np.random.Generator, max_base: int, max_fiber: int) -> Cover:
    base_size = int(rng.integers(1, max_base + 1))
    return cover_from_fiber_sizes(
        [int(rng.integers(1, max_fiber + 1)) for _ in range(base_size)]
    )


def random_object(
    rng: np.random.Generator, base: FinSet, max_set: int, label: str = "X"
) -> CoveredObject:
    size = int(rng.integers(0, max_set + 1)) if len(base) else 0
    x = FinSet(tuple(f"x{i}" for i in range(size)), label)
    pi = SetMap.from_function(x, base, lambda _: _pick(rng, base.elements))
    return CoveredObject(x, pi)


def random_object_with_datum_shape(
    rng: np.random.Generator, cover: Cover, max_set: int
) -> CoveredObject:
    """
    An object over S' whose fibers have equal size along every fiber of f, so
    that covering data exist.
    """
    f = cover.f
    budget = max_set
    assignment = {}
    for s in cover.base:
        fiber = f.fibers[s]
        k = int(rng.integers(0, budget // len(fiber) + 1))
        budget -= k * len(fiber)
        for t in fiber:
            for _ in range(k):
                assignment[f"x{len(assignment)}"] = t
    names = list(assignment)
    shuffled = [names[i] for i in rng.permutation(len(names))]
    relabeled = dict(zip(shuffled, assignment.values()))
    x = FinSet(tuple(relabeled), "X")
    return CoveredObject(x, SetMap.from_dict(x, cover.s_prime, relabeled))


def random_covering_datum(
    rng: np.random.Generator, obj: CoveredObject, cover: Cover
) -> CoveringDatum:
    """
    phi built from an independent random bijection X_s -> X_t for every
    point (s, t) of S''.
    """
    fibers = obj.pi.fibers
    table = {}
    for s in cover.s_prime:
        for t in cover.f.fiber(cover.f(s)):
            target = fibers[t]
            table[(s, t)] = {
                x: target[int(idx)]
                for x, idx in zip(fibers[s], rng.permutation(len(target)))
            }
    return CoveringDatum.from_fibers(obj, cover, lambda x, s, t: table[(s, t)][x])


def subgroup_generated(group: FiniteGroup, h: str) -> List[str]:
    result = [group.identity]
    power = h
    while power != group.identity:
        result.append(power)
        power = group.mul(power, h)
    return result


def random_action_cover(
    rng: np.random.Generator, group: FiniteGroup, max_base: int, free_rate: float = 0.5
) -> GroupActionOnCover:
    """
    Γ acting on S' = ∐_s Γ/<h_s>, each fiber of f being one orbit; the action
    is free exactly when every h_s is the identity.
    """
    base_size = int(rng.integers(1, max_base + 1))
    base = FinSet(tuple(f"s{i}" for i in range(base_size)), "S")
    cosets: Dict[str, List[str]] = {}
    owner = {}
    for s in base:
        h = group.identity if rng.random() < free_rate else _pick(rng, group.elements)
        sub = subgroup_generated(group, h)
        seen = set()
        for sigma in group:
            key = tuple(sorted(group.mul(sigma, k) for k in sub))
            if key in seen:
                continue
            seen.add(key)
            name = f"a{len(owner)}"
            owner[name] = s
            cosets[name] = list(key)
    s_prime = FinSet(tuple(owner), "S'")
    cover = Cover(SetMap.from_dict(s_prime, base, owner))
    by_member = {}
    for name, coset in cosets.items():
        for member in coset:
            by_member[(owner[name], member)] = name

    def translate(sigma):
        return SetMap.from_function(
            s_prime,
            s_prime,
            lambda a: by_member[(owner[a], group.mul(sigma, cosets[a][0]))],
        )

    logger.debug(f"random action of {group.name} on {len(s_prime)} points")
    return GroupActionOnCover(group, cover, tuple(translate(sigma) for sigma in group))


def random_galois_cover(
    rng: np.random.Generator, group: FiniteGroup, max_base: int
) -> GaloisCover:
    """
    S' = S × Γ with randomly permuted point names.
    """
    base_size = int(rng.integers(1, max_base + 1))
    base = FinSet(tuple(f"s{i}" for i in range(base_size)), "S")
    points = [(s, sigma) for s in base for sigma in group]
    names = {pt: f"a{int(i)}" for pt, i in zip(points, rng.permutation(len(points)))}
    by_name = {name: pt for pt, name in names.items()}
    s_prime = FinSet(tuple(by_name), "S'")
    cover = Cover(SetMap.from_function(s_prime, base, lambda a: by_name[a][0]))

    def translate(sigma):
        def apply(a):
            s, tau = by_name[a]
            return names[(s, group.mul(sigma, tau))]

        return SetMap.from_function(s_prime, s_prime, apply)

    action = GroupActionOnCover(group, cover, tuple(translate(sigma) for sigma in group))
    return GaloisCover(cover, action)


def random_compatible_action(
    rng: np.random.Generator, g: GaloisCover, max_set: int, label: str = "X"
) -> CompatibleAction:
    """
    X = ∐_s (k_s copies of the fiber over s), with ρ(τ) moving the copy at
    σ·s0 to the copy at τσ·s0; point names are randomly permuted.
    """
    group = g.group
    f = g.cover.f
    act = g.action.of
    budget = max_set
    points = []
    for s in g.cover.base:
        anchor = min(f.fiber(s))
        k = int(rng.integers(0, budget // len(group) + 1))
        budget -= k * len(group)
        points.extend((anchor, j, sigma) for j in range(k) for sigma in group)
    names = {pt: f"x{int(i)}" for pt, i in zip(points, rng.permutation(len(points)))}
    by_name = {name: pt for pt, name in names.items()}
    x = FinSet(tuple(by_name), label)
    pi = SetMap.from_function(
        x, g.cover.s_prime, lambda e: act(by_name[e][2])(by_name[e][0])
    )

    def rho(tau):
        def apply(e):
            anchor, j, sigma = by_name[e]
            return names[(anchor, j, group.mul(tau, sigma))]

        return SetMap.from_function(x, x, apply)

    return CompatibleAction(g, CoveredObject(x, pi), tuple(rho(tau) for tau in group))


def random_hom(
    rng: np.random.Generator, pair: EquivariantPair
) -> Optional[SetMap]:
    """
    A uniformly random S'-morphism X1 -> X2, None when there is none.
    """
    fibers = pair.x2.pi.fibers
    assignment = {}
    for x in pair.x1.x:
        target = fibers[pair.x1.pi(x)]
        if not target:
            return None
        assignment[x] = _pick(rng, target)
    return SetMap.from_dict(pair.x1.x, pair.x2.x, assignment)


def random_invariant_hom(
    rng: np.random.Generator, pair: EquivariantPair
) -> Optional[SetMap]:
    """
    A random Γ-invariant S'-morphism X1 -> X2: a point of X2 is picked for
    the least element of every orbit of X1 and spread by the two actions.
    None when some orbit has nowhere to go.
    """
    fibers = pair.x2.pi.fibers
    representative = orbit_partition(pair.rho1)
    assignment = {}
    for x in sorted(set(representative.values())):
        target = fibers[pair.x1.pi(x)]
        if not target:
            return None
        image = _pick(rng, target)
        for sigma in pair.base.group:
            assignment[pair.rho1.of(sigma)(x)] = pair.rho2.of(sigma)(image)
    return SetMap.from_dict(pair.x1.x, pair.x2.x, assignment)


def random_map(
    rng: np.random.Generator, dom: FinSet, cod: FinSet
) -> Optional[SetMap]:
    if len(dom) and not len(cod):
        return None
    return SetMap.from_function(dom, cod, lambda _: _pick(rng, cod.elements))


def random_set(rng: np.random.Generator, max_size: int, prefix: str) -> FinSet:
    size = int(rng.integers(0, max_size + 1))
    return FinSet(tuple(f"{prefix}{i}" for i in range(size)), prefix.upper())


def random_commuting_square(
    rng: np.random.Generator, pi: SetMap, w: SetMap, max_size: int
) -> Square:
    """
    A square over the corner (pi, w) whose apex Z maps into the fiber product
    by a random map; it is cartesian exactly when that map is bijective.
    """
    product = fiber_product(pi, w)
    z = random_set(rng, max_size if len(product.apex) else 0, "z")
    into = random_map(rng, z, product.apex)
    u = SetMap.from_function(z, pi.dom, lambda e: decode_pair(into(e))[0])
    v = SetMap.from_function(z, w.dom, lambda e: decode_pair(into(e))[1])
    return Square(u, v, w, pi)


def random_cartesian_square(
    rng: np.random.Generator, pi: SetMap, max_size: int, prefix: str = "v"
) -> Optional[Square]:
    """
    The fiber product square of pi along a random w: V -> W, with its apex
    relabeled by a random bijection.
    """
    v_set = random_set(rng, max_size, prefix)
    w = random_map(rng, v_set, pi.cod)
    if w is None:
        return None
    product = fiber_product(pi, w)
    order = rng.permutation(len(product.apex))
    z = FinSet(tuple(f"z{int(i)}" for i in order), "Z")
    names = dict(zip(product.apex.elements, (f"z{int(i)}" for i in order)))
    back = {name: elem for elem, name in names.items()}
    u = SetMap.from_function(z, pi.dom, lambda e: product.pr1(back[e]))
    v = SetMap.from_function(z, v_set, lambda e: product.pr2(back[e]))
    return Square(u, v, w, pi)
