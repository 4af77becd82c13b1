"""
Randomized property campaign. Each property generates an instance dict from
a per-trial random generator and checks it after a full parse, so a failing
instance can be emitted as-is and re-checked later with the check-property
command.
"""

import abc
import copy
import itertools
from typing import Any, Dict, List, Optional, Set

import networkx as nx
import numpy as np

from .config import validate_run_options
from .descent import (
    base_change_to_s_prime,
    canonical_datum,
    cocycle_holds,
    CocycleFails,
    covering_datum_to_squares,
    datum_to_six,
    effectivity_holds,
    induced_presentation,
    make_descent_datum,
    relation_witnesses,
    six_to_datum,
    squares_to_covering_datum,
)
from .errors import (
    DescentError,
    InvalidMap,
    NotInvariant,
    ParseError,
    PropertyViolation,
    UnresolvedReference,
)
from .field import build_extension, characters_distinct, splitting_iso
from .finset import (
    base_change,
    cartesian_witness,
    coproduct_of_squares,
    decode_tuple,
    fiber_product,
    find_isomorphism,
    FinSet,
    identity,
    is_cartesian,
    is_cartesian_by_cones,
)
from .galois import (
    action_to_datum,
    canonical_action,
    cyclic_group,
    datum_to_action,
    descend_object,
    FiniteGroup,
    fibers_are_torsors,
    galois_triple_check,
    galois_witness,
    GaloisCover,
    symmetric_group,
    trivial_group,
)
from .generator import (
    full_range,
    make_rng,
    random_action_cover,
    random_cartesian_square,
    random_commuting_square,
    random_compatible_action,
    random_cover,
    random_covering_datum,
    random_galois_cover,
    random_hom,
    random_invariant_hom,
    random_map,
    random_object,
    random_object_with_datum_shape,
    TableProduct,
)
from .init_helper import get_logger
from .instance import Instance, InstanceWriter, parse_instance
from .morphisms import (
    act_on_hom,
    descend_morphism,
    DescendedMorphismProblem,
    EquivariantPair,
    functoriality_witness,
    is_invariant,
    poq_commutes,
    poq_commutes_via_geq,
)
from .report import Report, timed

logger = get_logger()

FIELD_CASES = tuple(
    (case["p"], case["n"]) for case in TableProduct({"p": [2, 3, 5, 7], "n": full_range(1, 4)})
)


def group_choices(max_group: int) -> List[FiniteGroup]:
    groups = [trivial_group()] + [cyclic_group(n) for n in range(2, max_group + 1)]
    if max_group >= 6:
        groups.append(symmetric_group(3))
    return groups


def _pick(rng: np.random.Generator, items):
    return items[int(rng.integers(len(items)))]


def _small_set(rng: np.random.Generator, low: int, high: int, prefix: str) -> FinSet:
    size = int(rng.integers(low, high + 1))
    return FinSet(tuple(f"{prefix}{i}" for i in range(size)), prefix.upper())


class PropertyCheck(metaclass=abc.ABCMeta):
    """
    A property generates instances and checks them. check returns None when
    the property holds and a witness otherwise.
    """

    @abc.abstractmethod
    def generate(self, rng: np.random.Generator, run_options: Dict[str, Any]) -> Dict[str, Any]:
        raise NotImplementedError

    @abc.abstractmethod
    def check(self, instance: Instance) -> Optional[Any]:
        raise NotImplementedError

    # Perturbs the instance so that the property must fail; False if the
    # property has nothing to perturb.
    def inject_fault(self, raw: Dict[str, Any], rng: np.random.Generator) -> bool:
        return False


def perturb_datum(raw: Dict[str, Any], rng: np.random.Generator) -> bool:
    """
    Swaps the images of two points of p_1*X lying over the same point of S''.
    The result is still a covering datum.
    """
    for datum in raw.get("data", {}).values():
        groups: Dict[str, List[str]] = {}
        for key in sorted(datum["phi"]):
            x, s, t = decode_tuple(key, 3)
            groups.setdefault(f"{s}|{t}", []).append(key)
        candidates = [keys for _, keys in sorted(groups.items()) if len(keys) >= 2]
        if not candidates:
            continue
        keys = _pick(rng, candidates)
        first, second = keys[0], keys[1]
        phi = datum["phi"]
        phi[first], phi[second] = phi[second], phi[first]
        logger.info(f"injected fault: swapped phi({first}) and phi({second})")
        return True
    return False


class FiberProductCartesian(PropertyCheck):
    def generate(self, rng, run_options):
        w = _small_set(rng, 1, run_options["max_base"], "w")
        writer = InstanceWriter()
        writer.add_set("W", w)
        for name in ("U", "V"):
            carrier = _small_set(rng, 0, 6, name.lower())
            writer.add_set(name, carrier)
            edge = "f" if name == "U" else "g"
            writer.add_map(edge, random_map(rng, carrier, w), name, "W")
        writer.set_args(f="f", g="g")
        return writer.to_dict()

    def check(self, instance):
        f = instance.lookup("maps", instance.args["f"])
        g = instance.lookup("maps", instance.args["g"])
        return cartesian_witness(fiber_product(f, g).square)


class CartesianOracle(PropertyCheck):
    def generate(self, rng, run_options):
        w = _small_set(rng, 1, 3, "w")
        u = _small_set(rng, 0, 3, "u")
        v = _small_set(rng, 0, 3, "v")
        sq = random_commuting_square(rng, random_map(rng, u, w), random_map(rng, v, w), 4)
        writer = InstanceWriter()
        writer.add_square("sq", sq)
        writer.set_args(square="sq")
        return writer.to_dict()

    def check(self, instance):
        sq = instance.get("squares", "square")
        direct, oracle = is_cartesian(sq), is_cartesian_by_cones(sq)
        if direct != oracle:
            return {"is_cartesian": direct, "oracle": oracle}
        return None


class CoproductOfSquares(PropertyCheck):
    def generate(self, rng, run_options):
        w = _small_set(rng, 1, 4, "w")
        u = _small_set(rng, 0, 4, "u")
        pi = random_map(rng, u, w)
        writer = InstanceWriter()
        writer.add_set("U", u)
        writer.add_set("W", w)
        writer.add_map("pi", pi, "U", "W")
        labels = []
        for idx in range(int(rng.integers(0, 4))):
            sq = random_cartesian_square(rng, pi, 4, prefix=f"v{idx}_")
            if sq is not None:
                labels.append(writer.add_square(f"sq{idx}", sq))
        writer.set_args(squares=labels, edge="pi")
        return writer.to_dict()

    def check(self, instance):
        sqs = [instance.lookup("squares", label) for label in instance.args["squares"]]
        for label, sq in zip(instance.args["squares"], sqs):
            if not is_cartesian(sq):
                raise ParseError("summand is not cartesian", label)
        edge = instance.lookup("maps", instance.args["edge"])
        return cartesian_witness(coproduct_of_squares(sqs, edge))


def _covering_instance(rng, run_options) -> Dict[str, Any]:
    cover = random_cover(rng, min(run_options["max_base"], 3), run_options["max_fiber"])
    obj = random_object_with_datum_shape(rng, cover, min(run_options["max_set"], 9))
    cd = random_covering_datum(rng, obj, cover)
    writer = InstanceWriter()
    writer.add_cover("c", cover)
    writer.add_object("X", obj, "c.S'")
    writer.add_datum("phi", cd, "X", "c")
    return writer.to_dict()


class CoveringRoundtrip(PropertyCheck):
    def generate(self, rng, run_options):
        return _covering_instance(rng, run_options)

    def check(self, instance):
        cd = instance.get("data", "datum")
        squares = covering_datum_to_squares(cd)
        back = squares_to_covering_datum(cd.cover, (squares.square1, squares.square2))
        return back.phi.first_difference(cd.phi)


class CocycleRelation(PropertyCheck):
    def generate(self, rng, run_options):
        return _covering_instance(rng, run_options)

    def check(self, instance):
        cd = instance.get("data", "datum")
        witnesses = relation_witnesses(induced_presentation(cd))
        if witnesses["eq1"] is not None:
            return ("eq1", witnesses["eq1"])
        if cocycle_holds(cd) != (witnesses["eq3"] is None):
            return ("eq3", witnesses["eq3"], cocycle_holds(cd))
        return None


class DescentRoundtrip(PropertyCheck):
    def generate(self, rng, run_options):
        if rng.random() < 0.5:
            return _covering_instance(rng, run_options)
        cover = random_cover(rng, min(run_options["max_base"], 3), run_options["max_fiber"])
        y = random_object(rng, cover.base, 3, "Y")
        y_prime = base_change_to_s_prime(y, cover)
        writer = InstanceWriter()
        writer.add_cover("c", cover)
        writer.add_object("X", y_prime, "c.S'")
        writer.add_datum("phi", canonical_datum(y, cover).datum, "X", "c")
        return writer.to_dict()

    def check(self, instance):
        cd = instance.get("data", "datum")
        if not cocycle_holds(cd):
            try:
                datum_to_six(make_descent_datum(cd))
            except CocycleFails:
                return None
            return "datum without cocycle was accepted"
        dd = make_descent_datum(cd)
        back = six_to_datum(datum_to_six(dd))
        return back.phi.first_difference(dd.phi)


class GaloisOracle(PropertyCheck):
    def generate(self, rng, run_options):
        group = _pick(rng, group_choices(run_options["max_group"]))
        action = random_action_cover(rng, group, run_options["max_base"])
        writer = InstanceWriter()
        writer.add_cover("c", action.cover)
        writer.add_action("act", action, "c")
        return writer.to_dict()

    def check(self, instance):
        action = instance.get("actions", "action")
        witness = galois_witness(action.cover, action)
        if (witness is None) != fibers_are_torsors(action.cover, action):
            return ("torsor oracle disagrees", witness)
        if witness is None and not galois_triple_check(GaloisCover(action.cover, action)):
            return "galois triple check"
        return None


def _action_instance(rng, run_options, count: int = 1, orbits: Optional[int] = None):
    """
    orbits caps each X at that many free orbits instead of at max_set points.
    """
    group = _pick(rng, group_choices(run_options["max_group"]))
    g = random_galois_cover(rng, group, min(run_options["max_base"], 2))
    max_set = run_options["max_set"]
    if orbits is not None:
        max_set = min(max_set, orbits * len(group))
    writer = InstanceWriter()
    writer.add_cover("c", g.cover)
    writer.add_action("act", g.action, "c")
    actions = []
    for idx in range(count):
        ca = random_compatible_action(rng, g, max_set, f"X{idx + 1}")
        writer.add_compatible(f"rho{idx + 1}", ca, "act", "c")
        actions.append(ca)
    return writer, actions


class ActionDatum(PropertyCheck):
    def generate(self, rng, run_options):
        writer, (ca,) = _action_instance(rng, run_options)
        writer.add_datum("phi", action_to_datum(ca).datum, "rho1.X", "c")
        return writer.to_dict()

    def check(self, instance):
        ca = instance.get("compatible", "compatible")
        stored = instance.get("data", "datum")
        dd = action_to_datum(ca)
        witness = dd.phi.first_difference(stored.phi)
        if witness is not None:
            return ("phi differs from the compiled action", witness)
        recovered = datum_to_action(ca.base, ca.obj, make_descent_datum(stored))
        for sigma, mine, theirs in zip(ca.group, ca.rho, recovered.rho):
            witness = mine.first_difference(theirs)
            if witness is not None:
                return ("recovered action differs", sigma, witness)
        witness = action_to_datum(recovered).phi.first_difference(stored.phi)
        if witness is not None:
            return ("recompiled datum differs", witness)
        return None

    def inject_fault(self, raw, rng):
        return perturb_datum(raw, rng)


class Effectivity(PropertyCheck):
    def generate(self, rng, run_options):
        writer, _ = _action_instance(rng, run_options)
        return writer.to_dict()

    def check(self, instance):
        ca = instance.get("compatible", "compatible")
        y, theta = descend_object(ca)
        if not theta.is_bijective():
            return "theta_desc is not bijective"
        if not effectivity_holds(action_to_datum(ca), y, theta):
            return "effectivity square fails"
        # descending the base change of Y gives Y back up to isomorphism
        again = descend_object(canonical_action(y, ca.base)).y
        if find_isomorphism(y.pi, again.pi) is None:
            return "descent of Y' is not isomorphic to Y"
        return None


class HomProposition(PropertyCheck):
    def generate(self, rng, run_options):
        writer, actions = _action_instance(rng, run_options, count=2, orbits=2)
        pair = EquivariantPair(actions[0], actions[1])
        delta = random_hom(rng, pair) if rng.random() < 0.7 else None
        if delta is None:
            writer.add_morphism("delta", ("rho1", "rho1"), identity(actions[0].obj.x))
        else:
            writer.add_morphism("delta", ("rho1", "rho2"), delta)
        writer.set_args(morphism="delta")
        return writer.to_dict()

    def check(self, instance):
        rho1, rho2, delta = instance.get("morphisms", "morphism")
        pair = EquivariantPair(rho1, rho2)
        invariant = is_invariant(delta, pair)
        if poq_commutes(delta, pair) != invariant:
            return ("poq disagrees with invariance", invariant)
        if poq_commutes_via_geq(delta, pair) != invariant:
            return ("geq disagrees with invariance", invariant)
        group = pair.base.group
        for sigma, tau in itertools.product(group, repeat=2):
            left = act_on_hom(group.mul(sigma, tau), delta, pair)
            right = act_on_hom(sigma, act_on_hom(tau, delta, pair), pair)
            witness = left.first_difference(right)
            if witness is not None:
                return ("hom action is not a group action", sigma, tau, witness)
        problem = DescendedMorphismProblem.from_descents(pair, delta)
        try:
            psi = descend_morphism(problem)
        except NotInvariant as err:
            return None if not invariant else ("invariant morphism did not descend", err.witness)
        if not invariant:
            return "non-invariant morphism descended"
        lifted = base_change(psi, problem.y1.pi, problem.y2.pi, pair.base.cover.f)
        return lifted.first_difference(problem.epsilon)


class HomFunctoriality(PropertyCheck):
    def generate(self, rng, run_options):
        writer, actions = _action_instance(rng, run_options, count=3, orbits=2)
        labels = ("rho1", "rho2", "rho3")
        homs = [
            random_invariant_hom(rng, EquivariantPair(actions[i], actions[i + 1]))
            for i in range(2)
        ]
        if any(delta is None for delta in homs):
            # X1 -> X1 -> X1 through identities always exists
            labels = ("rho1", "rho1", "rho1")
            homs = [identity(actions[0].obj.x)] * 2
        writer.add_morphism("delta12", labels[:2], homs[0])
        writer.add_morphism("delta23", labels[1:], homs[1])
        writer.set_args(first="delta12", second="delta23")
        return writer.to_dict()

    def check(self, instance):
        first, second = instance.args.get("first"), instance.args.get("second")
        pairs = instance.raw.get("morphisms", {})
        if first not in pairs or second not in pairs:
            raise UnresolvedReference("unknown morphisms label", first or second)
        if pairs[first]["pair"][1] != pairs[second]["pair"][0]:
            raise ParseError("morphisms are not composable", second)
        rho1, rho2, delta12 = instance.lookup("morphisms", first)
        _, rho3, delta23 = instance.lookup("morphisms", second)
        return functoriality_witness(rho1, rho2, rho3, delta12, delta23)


class FieldSplit(PropertyCheck):
    def generate(self, rng, run_options):
        p, n = _pick(rng, FIELD_CASES)
        return {"schema": 1, "field": {"p": p, "n": n}}

    def check(self, instance):
        if not instance.field:
            raise ParseError("instance has no field section")
        ext = build_extension(int(instance.field["p"]), int(instance.field["n"]))
        iso = splitting_iso(ext)
        if iso.rank != ext.n**2:
            return ("rank", iso.rank)
        if not characters_distinct(iso):
            return "characters coincide"
        return None


def register_property(name: str, prop: PropertyCheck):
    global property_map
    logger.debug(f"register property: {name}")
    if name not in property_map:
        property_map[name] = prop
    else:
        raise ValueError(f"Duplicate property registration name: {name}")


def register_properties(property_dict: Dict[str, PropertyCheck]):
    for name, prop in property_dict.items():
        register_property(name, prop)


# Global property registry, a mapping of name to property object
property_map: Dict[str, PropertyCheck] = {}


def evaluate(prop: PropertyCheck, raw: Dict[str, Any]) -> Optional[Any]:
    """
    The violation witness of prop on raw, None if it holds. Parse failures
    propagate.
    """
    instance = parse_instance(raw)
    try:
        return prop.check(instance)
    except (ParseError, UnresolvedReference):
        raise
    except DescentError as err:
        return f"{type(err).__name__}: {err}"


def _violation(prop: PropertyCheck, raw: Dict[str, Any]) -> Optional[Any]:
    try:
        return evaluate(prop, raw)
    except (ParseError, UnresolvedReference):
        return None


def orbit_of(raw: Dict[str, Any], label: str, elem: str) -> Set[str]:
    """
    The component of elem in the graph of every endomap of the set label.
    Removing a whole component keeps group actions on the set intact.
    """
    graph = nx.Graph()
    graph.add_nodes_from(raw["sets"][label])
    for spec in raw.get("maps", {}).values():
        if spec["dom"] == label and spec["cod"] == label:
            graph.add_edges_from(spec["map"].items())
    return nx.node_connected_component(graph, elem)


def remove_elements(
    raw: Dict[str, Any], label: str, elems: Set[str]
) -> Optional[Dict[str, Any]]:
    """
    raw with elems dropped from the set label and from every map and datum
    defined on them; None when some map still lands on one of them.
    """
    candidate = copy.deepcopy(raw)
    candidate["sets"][label] = [e for e in candidate["sets"][label] if e not in elems]
    for spec in candidate.get("maps", {}).values():
        if spec["dom"] == label:
            for elem in elems:
                spec["map"].pop(elem, None)
        if spec["cod"] == label and not elems.isdisjoint(spec["map"].values()):
            return None
    for datum in candidate.get("data", {}).values():
        datum["phi"] = {
            key: value
            for key, value in datum["phi"].items()
            if elems.isdisjoint(_components(key)) and elems.isdisjoint(_components(value))
        }
    return candidate


def _components(elem: str):
    try:
        return decode_tuple(elem, 3)
    except InvalidMap:
        return (elem,)


def minimize(prop: PropertyCheck, raw: Dict[str, Any]) -> Dict[str, Any]:
    """
    Greedy removal: drop any orbit of set elements (a single element on sets
    without endomaps) whose removal keeps the instance valid and failing,
    until no such orbit is left.
    """
    current = raw
    improved = True
    while improved:
        improved = False
        for label in sorted(current.get("sets", {})):
            for elem in list(current["sets"][label]):
                candidate = remove_elements(current, label, orbit_of(current, label, elem))
                if candidate is not None and _violation(prop, candidate) is not None:
                    current = candidate
                    improved = True
                    break
            if improved:
                break
    return current


def check_property(name: str, instance: Instance) -> Optional[Any]:
    if name not in property_map:
        raise UnresolvedReference("unknown property", name)
    try:
        return property_map[name].check(instance)
    except (ParseError, UnresolvedReference):
        raise
    except DescentError as err:
        return f"{type(err).__name__}: {err}"


def fuzz_campaign(run_options: Dict[str, Any]) -> Report:
    """
    Runs trials round-robin over the selected properties; trial i uses a
    generator seeded with (seed, i), so every trial is reproducible alone.
    """
    validate_run_options(run_options)
    seed = run_options["seed"]
    names = run_options["properties"] or sorted(property_map)
    unknown = [name for name in names if name not in property_map]
    if unknown:
        raise UnresolvedReference("unknown property", unknown[0])
    report = Report("fuzz", seed=seed)
    report.counts = {name: {"pass": 0, "fail": 0} for name in names}
    for trial in range(run_options["trials"]):
        name = names[trial % len(names)]
        prop = property_map[name]
        rng = make_rng([seed, trial])
        with timed(report, name):
            raw = prop.generate(rng, run_options)
            raw["command"] = "check-property"
            raw.setdefault("args", {})["property"] = name
            if run_options["inject_fault"]:
                prop.inject_fault(raw, rng)
            try:
                witness = evaluate(prop, raw)
            except (ParseError, UnresolvedReference) as err:
                witness = f"generated instance is invalid: {err}"
        if witness is None:
            report.counts[name]["pass"] += 1
            continue
        report.counts[name]["fail"] += 1
        logger.info(f"trial {trial}: property {name} violated")
        report.fail_from(
            PropertyViolation(
                f"property {name} violated in trial {trial}",
                {"trial": trial, "property": name, "witness": witness},
            )
        )
        if report.counterexample is None:
            report.counterexample = (
                minimize(prop, raw) if run_options["minimize"] else raw
            )
    logger.info(f"fuzz campaign finished: {run_options['trials']} trials")
    return report


register_properties(
    {
        "fiber-product-cartesian": FiberProductCartesian(),
        "cartesian-oracle": CartesianOracle(),
        "coproduct-of-squares": CoproductOfSquares(),
        "covering-roundtrip": CoveringRoundtrip(),
        "cocycle-relation": CocycleRelation(),
        "descent-roundtrip": DescentRoundtrip(),
        "galois-oracle": GaloisOracle(),
        "action-datum": ActionDatum(),
        "effectivity": Effectivity(),
        "hom-proposition": HomProposition(),
        "hom-functoriality": HomFunctoriality(),
        "field-split": FieldSplit(),
    }
)
