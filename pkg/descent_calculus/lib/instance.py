"""
JSON instance files (schema 1). Every entity is labeled and referenced by
label:

    {
      "schema": 1,
      "sets":       {"S": ["*"], "S1": ["a", "b"]},
      "maps":       {"f": {"dom": "S1", "cod": "S", "map": {"a": "*", "b": "*"}}},
      "squares":    {"sq": {"u": "..", "v": "..", "w": "..", "pi": ".."}},
      "groups":     {"C2": {"elements": ["e", "g"], "table": [["e", "g"], ["g", "e"]]},
                     "C3": {"cyclic": 3}, "S3": {"symmetric": 3}},
      "covers":     {"c": {"map": "f"}},
      "objects":    {"X": {"set": "X", "pi": "piX"}},
      "actions":    {"swap": {"group": "C2", "cover": "c", "act": {"e": "..", "g": ".."}}},
      "compatible": {"rho": {"action": "swap", "object": "X", "rho": {"e": "..", "g": ".."}}},
      "data":       {"phi": {"object": "X", "cover": "c", "phi": {"(x|(a|b))": "(y|(a|b))"}}},
      "morphisms":  {"d": {"pair": ["rho", "rho"], "map": "delta"}},
      "field":      {"p": 2, "n": 2},
      "args":       {"square": "sq"},
      "command":    "check-cartesian"
    }
"""

import copy
from typing import Any, Dict, List, Optional, Tuple

from .descent import Cover, CoveredObject, CoveringDatum, pulled_objects
from .errors import DescentError, ParseError, UnresolvedReference
from .finset import FinSet, SetMap, Square
from .galois import (
    CompatibleAction,
    cyclic_group,
    FiniteGroup,
    GaloisCover,
    GroupActionOnCover,
    symmetric_group,
    trivial_group,
)
from .init_helper import get_logger

logger = get_logger()

SCHEMA_VERSION = 1

SECTIONS = (
    "sets",
    "maps",
    "squares",
    "groups",
    "covers",
    "objects",
    "actions",
    "compatible",
    "data",
    "morphisms",
)


class Instance:
    """
    A parsed instance: every section maps labels to validated entities.
    """

    def __init__(self, raw: Dict[str, Any]):
        self.raw = raw
        self.entities: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}
        self.args: Dict[str, Any] = raw.get("args", {})
        self.field: Optional[Dict[str, int]] = raw.get("field")
        self.command: Optional[str] = raw.get("command")
        self.batch: Optional[List[Dict[str, Any]]] = raw.get("batch")

    def lookup(self, section: str, label: str) -> Any:
        try:
            return self.entities[section][label]
        except KeyError:
            raise UnresolvedReference(f"unknown {section} label", label)

    def get(self, section: str, arg: Optional[str] = None) -> Any:
        """
        The entity named by args[arg], or the only entity of the section.
        """
        if arg and arg in self.args:
            return self.lookup(section, self.args[arg])
        entries = self.entities[section]
        if len(entries) != 1:
            raise UnresolvedReference(
                f"expected exactly one entry in {section} or an explicit '{arg}' argument",
                section,
            )
        return next(iter(entries.values()))


def _require(mapping: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(mapping, dict) or key not in mapping:
        raise ParseError(f"missing field '{key}'", where)
    return mapping[key]


def _parse_set(label: str, spec: Any) -> FinSet:
    if not isinstance(spec, list) or not all(isinstance(e, str) for e in spec):
        raise ParseError("a set must be an array of strings", label)
    return FinSet(tuple(spec), label)


def _parse_group(label: str, spec: Dict[str, Any]) -> FiniteGroup:
    if "cyclic" in spec:
        return cyclic_group(int(spec["cyclic"]))
    if "symmetric" in spec:
        return symmetric_group(int(spec["symmetric"]))
    if spec.get("trivial"):
        return trivial_group()
    elements = _require(spec, "elements", label)
    table = _require(spec, "table", label)
    return FiniteGroup(tuple(elements), tuple(tuple(row) for row in table), label)


def _group_maps(
    instance: Instance, group: FiniteGroup, table: Dict[str, str], where: str
) -> Tuple[SetMap, ...]:
    missing = [sigma for sigma in group if sigma not in table]
    if missing:
        raise ParseError("no map given for group element", (where, missing[0]))
    return tuple(instance.lookup("maps", table[sigma]) for sigma in group)


def parse_instance(raw: Dict[str, Any]) -> Instance:
    if not isinstance(raw, dict):
        raise ParseError("instance must be a JSON object")
    if raw.get("schema") != SCHEMA_VERSION:
        raise ParseError("unsupported schema version", raw.get("schema"))
    instance = Instance(raw)
    builders = (
        ("sets", _parse_set),
        (
            "maps",
            lambda label, spec: SetMap.from_dict(
                instance.lookup("sets", _require(spec, "dom", label)),
                instance.lookup("sets", _require(spec, "cod", label)),
                _require(spec, "map", label),
            ),
        ),
        (
            "squares",
            lambda label, spec: Square(
                *[
                    instance.lookup("maps", _require(spec, key, label))
                    for key in ("u", "v", "w", "pi")
                ]
            ),
        ),
        ("groups", _parse_group),
        (
            "covers",
            lambda label, spec: Cover(instance.lookup("maps", _require(spec, "map", label))),
        ),
        (
            "objects",
            lambda label, spec: CoveredObject(
                instance.lookup("sets", _require(spec, "set", label)),
                instance.lookup("maps", _require(spec, "pi", label)),
            ),
        ),
        ("actions", lambda label, spec: _parse_action(instance, label, spec)),
        ("compatible", lambda label, spec: _parse_compatible(instance, label, spec)),
        ("data", lambda label, spec: _parse_datum(instance, label, spec)),
        ("morphisms", lambda label, spec: _parse_morphism(instance, label, spec)),
    )
    for section, build in builders:
        entries = raw.get(section, {})
        if not isinstance(entries, dict):
            raise ParseError(f"section {section} must be an object", section)
        for label, spec in entries.items():
            try:
                instance.entities[section][label] = build(label, spec)
            except (ParseError, UnresolvedReference):
                raise
            except DescentError as err:
                raise ParseError(f"invalid {section} entry {label}: {err}", label)
    logger.debug(
        "parsed instance: "
        + ", ".join(f"{len(instance.entities[s])} {s}" for s in SECTIONS if instance.entities[s])
    )
    return instance


def _parse_action(instance: Instance, label: str, spec: Dict[str, Any]) -> GroupActionOnCover:
    group = instance.lookup("groups", _require(spec, "group", label))
    cover = instance.lookup("covers", _require(spec, "cover", label))
    act = _group_maps(instance, group, _require(spec, "act", label), label)
    return GroupActionOnCover(group, cover, act)


def _parse_compatible(instance: Instance, label: str, spec: Dict[str, Any]) -> CompatibleAction:
    action = instance.lookup("actions", _require(spec, "action", label))
    obj = instance.lookup("objects", _require(spec, "object", label))
    rho = _group_maps(instance, action.group, _require(spec, "rho", label), label)
    return CompatibleAction(GaloisCover(action.cover, action), obj, rho)


def _parse_datum(instance: Instance, label: str, spec: Dict[str, Any]) -> CoveringDatum:
    obj = instance.lookup("objects", _require(spec, "object", label))
    cover = instance.lookup("covers", _require(spec, "cover", label))
    table = _require(spec, "phi", label)
    source, target = pulled_objects(obj, cover)
    return CoveringDatum(obj, cover, SetMap.from_dict(source.carrier, target.carrier, table))


def _parse_morphism(
    instance: Instance, label: str, spec: Dict[str, Any]
) -> Tuple[CompatibleAction, CompatibleAction, SetMap]:
    pair = _require(spec, "pair", label)
    if not isinstance(pair, list) or len(pair) != 2:
        raise ParseError("morphism pair must name two compatible actions", label)
    rho1, rho2 = (instance.lookup("compatible", name) for name in pair)
    return rho1, rho2, instance.lookup("maps", _require(spec, "map", label))


class InstanceWriter:
    """
    Serializes entities back into an instance dict, naming them by the labels
    passed in. Used to emit counterexamples.
    """

    def __init__(self):
        self.raw: Dict[str, Any] = {"schema": SCHEMA_VERSION}

    def _section(self, name: str) -> Dict[str, Any]:
        return self.raw.setdefault(name, {})

    def add_set(self, label: str, finset: FinSet) -> str:
        self._section("sets")[label] = list(finset.elements)
        return label

    def add_map(self, label: str, fn: SetMap, dom: str, cod: str) -> str:
        self._section("maps")[label] = {"dom": dom, "cod": cod, "map": fn.assignment}
        return label

    def add_square(self, label: str, sq: Square, prefix: Optional[str] = None) -> str:
        prefix = prefix or label
        names = {}
        for corner in ("Z", "U", "V", "W"):
            names[corner] = self.add_set(f"{prefix}.{corner}", _corner(sq, corner))
        edges = {"u": ("Z", "U"), "v": ("Z", "V"), "w": ("V", "W"), "pi": ("U", "W")}
        refs = {
            key: self.add_map(f"{prefix}.{key}", getattr(sq, key), names[a], names[b])
            for key, (a, b) in edges.items()
        }
        self._section("squares")[label] = refs
        return label

    def add_group(self, label: str, group: FiniteGroup) -> str:
        self._section("groups")[label] = {
            "elements": list(group.elements),
            "table": [list(row) for row in group.table],
        }
        return label

    def add_cover(self, label: str, cover: Cover) -> str:
        s_prime = self.add_set(f"{label}.S'", cover.s_prime)
        base = self.add_set(f"{label}.S", cover.base)
        self.add_map(f"{label}.f", cover.f, s_prime, base)
        self._section("covers")[label] = {"map": f"{label}.f"}
        return label

    def add_object(self, label: str, obj: CoveredObject, base: str) -> str:
        carrier = self.add_set(label, obj.x)
        self.add_map(f"{label}.pi", obj.pi, carrier, base)
        self._section("objects")[label] = {"set": carrier, "pi": f"{label}.pi"}
        return label

    def add_action(self, label: str, action: GroupActionOnCover, cover: str) -> str:
        group = self.add_group(f"{label}.group", action.group)
        s_prime = f"{cover}.S'"
        act = {}
        for sigma, auto in zip(action.group.elements, action.act):
            act[sigma] = self.add_map(f"{label}.{sigma}", auto, s_prime, s_prime)
        self._section("actions")[label] = {"group": group, "cover": cover, "act": act}
        return label

    def add_compatible(
        self, label: str, ca: CompatibleAction, action: str, cover: str
    ) -> str:
        obj = self.add_object(f"{label}.X", ca.obj, f"{cover}.S'")
        rho = {}
        for sigma, auto in zip(ca.group.elements, ca.rho):
            rho[sigma] = self.add_map(f"{label}.{sigma}", auto, obj, obj)
        self._section("compatible")[label] = {"action": action, "object": obj, "rho": rho}
        return label

    def add_datum(self, label: str, cd: CoveringDatum, obj: str, cover: str) -> str:
        self._section("data")[label] = {
            "object": obj,
            "cover": cover,
            "phi": cd.phi.assignment,
        }
        return label

    def add_morphism(self, label: str, pair: Tuple[str, str], fn: SetMap) -> str:
        rho1, rho2 = self.raw["compatible"][pair[0]], self.raw["compatible"][pair[1]]
        self.add_map(f"{label}.map", fn, rho1["object"], rho2["object"])
        self._section("morphisms")[label] = {"pair": list(pair), "map": f"{label}.map"}
        return label

    def set_args(self, **args: Any):
        self.raw.setdefault("args", {}).update(args)

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.raw)


def _corner(sq: Square, corner: str) -> FinSet:
    return {"Z": sq.u.dom, "U": sq.u.cod, "V": sq.v.cod, "W": sq.w.cod}[corner]
