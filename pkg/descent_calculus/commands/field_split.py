from typing import Any, Dict, Tuple

from ..lib.command import CommandInterface, register_command
from ..lib.errors import DegreeZero, NotPrime, ParseError
from ..lib.field import build_extension, characters_distinct, splitting_iso
from ..lib.instance import Instance


def _field_arguments(instance: Instance, options: Dict[str, Any]) -> Tuple[int, int]:
    positional = options.get("positional") or []
    try:
        if len(positional) >= 2:
            return int(positional[0]), int(positional[1])
        if instance.field:
            return int(instance.field["p"]), int(instance.field["n"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("field-split expects integers p and n", positional or instance.field)
    raise ParseError("field-split expects p and n")


class FieldSplit(CommandInterface):
    """
    K ⊗_k K -> ∏_σ K for the degree n extension of F_p. The matrix has one
    block of rows per Frobenius power, in order 0..n-1.
    """

    def run(self, report, instance, options):
        p, n = _field_arguments(instance, options)
        try:
            ext = build_extension(p, n)
        except (NotPrime, DegreeZero) as err:
            raise ParseError(str(err), err.witness)
        iso = splitting_iso(ext)
        report.details.update(
            {
                "p": p,
                "n": n,
                "modulus": [int(c) for c in ext.modulus],
                "rank": iso.rank,
                "matrix": iso.matrix.astype(int).tolist(),
            }
        )
        if not characters_distinct(iso):
            report.fail("characters", "the characters x⊗y -> x·σ(y) coincide")


register_command("field-split", FieldSplit())
