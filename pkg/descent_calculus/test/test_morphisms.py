import itertools
import unittest

from descent_calculus.lib.descent import Cover, CoveredObject
from descent_calculus.lib.errors import (
    InconsistentProblem,
    NotInvariant,
    NotOverSPrime,
)
from descent_calculus.lib.finset import base_change, compose, FinSet, identity, SetMap
from descent_calculus.lib.galois import (
    CompatibleAction,
    cyclic_group,
    descend_object,
    galois_cover_from_torsor,
    GaloisCover,
    GroupActionOnCover,
    symmetric_group,
)
from descent_calculus.lib.generator import (
    make_rng,
    random_compatible_action,
    random_galois_cover,
    random_hom,
    random_invariant_hom,
)
from descent_calculus.lib.morphisms import (
    act_on_hom,
    descend_equivariant,
    descend_morphism,
    DescendedMorphismProblem,
    EquivariantPair,
    functoriality_witness,
    hom_over,
    invariance_witness,
    is_invariant,
    poq_commutes,
    poq_commutes_via_geq,
    poq_witness,
)
from hypothesis import given, settings, strategies as st

S_PRIME = FinSet(("a", "b"), "S'")


def swap_cover() -> GaloisCover:
    base = FinSet(("*",), "S")
    cover = Cover(SetMap.from_dict(S_PRIME, base, {"a": "*", "b": "*"}))
    swap = SetMap.from_dict(S_PRIME, S_PRIME, {"a": "b", "b": "a"})
    action = GroupActionOnCover(
        cyclic_group(2), cover, (identity(S_PRIME), swap)
    )
    return GaloisCover(cover, action)


def free_action(g: GaloisCover, prefix: str, k: int) -> CompatibleAction:
    """
    k free orbits {p_i_a, p_i_b} with the generator swapping the two points.
    """
    assignment = {}
    swap = {}
    for i in range(k):
        left, right = f"{prefix}{i}a", f"{prefix}{i}b"
        assignment.update({left: "a", right: "b"})
        swap.update({left: right, right: left})
    x = FinSet(tuple(assignment), prefix.upper())
    obj = CoveredObject(x, SetMap.from_dict(x, S_PRIME, assignment))
    rho = (
        identity(x),
        SetMap.from_dict(x, x, swap),
    )
    return CompatibleAction(g, obj, rho)


class TestInvariance(unittest.TestCase):
    def test_exhaustive_c2(self):
        g = swap_cover()
        for k1, k2 in itertools.product((1, 2), repeat=2):
            pair = EquivariantPair(free_action(g, "x", k1), free_action(g, "z", k2))
            invariant = 0
            for delta in hom_over(pair.x1, pair.x2):
                expected = is_invariant(delta, pair)
                self.assertEqual(poq_commutes(delta, pair), expected)
                self.assertEqual(poq_commutes_via_geq(delta, pair), expected)
                self.assertEqual(invariance_witness(delta, pair) is None, expected)
                self.assertEqual(poq_witness(delta, pair) is None, expected)
                invariant += expected
            # an invariant morphism is a map between the orbit sets
            self.assertEqual(invariant, k2**k1)

    def test_not_over_s_prime(self):
        g = swap_cover()
        pair = EquivariantPair(free_action(g, "x", 1), free_action(g, "z", 1))
        crossed = SetMap.from_dict(pair.x1.x, pair.x2.x, {"x0a": "z0b", "x0b": "z0a"})
        self.assertRaises(NotOverSPrime, act_on_hom, "g", crossed, pair)
        self.assertRaises(NotOverSPrime, poq_witness, crossed, pair)

    def test_pair_on_different_covers(self):
        g = swap_cover()
        other = galois_cover_from_torsor(FinSet(("s",), "S"), cyclic_group(2))
        rho = CompatibleAction(
            other,
            CoveredObject(other.cover.s_prime, identity(other.cover.s_prime)),
            other.action.act,
        )
        self.assertRaises(InconsistentProblem, EquivariantPair, free_action(g, "x", 1), rho)

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.sampled_from(["C3", "S3"]),
    )
    @settings(max_examples=40, deadline=None)
    def test_act_on_hom_is_an_action(self, seed, name):
        group = symmetric_group(3) if name == "S3" else cyclic_group(3)
        rng = make_rng(seed)
        g = random_galois_cover(rng, group, 2)
        pair = EquivariantPair(
            random_compatible_action(rng, g, 12, "X"),
            random_compatible_action(rng, g, 12, "Z"),
        )
        delta = random_hom(rng, pair)
        if delta is None:
            return
        self.assertEqual(act_on_hom(group.identity, delta, pair), delta)
        for sigma, tau in itertools.product(group, repeat=2):
            twice = act_on_hom(sigma, act_on_hom(tau, delta, pair), pair)
            self.assertEqual(twice, act_on_hom(group.mul(sigma, tau), delta, pair))
        self.assertEqual(is_invariant(delta, pair), poq_commutes(delta, pair))


class TestDescendMorphism(unittest.TestCase):
    def test_exhaustive_c2(self):
        g = swap_cover()
        f = g.cover.f
        pair = EquivariantPair(free_action(g, "x", 2), free_action(g, "z", 2))
        descended = 0
        for delta in hom_over(pair.x1, pair.x2):
            problem = DescendedMorphismProblem.from_descents(pair, delta)
            if not is_invariant(delta, pair):
                self.assertRaises(NotInvariant, descend_morphism, problem)
                continue
            psi = descend_morphism(problem)
            changed = base_change(psi, problem.y1.pi, problem.y2.pi, f)
            self.assertEqual(changed, problem.epsilon)
            descended += 1
        self.assertEqual(descended, 4)

    def test_functoriality_exhaustive_c2(self):
        g = swap_cover()
        rho1, rho2, rho3 = (free_action(g, p, k) for p, k in (("x", 2), ("y", 2), ("z", 1)))
        y1 = descend_object(rho1).y
        identity_psi = descend_equivariant(EquivariantPair(rho1, rho1), identity(rho1.obj.x))
        self.assertEqual(identity_psi, identity(y1.x))

        pair12, pair23 = EquivariantPair(rho1, rho2), EquivariantPair(rho2, rho3)
        first = [d for d in hom_over(rho1.obj, rho2.obj) if is_invariant(d, pair12)]
        second = [d for d in hom_over(rho2.obj, rho3.obj) if is_invariant(d, pair23)]
        self.assertEqual((len(first), len(second)), (4, 1))
        for delta12, delta23 in itertools.product(first, second):
            composite = descend_equivariant(
                EquivariantPair(rho1, rho3), compose(delta12, delta23)
            )
            expected = compose(
                descend_equivariant(pair12, delta12), descend_equivariant(pair23, delta23)
            )
            self.assertEqual(composite, expected)
            self.assertIsNone(functoriality_witness(rho1, rho2, rho3, delta12, delta23))

    @given(st.integers(min_value=0, max_value=2**32 - 1), st.sampled_from(["C3", "S3"]))
    @settings(max_examples=30, deadline=None)
    def test_functoriality_random(self, seed, name):
        group = symmetric_group(3) if name == "S3" else cyclic_group(3)
        rng = make_rng(seed)
        g = random_galois_cover(rng, group, 2)
        rho1, rho2, rho3 = (
            random_compatible_action(rng, g, 2 * len(group), label) for label in "XYZ"
        )
        delta12 = random_invariant_hom(rng, EquivariantPair(rho1, rho2))
        delta23 = random_invariant_hom(rng, EquivariantPair(rho2, rho3))
        if delta12 is None or delta23 is None:
            return
        self.assertTrue(is_invariant(delta12, EquivariantPair(rho1, rho2)))
        self.assertIsNone(functoriality_witness(rho1, rho2, rho3, delta12, delta23))

    def test_side_preserving_morphism(self):
        g = swap_cover()
        pair = EquivariantPair(free_action(g, "x", 2), free_action(g, "z", 1))
        delta = SetMap.from_function(pair.x1.x, pair.x2.x, lambda e: "z0" + e[-1])
        psi = descend_morphism(DescendedMorphismProblem.from_descents(pair, delta))
        self.assertEqual(psi.assignment, {"x0a": "z0a", "x1a": "z0a"})

    def test_inconsistent_epsilon(self):
        g = swap_cover()
        pair = EquivariantPair(free_action(g, "x", 1), free_action(g, "z", 2))
        delta = SetMap.from_function(pair.x1.x, pair.x2.x, lambda e: "z0" + e[-1])
        problem = DescendedMorphismProblem.from_descents(pair, delta)
        other = SetMap.from_function(pair.x1.x, pair.x2.x, lambda e: "z1" + e[-1])
        tampered = DescendedMorphismProblem(
            pair,
            problem.y1,
            problem.y2,
            problem.theta1,
            problem.theta2,
            other,
            problem.epsilon,
        )
        self.assertRaises(InconsistentProblem, descend_morphism, tampered)


if __name__ == "__main__":
    unittest.main()
