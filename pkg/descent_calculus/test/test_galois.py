import unittest

from descent_calculus.lib.descent import (
    canonical_datum,
    cocycle_holds,
    Cover,
    CoveredObject,
    datum_to_six,
    effectivity_holds,
    enumerate_covering_data,
    make_descent_datum,
)
from descent_calculus.lib.errors import (
    ActionNotOverS,
    BaseMismatch,
    IncompatibleAction,
    InvalidGroup,
    NotGalois,
)
from descent_calculus.lib.finset import compose, FinSet, identity, SetMap
from descent_calculus.lib.galois import (
    action_to_datum,
    canonical_action,
    CompatibleAction,
    cyclic_group,
    datum_to_action,
    descend_object,
    fibers_are_torsors,
    FiniteGroup,
    galois_cover_from_torsor,
    galois_triple_check,
    galois_witness,
    GaloisCover,
    GroupActionOnCover,
    homomorphism_witness,
    is_galois,
    orbit_partition,
    qt_squares_cartesian,
    srho_squares_cartesian,
    symmetric_group,
    theta_lift,
    trivial_group,
)
from descent_calculus.lib.generator import (
    make_rng,
    random_action_cover,
    random_compatible_action,
    random_galois_cover,
    random_object,
)
from hypothesis import given, settings, strategies as st

S_PRIME = FinSet(("a", "b"), "S'")
BASE = FinSet(("*",), "S")


def swap_cover() -> GaloisCover:
    cover = Cover(SetMap.from_dict(S_PRIME, BASE, {"a": "*", "b": "*"}))
    group = cyclic_group(2)
    action = GroupActionOnCover.from_mapping(
        group,
        cover,
        {
            "e": identity(S_PRIME),
            "g": SetMap.from_dict(S_PRIME, S_PRIME, {"a": "b", "b": "a"}),
        },
    )
    return GaloisCover(cover, action)


def swap_action(g: GaloisCover) -> CompatibleAction:
    x = FinSet(("x1", "x2", "y1", "y2"), "X")
    pi = SetMap.from_dict(x, S_PRIME, {"x1": "a", "x2": "b", "y1": "a", "y2": "b"})
    rho_g = SetMap.from_dict(x, x, {"x1": "x2", "x2": "x1", "y1": "y2", "y2": "y1"})
    return CompatibleAction.from_mapping(
        g, CoveredObject(x, pi), {"e": identity(x), "g": rho_g}
    )


class TestGroups(unittest.TestCase):
    def test_named_groups(self):
        self.assertEqual(len(trivial_group()), 1)
        c3 = cyclic_group(3)
        self.assertEqual(c3.mul("g", "g2"), "e")
        self.assertEqual(c3.inverse("g"), "g2")
        s3 = symmetric_group(3)
        self.assertEqual(len(s3), 6)
        self.assertEqual(s3.identity, "p012")
        # not commutative
        self.assertNotEqual(s3.mul("p102", "p021"), s3.mul("p021", "p102"))

    def test_invalid_tables(self):
        self.assertRaises(InvalidGroup, FiniteGroup, (), ())
        self.assertRaises(InvalidGroup, FiniteGroup, ("e", "g"), (("e", "g"), ("e", "g")))
        self.assertRaises(InvalidGroup, FiniteGroup, ("e", "g"), (("e", "x"), ("g", "e")))
        self.assertRaises(InvalidGroup, FiniteGroup, ("(e|f)",), (("(e|f)",),))


class TestGaloisCover(unittest.TestCase):
    def test_swap_is_galois(self):
        g = swap_cover()
        self.assertTrue(is_galois(g.cover, g.action))
        self.assertTrue(fibers_are_torsors(g.cover, g.action))
        self.assertTrue(galois_triple_check(g, strict=True))
        self.assertEqual(g.sigma_between("a", "b"), "g")
        self.assertEqual(g.sigma_between("b", "b"), "e")
        self.assertEqual(g.theta("(g|a)"), "(a|b)")
        self.assertEqual(g.varrho("(g|(g|a))"), "(a|(b|a))")

    def test_fixed_point(self):
        s_prime = FinSet(("a", "b", "c"), "S'")
        cover = Cover(SetMap.from_function(s_prime, BASE, lambda _: "*"))
        swap = SetMap.from_dict(s_prime, s_prime, {"a": "b", "b": "a", "c": "c"})
        action = GroupActionOnCover(cyclic_group(2), cover, (identity(s_prime), swap))
        self.assertEqual(galois_witness(cover, action), "(c|c)")
        self.assertFalse(fibers_are_torsors(cover, action))
        with self.assertRaises(NotGalois) as ctx:
            GaloisCover(cover, action)
        self.assertEqual(ctx.exception.witness, "(c|c)")

    def test_action_over_s(self):
        s_prime = FinSet(("a", "b"), "S'")
        cover = Cover(SetMap.from_dict(s_prime, FinSet(("s", "t")), {"a": "s", "b": "t"}))
        swap = SetMap.from_dict(s_prime, s_prime, {"a": "b", "b": "a"})
        self.assertRaises(
            ActionNotOverS, GroupActionOnCover, cyclic_group(2), cover, (identity(s_prime), swap)
        )

    def test_torsor_cover(self):
        base = FinSet(("s", "t"), "S")
        for group in (trivial_group(), cyclic_group(3), symmetric_group(3)):
            g = galois_cover_from_torsor(base, group)
            self.assertEqual(len(g.cover.s_prime), 2 * len(group))
            self.assertTrue(galois_triple_check(g))

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.sampled_from([1, 2, 3, 4, 6]),
    )
    @settings(max_examples=60, deadline=None)
    def test_galois_oracle(self, seed, order):
        rng = make_rng(seed)
        group = symmetric_group(3) if order == 6 else cyclic_group(order)
        action = random_action_cover(rng, group, 3)
        self.assertEqual(
            is_galois(action.cover, action), fibers_are_torsors(action.cover, action)
        )


class TestCompatibleAction(unittest.TestCase):
    def test_incompatible(self):
        g = swap_cover()
        x = FinSet(("x1", "x2"), "X")
        pi = SetMap.from_dict(x, S_PRIME, {"x1": "a", "x2": "b"})
        with self.assertRaises(IncompatibleAction):
            CompatibleAction(g, CoveredObject(x, pi), (identity(x), identity(x)))

    def test_base_mismatch(self):
        g = swap_cover()
        x = FinSet(("x",), "X")
        obj = CoveredObject(x, SetMap.from_dict(x, BASE, {"x": "*"}))
        self.assertRaises(BaseMismatch, CompatibleAction, g, obj, (identity(x), identity(x)))

    def test_homomorphism_witness(self):
        group = cyclic_group(3)
        x = FinSet(("0", "1", "2"))
        shift = SetMap.from_dict(x, x, {"0": "1", "1": "2", "2": "0"})
        self.assertIsNone(
            homomorphism_witness(group, (identity(x), shift, compose(shift, shift)), x)
        )
        self.assertIsNotNone(homomorphism_witness(group, (identity(x), shift, shift), x))


class TestCompile(unittest.TestCase):
    def test_swap_phi_table(self):
        ca = swap_action(swap_cover())
        phi = action_to_datum(ca).phi
        self.assertEqual(phi("(x1|(a|a))"), "(x1|(a|a))")
        self.assertEqual(phi("(x1|(a|b))"), "(x2|(a|b))")
        self.assertEqual(phi("(y2|(b|a))"), "(y1|(b|a))")
        self.assertEqual(phi("(y2|(b|b))"), "(y2|(b|b))")

    def test_lifted_isomorphisms(self):
        ca = swap_action(swap_cover())
        lifted = theta_lift(ca)
        self.assertEqual(lifted.theta_x("(g|x1)"), "(x1|(a|b))")
        self.assertTrue(lifted.varrho_x.is_bijective())
        self.assertTrue(srho_squares_cartesian(ca))
        self.assertTrue(qt_squares_cartesian(ca))

    def test_recover(self):
        g = swap_cover()
        ca = swap_action(g)
        recovered = datum_to_action(g, ca.obj, action_to_datum(ca))
        self.assertEqual(recovered.rho, ca.rho)

    def test_recover_rejects_other_object(self):
        g = swap_cover()
        ca = swap_action(g)
        other = canonical_action(random_object(make_rng(0), BASE, 2, "Y"), g)
        self.assertRaises(BaseMismatch, datum_to_action, g, other.obj, action_to_datum(ca))

    def test_every_descent_datum_is_an_action(self):
        g = swap_cover()
        assignment = {"x0": "a", "x1": "a", "y0": "b", "y1": "b"}
        x = FinSet(tuple(assignment), "X")
        obj = CoveredObject(x, SetMap.from_dict(x, S_PRIME, assignment))
        actions = 0
        for cd in enumerate_covering_data(obj, g.cover):
            if not cocycle_holds(cd):
                continue
            ca = datum_to_action(g, obj, make_descent_datum(cd))
            self.assertEqual(action_to_datum(ca).phi, cd.phi)
            actions += 1
        # one action per bijection X_a -> X_b
        self.assertEqual(actions, 2)

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.sampled_from(["C2", "C3", "C4", "S3"]),
    )
    @settings(max_examples=500, deadline=None)
    def test_roundtrip_and_effectivity(self, seed, name):
        group = symmetric_group(3) if name == "S3" else cyclic_group(int(name[1]))
        rng = make_rng(seed)
        g = random_galois_cover(rng, group, 2)
        ca = random_compatible_action(rng, g, 12)
        dd = action_to_datum(ca)
        datum_to_six(dd)
        recovered = datum_to_action(g, ca.obj, dd)
        self.assertEqual(recovered.rho, ca.rho)
        y, theta = descend_object(ca)
        self.assertTrue(theta.is_bijective())
        self.assertTrue(effectivity_holds(dd, y, theta))


class TestDescendObject(unittest.TestCase):
    def test_swap(self):
        ca = swap_action(swap_cover())
        self.assertEqual(
            orbit_partition(ca), {"x1": "x1", "x2": "x1", "y1": "y1", "y2": "y1"}
        )
        y, theta = descend_object(ca)
        self.assertEqual(y.x.elements, ("x1", "y1"))
        self.assertEqual(theta.assignment["x2"], "(x1|b)")

    def test_canonical_action_compiles_to_canonical_datum(self):
        g = swap_cover()
        y = random_object(make_rng(5), BASE, 3, "Y")
        ca = canonical_action(y, g)
        self.assertEqual(action_to_datum(ca).phi, canonical_datum(y, g.cover).phi)


if __name__ == "__main__":
    unittest.main()
