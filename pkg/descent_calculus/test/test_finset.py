import unittest

from descent_calculus.lib.errors import (
    CodomainMismatch,
    CompositionMismatch,
    DuplicateElement,
    InvalidMap,
    NonCommutingSquare,
    NotBijective,
    NotCartesian,
    RightEdgeMismatch,
)
from descent_calculus.lib.finset import (
    base_change,
    cartesian_witness,
    compose,
    compose_all,
    compose_and_invert,
    copair,
    coproduct,
    coproduct_map,
    coproduct_of_squares,
    decode_pair,
    decode_tuple,
    encode_pair,
    encode_tuple,
    fiber_product,
    find_isomorphism,
    FinSet,
    identity,
    invert,
    is_cartesian,
    is_cartesian_by_cones,
    is_iso_square,
    is_well_formed,
    maps_over,
    paste_squares,
    SetMap,
    Square,
    transport_square,
)
from descent_calculus.lib.generator import (
    make_rng,
    random_cartesian_square,
    random_commuting_square,
    random_map,
)
from hypothesis import given, settings, strategies as st


def fs(*elements, label=""):
    return FinSet(tuple(elements), label)


def sm(dom, cod, assignment):
    return SetMap.from_dict(dom, cod, assignment)


class TestEncoding(unittest.TestCase):
    def test_pair_and_tuple(self):
        self.assertEqual(encode_pair("a", "b"), "(a|b)")
        self.assertEqual(encode_tuple("a", "b", "c"), "(a|(b|c))")
        self.assertEqual(decode_pair("((a|b)|c)"), ("(a|b)", "c"))
        self.assertEqual(decode_tuple("(a|(b|c))", 3), ("a", "b", "c"))

    def test_malformed(self):
        self.assertRaises(InvalidMap, decode_pair, "abc")
        self.assertRaises(InvalidMap, encode_tuple, "a")
        self.assertFalse(is_well_formed("a|b"))
        self.assertFalse(is_well_formed(""))
        self.assertTrue(is_well_formed("((a|b)|(c|d))"))


class TestFinSet(unittest.TestCase):
    def test_canonical_order(self):
        self.assertEqual(fs("b", "a", label="X"), fs("a", "b", label="Y"))
        self.assertEqual(fs("b", "a").elements, ("a", "b"))

    def test_duplicates(self):
        self.assertRaises(DuplicateElement, fs, "a", "a")
        self.assertRaises(InvalidMap, fs, "a|b")

    def test_map_validation(self):
        a, b = fs("x", "y"), fs("1")
        self.assertRaises(InvalidMap, sm, a, b, {"x": "1"})
        self.assertRaises(InvalidMap, sm, a, b, {"x": "1", "y": "2"})
        self.assertRaises(InvalidMap, sm, a, b, {"x": "1", "y": "1", "z": "1"})


class TestCompose(unittest.TestCase):
    def setUp(self):
        self.a = fs("1", "2", "3")
        self.b = fs("x", "y")
        self.c = fs("p", "q")
        self.f = sm(self.a, self.b, {"1": "x", "2": "y", "3": "x"})
        self.g = sm(self.b, self.c, {"x": "q", "y": "p"})

    def test_compose(self):
        gf = compose(self.f, self.g)
        self.assertEqual(gf.assignment, {"1": "q", "2": "p", "3": "q"})
        self.assertEqual(compose_and_invert(self.f, self.g), gf)
        self.assertEqual(compose_all(self.f, self.g, identity(self.c)), gf)
        self.assertRaises(CompositionMismatch, compose, self.g, self.f)

    def test_identity_and_inverse(self):
        self.assertEqual(compose(identity(self.a), self.f), self.f)
        self.assertEqual(compose(self.f, identity(self.b)), self.f)
        self.assertEqual(compose_and_invert(finset=self.a), identity(self.a))
        self.assertEqual(compose(self.g, invert(self.g)), identity(self.b))
        self.assertEqual(compose_and_invert(self.g), invert(self.g))
        with self.assertRaises(NotBijective) as ctx:
            invert(self.f)
        self.assertEqual(ctx.exception.witness, "x")

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_associative(self, seed):
        rng = make_rng(seed)
        sets = [fs(*[f"e{i}" for i in range(n)]) for n in (3, 2, 4, 2)]
        f, g, h = (random_map(rng, sets[i], sets[i + 1]) for i in range(3))
        self.assertEqual(compose(compose(f, g), h), compose(f, compose(g, h)))


class TestFiberProduct(unittest.TestCase):
    def setUp(self):
        self.u = fs("u0", "u1")
        self.v = fs("v0", "v1", "v2")
        self.w = fs("w0", "w1")
        self.pi = sm(self.u, self.w, {"u0": "w0", "u1": "w1"})
        self.g = sm(self.v, self.w, {"v0": "w0", "v1": "w0", "v2": "w1"})

    def test_apex(self):
        product = fiber_product(self.pi, self.g)
        self.assertEqual(
            product.apex.elements, ("(u0|v0)", "(u0|v1)", "(u1|v2)")
        )
        self.assertTrue(is_cartesian(product.square))
        self.assertIsNone(cartesian_witness(product.square))

    def test_codomain_mismatch(self):
        self.assertRaises(CodomainMismatch, fiber_product, self.pi, identity(self.v))

    def test_empty_fiber(self):
        g = sm(self.v, self.w, {"v0": "w0", "v1": "w0", "v2": "w0"})
        product = fiber_product(self.pi, g)
        self.assertEqual(len(product.apex), 3)
        self.assertNotIn("u1", [product.pr1(e) for e in product.apex])

    def test_not_cartesian(self):
        product = fiber_product(self.pi, self.g)
        # drop (u1|v2) from the apex
        z = fs("(u0|v0)", "(u0|v1)")
        sq = Square(
            SetMap.from_function(z, self.u, lambda e: decode_pair(e)[0]),
            SetMap.from_function(z, self.v, lambda e: decode_pair(e)[1]),
            self.g,
            self.pi,
        )
        self.assertFalse(is_cartesian(sq))
        self.assertEqual(cartesian_witness(sq), "(u1|v2)")
        self.assertFalse(is_cartesian_by_cones(sq))
        self.assertTrue(is_cartesian_by_cones(product.square))
        with self.assertRaises(NotCartesian) as ctx:
            transport_square(sq, identity(z))
        self.assertEqual(ctx.exception.witness, "(u1|v2)")

    def test_non_commuting(self):
        with self.assertRaises(NonCommutingSquare):
            Square(
                sm(fs("z"), self.u, {"z": "u0"}),
                sm(fs("z"), self.v, {"z": "v2"}),
                self.g,
                self.pi,
            )

    def test_transport_and_iso(self):
        product = fiber_product(self.pi, self.g)
        psi = sm(
            product.apex,
            fs("a", "b", "c"),
            {"(u0|v0)": "b", "(u0|v1)": "c", "(u1|v2)": "a"},
        )
        moved = transport_square(product.square, invert(psi))
        self.assertTrue(is_cartesian(moved))
        self.assertRaises(NotBijective, transport_square, product.square, self.g)
        self.assertFalse(is_iso_square(product.square))
        sq = Square(identity(self.u), self.pi, identity(self.w), self.pi)
        self.assertTrue(is_iso_square(sq) and is_cartesian(sq))

    def test_paste(self):
        inner = fiber_product(self.pi, self.g)
        iso = Square(identity(self.u), self.pi, identity(self.w), self.pi)
        pasted = paste_squares(inner.square, iso)
        self.assertEqual(pasted, inner.square)
        self.assertTrue(is_cartesian(pasted))
        other = Square(identity(self.v), self.g, identity(self.w), self.g)
        self.assertRaises(CompositionMismatch, paste_squares, inner.square, other)

    def test_base_change(self):
        a = fs("a0", "a1")
        alpha = sm(a, self.w, {"a0": "w0", "a1": "w1"})
        h = sm(a, self.u, {"a0": "u0", "a1": "u1"})
        changed = base_change(h, alpha, self.pi, self.g)
        self.assertEqual(changed.assignment["(a0|v1)"], "(u0|v1)")
        self.assertTrue(changed.is_bijective())
        bad = sm(a, self.u, {"a0": "u1", "a1": "u1"})
        self.assertRaises(NonCommutingSquare, base_change, bad, alpha, self.pi, self.g)


class TestCoproduct(unittest.TestCase):
    def test_coproduct_and_copair(self):
        a, b = fs("x"), fs("x", "y")
        union, injections = coproduct([a, b], ["s", "t"])
        self.assertEqual(union.elements, ("(s|x)", "(t|x)", "(t|y)"))
        self.assertEqual(injections[1]("y"), "(t|y)")
        c = fs("1")
        to_c = copair([sm(a, c, {"x": "1"}), sm(b, c, {"x": "1", "y": "1"})], c)
        self.assertEqual(len(to_c.dom), 3)
        self.assertRaises(InvalidMap, coproduct, [a, b], ["s", "s"])
        self.assertRaises(CodomainMismatch, copair, [identity(a)], c)
        spread = coproduct_map([identity(a), identity(b)])
        self.assertEqual(spread, identity(spread.dom))

    def test_empty_coproduct_of_squares(self):
        pi = sm(fs("u"), fs("w"), {"u": "w"})
        self.assertRaises(RightEdgeMismatch, coproduct_of_squares, [])
        sq = coproduct_of_squares([], pi)
        self.assertEqual(len(sq.apex), 0)
        self.assertTrue(is_cartesian(sq))

    def test_one_summand_not_cartesian(self):
        pi = sm(fs("u0"), fs("w0"), {"u0": "w0"})
        g = sm(fs("v0", "v1"), fs("w0"), {"v0": "w0", "v1": "w0"})
        good = fiber_product(pi, g).square
        # one point over a two-point fiber
        z = fs("z")
        bad = Square(sm(z, pi.dom, {"z": "u0"}), sm(z, g.dom, {"z": "v0"}), g, pi)
        self.assertTrue(is_cartesian(good))
        self.assertFalse(is_cartesian(bad))
        both = coproduct_of_squares([good, bad], pi)
        self.assertFalse(is_cartesian(both))
        self.assertIsNotNone(cartesian_witness(both))
        self.assertTrue(is_cartesian(coproduct_of_squares([good, good], pi)))

    def test_shared_edge(self):
        rng = make_rng(3)
        pi = sm(fs("u0", "u1"), fs("w0", "w1"), {"u0": "w0", "u1": "w1"})
        other = sm(fs("u0", "u1"), fs("w0", "w1"), {"u0": "w1", "u1": "w0"})
        sq1 = random_cartesian_square(rng, pi, 3)
        sq2 = random_cartesian_square(rng, other, 3)
        self.assertRaises(RightEdgeMismatch, coproduct_of_squares, [sq1, sq2])

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.integers(min_value=0, max_value=3),
    )
    @settings(max_examples=500, deadline=None)
    def test_coproduct_of_cartesian_squares(self, seed, count):
        rng = make_rng(seed)
        w = fs("w0", "w1", "w2")
        pi = random_map(rng, fs("u0", "u1", "u2", "u3"), w)
        sqs = [random_cartesian_square(rng, pi, 4) for _ in range(count)]
        self.assertTrue(is_cartesian(coproduct_of_squares(sqs, pi)))


class TestCartesianOracle(unittest.TestCase):
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=150, deadline=None)
    def test_oracle_agrees(self, seed):
        rng = make_rng(seed)
        w = fs(*[f"w{i}" for i in range(int(rng.integers(1, 4)))])
        u = fs(*[f"u{i}" for i in range(int(rng.integers(0, 4)))])
        v = fs(*[f"v{i}" for i in range(int(rng.integers(0, 4)))])
        sq = random_commuting_square(rng, random_map(rng, u, w), random_map(rng, v, w), 4)
        self.assertEqual(is_cartesian(sq), is_cartesian_by_cones(sq))

    def test_corpus(self):
        rng = make_rng([2024, 8])
        cartesian = 0
        for _ in range(10000):
            w = fs(*[f"w{i}" for i in range(int(rng.integers(1, 4)))])
            u = fs(*[f"u{i}" for i in range(int(rng.integers(0, 5)))])
            v = fs(*[f"v{i}" for i in range(int(rng.integers(0, 5)))])
            sq = random_commuting_square(
                rng, random_map(rng, u, w), random_map(rng, v, w), 4
            )
            direct = is_cartesian(sq)
            self.assertEqual(direct, is_cartesian_by_cones(sq))
            cartesian += direct
        # both verdicts occur
        self.assertGreater(cartesian, 0)
        self.assertLess(cartesian, 10000)


class TestMapsOver(unittest.TestCase):
    def test_enumeration(self):
        base = fs("s", "t")
        alpha = sm(fs("a", "b", "c"), base, {"a": "s", "b": "s", "c": "t"})
        beta = sm(fs("x", "y", "z"), base, {"x": "s", "y": "t", "z": "t"})
        self.assertEqual(len(list(maps_over(alpha, beta))), 2)
        self.assertEqual(list(maps_over(alpha, beta, bijective=True)), [])
        self.assertIsNone(find_isomorphism(alpha, beta))
        gamma = sm(fs("p", "q", "r"), base, {"p": "t", "q": "s", "r": "s"})
        iso = find_isomorphism(alpha, gamma)
        self.assertTrue(iso.is_bijective())
        self.assertEqual(compose(iso, gamma), alpha)

    def test_codomain_mismatch(self):
        alpha = sm(fs("a"), fs("s"), {"a": "s"})
        beta = sm(fs("b"), fs("t"), {"b": "t"})
        self.assertRaises(CodomainMismatch, list, maps_over(alpha, beta))


if __name__ == "__main__":
    unittest.main()
