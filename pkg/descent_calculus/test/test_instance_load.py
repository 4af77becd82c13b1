import os
import unittest

from descent_calculus.lib.config import get_run_options, InstanceConfig
from descent_calculus.lib.errors import ParseError, UnresolvedReference
from descent_calculus.lib.galois import cyclic_group, galois_cover_from_torsor
from descent_calculus.lib.instance import InstanceWriter, parse_instance

CURR_DIR = os.path.dirname(os.path.realpath(__file__))
CONFIG_DIR = os.path.join(CURR_DIR, os.pardir, "examples", "configs")


def load(name: str) -> InstanceConfig:
    config = InstanceConfig(get_run_options())
    config.load_json_file(os.path.join(CONFIG_DIR, name))
    return config


class TestInstanceLoad(unittest.TestCase):
    def test_json_load_fixtures(self):
        for name in sorted(os.listdir(CONFIG_DIR)):
            config = load(name)
            self.assertTrue(config.instance.command or config.instance.batch, name)
            self.assertEqual(
                config.run_options["config_dir"], os.path.realpath(CONFIG_DIR)
            )

    def test_swap_entities(self):
        instance = load("swap_c2.json").instance
        rho = instance.get("compatible")
        self.assertEqual(rho.group.name, "C2")
        self.assertEqual(len(rho.obj.x), 4)
        self.assertEqual(instance.lookup("covers", "c").base.elements, ("*",))
        self.assertRaises(UnresolvedReference, instance.lookup, "covers", "missing")
        self.assertRaises(UnresolvedReference, instance.get, "data")

    def test_fixed_point_parses_action(self):
        # the action is valid, only compatible actions need a Galois cover
        instance = load("fixed_point.json").instance
        self.assertEqual(len(instance.get("actions").group), 2)

    def test_bad_schema(self):
        config = InstanceConfig(get_run_options())
        self.assertRaises(ParseError, config.load, {"schema": 2})
        self.assertRaises(ParseError, config.load, {})
        self.assertRaises(ParseError, config.load_json, "{\"schema\": 1,")
        self.assertRaises(ParseError, config.load_json, "[1, 2]")
        self.assertRaises(ParseError, config.load_json_file, "/nonexistent/instance.json")

    def test_bad_entities(self):
        config = InstanceConfig(get_run_options())
        self.assertRaises(ParseError, config.load, {"schema": 1, "sets": {"S": "abc"}})
        self.assertRaises(
            ParseError, config.load, {"schema": 1, "sets": {"S": ["a", "a"]}}
        )
        self.assertRaises(
            UnresolvedReference,
            config.load,
            {"schema": 1, "maps": {"f": {"dom": "A", "cod": "B", "map": {}}}},
        )
        not_surjective = {
            "schema": 1,
            "sets": {"A": ["a"], "B": ["s", "t"]},
            "maps": {"f": {"dom": "A", "cod": "B", "map": {"a": "s"}}},
            "covers": {"c": {"map": "f"}},
        }
        with self.assertRaises(ParseError) as ctx:
            config.load(not_surjective)
        self.assertEqual(ctx.exception.witness, "c")

    def test_writer(self):
        g = galois_cover_from_torsor(
            parse_instance({"schema": 1, "sets": {"S": ["s", "t"]}}).lookup("sets", "S"),
            cyclic_group(3),
        )
        writer = InstanceWriter()
        writer.add_cover("c", g.cover)
        writer.add_action("act", g.action, "c")
        writer.set_args(action="act")
        instance = parse_instance(writer.to_dict())
        action = instance.get("actions", "action")
        self.assertEqual(action.cover.f, g.cover.f)
        self.assertEqual(action.act, g.action.act)
        self.assertEqual(instance.args, {"action": "act"})


if __name__ == "__main__":
    unittest.main()
