import argparse
import json
import logging
import sys

from .. import commands
from ..lib import __version__
from ..lib.command import command_map, run_command
from ..lib.config import get_run_options, InstanceConfig
from ..lib.errors import ParseError, UnresolvedReference
from ..lib.init_helper import init_logging, load_modules
from ..lib.report import EXIT_INPUT_ERROR, EXIT_PASS


def main():
    parser = argparse.ArgumentParser(description="Descent calculus checks")
    parser.add_argument(
        "command",
        nargs="?",
        default=None,
        help="Command to run; defaults to the instance's 'command' field.",
    )
    parser.add_argument(
        "positional", nargs="*", help="Command arguments, e.g. p n for field-split."
    )
    parser.add_argument("-i", "--instance", type=str, help="The JSON instance file.")
    parser.add_argument("--seed", type=int, default=0, help="Fuzz campaign seed.")
    parser.add_argument(
        "--trials", type=int, default=100, help="Number of fuzz trials."
    )
    parser.add_argument(
        "--properties",
        type=str,
        default=None,
        help="Comma separated fuzz properties, all by default.",
    )
    parser.add_argument("--max-base", type=int, default=4, help="Largest |S|.")
    parser.add_argument("--max-fiber", type=int, default=3, help="Largest fiber of f.")
    parser.add_argument("--max-set", type=int, default=12, help="Largest |X|.")
    parser.add_argument("--max-group", type=int, default=6, help="Largest |Γ|.")
    parser.add_argument(
        "--json", action="store_true", help="Print the report as JSON."
    )
    parser.add_argument(
        "--timings", action="store_true", help="Include timings in the JSON report."
    )
    parser.add_argument(
        "--emit-counterexample",
        type=str,
        default=None,
        help="File to write the minimized counterexample instance to.",
    )
    parser.add_argument(
        "--inject-fault",
        action="store_true",
        help="Perturb one phi entry of every generated datum.",
    )
    parser.add_argument(
        "--no-minimize",
        action="store_true",
        help="Emit counterexamples without shrinking them.",
    )
    parser.add_argument(
        "--list", action="store_true", help="List the registered commands."
    )
    parser.add_argument(
        "-l", "--log-level", default="WARNING", help="Log output verbosity."
    )
    parser.add_argument("--version", action="store_true", help="Print version.")

    args = parser.parse_args()

    logger = init_logging(getattr(logging, args.log_level.upper(), logging.WARNING))

    if args.version:
        print(f"descent_calculus version: {__version__}")
        return EXIT_PASS

    # Load the command implementations so that they get registered.
    load_modules(commands)

    if args.list:
        for name in sorted(command_map):
            print(name)
        return EXIT_PASS

    run_options = get_run_options()
    run_options["seed"] = args.seed
    run_options["trials"] = args.trials
    run_options["max_base"] = args.max_base
    run_options["max_fiber"] = args.max_fiber
    run_options["max_set"] = args.max_set
    run_options["max_group"] = args.max_group
    run_options["inject_fault"] = args.inject_fault
    run_options["minimize"] = not args.no_minimize
    run_options["json"] = args.json
    run_options["timings"] = args.timings
    run_options["emit_counterexample"] = args.emit_counterexample
    run_options["positional"] = args.positional
    if args.properties:
        run_options["properties"] = [p for p in args.properties.split(",") if p]

    try:
        config = InstanceConfig(run_options)
        if args.instance:
            config.load_json_file(args.instance)
        else:
            config.load({"schema": 1})
        name = args.command or config.instance.command
        if not name:
            parser.print_usage()
            return EXIT_INPUT_ERROR
        report = run_command(name, config.instance, run_options)
    except (ParseError, UnresolvedReference) as err:
        logger.error(f"{type(err).__name__}: {err} ({err.witness})")
        return EXIT_INPUT_ERROR

    if args.json:
        print(report.to_json(args.timings))
    else:
        print(report.summary())

    if report.counterexample is not None and args.emit_counterexample:
        with open(args.emit_counterexample, "w") as out_file:
            json.dump(report.counterexample, out_file, sort_keys=True, indent=2)
        logger.info(f"counterexample written to {args.emit_counterexample}")

    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
