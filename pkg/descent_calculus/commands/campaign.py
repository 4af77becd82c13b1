import copy
import os
from typing import Dict

from ..lib.command import CommandInterface, register_commands, run_command
from ..lib.config import InstanceConfig
from ..lib.errors import ParseError, PropertyViolation
from ..lib.fuzz import check_property, fuzz_campaign
from ..lib.init_helper import get_logger
from ..lib.report import jsonable

logger = get_logger()


class Fuzz(CommandInterface):
    def run(self, report, instance, options):
        campaign = fuzz_campaign(options)
        report.verdict = campaign.verdict
        report.witnesses = campaign.witnesses
        report.details = campaign.details
        report.counts = campaign.counts
        report.timings.update(campaign.timings)
        report.counterexample = campaign.counterexample


class CheckProperty(CommandInterface):
    """
    Re-checks one fuzz property on a stored instance, typically an emitted
    counterexample.
    """

    def run(self, report, instance, options):
        positional = options.get("positional") or []
        name = positional[0] if positional else instance.args.get("property")
        if not name:
            raise ParseError("check-property needs a property name")
        report.details["property"] = name
        witness = check_property(name, instance)
        if witness is not None:
            report.fail_from(PropertyViolation(f"property {name} violated", witness))


def _resolve(path: str, config_dir: str) -> str:
    if os.path.isabs(path) or not config_dir:
        return path
    return os.path.join(config_dir, path)


class Batch(CommandInterface):
    """
    Runs the commands listed under "batch":

        {"schema": 1, "batch": [{"instance": "swap.json", "command": "descend"},
                                {"command": "field-split", "args": ["2", "3"]}]}

    Instance paths are relative to the batch file.
    """

    def run(self, report, instance, options):
        if not isinstance(instance.batch, list):
            raise ParseError("batch instance needs a 'batch' list")
        config_dir = options.get("config_dir")
        runs = []
        for index, entry in enumerate(instance.batch):
            if not isinstance(entry, dict):
                raise ParseError("batch entry must be an object", index)
            sub_options = copy.deepcopy(options)
            sub_options["positional"] = [str(a) for a in entry.get("args", [])]
            config = InstanceConfig(sub_options)
            if "instance" in entry:
                config.load_json_file(_resolve(entry["instance"], config_dir))
            else:
                config.load({"schema": 1})
            name = entry.get("command") or config.instance.command
            if not name or name == "batch":
                raise ParseError("batch entry needs a command", index)
            logger.info(f"batch entry {index}: {name}")
            sub_report = run_command(name, config.instance, sub_options)
            runs.append(sub_report.to_dict())
            if not sub_report.passed:
                report.fail(
                    {"index": index, "command": name, "witnesses": sub_report.witnesses}
                )
        report.details["runs"] = jsonable(runs)


campaign_commands: Dict[str, CommandInterface] = {
    "fuzz": Fuzz(),
    "check-property": CheckProperty(),
    "batch": Batch(),
}
register_commands(campaign_commands)
