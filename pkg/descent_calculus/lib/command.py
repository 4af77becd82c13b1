import abc
from typing import Any, Dict

from .errors import DescentError, ParseError, UnresolvedReference
from .init_helper import get_logger
from .instance import Instance
from .report import Report, timed

logger = get_logger()


class CommandInterface(metaclass=abc.ABCMeta):
    """
    A command runs against a parsed instance and the run options, and fills
    in a Report. Errors raised from the library while a command runs are
    turned into a fail verdict by run_command; input errors propagate.
    """

    @classmethod
    def __subclasshook__(cls, subclass):
        return hasattr(subclass, "run") and callable(subclass.run) or NotImplemented

    @abc.abstractmethod
    def run(self, report: Report, instance: Instance, options: Dict[str, Any]):
        raise NotImplementedError


def register_command(name: str, command: CommandInterface):
    global command_map
    logger.debug(f"register command: {name}")
    if name not in command_map:
        command_map[name] = command
    else:
        raise ValueError(f"Duplicate command registration name: {name}")


def register_commands(command_dict: Dict[str, CommandInterface]):
    for name, command in command_dict.items():
        register_command(name, command)


# Global command registry, a mapping of name to command object
command_map: Dict[str, CommandInterface] = {}


def run_command(name: str, instance: Instance, options: Dict[str, Any]) -> Report:
    if name not in command_map:
        raise UnresolvedReference("unknown command", name)
    report = Report(name, seed=options.get("seed"))
    with timed(report, name):
        try:
            command_map[name].run(report, instance, options)
        except (ParseError, UnresolvedReference):
            raise
        except DescentError as err:
            logger.debug(f"{name} raised {type(err).__name__}: {err}")
            report.fail_from(err)
    logger.info(f"{name}: {report.verdict}")
    return report
