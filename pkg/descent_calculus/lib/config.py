import copy
import json
import os
from typing import Any, Dict, Optional

from .errors import ParseError
from .init_helper import get_logger
from .instance import Instance, parse_instance

logger = get_logger()

# Upper bounds accepted for generated instances.
SIZE_LIMITS = {"max_base": 4, "max_fiber": 3, "max_set": 12, "max_group": 6}


def get_run_options() -> Dict[str, Any]:
    options = {
        "seed": 0,
        "trials": 100,
        "properties": None,
        "inject_fault": False,
        "minimize": True,
        "json": False,
        "timings": False,
        "emit_counterexample": None,
        "config_dir": None,
        "positional": [],
    }
    options.update(SIZE_LIMITS)
    return options


def validate_run_options(run_options: Dict[str, Any]):
    for key, limit in SIZE_LIMITS.items():
        value = run_options.get(key)
        if not isinstance(value, int) or value < 1 or value > limit:
            raise ParseError(f"{key} must be between 1 and {limit}", value)
    if not isinstance(run_options.get("trials"), int) or run_options["trials"] < 0:
        raise ParseError("trials must be a non-negative integer", run_options.get("trials"))
    seed = run_options.get("seed")
    if not isinstance(seed, int) or seed < 0 or seed >= 2**64:
        raise ParseError("seed must be an unsigned 64-bit integer", seed)


class InstanceConfig:
    """
    InstanceConfig stores a loaded instance file (or batch file).
    """

    def __init__(self, run_options: Dict[str, Any]):
        self.run_options = run_options
        self.raw: Optional[Dict[str, Any]] = None
        self.instance: Optional[Instance] = None

    def _process_instance(self):
        self.instance = parse_instance(self.raw)

    def load_json_file(self, config_file_name: str):
        try:
            with open(config_file_name) as config_file:
                self.raw = json.load(config_file)
        except OSError as err:
            raise ParseError(f"cannot read instance file: {err}", config_file_name)
        except json.JSONDecodeError as err:
            raise ParseError(f"malformed JSON: {err}", config_file_name)
        self.run_options["config_dir"] = os.path.dirname(
            os.path.realpath(config_file_name)
        )
        logger.debug(f"loaded instance file: {config_file_name}")
        self._process_instance()

    def load_json(self, config_json: str):
        try:
            self.raw = json.loads(config_json)
        except json.JSONDecodeError as err:
            raise ParseError(f"malformed JSON: {err}")
        self._process_instance()

    def load(self, config: Dict[str, Any]):
        self.raw = copy.deepcopy(config)
        self._process_instance()
