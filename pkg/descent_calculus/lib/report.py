import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .errors import DescentError

PASS = "pass"
FAIL = "fail"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2


def jsonable(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if value is None or isinstance(value, (str, int, float, bool)):
        return value
    return str(value)


@dataclass
class Report:
    """
    Outcome of one command. A fail verdict always carries a witness.
    """

    command: str
    verdict: str = PASS
    witnesses: List[Any] = field(default_factory=list)
    seed: Optional[int] = None
    details: Dict[str, Any] = field(default_factory=dict)
    counts: Dict[str, Dict[str, int]] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    counterexample: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def fail(self, witness: Any, message: Optional[str] = None):
        self.verdict = FAIL
        self.witnesses.append(jsonable(witness))
        if message:
            self.details.setdefault("messages", []).append(message)

    def fail_from(self, err: DescentError):
        witness = err.witness if err.witness is not None else type(err).__name__
        self.fail(witness, f"{type(err).__name__}: {err}")

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        result = {
            "command": self.command,
            "verdict": self.verdict,
            "witnesses": jsonable(self.witnesses),
            "seed": self.seed,
            "details": jsonable(self.details),
        }
        if self.counts:
            result["counts"] = jsonable(self.counts)
        if include_timings:
            result["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return result

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), sort_keys=True, indent=2)

    def summary(self) -> str:
        lines = [f"{self.command}: {self.verdict}"]
        for witness in self.witnesses:
            lines.append(f"  witness: {witness}")
        for name, counts in sorted(self.counts.items()):
            lines.append(
                f"  {name}: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
            )
        return "\n".join(lines)


@contextmanager
def timed(report: Report, name: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        report.timings[name] = report.timings.get(name, 0.0) + (
            time.perf_counter() - start
        )
