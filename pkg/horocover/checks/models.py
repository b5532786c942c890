"""Result type shared by all acceptance checks."""

from dataclasses import dataclass, field
from typing import Literal


@dataclass(frozen=True)
class Verdict:
    """Outcome of one acceptance check."""

    name: str
    passed: bool
    message: str
    severity: Literal["info", "warning", "failure"] = "info"
    metadata: dict = field(default_factory=dict)

    def manifest_entries(self) -> dict[str, object]:
        """Flat manifest lines: check_<name> plus one line per metadata value."""
        entries: dict[str, object] = {f"check_{self.name}": "pass" if self.passed else "FAIL"}
        entries.update({f"check_{self.name}_{key}": value for key, value in self.metadata.items()})
        return entries


def verdict(name: str, passed: bool, message: str, **metadata) -> Verdict:
    return Verdict(name, bool(passed), message, "info" if passed else "failure", metadata)
