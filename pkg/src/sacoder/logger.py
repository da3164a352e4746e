"""
Pipeline event logging for sacoder.

Every coding step is recorded so a run can be inspected (--debug) or
saved for later comparison (--save-history).
"""

import json
import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

from rich.console import Console

console = Console(stderr=True)

HISTORY_FILENAME = ".sac_history.json"


@dataclass
class CodecEvent:
    """Record of one pipeline step."""

    operation: str
    description: str | None = None
    timestamp: datetime = field(default_factory=datetime.now)
    elapsed: float | None = None
    details: dict[str, Any] = field(default_factory=dict)


class CodecEventLogger:
    """
    Records pipeline steps (parse, tokenize, encode, decode, ...).

    In debug mode each step is echoed as it is logged.
    """

    def __init__(self, debug: bool = False):
        self.debug = debug
        self.events: list[CodecEvent] = []

    def log(self, operation: str, description: str | None = None, **details: Any) -> CodecEvent:
        """
        Log a pipeline step.

        Args:
            operation: Short step name, e.g. "encode"
            description: Optional human-readable description
            **details: JSON-serializable facts about the step
        """
        event = CodecEvent(operation=operation, description=description, details=details)
        self.events.append(event)

        if self.debug:
            console.print(f"[cyan][SAC][/cyan] {operation}")
            if description:
                console.print(f"      [dim]{description}[/dim]")
        return event

    @contextmanager
    def track(self, operation: str, description: str | None = None, **details: Any) -> Iterator[CodecEvent]:
        """Log a step and time it; callers may add to ``event.details`` inside the block."""
        event = self.log(operation, description, **details)
        start = time.perf_counter()
        try:
            yield event
        finally:
            event.elapsed = time.perf_counter() - start
            if self.debug:
                console.print(f"      [dim]{event.elapsed:.3f}s[/dim]")

    def save_history(self, filepath: str = HISTORY_FILENAME) -> None:
        """Save the event list as JSON."""
        history = []
        for event in self.events:
            history.append(
                {
                    "operation": event.operation,
                    "description": event.description,
                    "timestamp": event.timestamp.isoformat(),
                    "elapsed": event.elapsed,
                    "details": event.details,
                }
            )

        with open(filepath, "w") as f:
            json.dump(history, f, indent=2, default=str)

        if self.debug:
            console.print(f"[green]Event history saved to {filepath}[/green]")
