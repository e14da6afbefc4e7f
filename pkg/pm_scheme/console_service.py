from typing import Optional

from rich.console import Console
from rich.theme import Theme


class RichConsoleService:
    """Service for consistent Rich Console usage throughout the application."""

    def __init__(self, console: Optional[Console] = None):
        self.theme = Theme({
            "verdict.pass": "bold green",
            "verdict.fail": "bold red",
            "verdict.note": "yellow",
        })

        if console is None:
            console = Console(theme=self.theme)
        else:
            console.push_theme(self.theme)
        self.console = console

    def print(self, *args, **kwargs):
        """Print using Rich Console."""
        self.console.print(*args, **kwargs)

    def verdict(self, passed: bool, message: str):
        label = "[verdict.pass]PASS[/]" if passed else "[verdict.fail]FAIL[/]"
        self.console.print(f"{label} {message}")

    def note(self, message: str):
        self.console.print(f"[verdict.note]NOTE[/] {message}")

    def get_console(self) -> Console:
        """Get the underlying Console instance for advanced usage."""
        return self.console
