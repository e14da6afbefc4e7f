from unittest.mock import Mock

from rich.console import Console
from rich.theme import Theme

from pm_scheme.console_service import RichConsoleService


class DescribeRichConsoleService:
    """Tests for the RichConsoleService component."""

    def should_be_instantiated_with_theme_and_console(self):
        service = RichConsoleService()

        assert isinstance(service.theme, Theme)
        assert isinstance(service.console, Console)

    def should_include_verdict_theme_colors(self):
        service = RichConsoleService()

        theme_styles = service.theme.styles
        assert "verdict.pass" in theme_styles
        assert "verdict.fail" in theme_styles
        assert "verdict.note" in theme_styles

    def should_provide_print_method(self):
        service = RichConsoleService()
        service.console = Mock()

        service.print("test message", style="bold")

        service.console.print.assert_called_once_with("test message", style="bold")

    def should_print_a_pass_verdict(self):
        service = RichConsoleService(Console(record=True, width=80))

        service.verdict(True, "conjecture at n=5")

        assert service.get_console().export_text().strip() == "PASS conjecture at n=5"

    def should_print_a_fail_verdict(self):
        service = RichConsoleService(Console(record=True, width=80))

        service.verdict(False, "dimension bound at n=4")

        assert service.get_console().export_text().strip() == "FAIL dimension bound at n=4"

    def should_prefix_notes(self):
        service = RichConsoleService(Console(record=True, width=80))

        service.note("valency ratios confirmed")

        assert service.get_console().export_text().strip() == "NOTE valency ratios confirmed"

    def should_provide_access_to_console_instance(self):
        console = Console()
        service = RichConsoleService(console)

        assert service.get_console() is console
