"""Progress tracking for long oracle phases using Rich library."""
from typing import Optional

import structlog
from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskID,
    TextColumn,
    TimeElapsedColumn,
)

from pm_scheme.matchings import ProgressCallback

logger = structlog.get_logger()

LABEL_WIDTH = 24


class ProgressTracker:
    """
    Progress bar for intersection counting and breadth-first searches.

    Shows the relation or level being processed next to a completed/total count.
    """

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()
        self._progress: Optional[Progress] = None
        self._main_task: Optional[TaskID] = None

    def start_progress(self, description: str = "Processing", total: Optional[int] = None) -> TaskID:
        if self._progress is not None:
            logger.warning("Progress already started, stopping previous session")
            self.stop_progress()

        self._progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            TextColumn(f"{{task.fields[current]:<{LABEL_WIDTH}}}", style="cyan"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=self.console,
            transient=False,
        )
        self._progress.start()
        self._main_task = self._progress.add_task(description, total=total, current="")
        logger.debug("Started progress tracking", description=description, total=total)
        return self._main_task

    def update_progress(self, completed: int, total: Optional[int] = None, current: str = "") -> None:
        if self._progress is None or self._main_task is None:
            logger.warning("Progress not started, cannot update")
            return
        label = current if len(current) <= LABEL_WIDTH else current[:LABEL_WIDTH - 3] + "..."
        update_kwargs = {"completed": completed, "current": label}
        if total is not None:
            update_kwargs["total"] = total
        self._progress.update(self._main_task, **update_kwargs)

    def stop_progress(self) -> None:
        if self._progress is not None:
            self._progress.stop()
            self._progress = None
            self._main_task = None
            logger.debug("Stopped progress tracking")

    def create_callback(self) -> ProgressCallback:
        """Create a callback for intersection_numbers, build_table_oracle and diameter."""
        def callback(current: str, done: int, total: int) -> None:
            self.update_progress(completed=done, total=total, current=current)

        return callback

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop_progress()
