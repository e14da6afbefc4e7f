from pytest import fixture
from rich.console import Console

from pm_scheme.progress_tracker import LABEL_WIDTH, ProgressTracker


@fixture
def progress(mocker):
    progress_class = mocker.patch("pm_scheme.progress_tracker.Progress")
    return progress_class.return_value


@fixture
def tracker():
    return ProgressTracker(console=Console(record=True))


class DescribeProgressTracker:

    def should_ignore_updates_before_start(self, tracker, progress):
        tracker.update_progress(completed=1, total=2, current="[2,1]")

        progress.update.assert_not_called()

    def should_add_one_task_when_started(self, tracker, progress):
        tracker.start_progress("Counting", total=5)

        progress.start.assert_called_once()
        progress.add_task.assert_called_once_with("Counting", total=5, current="")

    def should_forward_callback_updates_to_the_progress_bar(self, tracker, progress):
        task = tracker.start_progress("Counting")

        tracker.create_callback()("[2,1,1]", 3, 5)

        progress.update.assert_called_once_with(task, completed=3, current="[2,1,1]", total=5)

    def should_truncate_long_labels(self, tracker, progress):
        tracker.start_progress("Counting")

        tracker.update_progress(completed=1, current="x" * 40)

        label = progress.update.call_args.kwargs["current"]
        assert len(label) == LABEL_WIDTH
        assert label.endswith("...")

    def should_stop_when_leaving_the_context(self, progress):
        with ProgressTracker(console=Console(record=True)) as tracker:
            tracker.start_progress("Counting", total=2)

        progress.stop.assert_called_once()
        assert tracker._progress is None
