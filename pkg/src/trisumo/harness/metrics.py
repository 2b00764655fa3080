"""Per-episode training metrics: trailing-window statistics and their CSV form.

The CSV header is fixed; absent values (no wins in the window, non-eval
episodes) are blank cells. Floats are written with repr so files round-trip
bit-exactly and two identical runs produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Sequence

from ..arena import Outcome
from ..errors import MetricsError

HEADER = "episode,win_rate_window,mean_steps_to_win_window,mean_return_window,eval_win_rate"


@dataclass(frozen=True)
class EpisodeResult:
    outcome: Outcome
    steps: int
    ret: float  # sum of the learner's rewards over the episode


@dataclass(frozen=True)
class MetricsRow:
    episode: int
    win_rate_window: float
    mean_steps_to_win_window: float | None  # None when the window has no wins
    mean_return_window: float
    eval_win_rate: float | None  # None except on evaluation episodes


def window_row(
    results: Sequence[EpisodeResult],
    episode: int,
    window: int,
    eval_win_rate: float | None = None,
) -> MetricsRow:
    """Statistics over the trailing `window` episodes of `results`."""
    recent = results[-window:]
    wins = [r for r in recent if r.outcome is Outcome.TEAM_WIN]
    return MetricsRow(
        episode=episode,
        win_rate_window=len(wins) / len(recent),
        mean_steps_to_win_window=(
            sum(r.steps for r in wins) / len(wins) if wins else None
        ),
        # float() so numpy scalars from reward sums cannot leak into rows
        mean_return_window=float(sum(r.ret for r in recent) / len(recent)),
        eval_win_rate=eval_win_rate,
    )


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


class MetricsWriter:
    """Appends rows to an open CSV stream; writes the header on construction."""

    def __init__(self, stream: IO[str]):
        self._stream = stream
        self._stream.write(HEADER + "\n")

    def write_row(self, row: MetricsRow) -> None:
        cells = (
            str(row.episode),
            _cell(row.win_rate_window),
            _cell(row.mean_steps_to_win_window),
            _cell(row.mean_return_window),
            _cell(row.eval_win_rate),
        )
        self._stream.write(",".join(cells) + "\n")
        self._stream.flush()


def read_metrics(path: str) -> list[MetricsRow]:
    """Parse a metrics CSV; any malformed line reports its line number."""
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != HEADER:
        raise MetricsError(f"{path} line 1: expected header {HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise MetricsError(f"{path} line {lineno}: expected 5 cells, got {len(parts)}")
        try:
            rows.append(
                MetricsRow(
                    episode=int(parts[0]),
                    win_rate_window=float(parts[1]),
                    mean_steps_to_win_window=float(parts[2]) if parts[2] else None,
                    mean_return_window=float(parts[3]),
                    eval_win_rate=float(parts[4]) if parts[4] else None,
                )
            )
        except ValueError as e:
            raise MetricsError(f"{path} line {lineno}: {e}") from e
    return rows
