import csv
import json
import logging
from enum import Enum
from pathlib import Path
from types import TracebackType
from typing import Any, Iterable, Sequence

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def failure_status(exc: BaseException) -> str:
    """`failed at L=<L>: <message>` for series failures, `failed: <message>` otherwise."""
    if getattr(exc, "size", None) is not None:
        # FidelitySeriesError messages already start with "L=<size>: "
        return f"failed at {exc}"
    return f"failed: {exc}"


class CsvSink:
    """CSV file with `# config-digest` / `# command` header lines, flushed row by row.

    Used as a context manager; an exception leaving the block appends a
    `# status: failed ...` line after the rows already written.
    """

    def __init__(self, path: Path, command: str, digest: str, columns: Sequence[str]) -> None:
        self.path = Path(path)
        self.command = command
        self.digest = digest
        self.columns = list(columns)
        self.rows_written = 0
        self._handle = None
        self._writer = None

    def __enter__(self) -> "CsvSink":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "w", newline="")
        self._handle.write(f"# config-digest: {self.digest}\n")
        self._handle.write(f"# command: {self.command}\n")
        self._writer = csv.writer(self._handle, lineterminator="\n")
        self._writer.writerow(self.columns)
        return self

    def write(self, row: Sequence[Any]) -> None:
        if self._writer is None or self._handle is None:
            raise RuntimeError("CsvSink used outside its context")
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(self.columns)}")
        self._writer.writerow([format_value(value) for value in row])
        self._handle.flush()
        self.rows_written += 1

    def write_all(self, rows: Iterable[Sequence[Any]]) -> None:
        for row in rows:
            self.write(row)

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        traceback: TracebackType | None,
    ) -> None:
        if self._handle is None:
            return
        if exc is not None:
            self._handle.write(f"# status: {failure_status(exc)}\n")
        self._handle.close()
        logger.info("Wrote %s (%d rows)", self.path, self.rows_written)


def write_csv(
    path: Path,
    command: str,
    digest: str,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    with CsvSink(path, command, digest, columns) as sink:
        sink.write_all(rows)
    return Path(path)


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info("Wrote %s", path)
    return path


def read_csv_rows(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    """Comment lines and data rows of a file written by CsvSink."""
    comments: list[str] = []
    data_lines: list[str] = []
    for line in Path(path).read_text().splitlines():
        (comments if line.startswith("#") else data_lines).append(line)
    return comments, list(csv.DictReader(data_lines))
