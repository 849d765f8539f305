from typing import Iterable, List

from ..rows import BaseRow
from .base import BaseWriter


class MemoryWriter(BaseWriter):
    """Writer keeping rendered lines in memory."""

    def __init__(self, destination: str | None = None) -> None:
        super().__init__(destination=destination)

        # Rendered lines, header first
        self.lines: List[List[str]] = []
        self.rows: List[BaseRow] = []

    def write(self, rows: Iterable[BaseRow]) -> int:
        rows = list(rows)
        if self._check_rows(rows):
            self.lines.append(type(rows[0]).header())
        self.lines.extend(row.render() for row in rows)
        self.rows.extend(rows)
        return len(rows)
