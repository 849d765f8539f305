import csv
import logging
import sys
from pathlib import Path
from typing import Iterable

from ..rows import BaseRow
from .base import BaseWriter


logger = logging.getLogger(__name__)


class CsvWriter(BaseWriter):
    """Writer of CSV files, or of standard output when no path is given."""

    def write(self, rows: Iterable[BaseRow]) -> int:
        """
        Write rows; the header is written before the first batch only.

        Args:
            rows (Iterable[BaseRow]): The rows.

        Returns:
            (int): The number of rows written.
        """

        rows = list(rows)
        first_write = self._check_rows(rows)
        if not rows:
            return 0

        if self.destination is None:
            self._emit(sys.stdout, rows, first_write)
        else:
            mode = 'w' if first_write else 'a'
            with Path(self.destination).open(mode, newline='') as stream:
                self._emit(stream, rows, first_write)
        logger.debug('Wrote %d %s rows to %s', len(rows), type(rows[0]).__name__, self.destination or 'stdout')
        return len(rows)

    @staticmethod
    def _emit(stream, rows, header: bool) -> None:
        writer = csv.writer(stream, lineterminator='\n')
        if header:
            writer.writerow(type(rows[0]).header())
        writer.writerows(row.render() for row in rows)
