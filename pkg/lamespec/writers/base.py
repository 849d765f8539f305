from abc import ABC, abstractmethod
from typing import Iterable, List, Type

from ..errors import LameSpecError
from ..rows import BaseRow


class BaseWriter(ABC):
    """
    Base writer for report rows. A writer owns its destination for its lifetime: the first batch
    truncates it and carries the header, later batches append rows only.
    """

    class MixedRows(LameSpecError):
        pass

    def __init__(self, destination: str | None = None) -> None:
        """Initialize the writer with the destination (None means standard output)."""
        self.destination = destination
        self._row_class: Type[BaseRow] | None = None

    def _check_rows(self, rows: List[BaseRow]) -> bool:
        """
        Check that every row has the type of the first row ever written.

        Args:
            rows (List[BaseRow]): Rows about to be written.

        Returns:
            (bool): True when the header still has to be written.
        """

        if not rows:
            return False
        first_write = self._row_class is None
        if first_write:
            self._row_class = type(rows[0])
        for row in rows:
            if type(row) is not self._row_class:
                raise self.MixedRows(
                    f'Cannot write {type(row).__name__} to a destination holding {self._row_class.__name__} rows!'
                )
        return first_write

    @abstractmethod
    def write(self, rows: Iterable[BaseRow]) -> int:
        """
        Write rows to the destination.

        Args:
            rows (Iterable[BaseRow]): The rows.

        Returns:
            (int): The number of rows written.
        """
        raise NotImplementedError
