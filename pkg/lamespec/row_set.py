from typing import Any, Callable, Iterable, Iterator, List, NoReturn, Type

from typing_extensions import Self

from .rows import BaseRow


class RowSet:
    """In-memory collection of report rows of one type."""

    class InvalidFilter(Exception):
        pass

    def __init__(self, row_class: Type[BaseRow], rows: Iterable[BaseRow] | None = None) -> None:
        """
        Initialize the RowSet with the row class and rows.

        Args:
            row_class (Type[BaseRow]): The row class.
            rows (Iterable[BaseRow] | None): The rows to initialize the RowSet with.
        """

        self._row_class = row_class
        self.rows: List[BaseRow] = list(rows) if rows else []

    @property
    def row_class(self) -> Type[BaseRow]:
        return self._row_class

    def _validate_filters(self, **filters) -> None | NoReturn:
        """
        Validate the filters.
        If a filter is not valid, raise an InvalidFilter exception.

        Raises:
            (InvalidFilter): If a filter is not valid.
        """
        for filter_name in filters.keys():
            if filter_name not in self._row_class.model_fields.keys():
                raise self.InvalidFilter(f'Invalid filter {filter_name}!')

    def _select(self, predicate: Callable[[BaseRow], bool]) -> Self:
        return self.__class__(row_class=self._row_class, rows=[row for row in self.rows if predicate(row)])

    def filter(self, **filters) -> Self:
        """
        Keep the rows whose fields equal the filters.

        Returns:
            (Self): The RowSet with the matching rows.

        Examples:
            >>> rs.filter(nu=0.4, mode=1)
        """

        self._validate_filters(**filters)
        return self._select(lambda row: all(getattr(row, key) == value for key, value in filters.items()))

    def exclude(self, **filters) -> Self:
        """
        Drop the rows whose fields equal the filters.

        Returns:
            (Self): The RowSet without the matching rows.

        Examples:
            >>> rs.exclude(beats_disk=False)
        """

        self._validate_filters(**filters)
        return self._select(lambda row: not all(getattr(row, key) == value for key, value in filters.items()))

    def get(self, **filters) -> BaseRow | NoReturn:
        """
        Get the single row matching the filters.

        Returns:
            (BaseRow): The row.

        Raises:
            (DoesNotExist): If no row matches.
            (MultipleObjectsReturned): If more than one row matches.

        Examples:
            >>> rs.get(quantity='nu_star')
        """

        result = self.filter(**filters)

        if not result:
            raise self._row_class.DoesNotExist(f'{self._row_class.__name__} row with {filters} does not exist!')

        if result.count() > 1:
            raise self._row_class.MultipleObjectsReturned(
                f'For {filters} returned more than 1 {self._row_class.__name__} rows!'
            )

        return result.first()  # pyright: ignore

    def count(self) -> int:
        return len(self.rows)

    def first(self) -> BaseRow | None:
        """
        Get the first row, or None if the RowSet is empty.

        Returns:
            (BaseRow | None): The first row.
        """

        if self.count():
            return self[0]

    def last(self) -> BaseRow | None:
        if self.count():
            return self[-1]

    def min_by(self, field: str) -> BaseRow | None:
        """
        Row with the smallest value of a field; the first one wins ties.

        Args:
            field (str): Field name.

        Returns:
            (BaseRow | None): The row, or None if the RowSet is empty.
        """

        self._validate_filters(**{field: None})
        if self.count():
            return min(self.rows, key=lambda row: getattr(row, field))

    def values(self, field: str) -> List[Any]:
        self._validate_filters(**{field: None})
        return [getattr(row, field) for row in self.rows]

    def __iter__(self) -> Iterator[BaseRow]:
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: int) -> BaseRow:
        return self.rows[index]

    def __repr__(self) -> str:
        return f'<{self.__class__.__name__} {self._row_class.__name__} x {len(self)}>'

    def __eq__(self, obj: object) -> bool:
        return all(
            (
                self._row_class == getattr(obj, '_row_class', None),
                self.rows == getattr(obj, 'rows', None),
            )
        )
