from .base import BaseWriter
from .csv_writer import CsvWriter
from .memory import MemoryWriter
