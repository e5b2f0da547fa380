"""XNLI-15way embedding extraction into EMBGEOM1 dumps."""

from .corpus import XNLI15_CODES, load_corpus
from .dump_writer import write_dump
from .extract import ExtractionConfig, extract

__version__ = "0.1.0"

__all__ = ["ExtractionConfig", "XNLI15_CODES", "extract", "load_corpus", "write_dump"]
