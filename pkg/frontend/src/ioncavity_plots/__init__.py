"""Figure rendering for the ion-cavity scan CSV outputs."""

from .figures import FIGURES, FigureSkipped, render
from .loader import SchemaError, Table, load_csv, load_husimi

__all__ = [
    "FIGURES",
    "FigureSkipped",
    "render",
    "SchemaError",
    "Table",
    "load_csv",
    "load_husimi",
]
