"""Command-line entry point and VTK output."""

from .vtk import OutputSeries, problem_fields, read_index, write_vtk

__all__ = ["OutputSeries", "problem_fields", "read_index", "write_vtk"]
