"""Trace analytics workbench: storage backends, a SQL-subset query engine,
scripted analysis commands, distribution fitting, and a datacenter simulator."""

__version__ = "0.1.0"
