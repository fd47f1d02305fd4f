"""Traces, result rows, the acceptance suite and the command line."""
