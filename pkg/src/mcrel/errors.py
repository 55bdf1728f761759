"""Exceptions shared by all modules; each maps to a CLI exit code."""
from __future__ import annotations


class McrelError(Exception):
    exit_code = 1


class DegenerateInstance(McrelError):
    """A random draw landed outside the generic case (resample it)."""

    exit_code = 3


class RetryCapExceeded(McrelError):
    exit_code = 4


class BudgetExceeded(McrelError):
    exit_code = 5
