"""Shared exception types.

QuiverFormatError covers unreadable input files (the CLI maps it to the
usage exit code); ComputationError covers well-formed input on which a
requested computation cannot proceed.
"""
from __future__ import annotations


class ArknitError(Exception):
    pass


class QuiverFormatError(ArknitError):
    pass


class ComputationError(ArknitError):
    pass
