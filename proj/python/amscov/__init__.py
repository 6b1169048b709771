# Copyright 2026 The amscov Authors
# SPDX-License-Identifier: Apache-2.0

"""Analog coverage artifacts, coverage database and guided stimulus search."""

from ._core import *  # noqa: F401,F403
from ._core import Error

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
