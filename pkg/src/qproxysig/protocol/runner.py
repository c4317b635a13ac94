"""Scheme dispatch."""
from __future__ import annotations

from .config import SchemeConfig
from .scheme1 import Scheme1Run
from .scheme2 import Scheme2Run
from .transcript import Transcript

_RUNS = {1: Scheme1Run, 2: Scheme2Run}


def run(config: SchemeConfig) -> Transcript:
    return _RUNS[config.scheme](config).run()
