from __future__ import annotations

import functools
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

from asm_galois.curve import ASMCurve
from asm_galois.projection import GaloisAnalyzer


@functools.lru_cache(maxsize=None)
def curve_for(q: int, c: int = 1) -> ASMCurve:
    return ASMCurve(q, c)


@functools.lru_cache(maxsize=None)
def analyzer_for(q: int, c: int = 1) -> GaloisAnalyzer:
    return GaloisAnalyzer(curve_for(q, c))


@pytest.fixture
def C3():
    return curve_for(3)


@pytest.fixture
def A3():
    return analyzer_for(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
