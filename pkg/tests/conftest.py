"""Shared pytest fixtures for the QuadTorsion suites"""

import sys
from pathlib import Path

import pytest

# Add project root to path for testing
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.core.config import reload_settings
from src.curves.search import SearchBox
from src.modular.ledger import get_ledger


@pytest.fixture
def ledger():
    """The shipped facts ledger"""
    return get_ledger()


@pytest.fixture
def small_box():
    """A search box small enough for scans over many fields"""
    return SearchBox(max_u=10, max_v=10, max_w=8, sieve_primes=6)


@pytest.fixture
def fresh_settings():
    """Settings rebuilt before and after the test"""
    settings = reload_settings()
    yield settings
    reload_settings()
