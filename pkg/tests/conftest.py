import numpy as np
import pytest

from stockblend.instances import generate_instance
from stockblend.model import Bounds, Instance, StockpileState
from stockblend.process import ProcessParams


def single_stockpile_instance(cu=0.02, target=320.0, months=1, available=720.0, params=None):
    """One parcel per month drawing from one stockpile with ample tonnage."""
    grades = np.zeros((1, 7))
    grades[0, 0] = cu
    return Instance(
        available_duration=np.full(months, available),
        haul_tonnage=np.zeros((months, 1)),
        haul_grades=np.zeros((months, 1, 7)),
        initial_state=StockpileState(np.array([1e6]), grades),
        target_concentrate=tuple(np.array([target]) for _ in range(months)),
        access=tuple(((0,),) for _ in range(months)),
        bounds=Bounds(0.0, 1.0, 1.0, 1.0),
        process=params or ProcessParams(),
        name="single",
    )


@pytest.fixture
def single_instance():
    return single_stockpile_instance()


@pytest.fixture(scope="session")
def table_instance():
    """One month, two parcels drawing from 6 and 7 stockpiles."""
    return generate_instance(1, 2, (6, 7), seed=1)


@pytest.fixture(scope="session")
def two_month_instance():
    return generate_instance(2, 2, (3, 4), seed=5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
