import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dqi_bench import (
    BpspInstance,
    build_graph,
    build_path_list,
    encode_icc,
    reduce_instance,
)

# the five-car worked example used throughout the test suite
EX1_SEQUENCE = (1, 2, 1, 3, 4, 5, 2, 5, 3, 4)


@pytest.fixture(scope="session")
def ex1():
    return BpspInstance(n_cars=5, sequence=EX1_SEQUENCE)


@pytest.fixture(scope="session")
def ex1_icc(ex1):
    return encode_icc(ex1)


@pytest.fixture(scope="session")
def ex1_reduced(ex1, ex1_icc):
    reduced, record = reduce_instance(ex1_icc, ex1)
    return reduced, record


@pytest.fixture(scope="session")
def ex1_graph(ex1_reduced):
    return build_graph(ex1_reduced[0])


@pytest.fixture(scope="session")
def ex1_paths(ex1_graph):
    return build_path_list(ex1_graph)
