import json
import math

import factory.random
import numpy as np
import pytest

from switched_limits.signals import generate_periodic
from switched_limits.systems import SwitchedSystem

WORKED_MATRICES = (
    [[-1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]],
    [[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
)
WORKED_PATTERN = [(0, math.pi / 2), (1, math.pi / 2), (0, math.pi / 2), (2, math.pi / 2)]
HURWITZ_PAIR = (
    [[0.0, -1.0], [1.0, -1.0]],
    [[-1.0, 1.0], [-1.0, 0.0]],
)


@pytest.fixture(scope="session", autouse=True)
def reseed_factories():
    factory.random.reseed_random("switched-limits")


@pytest.fixture
def worked_system():
    return SwitchedSystem([np.array(b) for b in WORKED_MATRICES])


@pytest.fixture
def worked_signal():
    return generate_periodic(WORKED_PATTERN)


@pytest.fixture
def hurwitz_pair():
    return SwitchedSystem([np.array(b) for b in HURWITZ_PAIR])


@pytest.fixture
def write_json(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write


@pytest.fixture
def worked_system_file(write_json):
    return write_json("system.json", {"dimension": 3, "matrices": [list(b) for b in WORKED_MATRICES]})


@pytest.fixture
def worked_signal_file(write_json):
    return write_json(
        "signal.json",
        {
            "type": "periodic",
            "pattern": [{"index": index, "duration": duration} for index, duration in WORKED_PATTERN],
        },
    )


@pytest.fixture
def hurwitz_pair_file(write_json):
    return write_json("pair.json", {"dimension": 2, "matrices": [list(b) for b in HURWITZ_PAIR]})
