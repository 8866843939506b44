import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tagwalk.substrate import SubstrateGraph, from_edge_pairs


def graph_from_pairs(n, pairs) -> SubstrateGraph:
    if not pairs:
        return from_edge_pairs(n, np.empty(0, dtype=np.int64),
                               np.empty(0, dtype=np.int64))
    src, dst = zip(*pairs)
    return from_edge_pairs(n, np.asarray(src), np.asarray(dst))


@pytest.fixture
def k2():
    return graph_from_pairs(2, [(0, 1)])


@pytest.fixture
def triangle():
    return graph_from_pairs(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path4():
    # 0 - 1 - 2 - 3
    return graph_from_pairs(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def star5():
    # hub 0 with four leaves
    return graph_from_pairs(5, [(0, i) for i in range(1, 5)])
