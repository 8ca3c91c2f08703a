"""Shared fixtures: chains, certified states, and the reference provider."""

import pytest

from gl3aba.ratcore import Coupling, ParameterSet
from gl3aba.chain_oracle import build_chain, enumerate_regular_solutions, identify_onshell
from gl3aba.highest_coefficient import ReferenceProvider

C1 = Coupling(1.0)


@pytest.fixture(scope="session")
def chain3():
    xi = ParameterSet.of(0.21, -0.40, 0.93, label="xi")
    return build_chain(3, xi, C1, split=1)


@pytest.fixture(scope="session")
def chain4():
    xi = ParameterSet.of(0.21, -0.40, 0.93, -1.1, label="xi")
    return build_chain(4, xi, C1, split=2)


@pytest.fixture(scope="session")
def provider():
    return ReferenceProvider(capacity=(2, 2))


@pytest.fixture(scope="session")
def states3(chain3):
    out = {}
    for sector in [(0, 0), (1, 0), (2, 1)]:
        sols = enumerate_regular_solutions(chain3, *sector)
        out[sector] = [identify_onshell(chain3, s) for s in sols]
    return out


@pytest.fixture(scope="session")
def states4(chain4):
    out = {}
    for sector in [(0, 0), (1, 0), (2, 0), (2, 1)]:
        sols = enumerate_regular_solutions(chain4, *sector)
        out[sector] = [identify_onshell(chain4, s) for s in sols]
    return out
