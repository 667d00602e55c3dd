import networkx as nx
import numpy as np
import pytest
from hypothesis import settings

from avoider_enforcer.analysis import PlayerGraph

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def graph_of(g: nx.Graph) -> PlayerGraph:
    mapping = {v: i for i, v in enumerate(sorted(g.nodes, key=str))}
    return PlayerGraph(len(mapping), [(mapping[u], mapping[v]) for u, v in g.edges])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
