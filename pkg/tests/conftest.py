import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from ctxdom.order import poset


@st.composite
def posets(draw, max_size=10):
    """Random finite posets: a random DAG over a shuffled labelling."""
    n = draw(st.integers(min_value=1, max_value=max_size))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    names = draw(st.permutations([f"e{i}" for i in range(n)]))
    covers = [(names[i], names[j]) for (i, j), k in zip(pairs, keep) if k]
    return poset(names, covers)


def random_poset(gen: np.random.Generator, max_size=10):
    n = int(gen.integers(1, max_size + 1))
    density = gen.uniform(0.0, 0.6)
    names = [f"e{i}" for i in gen.permutation(n)]
    covers = [
        (names[i], names[j])
        for i, j in itertools.combinations(range(n), 2)
        if gen.random() < density
    ]
    return poset(names, covers)


@pytest.fixture
def chain3():
    return poset(["bot", "a", "top"], [("bot", "a"), ("a", "top")])


@pytest.fixture
def diamond():
    return poset(["bot", "p", "q", "top"], [("bot", "p"), ("bot", "q"), ("p", "top"), ("q", "top")])


@pytest.fixture
def antichain():
    return poset(["p", "q"])
