import random

import pytest
from hypothesis import strategies as st

from treeconsensus import extend_grammar, fig8_grammar, parse_doc
from treeconsensus.oracle import random_tree


@pytest.fixture(scope="session")
def eg():
    return extend_grammar(fig8_grammar())


def doc(text):
    return parse_doc(text)


def g8_trees(max_nodes=12, bud_rate=0.2, sort="A"):
    """Hypothesis strategy of random well-typed g8 trees (buds allowed)."""
    eg = extend_grammar(fig8_grammar())
    return st.integers(0, 2**32 - 1).map(
        lambda seed: random_tree(eg, sort, random.Random(seed), max_nodes, bud_rate)
    )
