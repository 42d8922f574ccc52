import random
import sys
from pathlib import Path

import pytest

from epicat.context import FormalContext, Relation
from epicat.semantics import EnrichedContext, Model, Valuation
from epicat.context import concept_of_objects

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


def k2_context() -> FormalContext:
    """A={a1,a2}, X={x1,x2}, I={(a1,x1),(a1,x2),(a2,x2)}."""
    return FormalContext.from_pairs(["a1", "a2"], ["x1", "x2"], [("a1", "x1"), ("a1", "x2"), ("a2", "x2")])


def k2_two_agents() -> Model:
    """R_1 = I, R_2 = A x X, V(p) = ({a1}, {x1,x2})."""
    ctx = k2_context()
    frame = EnrichedContext(ctx, {"1": ctx.incidence, "2": Relation.full(2, 2)})
    return Model(frame, Valuation({"p": concept_of_objects(ctx, 0b01)}))


@pytest.fixture
def k2():
    return k2_context()


@pytest.fixture
def k2m():
    return k2_two_agents()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def random_contexts(seed: int, count: int, max_size: int, min_size: int = 1):
    from epicat.harness import random_context

    rng = random.Random(seed)
    for _ in range(count):
        yield rng, random_context(rng, rng.randint(min_size, max_size), rng.randint(min_size, max_size))
