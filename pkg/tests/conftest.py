import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import quantale as q

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_world(name):
    return q.parse_world((FIXTURES / name).read_text())


def load_prop(name):
    return q.parse_prop((FIXTURES / name).read_text())


def red_world(p):
    """One pixie, one variable, psi_red = p."""
    model = q.SituationModel(q.PixieSpace(("x1",)), ("x",), ((("x1",), 1.0),))
    lexicon = q.VagueLexicon({"red": q.VaguePredicate("red", {"x1": p})})
    return model, lexicon


def quant_over_tautology(kind, predicate="red", variable="x"):
    """Graph for ``(KIND (v) true (predicate v))``."""
    nodes = (
        q.Tautology(),
        q.Application(predicate, variable),
        q.Quantifier(q.QuantifierKind(kind), (variable,), 0, 1),
    )
    return q.ScopeGraph(nodes, root=2)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def donkey_graph():
    return load_prop("donkey.prop")
