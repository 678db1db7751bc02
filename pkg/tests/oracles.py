"""Independent reference implementations used to freeze expected values.

Everything here is deliberately written in a different style from the
package: explicit set cardinalities over enumerated assignments, direct
weighted sums, no code shared with the engine.  Random worlds built by
``random_classical_case`` use product-uniform joints whose cell masses
are negative powers of two, so float arithmetic in both the oracle and
the engine is exact and comparisons can demand equality.
"""

import itertools

import quantale as q

PRECISE_ORACLE_KINDS = ("some", "every", "no", "most")
PREDICATE_NAMES = ("P", "Q", "R")


# --- classical set-cardinality oracle -----------------------------------------

def classical_value(graph, domains, truth, node, env):
    """Boolean truth of a scope-tree node under a variable environment.

    Quantifiers enumerate their bound variables over per-variable
    domains and compare restriction/body cardinalities per the textbook
    conditions.  Assumes a tree (each node evaluated per environment)
    and all-precise predicates given as bool tables.
    """
    n = graph.nodes[node]
    if isinstance(n, q.Tautology):
        return True
    if isinstance(n, q.Application):
        return truth[n.predicate][env[n.variable]]
    if isinstance(n, q.Conjunction):
        return all(
            classical_value(graph, domains, truth, c, env) for c in n.children
        )
    r = 0
    rb = 0
    for combo in itertools.product(*(domains[v] for v in n.bound)):
        inner = dict(env)
        inner.update(zip(n.bound, combo))
        if classical_value(graph, domains, truth, n.restriction, inner):
            r += 1
            if classical_value(graph, domains, truth, n.body, inner):
                rb += 1
    kind = n.kind.value
    if kind == "some":
        return rb > 0
    if kind == "every":
        return rb == r
    if kind == "no":
        return rb == 0
    if kind == "most":
        return 2 * rb > r
    raise ValueError(f"oracle does not handle kind {kind!r}")


def classical_root(graph, domains, truth):
    return classical_value(graph, domains, truth, graph.root, {})


# --- randomized all-precise worlds with product-uniform joints ----------------

def random_classical_case(rng):
    """World, lexicon, scope tree, and oracle inputs for one trial.

    Pixie counts and per-variable domain sizes are powers of two, the
    joint is uniform over the product of the domains, and predicates are
    crisp, so the engine's mass ratios equal the oracle's count ratios
    exactly in floats.
    """
    n_pix = rng.choice([1, 2, 4])
    pixies = tuple(f"p{i}" for i in range(n_pix))
    variables = tuple("xyz"[: rng.randint(1, 3)])
    domains = {}
    for v in variables:
        size = rng.choice([s for s in (1, 2, 4) if s <= n_pix])
        domains[v] = tuple(sorted(rng.sample(pixies, size)))
    cells = list(itertools.product(*(domains[v] for v in variables)))
    mass = 1.0 / len(cells)
    model = q.SituationModel(
        q.PixieSpace(pixies), variables, tuple((c, mass) for c in cells)
    )
    truth = {}
    predicates = {}
    for name in PREDICATE_NAMES:
        table = {pix: rng.random() < 0.5 for pix in pixies}
        truth[name] = table
        predicates[name] = q.VaguePredicate(
            name, {pix: 1.0 for pix, held in table.items() if held}
        )
    lexicon = q.VagueLexicon(predicates)
    graph = random_tree(rng, variables)
    return model, lexicon, graph, domains, truth


def random_tree(rng, variables, max_depth=2):
    """Random closed scope tree, nesting depth at most ``max_depth``."""
    nodes = []

    def add(node):
        nodes.append(node)
        return len(nodes) - 1

    def application(visible):
        return add(
            q.Application(rng.choice(PREDICATE_NAMES), rng.choice(sorted(visible)))
        )

    def subformula(visible, depth):
        roll = rng.random()
        if depth < max_depth and roll < 0.4:
            return quantifier(visible, depth)
        if not visible:
            return add(q.Tautology())
        if roll < 0.8:
            return application(visible)
        width = rng.randint(1, 3)
        return add(q.Conjunction(tuple(application(visible) for _ in range(width))))

    def quantifier(visible, depth):
        var = rng.choice(variables)
        kind = q.QuantifierKind(rng.choice(PRECISE_ORACLE_KINDS))
        inner = visible | {var}
        restriction = subformula(inner, depth + 1)
        body = subformula(inner, depth + 1)
        return add(q.Quantifier(kind, (var,), restriction, body))

    root = quantifier(frozenset(), 0)
    return q.ScopeGraph(tuple(nodes), root)


# --- vague single-generic worlds ----------------------------------------------

def random_generic_case(rng):
    """World with vague predicates plus a closed single-Generic graph.

    Returns (model, lexicon, graph, expected) where expected is the
    conditional probability sum(P * psi_R * psi_B) / sum(P * psi_R)
    computed directly from the tables.
    """
    n_pix = rng.randint(1, 4)
    pixies = tuple(f"p{i}" for i in range(n_pix))
    variables = tuple("xy"[: rng.randint(1, 2)])
    cells = list(itertools.product(pixies, repeat=len(variables)))
    weights = [rng.random() + 0.05 for _ in cells]
    total = sum(weights)
    model = q.SituationModel(
        q.PixieSpace(pixies),
        variables,
        tuple((c, w / total) for c, w in zip(cells, weights)),
    )
    tables = {
        name: {pix: rng.random() for pix in pixies} for name in ("restr", "body")
    }
    # keep the restriction bounded away from zero mass
    tables["restr"][pixies[0]] = max(tables["restr"][pixies[0]], 0.25)
    lexicon = q.VagueLexicon(
        {name: q.VaguePredicate(name, table) for name, table in tables.items()}
    )
    rvar = variables[0]
    bvar = variables[-1]
    nodes = (
        q.Application("restr", rvar),
        q.Application("body", bvar),
        q.Quantifier(q.QuantifierKind.GENERIC, variables, 0, 1),
    )
    graph = q.ScopeGraph(nodes, root=2)

    def psi(name, var, cell):
        return tables[name][cell[variables.index(var)]]

    num = sum(
        mass * psi("restr", rvar, cell) * psi("body", bvar, cell)
        for cell, mass in model.joint
    )
    den = sum(mass * psi("restr", rvar, cell) for cell, mass in model.joint)
    return model, lexicon, graph, num / den
