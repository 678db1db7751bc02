"""Evaluation engines for scope graphs over situation models.

Four engines share one bottom-up core:

* ``eval_naive`` applies quantifier shapes directly to vague conditional
  probabilities (the formulation that trivialises precise quantifiers
  under vague predicates).
* ``eval_exact`` enumerates the lifted distribution over precise
  lexicons and, per configuration, integrates exactly over one shared
  uniform threshold per vague quantifier node.
* ``eval_mc`` is an unbiased sampler of the same semantics with a
  binomial confidence interval and deterministic seeding.
* ``eval_generic_fast`` reverses the order of expectations, evaluating
  vague functions directly; it is only sound for vague quantifiers.

Quantifier ratios are computed from unnormalised joint-marginal masses
(the conditioning mass cancels), which keeps small dyadic worlds exact
in floating point.  A denominator at or below the guard is treated as an
empty restriction, which also covers zero-probability free-variable
assignments: they receive the convention value and carry no weight.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ExplosionGuard,
    PreciseQuantifierInFastPath,
    ValidationFailed,
)
from .model import (
    DEFAULT_CONFIG_CAP,
    LiftScheme,
    PreciseLexicon,
    SituationModel,
    VagueLexicon,
    lift,
)
from .quant import (
    VAGUE_KINDS,
    QuantifierKind,
    empty_restriction_value,
    is_precise,
    shape_value,
)
from .scope import (
    Application,
    Conjunction,
    Quantifier,
    ScopeGraph,
    Tautology,
    free_vars,
    topological_order,
    validate,
)

NAIVE = "naive"
EXACT = "exact"
MONTE_CARLO = "mc"
GENERIC_FAST = "generic-fast"

DEFAULT_VAGUE_NODE_CAP = 4
DENOM_GUARD = 1e-15


@dataclass(frozen=True)
class EngineLimits:
    config_cap: int = DEFAULT_CONFIG_CAP
    vague_node_cap: int = DEFAULT_VAGUE_NODE_CAP
    denom_guard: float = DENOM_GUARD


@dataclass(frozen=True)
class EvalResult:
    probability: float
    engine: str
    ci: tuple[float, float] | None = None
    samples: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class GenericComparison:
    """Expectation-of-ratio (exact) versus ratio-of-expectations (fast)."""

    exact: float
    fast: float
    gap: float


def _validate_or_raise(graph, model, lexicon):
    diagnostics = validate(graph, model, lexicon)
    if diagnostics:
        raise ValidationFailed(diagnostics)


class _Evaluator:
    """Precomputed per-(graph, model) evaluation context.

    For every quantifier node, the joint marginal over bound plus free
    variables is grouped by free-variable assignment, with the child
    table keys precomputed, so that repeated passes (per configuration,
    per threshold region, per sample) only do table lookups.
    """

    def __init__(self, graph: ScopeGraph, model: SituationModel, generic_empty=1.0,
                 guard=DENOM_GUARD):
        self.graph = graph
        self.model = model
        self.generic_empty = generic_empty
        self.guard = guard
        self.order = topological_order(graph)
        memo: dict[int, frozenset[str]] = {}
        self.freev = {
            i: tuple(sorted(free_vars(graph, i, memo))) for i in self.order
        }
        self.vague_nodes = [
            i
            for i in self.order
            if isinstance(graph.nodes[i], Quantifier)
            and not is_precise(graph.nodes[i].kind)
        ]
        self._quant_data: dict[int, tuple] = {}
        self._conj_proj: dict[int, list] = {}
        for i in self.order:
            node = graph.nodes[i]
            if isinstance(node, Quantifier):
                self._quant_data[i] = self._prepare_quantifier(i, node)
            elif isinstance(node, Conjunction):
                self._conj_proj[i] = self._prepare_conjunction(i, node)

    def _domain(self, vars):
        return itertools.product(self.model.space.elements, repeat=len(vars))

    def _prepare_quantifier(self, i, node):
        bound = tuple(node.bound)
        free = self.freev[i]
        marg = self.model.marginal(bound + free) if (bound + free) else {}
        rvars = self.freev[node.restriction]
        bvars = self.freev[node.body]
        groups: dict[tuple, list] = {}
        nb = len(bound)
        all_vars = bound + free
        pos = {v: k for k, v in enumerate(all_vars)}
        ridx = [pos[v] for v in rvars]
        bidx = [pos[v] for v in bvars]
        for key, mass in marg.items():
            if mass <= 0.0:
                continue
            vkey = key[nb:]
            rkey = tuple(key[k] for k in ridx)
            bkey = tuple(key[k] for k in bidx)
            groups.setdefault(vkey, []).append((mass, rkey, bkey))
        vdomain = [tuple(v) for v in self._domain(free)]
        return vdomain, groups

    def _prepare_conjunction(self, i, node):
        free = self.freev[i]
        pos = {v: k for k, v in enumerate(free)}
        proj = []
        for c in node.children:
            proj.append((c, [pos[v] for v in self.freev[c]]))
        return proj

    def quantifier_values(self, i, tables):
        """Table of f_Q(ratio) over the node's free-variable domain."""
        node = self.graph.nodes[i]
        vdomain, groups = self._quant_data[i]
        empty = empty_restriction_value(node.kind, self.generic_empty)
        values = {}
        for vkey in vdomain:
            num = 0.0
            den = 0.0
            rtab = tables[node.restriction]
            btab = tables[node.body]
            for mass, rkey, bkey in groups.get(vkey, ()):
                r = rtab[rkey]
                if r:
                    den += mass * r
                    num += mass * r * btab[bkey]
            if den <= self.guard:
                values[vkey] = empty
            else:
                values[vkey] = shape_value(node.kind, min(num / den, 1.0))
        return values

    def conjunction_values(self, i, tables):
        free = self.freev[i]
        proj = self._conj_proj[i]
        values = {}
        for vkey in self._domain(free):
            prod = 1.0
            for c, idx in proj:
                prod *= tables[c][tuple(vkey[k] for k in idx)]
                if prod == 0.0:
                    break
            values[tuple(vkey)] = prod
        return values

    def leaf_table(self, i, psi):
        """Application table; ``psi(predicate, pixie)`` supplies values."""
        node = self.graph.nodes[i]
        return {(p,): psi(node.predicate, p) for p in self.model.space.elements}


def _vague_pass(ev: _Evaluator, lexicon: VagueLexicon, engine_name: str,
                vague_only: bool):
    """Bottom-up pass where every node yields a vague (probability) table."""
    tables: dict[int, dict] = {}
    for i in ev.order:
        node = ev.graph.nodes[i]
        if isinstance(node, Tautology):
            tables[i] = {(): 1.0}
        elif isinstance(node, Application):
            tables[i] = ev.leaf_table(i, lexicon.psi)
        elif isinstance(node, Conjunction):
            tables[i] = ev.conjunction_values(i, tables)
        else:
            if vague_only and is_precise(node.kind):
                name = node.kind.value if isinstance(node.kind, QuantifierKind) else "custom"
                raise PreciseQuantifierInFastPath(
                    f"precise quantifier {name!r} at node {i} is not allowed "
                    f"in the generic fast path; use the exact engine"
                )
            tables[i] = ev.quantifier_values(i, tables)
    return tables[ev.graph.root][()]


def eval_naive(graph: ScopeGraph, model: SituationModel, lexicon: VagueLexicon,
               generic_empty: float = 1.0) -> EvalResult:
    """Apply quantifier shapes directly to vague conditional probabilities."""
    _validate_or_raise(graph, model, lexicon)
    ev = _Evaluator(graph, model, generic_empty)
    p = _vague_pass(ev, lexicon, NAIVE, vague_only=False)
    return EvalResult(probability=p, engine=NAIVE)


def eval_generic_fast(graph: ScopeGraph, model: SituationModel,
                      lexicon: VagueLexicon,
                      generic_empty: float = 1.0) -> EvalResult:
    """Ratio-of-expectations fast path; every quantifier must be vague."""
    _validate_or_raise(graph, model, lexicon)
    ev = _Evaluator(graph, model, generic_empty)
    p = _vague_pass(ev, lexicon, GENERIC_FAST, vague_only=True)
    return EvalResult(probability=p, engine=GENERIC_FAST)


# --- exact engine -----------------------------------------------------------

def _config_tree(ev: _Evaluator, plex: PreciseLexicon):
    """Decision tree over shared per-node thresholds for one precise lexicon.

    Nodes below every branch point are already boolean, so each vague
    quantifier contributes one branch level, in topological order.
    Returns either ("leaf", root_value) or
    ("branch", node_index, cuts, children) where region k of (0, 1]
    (bounded above by cuts[k], with 1.0 closing the last region) selects
    children[k].
    """
    order = ev.order

    def holds(pred, pixie):
        return 1.0 if plex.holds(pred, pixie) else 0.0

    def rec(pos, tables):
        for idx in range(pos, len(order)):
            i = order[idx]
            node = ev.graph.nodes[i]
            if isinstance(node, Tautology):
                tables[i] = {(): 1.0}
            elif isinstance(node, Application):
                tables[i] = ev.leaf_table(i, holds)
            elif isinstance(node, Conjunction):
                tables[i] = ev.conjunction_values(i, tables)
            elif is_precise(node.kind):
                tables[i] = ev.quantifier_values(i, tables)
            else:
                vals = ev.quantifier_values(i, tables)
                cuts = sorted({v for v in vals.values() if 0.0 < v < 1.0})
                children = []
                for hi in cuts + [1.0]:
                    branch_tables = dict(tables)
                    branch_tables[i] = {
                        k: 1.0 if v >= hi else 0.0 for k, v in vals.items()
                    }
                    children.append(rec(idx + 1, branch_tables))
                return ("branch", i, cuts, children)
        return ("leaf", tables[order[-1]][()])

    return rec(0, {})


def _tree_expectation(tree) -> float:
    if tree[0] == "leaf":
        return tree[1]
    _, _, cuts, children = tree
    bounds = [0.0] + cuts + [1.0]
    return math.fsum(
        (bounds[k + 1] - bounds[k]) * _tree_expectation(children[k])
        for k in range(len(children))
    )


def _used_predicates(graph: ScopeGraph, lexicon: VagueLexicon) -> VagueLexicon:
    used = {
        n.predicate
        for i in graph.reachable()
        if isinstance((n := graph.nodes[i]), Application)
    }
    return VagueLexicon({p: lexicon.predicates[p] for p in sorted(used)})


def _check_vague_cap(ev, limits):
    if len(ev.vague_nodes) > limits.vague_node_cap:
        raise ExplosionGuard(
            f"{len(ev.vague_nodes)} vague quantifier nodes exceed the cap "
            f"of {limits.vague_node_cap}",
            count=len(ev.vague_nodes),
            cap=limits.vague_node_cap,
        )


def eval_exact(graph: ScopeGraph, model: SituationModel, lexicon: VagueLexicon,
               scheme: LiftScheme = LiftScheme.INDEPENDENT,
               limits: EngineLimits = EngineLimits(),
               generic_empty: float = 1.0) -> EvalResult:
    """Exact evaluation: enumerate precise configurations and integrate
    each vague quantifier's shared threshold over its finite value set."""
    _validate_or_raise(graph, model, lexicon)
    ev = _Evaluator(graph, model, generic_empty, limits.denom_guard)
    _check_vague_cap(ev, limits)
    lifted = lift(_used_predicates(graph, lexicon), scheme, model.space,
                  cap=limits.config_cap)
    terms = []
    for plex, weight in lifted.configurations:
        if weight == 0.0:
            continue
        terms.append(weight * _tree_expectation(_config_tree(ev, plex)))
    p = min(max(math.fsum(terms), 0.0), 1.0)
    return EvalResult(probability=p, engine=EXACT)


# --- Monte Carlo ------------------------------------------------------------

class _ConfigSampler:
    """Draws precise lexicons per scheme with a stable draw order."""

    def __init__(self, lexicon: VagueLexicon, space, scheme: LiftScheme):
        self.scheme = scheme
        self.space = space
        self.names = sorted(lexicon.predicates)
        self.lexicon = lexicon
        if scheme is LiftScheme.INDEPENDENT:
            self.fractional = [
                (name, pixie, lexicon.psi(name, pixie))
                for name in self.names
                for pixie in space.elements
                if 0.0 < lexicon.psi(name, pixie) < 1.0
            ]
            self.draws = len(self.fractional)
        else:
            self.cuts = {
                name: sorted(
                    {
                        lexicon.psi(name, pixie)
                        for pixie in space.elements
                        if 0.0 < lexicon.psi(name, pixie) < 1.0
                    }
                )
                for name in self.names
            }
            self.draws = len(self.names)

    def sample_key(self, uniforms) -> tuple:
        if self.scheme is LiftScheme.INDEPENDENT:
            return tuple(
                u <= p for u, (_, _, p) in zip(uniforms, self.fractional)
            )
        # Region index per predicate from a threshold in (0, 1].
        key = []
        for theta, name in zip(uniforms, self.names):
            key.append(bisect_left(self.cuts[name], theta))
        return tuple(key)

    def materialise(self, key) -> PreciseLexicon:
        truth = {}
        if self.scheme is LiftScheme.INDEPENDENT:
            frac = {
                (name, pixie): bit
                for (name, pixie, _), bit in zip(self.fractional, key)
            }
            for name in self.names:
                truth[name] = {}
                for pixie in self.space.elements:
                    p = self.lexicon.psi(name, pixie)
                    if p == 0.0 or p == 1.0:
                        truth[name][pixie] = p == 1.0
                    else:
                        truth[name][pixie] = frac[(name, pixie)]
        else:
            for name, region in zip(self.names, key):
                uppers = self.cuts[name] + [1.0]
                hi = uppers[region]
                truth[name] = {
                    pixie: self.lexicon.psi(name, pixie) >= hi
                    for pixie in self.space.elements
                }
        return PreciseLexicon(truth)


def _walk_tree(tree, thetas, theta_index):
    """Resolve a decision tree with one threshold per vague node.

    ``thetas`` is indexed by vague-node position in topological order;
    every root-to-leaf path visits every vague node exactly once.
    """
    while tree[0] == "branch":
        _, node, cuts, children = tree
        theta = thetas[theta_index[node]]
        tree = children[bisect_left(cuts, theta)]
    return tree[1]


def _binomial_ci(p_hat: float, n: int) -> tuple[float, float]:
    # 95% normal-approximation interval; degenerate at 0 and 1.
    half = 1.959963984540054 * math.sqrt(p_hat * (1.0 - p_hat) / n)
    return (max(p_hat - half, 0.0), min(p_hat + half, 1.0))


def eval_mc(graph: ScopeGraph, model: SituationModel, lexicon: VagueLexicon,
            scheme: LiftScheme = LiftScheme.INDEPENDENT,
            samples: int = 10000, seed: int = 0,
            limits: EngineLimits = EngineLimits(),
            generic_empty: float = 1.0) -> EvalResult:
    """Monte Carlo estimate of the exact semantics.

    Each sample draws one precise lexicon (per scheme) and one uniform
    threshold per vague quantifier node, then evaluates the root boolean
    exactly as the exact engine's inner loop does.  Identical inputs and
    seed give identical results.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _validate_or_raise(graph, model, lexicon)
    ev = _Evaluator(graph, model, generic_empty, limits.denom_guard)
    _check_vague_cap(ev, limits)
    sampler = _ConfigSampler(_used_predicates(graph, lexicon), model.space, scheme)
    theta_index = {node: k for k, node in enumerate(ev.vague_nodes)}
    n_theta = len(ev.vague_nodes)
    rng = np.random.default_rng(seed)
    trees: dict[tuple, tuple] = {}
    hits = 0
    for _ in range(samples):
        config_u = 1.0 - rng.random(sampler.draws) if sampler.draws else ()
        thetas = 1.0 - rng.random(n_theta) if n_theta else ()
        key = sampler.sample_key(config_u)
        tree = trees.get(key)
        if tree is None:
            tree = _config_tree(ev, sampler.materialise(key))
            trees[key] = tree
        hits += _walk_tree(tree, thetas, theta_index)
    p_hat = hits / samples
    return EvalResult(
        probability=p_hat,
        engine=MONTE_CARLO,
        ci=_binomial_ci(p_hat, samples),
        samples=samples,
        seed=seed,
    )


def compare_generic(graph: ScopeGraph, model: SituationModel,
                    lexicon: VagueLexicon,
                    scheme: LiftScheme = LiftScheme.INDEPENDENT,
                    limits: EngineLimits = EngineLimits(),
                    generic_empty: float = 1.0) -> GenericComparison:
    """Expectation-over-configurations value versus the fast-path value."""
    for i in graph.quantifier_nodes():
        node = graph.nodes[i]
        if node.kind is not QuantifierKind.GENERIC:
            raise PreciseQuantifierInFastPath(
                f"compare_generic requires all quantifiers generic; node {i} "
                f"is {getattr(node.kind, 'value', 'custom')!r}"
            )
    exact = eval_exact(graph, model, lexicon, scheme, limits, generic_empty)
    fast = eval_generic_fast(graph, model, lexicon, generic_empty)
    return GenericComparison(
        exact=exact.probability,
        fast=fast.probability,
        gap=abs(exact.probability - fast.probability),
    )
