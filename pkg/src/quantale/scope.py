"""Scope trees and scope DAGs.

Non-terminal nodes are quantifiers with a restriction (left child) and a
body (right child); leaves are predicate applications, conjunctions, or
the tautology.  Sharing a node between parents (via a named alias) is
semantically meaningful: a shared vague quantifier node carries a single
threshold random variable, whereas textual duplicates draw independent
thresholds.  Binding the same variable in two different quantifiers is
legal and turns the tree into a DAG.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CycleDetected
from .quant import QuantifierKind, ShapeSpec


@dataclass(frozen=True)
class Tautology:
    pass


@dataclass(frozen=True)
class Application:
    predicate: str
    variable: str


@dataclass(frozen=True)
class Conjunction:
    children: tuple[int, ...]


@dataclass(frozen=True)
class Quantifier:
    kind: QuantifierKind | ShapeSpec
    bound: tuple[str, ...]
    restriction: int
    body: int


ScopeNode = Tautology | Application | Conjunction | Quantifier


def _children(node: ScopeNode) -> tuple[int, ...]:
    if isinstance(node, Conjunction):
        return node.children
    if isinstance(node, Quantifier):
        return (node.restriction, node.body)
    return ()


@dataclass(frozen=True)
class ScopeGraph:
    """Indexed nodes with a root; aliases name shared nodes."""

    nodes: tuple[ScopeNode, ...]
    root: int
    aliases: dict[str, int] = field(default_factory=dict)

    def node(self, index: int) -> ScopeNode:
        return self.nodes[index]

    def quantifier_nodes(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if isinstance(n, Quantifier)]

    def reachable(self) -> set[int]:
        seen = set()
        stack = [self.root]
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            stack.extend(_children(self.nodes[i]))
        return seen


def _find_cycle(graph: ScopeGraph) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * len(graph.nodes)

    def visit(i):
        if colour[i] == GREY:
            return True
        if colour[i] == BLACK:
            return False
        colour[i] = GREY
        for c in _children(graph.nodes[i]):
            if not 0 <= c < len(graph.nodes) or visit(c):
                return True
        colour[i] = BLACK
        return False

    return visit(graph.root)


def free_vars(graph: ScopeGraph, node: int, _memo: dict | None = None) -> frozenset[str]:
    """Free variables of a node.

    Leaves mention their own variables; a conjunction takes the union of
    its children; a quantifier takes the union of restriction and body
    minus its bound variables.  Stable under node sharing.
    """
    memo = _memo if _memo is not None else {}
    if node in memo:
        return memo[node]
    memo[node] = frozenset()  # cycle guard; validated separately
    n = graph.nodes[node]
    if isinstance(n, Tautology):
        result = frozenset()
    elif isinstance(n, Application):
        result = frozenset({n.variable})
    elif isinstance(n, Conjunction):
        result = frozenset().union(
            *(free_vars(graph, c, memo) for c in n.children)
        )
    else:
        below = free_vars(graph, n.restriction, memo) | free_vars(graph, n.body, memo)
        result = below - set(n.bound)
    memo[node] = result
    return result


def topological_order(graph: ScopeGraph) -> list[int]:
    """Reachable nodes ordered children-first; deterministic.

    Raises CycleDetected if the reachable subgraph is cyclic.
    """
    if _find_cycle(graph):
        raise CycleDetected("scope graph contains a cycle")
    order: list[int] = []
    placed = set()

    def visit(i):
        if i in placed:
            return
        placed.add(i)
        for c in _children(graph.nodes[i]):
            visit(c)
        order.append(i)

    visit(graph.root)
    return order


def validate(graph: ScopeGraph, model, lexicon) -> list[str]:
    """Well-formedness diagnostics; an empty list means the graph is ok.

    Reports cycles, open roots, unknown predicates and variables, empty
    conjunctions, and bound variables leaking into a quantifier's own
    free-variable set.  Diagnostics are returned, never thrown.
    """
    diagnostics: list[str] = []
    for i, n in enumerate(graph.nodes):
        for c in _children(n):
            if not 0 <= c < len(graph.nodes):
                diagnostics.append(f"node {i} references missing node {c}")
    if not 0 <= graph.root < len(graph.nodes):
        diagnostics.append(f"root index {graph.root} out of range")
    if diagnostics:
        return diagnostics
    if _find_cycle(graph):
        diagnostics.append("scope graph contains a cycle")
        return diagnostics

    memo: dict[int, frozenset[str]] = {}
    reachable = sorted(graph.reachable())
    for i in reachable:
        n = graph.nodes[i]
        if isinstance(n, Application):
            if n.predicate not in lexicon:
                diagnostics.append(f"unknown predicate {n.predicate!r} at node {i}")
            if n.variable not in model.variables:
                diagnostics.append(f"unknown variable {n.variable!r} at node {i}")
        elif isinstance(n, Conjunction):
            if not n.children:
                diagnostics.append(f"empty conjunction at node {i}")
        elif isinstance(n, Quantifier):
            if not n.bound:
                diagnostics.append(f"quantifier at node {i} binds no variables")
            if len(set(n.bound)) != len(n.bound):
                diagnostics.append(f"duplicate bound variables at node {i}")
            for v in n.bound:
                if v not in model.variables:
                    diagnostics.append(f"unknown variable {v!r} bound at node {i}")
            leaked = set(n.bound) & free_vars(graph, i, memo)
            if leaked:
                diagnostics.append(
                    f"bound variables {sorted(leaked)} free at quantifier node {i}"
                )
    open_vars = free_vars(graph, graph.root, memo)
    if open_vars:
        listing = ", ".join(sorted(open_vars))
        diagnostics.append(f"root has free variables {{{listing}}}")
    return diagnostics
