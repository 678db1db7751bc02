"""Pixie spaces, situation models, and lexicons.

A situation model is a joint probability table over named pixie-valued
variables; it plays the role of a probabilistic model structure.  A
vague predicate maps pixies to probabilities of truth and is *lifted*
into a weighted enumeration of precise (boolean) lexicons, whose
marginals reproduce the vague probabilities exactly.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

from .errors import ExplosionGuard, UnknownVariable, ZeroProbabilityCondition
from .quant import threshold_partition

MASS_TOL = 1e-9


@dataclass(frozen=True)
class PixieSpace:
    """Finite ordered set of distinct pixie identifiers."""

    elements: tuple[str, ...]

    def __post_init__(self):
        if not self.elements:
            raise ValueError("pixie space must be non-empty")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("pixie identifiers must be unique")

    def __contains__(self, pixie):
        return pixie in self.elements

    def __eq__(self, other):
        if not isinstance(other, PixieSpace):
            return NotImplemented
        return set(self.elements) == set(other.elements)

    def __hash__(self):
        return hash(frozenset(self.elements))


@dataclass(frozen=True)
class SituationModel:
    """Joint distribution over named pixie-valued variables.

    ``joint`` pairs full assignments (tuples aligned with ``variables``)
    with probability mass.  Mass must be non-negative and total 1 within
    1e-9; assignments must be total and unique.
    """

    space: PixieSpace
    variables: tuple[str, ...]
    joint: tuple[tuple[tuple[str, ...], float], ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be distinct")
        seen = set()
        total = 0.0
        for assignment, mass in self.joint:
            if len(assignment) != len(self.variables):
                raise ValueError(f"assignment {assignment} does not cover all variables")
            for pixie in assignment:
                if pixie not in self.space:
                    raise ValueError(f"unknown pixie {pixie!r} in joint assignment")
            if assignment in seen:
                raise ValueError(f"duplicate assignment {assignment}")
            seen.add(assignment)
            if mass < 0:
                raise ValueError("probabilities must be non-negative")
            total += mass
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"joint mass {total} differs from 1 by more than {MASS_TOL}")

    def __eq__(self, other):
        if not isinstance(other, SituationModel):
            return NotImplemented
        return self.space == other.space and self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    def _canonical(self):
        order = sorted(range(len(self.variables)), key=lambda i: self.variables[i])
        vars_sorted = tuple(self.variables[i] for i in order)
        entries = sorted(
            (tuple(a[i] for i in order), m) for a, m in self.joint if m != 0.0
        )
        return (vars_sorted, tuple(entries))

    def _indices(self, vars):
        try:
            return [self.variables.index(v) for v in vars]
        except ValueError as exc:
            raise UnknownVariable(str(exc).split("'")[0] or str(exc)) from exc

    def marginal(self, vars) -> dict[tuple[str, ...], float]:
        """Sum joint mass over the eliminated variables.

        The result is keyed by tuples in the order given by ``vars``.
        """
        vars = tuple(vars)
        if not vars:
            raise ValueError("marginal requires at least one variable")
        for v in vars:
            if v not in self.variables:
                raise UnknownVariable(f"unknown variable {v!r}")
        idx = [self.variables.index(v) for v in vars]
        out: dict[tuple[str, ...], float] = {}
        for assignment, mass in self.joint:
            key = tuple(assignment[i] for i in idx)
            out[key] = out.get(key, 0.0) + mass
        return out

    def conditional(self, given: dict[str, str]) -> dict[tuple[str, ...], float]:
        """Distribution over the remaining variables given a partial assignment.

        Keys follow the model's declared variable order, restricted to
        the unconditioned variables.  Raises ZeroProbabilityCondition if
        the conditioning event has zero mass.
        """
        for v in given:
            if v not in self.variables:
                raise UnknownVariable(f"unknown variable {v!r}")
        remaining = [v for v in self.variables if v not in given]
        out: dict[tuple[str, ...], float] = {}
        total = 0.0
        for assignment, mass in self.joint:
            env = dict(zip(self.variables, assignment))
            if all(env[v] == p for v, p in given.items()):
                key = tuple(env[v] for v in remaining)
                out[key] = out.get(key, 0.0) + mass
                total += mass
        if total <= 0.0:
            raise ZeroProbabilityCondition(
                f"conditioning assignment {given} has zero probability"
            )
        return {k: m / total for k, m in out.items()}


@dataclass(frozen=True)
class VaguePredicate:
    """Map from pixie to probability of truth; absent pixies mean 0."""

    name: str
    table: dict[str, float]

    def __post_init__(self):
        for pixie, p in self.table.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"psi_{self.name}({pixie}) = {p} outside [0, 1]")

    def psi(self, pixie: str) -> float:
        return self.table.get(pixie, 0.0)

    def __eq__(self, other):
        if not isinstance(other, VaguePredicate):
            return NotImplemented
        keys = set(self.table) | set(other.table)
        return self.name == other.name and all(
            self.psi(k) == other.psi(k) for k in keys
        )

    def __hash__(self):
        return hash((self.name, frozenset((k, v) for k, v in self.table.items() if v)))


@dataclass(frozen=True)
class VagueLexicon:
    """Named vague predicates."""

    predicates: dict[str, VaguePredicate]

    def __contains__(self, name):
        return name in self.predicates

    def psi(self, name: str, pixie: str) -> float:
        return self.predicates[name].psi(pixie)


@dataclass(frozen=True)
class PreciseLexicon:
    """Boolean predicate functions, total over a pixie space."""

    truth: dict[str, dict[str, bool]]

    def holds(self, name: str, pixie: str) -> bool:
        return self.truth[name][pixie]

    def _key(self):
        return tuple(
            (name, tuple(sorted(table.items())))
            for name, table in sorted(self.truth.items())
        )

    def __eq__(self, other):
        if not isinstance(other, PreciseLexicon):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


class LiftScheme(enum.Enum):
    INDEPENDENT = "independent"
    COUPLED_THRESHOLD = "coupled-threshold"


@dataclass(frozen=True)
class LiftedLexicon:
    """Weighted enumeration of precise lexicons produced by a lift."""

    configurations: tuple[tuple[PreciseLexicon, float], ...]
    scheme: LiftScheme


DEFAULT_CONFIG_CAP = 2**20


def _independent_configs(lexicon, space, cap):
    fractional = []
    fixed: dict[str, dict[str, bool]] = {}
    for name in sorted(lexicon.predicates):
        fixed[name] = {}
        for pixie in space.elements:
            p = lexicon.psi(name, pixie)
            if p == 0.0 or p == 1.0:
                fixed[name][pixie] = p == 1.0
            else:
                fractional.append((name, pixie, p))
    count = 2 ** len(fractional)
    if count > cap:
        raise ExplosionGuard(
            f"independent lift needs {count} configurations (cap {cap})",
            count=count,
            cap=cap,
        )
    configs = []
    for bits in itertools.product((True, False), repeat=len(fractional)):
        truth = {name: dict(table) for name, table in fixed.items()}
        weight = 1.0
        for (name, pixie, p), bit in zip(fractional, bits):
            truth[name][pixie] = bit
            weight *= p if bit else 1.0 - p
        configs.append((PreciseLexicon(truth), weight))
    return configs


def _coupled_configs(lexicon, space, cap):
    per_predicate = []
    count = 1
    for name in sorted(lexicon.predicates):
        values = {lexicon.psi(name, pixie) for pixie in space.elements}
        regions = threshold_partition(values)
        options = []
        for region in regions:
            table = {
                pixie: lexicon.psi(name, pixie) >= region.hi
                for pixie in space.elements
            }
            options.append((table, region.measure))
        per_predicate.append((name, options))
        count *= len(options)
    if count > cap:
        raise ExplosionGuard(
            f"coupled-threshold lift needs {count} configurations (cap {cap})",
            count=count,
            cap=cap,
        )
    configs = []
    for combo in itertools.product(*(opts for _, opts in per_predicate)):
        truth = {}
        weight = 1.0
        for (name, _), (table, measure) in zip(per_predicate, combo):
            truth[name] = dict(table)
            weight *= measure
        configs.append((PreciseLexicon(truth), weight))
    return configs


def lift(
    lexicon: VagueLexicon,
    scheme: LiftScheme,
    space: PixieSpace,
    cap: int = DEFAULT_CONFIG_CAP,
) -> LiftedLexicon:
    """Turn vague predicates into a distribution over precise lexicons.

    Independent: each strictly-fractional (predicate, pixie) entry is an
    independent Bernoulli; entries with psi in {0, 1} are fixed.
    CoupledThreshold: per predicate, one shared threshold sweeps (0, 1],
    giving the distinct super-level sets weighted by the length of the
    generating threshold interval; predicates remain independent of one
    another.  Both schemes marginalise back to psi exactly.
    """
    if scheme is LiftScheme.INDEPENDENT:
        configs = _independent_configs(lexicon, space, cap)
    elif scheme is LiftScheme.COUPLED_THRESHOLD:
        configs = _coupled_configs(lexicon, space, cap)
    else:
        raise ValueError(f"unknown lifting scheme {scheme!r}")
    assert abs(math.fsum(w for _, w in configs) - 1.0) <= MASS_TOL
    return LiftedLexicon(tuple(configs), scheme)
