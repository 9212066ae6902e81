"""
Easy envelopes, E^p spaces, the G^p filtration and bounded level probes.

Every verdict here is bounded: "equal" means equal on all cells with at most the closure
bound of legs, and a probe can refute easiness at order p but never certify a level.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from sympy import bell
from sympy.polys.matrices import DomainMatrix

from .categories import (
    CategoryTable, close_linear, close_partitions, linear_from_cells, named_table, span_table,
    table_equal,
)
from .config import DEFAULT_CONFIG
from .errors import BudgetExceededError, PreconditionError
from .groups import fixed_space, intertwiner_space, is_homogeneous
from .linmaps import SpanBasis, build_map, linear_combination, to_json as map_to_json, unify_domains, _lift
from .partitions import CategoryName, ColoredWord, _as_word, enumerate_partitions, format_partition, words_up_to

logger = logging.getLogger(__name__)

EQUAL_WITHIN_BOUND = 'equal_within_bound'
STRICTLY_SMALLER = 'strictly_smaller'

FIXED_POINTS = 'fixed_points'
ALL_CELLS = 'all_cells'


def bell_bound(r):
    """B_r, the easiness-level bound for presentation level r."""
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    return int(bell(r))


# -----------------------------------------------------------------------------
# Envelopes
# -----------------------------------------------------------------------------
@dataclass
class EnvelopeTable:
    group: object
    bound: int
    table: CategoryTable
    residuals: dict = field(default_factory=dict)
    sampling: Optional[dict] = None

    @property
    def cells(self):
        return self.table.cells

    def cell(self, upper, lower):
        return self.table.cell(upper, lower)

    def is_category(self):
        """True iff closing the cells adds nothing within the bound."""
        generators = [rho for word in self.table.words() for rho in self.table.cells[word]]
        return bool(table_equal(close_partitions(generators, self.bound), self.table))

    def to_json(self):
        found = {"group": self.group.label, "bound": self.bound, "table": self.table.to_json()}
        if self.sampling:
            found["sampling"] = self.sampling
        return found


def _check_homogeneous(g):
    if g.exact:
        if not is_homogeneous(g):
            raise PreconditionError(f"{g.label} does not contain the permutation matrices")
    else:
        logger.warning("homogeneity of %s is assumed for the sampled envelope", g.label)


def easy_envelope(g, bound, config=None):
    """
    D¹(∅, w) = {π : T_π ∈ Fix(u^{⊗w})} for every word of length <= bound.

    Sampled models decide membership by the projector residual against ``config.tolerance``.
    """
    config = config or DEFAULT_CONFIG
    _check_homogeneous(g)
    cells, residuals = {}, {}
    for word in words_up_to(bound):
        space = fixed_space(g, word, config=config)
        found = set()
        for rho in enumerate_partitions('', word):
            t = build_map(rho, g.n)
            if space.exact:
                if space.contains(t):
                    found.add(rho)
                continue
            value = space.residual(t)
            residuals[format_partition(rho)] = value
            if value < config.tolerance:
                found.add(rho)
        cells[word] = frozenset(found)
    table = CategoryTable(bound=bound, cells=cells)
    return EnvelopeTable(g, bound, table, residuals, None if g.exact else config.sampling())


def intertwiner_table(g, bound, config=None):
    """Linear table of the exact intertwiner spaces on all words of length <= bound."""
    if not g.exact:
        raise PreconditionError(f"{g.label} is sampled; tables need exact intertwiner spaces")
    cells = {word: fixed_space(g, word, config=config).fixed for word in words_up_to(bound)}
    return linear_from_cells(cells, g.n, bound)


# -----------------------------------------------------------------------------
# E^p cells
# -----------------------------------------------------------------------------
@dataclass
class EpSolution:
    partitions: tuple
    coefficients: list
    full_support: bool

    def to_json(self):
        return {
            "partitions": [format_partition(pi) for pi in self.partitions],
            "coefficients": [[str(value) for value in vector] for vector in self.coefficients],
            "full_support": self.full_support,
        }


@dataclass
class EpCell:
    upper: ColoredWord
    lower: ColoredWord
    n: int
    p: int
    envelope: frozenset
    solutions: list
    subsets: int

    def span(self):
        """span(E^p(upper, lower)), D¹ maps included."""
        basis = SpanBasis(self.upper, self.lower, self.n)
        for solution in self.solutions:
            maps = [build_map(pi, self.n) for pi in solution.partitions]
            for vector in solution.coefficients:
                basis.add(linear_combination(vector, maps))
        return basis

    def to_json(self):
        return {
            "upper": self.upper.letters,
            "lower": self.lower.letters,
            "n": self.n,
            "p": self.p,
            "envelope": sorted(format_partition(pi) for pi in self.envelope),
            "subsets": self.subsets,
            "solutions": [solution.to_json() for solution in self.solutions],
        }


def _nullspace(columns, domain):
    """Rows spanning {α : Σ α_i columns_i = 0}."""
    keys = sorted(set().union(*(column.entries for column in columns)))
    position = {key: index for index, key in enumerate(keys)}
    dok = {}
    for index, column in enumerate(columns):
        for key, value in column.entries.items():
            dok[(position[key], index)] = _lift(value, column.domain, domain)
    matrix = DomainMatrix.from_dok(dok, (len(keys), len(columns)), domain)
    if not keys:
        return DomainMatrix.eye(len(columns), domain).to_list()
    return matrix.nullspace().to_list()


def ep_cell(g, upper, lower, p, config=None):
    """
    Coefficient spaces of p-term combinations Σ α_i T_{π_i} lying in Hom(u^{⊗upper}, u^{⊗lower}).

    Subsets meeting D¹ add nothing beyond span(D¹) plus smaller subsets, so only p-subsets of
    the partitions outside D¹ are solved; D¹ itself is reported as one-term solutions.
    """
    config = config or DEFAULT_CONFIG
    if p < 1:
        raise PreconditionError(f"p must be at least 1, got {p}")
    if not g.exact:
        raise PreconditionError(f"{g.label} is sampled; E^p needs exact intertwiner spaces")
    upper, lower = _as_word(upper), _as_word(lower)
    space = intertwiner_space(g, upper, lower, config=config).basis
    envelope, outside = [], []
    residuals = {}
    for pi in enumerate_partitions(upper, lower):
        t = build_map(pi, g.n)
        residual = space.reduce(t)
        if residual:
            outside.append(pi)
            residuals[pi] = (t, residual)
        else:
            envelope.append(pi)
    solutions = [EpSolution((pi,), [[1]], True) for pi in envelope]
    width = min(p, len(outside))
    count = math.comb(len(outside), width) if p > 1 and width > 1 else 0
    if count > config.max_subsets:
        raise BudgetExceededError(f"{count} subsets at ({upper},{lower}) exceed max_subsets={config.max_subsets}")
    if count:
        for subset in itertools.combinations(outside, width):
            maps = [residuals[pi][0] for pi in subset]
            leftovers = [residuals[pi][1] for pi in subset]
            domain = unify_domains(*(m.domain for m in maps + leftovers))
            solved = _nullspace(leftovers, domain)
            if not solved:
                continue
            genuine = [vector for vector in solved if linear_combination(vector, maps)]
            if not genuine:
                continue
            full = all(any(vector[i] for vector in genuine) for i in range(width))
            solutions.append(EpSolution(subset, genuine, full))
    return EpCell(upper, lower, g.n, p, frozenset(envelope), solutions, count)


# -----------------------------------------------------------------------------
# G^p tables and probes
# -----------------------------------------------------------------------------
def _harvest_cells(bound, mode):
    for word in words_up_to(bound):
        if mode == FIXED_POINTS:
            yield ColoredWord(), word
        elif mode == ALL_CELLS:
            for k in range(len(word) + 1):
                yield word[:k].conjugate(), word[k:]
        else:
            raise ValueError(f"unknown harvest mode {mode!r}")


def gp_table(g, p, harvest_bound, closure_bound, harvest=FIXED_POINTS, config=None):
    """
    Linear table of C^p: the tensor category generated by the E^p cells.

    The span of D¹ seeds the closure at ``closure_bound``, so C¹ ⊆ C^p for every p even when the
    E^p cells are only harvested up to ``harvest_bound``.
    """
    config = config or DEFAULT_CONFIG
    if harvest_bound > closure_bound:
        raise PreconditionError(f"harvest bound {harvest_bound} exceeds closure bound {closure_bound}")
    envelope = span_table(easy_envelope(g, closure_bound, config).table, g.n)
    if p == 1:
        return envelope
    generators = [v for word in envelope.words() for v in envelope.cells[word].basis()]
    for upper, lower in _harvest_cells(harvest_bound, harvest):
        generators.extend(ep_cell(g, upper, lower, p, config).span().basis())
    return close_linear(generators, g.n, closure_bound)


@dataclass
class LevelReport:
    group: str
    harvest_bound: int
    closure_bound: int
    per_p: dict
    level: Optional[int] = None
    bell_bound: Optional[int] = None

    def to_json(self):
        return {
            "group": self.group,
            "harvest_bound": self.harvest_bound,
            "closure_bound": self.closure_bound,
            "per_p": {str(p): verdict for p, verdict in self.per_p.items()},
            "level_within_bound": self.level,
            "bell_bound": self.bell_bound,
        }


def _verdict(candidate, truth, p):
    comparison = table_equal(candidate, truth)
    if comparison:
        return {"verdict": EQUAL_WITHIN_BOUND}
    found = {"verdict": STRICTLY_SMALLER, "witness_cell": comparison.cell, "side": comparison.side}
    if comparison.witness is not None:
        found["witness_map"] = map_to_json(comparison.witness)
    if p == 1:
        found["ranks"] = comparison.sizes
    return found


def easiness_level_probe(g, p_max, harvest_bound, closure_bound, harvest=FIXED_POINTS, presentation_level=None, config=None):
    """
    Compare C^p with the intertwiner table for p = 1..p_max, stopping at the first equality
    (the filtration is increasing, so later p stay equal).
    """
    config = config or DEFAULT_CONFIG
    truth = intertwiner_table(g, closure_bound, config)
    per_p, level = {}, None
    for p in range(1, p_max + 1):
        per_p[p] = _verdict(gp_table(g, p, harvest_bound, closure_bound, harvest, config), truth, p)
        logger.info("%s at p=%d: %s", g.label, p, per_p[p]["verdict"])
        if per_p[p]["verdict"] == EQUAL_WITHIN_BOUND:
            level = p
            break
    bound = bell_bound(presentation_level) if presentation_level is not None else None
    return LevelReport(g.label, harvest_bound, closure_bound, per_p, level, bound)


@dataclass
class PresentationReport:
    group: str
    r_max: int
    closure_bound: int
    level: Optional[int]
    tried: dict

    def to_json(self):
        return {
            "group": self.group,
            "r_max": self.r_max,
            "closure_bound": self.closure_bound,
            "presentation_level_within_bound": self.level,
            "tried": {str(r): verdict for r, verdict in self.tried.items()},
        }


def presentation_level_probe(g, r_max, closure_bound, config=None):
    """Smallest r <= r_max such that the Fix spaces on all words of length r generate C."""
    config = config or DEFAULT_CONFIG
    truth = intertwiner_table(g, closure_bound, config)
    tried = {}
    for r in range(1, min(r_max, closure_bound) + 1):
        generators = []
        for word in words_up_to(r):
            if len(word) == r:
                generators.extend(fixed_space(g, word, config=config).fixed.basis())
        closed = close_linear(generators, g.n, closure_bound)
        comparison = table_equal(closed, truth)
        tried[r] = EQUAL_WITHIN_BOUND if comparison else f"{STRICTLY_SMALLER} at {comparison.cell}"
        if comparison:
            return PresentationReport(g.label, r_max, closure_bound, r, tried)
    return PresentationReport(g.label, r_max, closure_bound, None, tried)


# -----------------------------------------------------------------------------
# Expected envelopes
# -----------------------------------------------------------------------------
def brauer_prediction(g):
    """The named category whose span the envelope of g is expected to be."""
    if g.kind == 'SN':
        return CategoryName('P')
    if g.kind == 'HNs':
        return CategoryName('Ps', g.s)
    if g.kind == 'HNsd':
        if (g.n, g.s, g.d) == (2, 4, 2):
            return CategoryName('H242D')
        return CategoryName('Ps', g.s)
    if g.kind == 'ON':
        return CategoryName('P2')
    if g.kind in ('UN', 'UNd'):
        return CategoryName('MatchingP2')
    if g.kind == 'BN':
        return CategoryName('P12')
    if g.kind == 'CN':
        return CategoryName('MatchingP12')
    return None


def brauer_check(g, bound, config=None):
    expected = brauer_prediction(g)
    if expected is None:
        raise PreconditionError(f"no expected envelope is recorded for {g.label}")
    envelope = easy_envelope(g, bound, config)
    comparison = table_equal(envelope.table, named_table(expected, bound, real=False))
    return {"expected": str(expected), "comparison": comparison, "envelope": envelope}


DOCUMENTED_EXPECTATIONS = {
    "BNo_presentation_level": 6,
    "CNo_level_bound": 8,
    "CNx_level_bound": 8,
    "CNoo_level_bound": 16,
}


def und_level_bound(n, d):
    """The U_N^d easiness-level bound, reported as the Bell number of the presentation bound Nd."""
    return bell_bound(n * d)
