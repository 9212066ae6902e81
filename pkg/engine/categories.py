"""
Bounded closures of categories of partitions and of tensor categories of linear maps.

Tables are held in one-row form: the cell of a word w is D(∅, w) (or C(∅, w)), and any
two-row cell (k, l) is read off the one-row cell of k̄l by rotation. The closure runs on the
one-row calculus (cyclic shifts, reversal, adjoint and contraction), which generates the same
category as tensor, composition, involution and rotation on two-row diagrams.

In ``real`` mode all words are white and colors are ignored; this serves color-blind
categories such as P, P2 or NC12.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

from .errors import PreconditionError, WordMismatchError
from .linmaps import (
    SpanBasis, TensorMap, adjoint_fixed_point, build_map, contract_maps, cyclic_shift_map,
    reverse_map, rotate_map, to_json as map_to_json, unrotate_map,
)
from .partitions import (
    CategoryName, ColoredWord, Partition, _as_word, contract, contractible, cup, cyclic_shift,
    enumerate_partitions, format_partition, from_fixed_point, reverse, to_fixed_point, words_up_to,
)

logger = logging.getLogger(__name__)

STABLE_WITHIN_BOUND = 'stable_within_bound'
TRUNCATED_BY_BOUND = 'truncated_by_bound'

PARTITION = 'partition'
LINEAR = 'linear'


@dataclass
class CategoryTable:
    bound: int
    cells: dict
    kind: str = PARTITION
    n: Optional[int] = None
    real: bool = False
    status: str = STABLE_WITHIN_BOUND
    generations: int = 0
    dropped: int = 0

    def key(self, word):
        word = _as_word(word)
        return ColoredWord.white(len(word)) if self.real else word

    def words(self):
        return sorted(self.cells, key=lambda word: word.sort_key)

    def fixed_cell(self, word):
        """The one-row cell of ``word``: a frozenset of partitions or a SpanBasis."""
        word = _as_word(word)
        if len(word) > self.bound:
            raise PreconditionError(f"word {word} exceeds the table bound {self.bound}")
        found = self.cells.get(self.key(word))
        if found is None:
            return frozenset() if self.kind == PARTITION else SpanBasis('', word, self.n)
        if self.real and self.key(word) != word:
            if self.kind == PARTITION:
                return frozenset(Partition(ColoredWord(), word, rho.blocks) for rho in found)
            return SpanBasis('', word, self.n, [_recolor(v, word) for v in found.basis()])
        return found

    def cell(self, upper, lower):
        """The two-row cell (upper, lower), read off the one-row cell of upper̄·lower."""
        upper, lower = _as_word(upper), _as_word(lower)
        fixed = self.fixed_cell(upper.conjugate() + lower)
        k = len(upper)
        if self.kind == PARTITION:
            return frozenset(_repaint(from_fixed_point(rho, k), upper, lower) for rho in fixed)
        return SpanBasis(upper, lower, self.n, [_repaint_map(unrotate_map(v, k), upper, lower) for v in fixed.basis()])

    def size(self, word):
        found = self.fixed_cell(word)
        return len(found) if self.kind == PARTITION else found.rank

    def sizes(self):
        return {word.letters: self.size(word) for word in self.words()}

    def to_json(self):
        cells = {}
        for word in self.words():
            found = self.cells[word]
            if self.kind == PARTITION:
                cells[f"|{word}"] = [format_partition(rho) for rho in sorted(found, key=lambda rho: rho.blocks)]
            else:
                cells[f"|{word}"] = found.to_json()
        return {
            "bound": self.bound,
            "kind": self.kind,
            "n": self.n,
            "real": self.real,
            "status": self.status,
            "generations": self.generations,
            "dropped": self.dropped,
            "cells": cells,
        }


def _repaint(pi, upper, lower):
    # rotation in real mode yields black letters; the cell is color-blind
    if pi.upper == upper and pi.lower == lower:
        return pi
    return Partition(upper, lower, pi.blocks)


def _repaint_map(a, upper, lower):
    if a.upper == upper and a.lower == lower:
        return a
    return TensorMap(upper, lower, a.n, dict(a.entries), a.domain)


def _recolor(v, word):
    return TensorMap(ColoredWord(), word, v.n, dict(v.entries), v.domain)


def _whiten_partition(rho):
    return Partition(ColoredWord(), ColoredWord.white(rho.l), rho.blocks)


# -----------------------------------------------------------------------------
# Closure algebras
# -----------------------------------------------------------------------------
class _PartitionAlgebra:
    kind = PARTITION

    def __init__(self, bound, real):
        self.bound = bound
        self.real = real
        self.cells = {word: set() for word in words_up_to(bound, real)}

    def normalize(self, rho):
        return _whiten_partition(rho) if self.real else rho

    def word(self, rho):
        return rho.lower

    def order(self, rho):
        return (rho.lower.sort_key, rho.blocks)

    def insert(self, rho):
        cell = self.cells[rho.lower]
        if rho in cell:
            return False
        cell.add(rho)
        return True

    def unary(self, rho):
        images = []
        shifted = rho
        for _ in range(max(rho.l - 1, 0)):
            shifted = cyclic_shift(shifted)
            images.append(shifted)
        images.append(reverse(rho))
        images.append(Partition(ColoredWord(), rho.lower.conjugate(), reverse(rho).blocks))
        return images

    def contract(self, x, y, c):
        return contract(x, y, c, self.real)[0]

    def freeze(self):
        return {word: frozenset(cell) for word, cell in self.cells.items()}


class _LinearAlgebra:
    kind = LINEAR

    def __init__(self, bound, real, n):
        self.bound = bound
        self.real = real
        self.n = n
        self.cells = {word: SpanBasis('', word, n) for word in words_up_to(bound, real)}

    def normalize(self, v):
        if self.real and 'b' in v.lower.letters:
            return _recolor(v, ColoredWord.white(len(v.lower)))
        return v

    def word(self, v):
        return v.lower

    def order(self, v):
        return v.lower.sort_key

    def insert(self, v):
        return self.cells[v.lower].add(v)

    def unary(self, v):
        images = []
        shifted = v
        for _ in range(max(len(v.lower) - 1, 0)):
            shifted = cyclic_shift_map(shifted)
            images.append(shifted)
        images.append(reverse_map(v))
        images.append(adjoint_fixed_point(v))
        return images

    def contract(self, x, y, c):
        return contract_maps(x, y, c, self.real)

    def freeze(self):
        return dict(self.cells)


def _contractions(algebra, x, y):
    a, b = len(algebra.word(x)), len(algebra.word(y))
    low = max(0, -(-(a + b - algebra.bound) // 2))
    results = []
    for c in range(low, min(a, b) + 1):
        if contractible(algebra.word(x), algebra.word(y), c, algebra.real):
            results.append(algebra.contract(x, y, c))
    return results


def _close(algebra, seeds):
    """Semi-naive fixed point: every newly inserted member meets every member once."""
    dropped = 0
    frontier = []
    for seed in seeds:
        seed = algebra.normalize(seed)
        if len(algebra.word(seed)) > algebra.bound:
            dropped += 1
            continue
        if algebra.insert(seed):
            frontier.append(seed)
    truncated = dropped > 0
    if truncated:
        logger.warning("%d generators exceed the leg bound %d and were dropped", dropped, algebra.bound)
    members = []
    generations = 0
    while frontier:
        generations += 1
        frontier.sort(key=algebra.order)
        start = len(members)
        members.extend(frontier)
        produced = []
        for offset, x in enumerate(frontier):
            produced.extend(algebra.unary(x))
            for y in members[:start + offset + 1]:
                produced.extend(_contractions(algebra, x, y))
                if y is not x:
                    produced.extend(_contractions(algebra, y, x))
        fresh = []
        for item in produced:
            item = algebra.normalize(item)
            if algebra.insert(item):
                fresh.append(item)
        logger.debug("generation %d: %d fresh members", generations, len(fresh))
        frontier = fresh
    return algebra.freeze(), generations, dropped, truncated


def _fixed_point_seeds(real):
    seeds = [Partition(ColoredWord(), ColoredWord(), ())]
    seeds += [cup('oo')] if real else [cup('ob'), cup('bo')]
    return seeds


def close_partitions(generators, bound, real=False):
    """
    Least family containing the generators, identities and duality cups, stable under the
    category operations within ``bound`` legs.

    :param generators: iterable of Partition, any (k, l)
    :param bound: max total legs L >= 2
    :param real: ignore colors
    """
    if bound < 2:
        raise PreconditionError(f"closure bound must be at least 2, got {bound}")
    seeds = _fixed_point_seeds(real) + [to_fixed_point(pi) for pi in generators]
    cells, generations, dropped, truncated = _close(_PartitionAlgebra(bound, real), seeds)
    return CategoryTable(
        bound=bound,
        cells=cells,
        kind=PARTITION,
        real=real,
        status=TRUNCATED_BY_BOUND if truncated else STABLE_WITHIN_BOUND,
        generations=generations,
        dropped=dropped,
    )


def _generator_maps(generators):
    if isinstance(generators, CategoryTable):
        if generators.kind != LINEAR:
            raise PreconditionError("close_linear needs a linear table or maps")
        return [v for word in generators.words() for v in generators.cells[word].basis()]
    if isinstance(generators, dict):
        found = []
        for cell in generators.values():
            found.extend(cell.basis() if isinstance(cell, SpanBasis) else cell)
        return found
    return list(generators)


def close_linear(generators, n, bound, real=False):
    """
    Least tensor category of maps at size n containing the generators, within ``bound``.

    :param generators: a linear CategoryTable, a mapping word -> SpanBasis/maps, or maps
    """
    if bound < 2:
        raise PreconditionError(f"closure bound must be at least 2, got {bound}")
    maps = _generator_maps(generators)
    for v in maps:
        if v.n != n:
            raise WordMismatchError(f"generator {v!r} does not live at size {n}")
    seeds = [build_map(pi, n) for pi in _fixed_point_seeds(real)]
    seeds += [v if v.is_fixed_point else rotate_map(v) for v in maps]
    cells, generations, dropped, truncated = _close(_LinearAlgebra(bound, real, n), seeds)
    return CategoryTable(
        bound=bound,
        cells=cells,
        kind=LINEAR,
        n=n,
        real=real,
        status=TRUNCATED_BY_BOUND if truncated else STABLE_WITHIN_BOUND,
        generations=generations,
        dropped=dropped,
    )


def named_table(category, bound, real=None):
    """Table of a named category by filtering one-row enumerations."""
    category = CategoryName.parse(category)
    real = category.color_blind if real is None else real
    cells = {
        word: frozenset(rho for rho in enumerate_partitions('', word) if category.contains(rho, real))
        for word in words_up_to(bound, real)
    }
    return CategoryTable(bound=bound, cells=cells, kind=PARTITION, real=real)


def span_table(table, n):
    """Linear table spanned by the maps of a partition table."""
    if table.kind != PARTITION:
        raise PreconditionError("span_table needs a partition table")
    cells = {}
    for word in table.words():
        basis = SpanBasis('', word, n)
        for rho in sorted(table.cells[word], key=lambda rho: rho.blocks):
            basis.add(build_map(rho, n))
        cells[word] = basis
    return CategoryTable(
        bound=table.bound, cells=cells, kind=LINEAR, n=n, real=table.real,
        status=table.status, generations=table.generations, dropped=table.dropped,
    )


# -----------------------------------------------------------------------------
# Comparison
# -----------------------------------------------------------------------------
@dataclass
class TableComparison:
    equal: bool
    cell: Optional[str] = None
    witness: Optional[object] = None
    side: Optional[str] = None
    sizes: dict = field(default_factory=dict)

    def __bool__(self):
        return self.equal

    def to_json(self):
        witness = self.witness
        if isinstance(witness, Partition):
            witness = format_partition(witness)
        elif isinstance(witness, TensorMap):
            witness = map_to_json(witness)
        return {"equal": self.equal, "cell": self.cell, "witness": witness, "side": self.side}


def _check_comparable(a, b):
    if a.bound != b.bound:
        raise PreconditionError(f"tables have different bounds: {a.bound} vs {b.bound}")
    if a.kind != b.kind or a.real != b.real or a.n != b.n:
        raise PreconditionError("tables differ in kind, size or color mode")


def _first_outside(left, right, kind):
    if kind == PARTITION:
        extra = sorted(left - right, key=lambda rho: rho.blocks)
        return extra[0] if extra else None
    for v in left.basis():
        if not right.contains(v):
            return v
    return None


def table_equal(a, b):
    """Cellwise equality; on failure the smallest differing cell and a witness in it."""
    _check_comparable(a, b)
    for word in a.words():
        left, right = a.cells[word], b.cells[word]
        witness = _first_outside(left, right, a.kind)
        if witness is not None:
            return TableComparison(False, f"|{word}", witness, 'left', {"left": a.size(word), "right": b.size(word)})
        witness = _first_outside(right, left, a.kind)
        if witness is not None:
            return TableComparison(False, f"|{word}", witness, 'right', {"left": a.size(word), "right": b.size(word)})
    return TableComparison(True)


def table_contains(small, large):
    """Cellwise containment small ⊂ large, with a witness cell when it fails."""
    _check_comparable(small, large)
    for word in small.words():
        witness = _first_outside(small.cells[word], large.cells[word], small.kind)
        if witness is not None:
            return TableComparison(False, f"|{word}", witness, 'left')
    return TableComparison(True)


def linear_from_cells(cells, n, bound, real=False):
    """Linear table holding given one-row SpanBasis cells, the missing words empty."""
    filled = {word: SpanBasis('', word, n) for word in words_up_to(bound, real)}
    for word, basis in cells.items():
        filled[_as_word(word)] = basis
    return CategoryTable(bound=bound, cells=filled, kind=LINEAR, n=n, real=real)
