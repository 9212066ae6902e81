"""
Exact linear maps T_π at fixed N and the linear algebra the closure engines run on.

A TensorMap from ``upper`` to ``lower`` is an N^|lower| x N^|upper| matrix stored sparsely
as {(row, col): value}. Row and column numbers are base-N encodings of index tuples, the
leftmost tensor factor being the most significant digit, digits starting at 0.

Values live in the sympy domains QQ (rationals) or QQ_I (Gaussian rationals). A map whose
values are all real is always held over QQ, which keeps equality and hashing canonical.
"""
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import reduce
from types import MappingProxyType

import numpy as np
from sympy import sympify
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianElement
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import CoercionFailed

from .errors import ExactnessError, PreconditionError, WordMismatchError
from .partitions import ColoredWord, Partition, _as_word, contractible, join

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# Scalars
# -----------------------------------------------------------------------------
def exact(value):
    """Convert ints, Fractions, sympy numbers and domain elements into QQ_I."""
    try:
        return QQ_I.convert(value)
    except (CoercionFailed, TypeError):
        pass
    try:
        return QQ_I.from_sympy(sympify(value))
    except (CoercionFailed, TypeError, ValueError) as exc:
        raise ExactnessError(f"{value!r} is not a Gaussian rational") from exc


def conjugate_value(value):
    if isinstance(value, GaussianElement):
        return value.new(value.x, -value.y)
    return value


def unify_domains(*domains):
    return QQ_I if any(domain == QQ_I for domain in domains) else QQ


def _lift(value, source, target):
    return value if source == target else target.convert_from(value, source)


def _settle(entries, domain):
    """Drop zeros and demote an all-real QQ_I mapping to QQ."""
    entries = {key: value for key, value in entries.items() if value}
    if domain == QQ_I and all(not value.y for value in entries.values()):
        return {key: value.x for key, value in entries.items()}, QQ
    return entries, domain


def encode(digits, n):
    index = 0
    for digit in digits:
        index = index * n + digit
    return index


def decode(index, length, n):
    digits = [0] * length
    for position in range(length - 1, -1, -1):
        index, digits[position] = divmod(index, n)
    return tuple(digits)


# -----------------------------------------------------------------------------
# TensorMap
# -----------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class TensorMap:
    upper: ColoredWord
    lower: ColoredWord
    n: int
    entries: dict
    domain: object = None

    def __post_init__(self):
        object.__setattr__(self, 'upper', _as_word(self.upper))
        object.__setattr__(self, 'lower', _as_word(self.lower))
        if self.n < 1:
            raise ValueError(f"matrix size must be at least 1, got {self.n}")
        entries = dict(self.entries)
        domain = self.domain
        if domain is None:
            rows, cols = self.shape
            for (row, col) in entries:
                if not (0 <= row < rows and 0 <= col < cols):
                    raise ValueError(f"entry ({row}, {col}) outside shape {self.shape}")
            entries, domain = _settle({key: exact(value) for key, value in entries.items()}, QQ_I)
        object.__setattr__(self, 'entries', MappingProxyType(entries))
        object.__setattr__(self, 'domain', domain)

    @property
    def shape(self):
        return (self.n ** len(self.lower), self.n ** len(self.upper))

    @property
    def context(self):
        return (self.upper, self.lower, self.n)

    @property
    def is_fixed_point(self):
        return len(self.upper) == 0

    def __eq__(self, other):
        if not isinstance(other, TensorMap):
            return NotImplemented
        return self.context == other.context and self.domain == other.domain and dict(self.entries) == dict(other.entries)

    def __hash__(self):
        return hash((self.context, frozenset(self.entries.items())))

    def __bool__(self):
        return bool(self.entries)

    def __repr__(self):
        return f"TensorMap({self.upper}->{self.lower}, n={self.n}, nnz={len(self.entries)}, {self.domain})"


def _same_context(a, b):
    if a.context != b.context:
        raise WordMismatchError(f"maps live on different contexts: {a.context} vs {b.context}")


def build_map(pi, n):
    """
    T_π: the (j-tuple, i-tuple) entry is 1 iff each block of π carries one index value.

    :param pi: Partition
    :param n: matrix size N >= 1
    """
    if n < 1:
        raise ValueError(f"matrix size must be at least 1, got {n}")
    k = pi.k
    labels = pi.labels
    entries = {}
    for values in itertools.product(range(n), repeat=pi.block_count):
        digits = [values[label] for label in labels]
        entries[(encode(digits[k:], n), encode(digits[:k], n))] = QQ.one
    assert len(entries) == n ** pi.block_count, "partition map has the wrong number of nonzero entries"
    return TensorMap(pi.upper, pi.lower, n, entries, QQ)


def compose_maps(a, b):
    """The product b·a of a: upper -> middle and b: middle -> lower."""
    if a.n != b.n or a.lower != b.upper:
        raise WordMismatchError(f"cannot compose {a!r} with {b!r}")
    domain = unify_domains(a.domain, b.domain)
    by_row = defaultdict(list)
    for (row, col), value in a.entries.items():
        by_row[row].append((col, _lift(value, a.domain, domain)))
    product = defaultdict(lambda: domain.zero)
    for (row, middle), value in b.entries.items():
        value = _lift(value, b.domain, domain)
        for col, other in by_row.get(middle, ()):
            product[(row, col)] += value * other
    entries, domain = _settle(product, domain)
    return TensorMap(a.upper, b.lower, a.n, entries, domain)


def tensor_maps(a, b):
    if a.n != b.n:
        raise WordMismatchError(f"cannot tensor maps of sizes {a.n} and {b.n}")
    domain = unify_domains(a.domain, b.domain)
    row_scale, col_scale = b.shape
    entries = {}
    for (ra, ca), va in a.entries.items():
        va = _lift(va, a.domain, domain)
        for (rb, cb), vb in b.entries.items():
            entries[(ra * row_scale + rb, ca * col_scale + cb)] = va * _lift(vb, b.domain, domain)
    return TensorMap(a.upper + b.upper, a.lower + b.lower, a.n, entries, domain)


def adjoint(a):
    """Conjugate transpose; rows swap and colors stay."""
    entries = {(col, row): conjugate_value(value) for (row, col), value in a.entries.items()}
    return TensorMap(a.lower, a.upper, a.n, entries, a.domain)


def transpose_flip(a):
    """The map of the involution: plain transpose with colors switched."""
    entries = {(col, row): value for (row, col), value in a.entries.items()}
    return TensorMap(a.lower.flipped(), a.upper.flipped(), a.n, entries, a.domain)


def add_maps(a, b):
    _same_context(a, b)
    domain = unify_domains(a.domain, b.domain)
    total = defaultdict(lambda: domain.zero)
    for source in (a, b):
        for key, value in source.entries.items():
            total[key] += _lift(value, source.domain, domain)
    entries, domain = _settle(total, domain)
    return TensorMap(a.upper, a.lower, a.n, entries, domain)


def scale_map(a, factor):
    factor = exact(factor)
    if not factor.y:
        factor, domain = factor.x, a.domain
    else:
        domain = QQ_I
    entries = {key: _lift(value, a.domain, domain) * factor for key, value in a.entries.items()}
    entries, domain = _settle(entries, domain)
    return TensorMap(a.upper, a.lower, a.n, entries, domain)


def linear_combination(coefficients, maps):
    maps = list(maps)
    if not maps:
        raise ValueError("linear_combination needs at least one map")
    result = scale_map(maps[0], coefficients[0])
    for coefficient, other in zip(coefficients[1:], maps[1:]):
        result = add_maps(result, scale_map(other, coefficient))
    return result


# -----------------------------------------------------------------------------
# One-row calculus
# -----------------------------------------------------------------------------
def rotate_map(a):
    """
    Reshape a: k -> l into the vector on the one-row word k̄l; the (J, I) entry lands on
    the index tuple (reverse(I), J).
    """
    k, l, n = len(a.upper), len(a.lower), a.n
    scale = n ** l
    entries = {}
    for (row, col), value in a.entries.items():
        flipped = encode(reversed(decode(col, k, n)), n)
        entries[(flipped * scale + row, 0)] = value
    return TensorMap(ColoredWord(), a.upper.conjugate() + a.lower, n, entries, a.domain)


def unrotate_map(v, k):
    """Inverse of ``rotate_map``: the first k one-row factors become the upper row."""
    if not v.is_fixed_point or not 0 <= k <= len(v.lower):
        raise PreconditionError(f"cannot lift {k} factors of {v!r}")
    n, l = v.n, len(v.lower) - k
    scale = n ** l
    entries = {}
    for (index, _), value in v.entries.items():
        head, row = divmod(index, scale)
        entries[(row, encode(reversed(decode(head, k, n)), n))] = value
    return TensorMap(v.lower[:k].conjugate(), v.lower[k:], n, entries, v.domain)


def _require_fixed_point(*maps):
    for v in maps:
        if not v.is_fixed_point:
            raise PreconditionError(f"{v!r} is not in one-row form")


def cyclic_shift_map(v):
    """The last tensor factor moves to the front."""
    _require_fixed_point(v)
    r, n = len(v.lower), v.n
    if r == 0:
        return v
    top = n ** (r - 1)
    entries = {((index % n) * top + index // n, 0): value for (index, _), value in v.entries.items()}
    return TensorMap(ColoredWord(), v.lower[-1:] + v.lower[:-1], n, entries, v.domain)


def reverse_map(v):
    _require_fixed_point(v)
    r, n = len(v.lower), v.n
    entries = {(encode(reversed(decode(index, r, n)), n), 0): value for (index, _), value in v.entries.items()}
    return TensorMap(ColoredWord(), v.lower.reversed(), n, entries, v.domain)


def adjoint_fixed_point(v):
    """One-row image of the conjugate transpose: reversed, color-switched, conjugated."""
    _require_fixed_point(v)
    r, n = len(v.lower), v.n
    entries = {
        (encode(reversed(decode(index, r, n)), n), 0): conjugate_value(value)
        for (index, _), value in v.entries.items()
    }
    return TensorMap(ColoredWord(), v.lower.conjugate(), n, entries, v.domain)


def contract_maps(x, y, c, real=False):
    """
    Linear counterpart of ``partitions.contract``: sum over the last c factors of x, read
    backwards, matched with the first c factors of y.
    """
    _require_fixed_point(x, y)
    if x.n != y.n:
        raise WordMismatchError(f"cannot contract maps of sizes {x.n} and {y.n}")
    if not contractible(x.lower, y.lower, c, real):
        raise WordMismatchError(f"cannot contract {c} factors of {x.lower} with {y.lower}")
    n, a, b = x.n, len(x.lower), len(y.lower)
    domain = unify_domains(x.domain, y.domain)
    inner, outer = n ** c, n ** (b - c)
    by_key = defaultdict(list)
    for (index, _), value in y.entries.items():
        key, suffix = divmod(index, outer)
        by_key[key].append((suffix, _lift(value, y.domain, domain)))
    total = defaultdict(lambda: domain.zero)
    for (index, _), value in x.entries.items():
        prefix, tail = divmod(index, inner)
        key = encode(reversed(decode(tail, c, n)), n)
        value = _lift(value, x.domain, domain)
        for suffix, other in by_key.get(key, ()):
            total[(prefix * outer + suffix, 0)] += value * other
    entries, domain = _settle(total, domain)
    return TensorMap(ColoredWord(), x.lower[:a - c] + y.lower[c:], n, entries, domain)


def trace_legs(a):
    """Partial trace joining the rightmost upper and the rightmost lower factor."""
    if not a.upper or not a.lower or a.upper[-1] != a.lower[-1]:
        raise WordMismatchError(f"cannot trace the last factors of {a!r}")
    n = a.n
    domain = a.domain
    total = defaultdict(lambda: domain.zero)
    for (row, col), value in a.entries.items():
        row_head, row_last = divmod(row, n)
        col_head, col_last = divmod(col, n)
        if row_last == col_last:
            total[(row_head, col_head)] += value
    entries, domain = _settle(total, domain)
    return TensorMap(a.upper[:-1], a.lower[:-1], n, entries, domain)


# -----------------------------------------------------------------------------
# Dense views and JSON
# -----------------------------------------------------------------------------
def to_array(a, exact_entries=False):
    """
    Dense view of a map.

    :param exact_entries: object array of QQ_I elements instead of a complex/float array
    """
    rows, cols = a.shape
    if exact_entries:
        array = np.full((rows, cols), QQ_I.zero, dtype=object)
        for (row, col), value in a.entries.items():
            array[row, col] = _lift(value, a.domain, QQ_I)
        return array
    dtype = complex if a.domain == QQ_I else float
    array = np.zeros((rows, cols), dtype=dtype)
    for (row, col), value in a.entries.items():
        array[row, col] = complex(float(value.x), float(value.y)) if a.domain == QQ_I else float(value)
    return array


def from_array(array, upper, lower, n):
    upper, lower = _as_word(upper), _as_word(lower)
    array = np.asarray(array, dtype=object)
    nonzero = np.vectorize(bool, otypes=[bool])(array) if array.size else np.zeros(array.shape, dtype=bool)
    entries = {(int(row), int(col)): array[row, col] for row, col in zip(*np.nonzero(nonzero))}
    return TensorMap(upper, lower, n, entries)


def _fraction_parts(value):
    return [int(QQ.numer(value)), int(QQ.denom(value))]


def to_json(a):
    triplets = []
    for (row, col), value in sorted(a.entries.items()):
        if a.domain == QQ_I:
            triplets.append([row, col] + _fraction_parts(value.x) + _fraction_parts(value.y))
        else:
            triplets.append([row, col] + _fraction_parts(value))
    return {
        "context": {"upper": a.upper.letters, "lower": a.lower.letters, "n": a.n},
        "triplets": triplets,
    }


def from_json(data):
    context = data["context"]
    entries = {}
    for triplet in data["triplets"]:
        row, col, num, den = triplet[:4]
        value = QQ_I(QQ(num, den), QQ(*triplet[4:6]) if len(triplet) > 4 else QQ.zero)
        entries[(row, col)] = value
    return TensorMap(context["upper"], context["lower"], context["n"], entries)


# -----------------------------------------------------------------------------
# Inner products and span membership
# -----------------------------------------------------------------------------
def gram_entry(pi, sigma, n):
    """⟨T_π, T_σ⟩ = N^{|π ∨ σ|}."""
    return n ** join(pi, sigma).block_count


def inner_product(a, b):
    """Σ conj(a)·b, linear in the second argument."""
    _same_context(a, b)
    domain = unify_domains(a.domain, b.domain)
    total = domain.zero
    small, large = (a, b) if len(a.entries) <= len(b.entries) else (b, a)
    for key, value in small.entries.items():
        other = large.entries.get(key)
        if other is not None:
            left = _lift(a.entries[key], a.domain, domain)
            right = _lift(b.entries[key], b.domain, domain)
            total += conjugate_value(left) * right
    return total


def _solution(rref, pivots, size):
    """Read the solution of an augmented system in rref with free variables at zero."""
    if size in pivots:
        return None
    solution = [rref.domain.zero] * size
    rows = rref.to_list()
    for position, pivot in enumerate(pivots):
        solution[pivot] = rows[position][size]
    return solution


def span_membership(target, basis, backend='echelon'):
    """
    Coefficients expressing ``target`` in the span of ``basis``, or None.

    Free variables are set to zero, so both backends return the same reduced representative.

    :param basis: maps, or partitions whose maps T_π at the target's size span the space; the gram
        backend then reads G from ``gram_entry`` instead of multiplying the maps out
    :param backend: 'echelon' (rref of [B | t]) or 'gram' (solve G x = B* t, accept iff
        ⟨t, t⟩ = ⟨B* t, x⟩)
    """
    basis = list(basis)
    partitions = basis if basis and all(isinstance(member, Partition) for member in basis) else None
    if partitions is not None:
        basis = [build_map(pi, target.n) for pi in partitions]
    for member in basis:
        _same_context(member, target)
    domain = unify_domains(target.domain, *(member.domain for member in basis))
    size = len(basis)
    if backend == 'echelon':
        keys = sorted(set(target.entries).union(*(member.entries for member in basis)))
        position = {key: index for index, key in enumerate(keys)}
        dok = {}
        for column, member in enumerate(basis + [target]):
            for key, value in member.entries.items():
                dok[(position[key], column)] = _lift(value, member.domain, domain)
        matrix = DomainMatrix.from_dok(dok, (len(keys), size + 1), domain)
        rref, pivots = matrix.rref()
        return _solution(rref, pivots, size)
    if backend == 'gram':
        rows = []
        for i, left in enumerate(basis):
            if partitions is not None:
                gram = [domain.convert(gram_entry(partitions[i], sigma, target.n)) for sigma in partitions]
            else:
                gram = [_lift(inner_product(left, right), unify_domains(left.domain, right.domain), domain) for right in basis]
            rows.append(gram + [_lift(inner_product(left, target), unify_domains(left.domain, target.domain), domain)])
        if not rows:
            return [] if not target else None
        rref, pivots = DomainMatrix(rows, (size, size + 1), domain).rref()
        solution = _solution(rref, pivots, size)
        projected = domain.zero
        for row, value in zip(rows, solution):
            projected += conjugate_value(row[size]) * value
        norm = _lift(inner_product(target, target), target.domain, domain)
        return solution if projected == norm else None
    raise ValueError(f"unknown span backend {backend!r}")


# -----------------------------------------------------------------------------
# Group actions
# -----------------------------------------------------------------------------
def _conjugate_array(g):
    if g.dtype == object:
        return np.vectorize(conjugate_value, otypes=[object])(g)
    return np.conj(g)


def colored_power(g, word):
    """g^{⊗w}: g for white letters and the entrywise conjugate for black letters."""
    word = _as_word(word)
    g = np.asarray(g)
    unit = np.array([[QQ_I.one]], dtype=object) if g.dtype == object else np.ones((1, 1), dtype=g.dtype)
    conjugate = _conjugate_array(g) if 'b' in word.letters else None
    return reduce(np.kron, [g if letter == 'o' else conjugate for letter in word], unit)


def intertwines(t, g, upper=None, lower=None, tolerance=1e-8):
    """
    True iff g^{⊗lower}·t = t·g^{⊗upper}; exact for object arrays, tolerance-based otherwise.
    """
    upper = t.upper if upper is None else _as_word(upper)
    lower = t.lower if lower is None else _as_word(lower)
    if (upper, lower) != (t.upper, t.lower):
        raise WordMismatchError(f"words {upper}->{lower} do not match {t!r}")
    g = np.asarray(g)
    if g.shape != (t.n, t.n):
        raise ValueError(f"group element of shape {g.shape} does not act on size {t.n}")
    if g.dtype == object:
        g = np.vectorize(exact, otypes=[object])(g)
        matrix = to_array(t, exact_entries=True)
        left = colored_power(g, lower).dot(matrix)
        right = matrix.dot(colored_power(g, upper))
        return all(exact(x) == exact(y) for x, y in zip(left.flat, right.flat))
    matrix = to_array(t)
    left = colored_power(g, lower) @ matrix
    right = matrix @ colored_power(g, upper)
    scale = max(np.abs(left).max(initial=0.0), np.abs(right).max(initial=0.0), 1.0)
    return float(np.abs(left - right).max(initial=0.0)) <= tolerance * scale


# -----------------------------------------------------------------------------
# Reduced bases
# -----------------------------------------------------------------------------
class SpanBasis:
    """
    Reduced row echelon basis of a subspace of maps on one context.

    Rows are kept as {pivot key: {key: value}} with the pivot coefficient 1 and every other
    row vanishing on each pivot key, so the reduced form is unique for the spanned subspace.
    """

    def __init__(self, upper, lower, n, maps=()):
        self.upper = _as_word(upper)
        self.lower = _as_word(lower)
        self.n = n
        self.domain = QQ
        self.rows = {}
        for member in maps:
            self.add(member)

    @classmethod
    def from_maps(cls, maps, context=None):
        maps = list(maps)
        if context is None:
            if not maps:
                raise ValueError("an empty SpanBasis needs an explicit context")
            context = maps[0].context
        return cls(*context, maps=maps)

    @property
    def context(self):
        return (self.upper, self.lower, self.n)

    @property
    def rank(self):
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def _promote(self, domain):
        if domain == self.domain or domain == QQ:
            return
        self.rows = {
            pivot: {key: _lift(value, self.domain, domain) for key, value in row.items()}
            for pivot, row in self.rows.items()
        }
        self.domain = domain

    def _vector(self, member):
        if member.context != self.context:
            raise WordMismatchError(f"{member!r} does not live on {self.context}")
        self._promote(member.domain)
        return {key: _lift(value, member.domain, self.domain) for key, value in member.entries.items()}

    def _reduce(self, vector):
        for pivot in [key for key in vector if key in self.rows]:
            factor = vector.get(pivot)
            if not factor:
                continue
            for key, value in self.rows[pivot].items():
                updated = vector.get(key, self.domain.zero) - factor * value
                if updated:
                    vector[key] = updated
                else:
                    vector.pop(key, None)
        return vector

    def reduce(self, member):
        """Residual of a map after elimination against the basis, as a map."""
        residual = self._reduce(self._vector(member))
        entries, domain = _settle(residual, self.domain)
        return TensorMap(self.upper, self.lower, self.n, entries, domain)

    def contains(self, member):
        return not self._reduce(self._vector(member))

    def __contains__(self, member):
        return self.contains(member)

    def add(self, member):
        """Insert a map; True iff the rank grew."""
        residual = self._reduce(self._vector(member))
        if not residual:
            return False
        pivot = min(residual)
        scale = residual[pivot]
        residual = {key: value / scale for key, value in residual.items()}
        for row in self.rows.values():
            factor = row.get(pivot)
            if not factor:
                continue
            for key, value in residual.items():
                updated = row.get(key, self.domain.zero) - factor * value
                if updated:
                    row[key] = updated
                else:
                    row.pop(key, None)
        self.rows[pivot] = residual
        return True

    def add_all(self, maps):
        return sum(self.add(member) for member in maps)

    def basis(self):
        found = []
        for pivot in sorted(self.rows):
            entries, domain = _settle(self.rows[pivot], self.domain)
            found.append(TensorMap(self.upper, self.lower, self.n, entries, domain))
        return found

    def copy(self):
        clone = SpanBasis(self.upper, self.lower, self.n)
        clone.domain = self.domain
        clone.rows = {pivot: dict(row) for pivot, row in self.rows.items()}
        return clone

    def issubspace(self, other):
        return all(other.contains(member) for member in self.basis())

    def __eq__(self, other):
        if not isinstance(other, SpanBasis):
            return NotImplemented
        if self.context != other.context or self.rank != other.rank:
            return False
        return set(self.basis()) == set(other.basis())

    __hash__ = None

    def to_json(self):
        return [to_json(member)["triplets"] for member in self.basis()]

    def __repr__(self):
        return f"SpanBasis({self.upper}->{self.lower}, n={self.n}, rank={self.rank})"
