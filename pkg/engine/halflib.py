"""
Half-liberation data: the frames F with F e₀ = ξ/√N, the partial isometry R = F·P, the
conjugated crossing map T in three equivalent forms and the defining relations of the
bistochastic intermediate objects.

Every exact computation runs through RR* = I − J/N, which is rational whatever F is; F itself
is only needed numerically (F-independence, sampling) or over QQ(√N) for exact
bistochastic elements.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import ortho_group
from sympy import sqrt
from sympy.polys.domains import QQ, QQ_I

from .categories import CategoryTable, close_linear, named_table, table_equal
from .config import DEFAULT_CONFIG
from .errors import PreconditionError
from .groups import GroupModel, generators, hyperoctahedral, monomial_elements, samples
from .linmaps import TensorMap, build_map, conjugate_value, decode, encode, intertwines, to_array
from .partitions import ColoredWord, Partition, _as_word, enumerate_partitions, is_refinement, mobius, singleton, words_up_to

logger = logging.getLogger(__name__)

REAL = 'real'
COMPLEX = 'complex'

TARGETS = ('BNo', 'CNo', 'CNx', 'CNoo', 'UNss')


# -----------------------------------------------------------------------------
# Frames
# -----------------------------------------------------------------------------
def householder_matrix(n):
    """The reflection exchanging e₀ and ξ/√n, as a float array."""
    if n < 2:
        raise PreconditionError(f"frames need n >= 2, got {n}")
    root = np.sqrt(n)
    frame = np.eye(n) - 1.0 / (root * (root - 1.0))
    frame[0, :] = 1.0 / root
    frame[:, 0] = 1.0 / root
    return frame


def fourier_matrix(n):
    """Entries w^{jk}/√n with w = e^{2πi/n}."""
    if n < 2:
        raise PreconditionError(f"frames need n >= 2, got {n}")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)


def sqrt_field(n):
    """(K, √n ∈ K): QQ when n is a square, QQ(√n) otherwise."""
    root = sqrt(n)
    if root.is_Rational:
        return QQ, QQ.from_sympy(root)
    field = QQ.algebraic_field(root)
    return field, field.from_sympy(root)


def rr_matrix(n):
    """RR* = I − J/n over QQ, as a dense object array."""
    return np.array([[QQ(int(i == j)) - QQ(1, n) for j in range(n)] for i in range(n)], dtype=object)


def _exact_householder(n):
    field, root = sqrt_field(n)
    inverse = field.one / root
    off = field.one / (root * (root - field.one))
    frame = np.full((n, n), field.zero, dtype=object)
    for i in range(n):
        for j in range(n):
            if i == 0 or j == 0:
                frame[i, j] = inverse
            else:
                frame[i, j] = (field.one if i == j else field.zero) - off
    return field, frame


def _exact_fourier(n):
    if n == 2:
        field, frame = _exact_householder(2)
        return field, frame
    if n == 4:
        powers = (QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1))
        half = QQ_I(QQ(1, 2), 0)
        frame = np.array([[powers[(j * k) % 4] * half for k in range(n)] for j in range(n)], dtype=object)
        return QQ_I, frame
    return None, None


@dataclass(eq=False)
class IsometryPair:
    n: int
    flavor: str
    F: np.ndarray
    R: np.ndarray
    field: Optional[object] = None
    F_exact: Optional[np.ndarray] = None

    @property
    def exact(self):
        return self.F_exact is not None

    @property
    def rr(self):
        return rr_matrix(self.n)

    def check(self, tolerance=1e-10):
        """
        The frame invariants: orthonormal columns, first column ξ/√n and RR* = I − J/n.

        Exact whenever the frame has exact entries, within ``tolerance`` otherwise.
        """
        n = self.n
        found = {"n": n, "flavor": self.flavor, "exact": self.exact}
        if self.exact:
            frame = self.F_exact
            adjoint = np.vectorize(conjugate_value, otypes=[object])(frame).T
            gram = adjoint.dot(frame)
            one, zero = self.field.one, self.field.zero
            found["orthonormal"] = all(gram[i, j] == (one if i == j else zero) for i in range(n) for j in range(n))
            first = one / sqrt_field(n)[1] if self.field != QQ_I else QQ_I(QQ(1, 2), 0)
            found["first_column"] = all(frame[i, 0] == first for i in range(n))
            projector = np.full((n, n), zero, dtype=object)
            for i in range(1, n):
                projector[i, i] = one
            r = frame.dot(projector)
            product = r.dot(np.vectorize(conjugate_value, otypes=[object])(r).T)
            expected = self.rr
            found["rr"] = all(product[i, j] == self.field.convert_from(expected[i, j], QQ) for i in range(n) for j in range(n))
        else:
            found["orthonormal"] = bool(np.allclose(self.F.conj().T @ self.F, np.eye(n), atol=tolerance))
            found["first_column"] = bool(np.allclose(self.F[:, 0], 1 / np.sqrt(n), atol=tolerance))
            expected = np.eye(n) - np.ones((n, n)) / n
            found["rr"] = bool(np.allclose(self.R @ self.R.conj().T, expected, atol=tolerance))
        found["holds"] = found["orthonormal"] and found["first_column"] and found["rr"]
        return found


def build_F(n, flavor=REAL):
    """
    :param flavor: 'real' (Householder reflection) or 'complex' (discrete Fourier matrix)
    """
    if n < 2:
        raise PreconditionError(f"frames need n >= 2, got {n}")
    if flavor == REAL:
        frame = householder_matrix(n)
        field, exact = _exact_householder(n)
    elif flavor == COMPLEX:
        frame = fourier_matrix(n)
        field, exact = _exact_fourier(n)
        if exact is None:
            logger.info("the Fourier frame at n=%d is floating point only", n)
    else:
        raise ValueError(f"unknown frame flavor {flavor!r}")
    projector = np.eye(n)
    projector[0, 0] = 0.0
    return IsometryPair(n, flavor, frame, frame @ projector, field, exact)


def frame_from_matrix(matrix):
    """Wrap any unitary whose first column is ξ/√n."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if not np.allclose(matrix[:, 0], 1 / np.sqrt(n), atol=1e-10):
        raise PreconditionError("the first column of a frame must be ξ/√n")
    projector = np.eye(n)
    projector[0, 0] = 0.0
    flavor = COMPLEX if np.iscomplexobj(matrix) else REAL
    return IsometryPair(n, flavor, matrix, matrix @ projector)


def random_frame(n, seed):
    """A seeded orthogonal frame: Householder times a random rotation fixing e₀."""
    rng = np.random.default_rng(seed)
    block = np.eye(n)
    if n > 2:
        block[1:, 1:] = ortho_group.rvs(n - 1, random_state=rng)
    elif rng.random() < 0.5:
        block[1, 1] = -1.0
    return frame_from_matrix(householder_matrix(n) @ block)


# -----------------------------------------------------------------------------
# The crossing maps
# -----------------------------------------------------------------------------
def _permutation(legs):
    if legs == 3:
        return (2, 1, 0)
    if legs == 4:
        return (2, 3, 0, 1)
    raise PreconditionError(f"the conjugated crossing has 3 or 4 legs, got {legs}")


def _relation_words(legs, colors):
    upper = ColoredWord.white(legs) if colors is None else _as_word(colors)
    if len(upper) != legs:
        raise PreconditionError(f"colors {upper} do not have {legs} letters")
    lower = ColoredWord(''.join(upper[position] for position in _permutation(legs)))
    return upper, lower


def crossing_partition(legs, colors=None):
    """The pairing sending upper leg m to the lower position carrying it: /|\\ or //\\\\."""
    upper, lower = _relation_words(legs, colors)
    order = _permutation(legs)
    return Partition(upper, lower, tuple((source, legs + position) for position, source in enumerate(order)))


def t_conjugated(pair, legs=3, colors=None):
    """
    R^{⊗}·T·R^{*⊗} computed as (RR*)^{⊗}·T: the (J, I) entry is Π_m (δ − 1/n)(J_m, I_{σ(m)}).

    :param pair: IsometryPair or the size n
    """
    n = pair if isinstance(pair, int) else pair.n
    upper, lower = _relation_words(legs, colors)
    order = _permutation(legs)
    rr = rr_matrix(n)
    tuples = [decode(index, legs, n) for index in range(n ** legs)]
    entries = {}
    for col, source in enumerate(tuples):
        moved = [source[position] for position in order]
        for row, target in enumerate(tuples):
            value = QQ.one
            for a, b in zip(target, moved):
                value *= rr[a, b]
            entries[(row, col)] = value
    return TensorMap(upper, lower, n, {key: value for key, value in entries.items() if value}, QQ)


def t_conjugated_numeric(pair, legs=3, colors=None):
    """The literal floating-point product R^{⊗}·T·R^{*⊗}, black factors using R̄."""
    upper, lower = _relation_words(legs, colors)
    n = pair.n
    permutation = np.zeros((n ** legs, n ** legs))
    order = _permutation(legs)
    for col in range(n ** legs):
        source = decode(col, legs, n)
        permutation[encode([source[position] for position in order], n), col] = 1.0

    def power(word):
        factors = [pair.R if letter == 'o' else pair.R.conj() for letter in word]
        result = np.ones((1, 1))
        for factor in factors:
            result = np.kron(result, factor)
        return result

    return power(lower) @ permutation @ power(upper).conj().T


def t_explicit(n, legs=3):
    """
    Each factor e_m of the permuted basis vector is kept or replaced by −ξ' (ξ' = ξ/n); the
    2^legs terms are added literally.
    """
    if n < 2:
        raise PreconditionError(f"t_explicit needs n >= 2, got {n}")
    order = _permutation(legs)
    upper, lower = _relation_words(legs, None)
    total = {}
    for col in range(n ** legs):
        source = decode(col, legs, n)
        moved = [source[position] for position in order]
        for replaced in itertools.product((False, True), repeat=legs):
            weight = QQ((-1) ** sum(replaced), n ** sum(replaced))
            choices = [range(n) if flag else (value,) for flag, value in zip(replaced, moved)]
            for target in itertools.product(*choices):
                key = (encode(target, n), col)
                total[key] = total.get(key, QQ.zero) + weight
    return TensorMap(upper, lower, n, {key: value for key, value in total.items() if value}, QQ)


def t_mobius(n, legs=3, base=None):
    """
    Σ_{π ≤ base} μ(π, base)·n^{−b(π)}·T_π, b(π) the number of pairs of base broken into two
    singletons; π runs over the refinements of the pairing ``base``.
    """
    base = crossing_partition(legs) if base is None else base
    if any(len(block) != 2 for block in base.blocks):
        raise PreconditionError(f"the Möbius form needs a pairing, got blocks {base.blocks}")
    total = None
    terms = 0
    for pi in enumerate_partitions(base.upper, base.lower):
        if not is_refinement(pi, base):
            continue
        broken = pi.block_count - base.block_count
        weight = QQ(mobius(pi, base), n ** broken)
        term = build_map(pi, n)
        scaled = {key: value * weight for key, value in term.entries.items()}
        if total is None:
            total = dict(scaled)
        else:
            for key, value in scaled.items():
                total[key] = total.get(key, QQ.zero) + value
        terms += 1
    logger.debug("Möbius form of %s at n=%d has %d terms", base.blocks, n, terms)
    return TensorMap(base.upper, base.lower, n, {key: value for key, value in total.items() if value}, QQ)


def triple_equality(n, legs=3):
    """Exact comparison of the conjugated, explicit and Möbius forms."""
    conjugated = t_conjugated(n, legs)
    explicit = t_explicit(n, legs)
    moebius = t_mobius(n, legs)
    return {
        "n": n,
        "legs": legs,
        "conjugated_equals_explicit": conjugated == explicit,
        "explicit_equals_mobius": explicit == moebius,
        "holds": conjugated == explicit == moebius,
    }


def frame_independence(n, legs=3, seed=None, tolerance=1e-10):
    """Maximal entry gap between t_conjugated_numeric for Householder and a random frame."""
    seed = DEFAULT_CONFIG.seed if seed is None else seed
    first = t_conjugated_numeric(build_F(n, REAL), legs)
    second = t_conjugated_numeric(random_frame(n, seed), legs)
    gap = float(np.abs(first - second).max())
    return {"n": n, "legs": legs, "seed": seed, "gap": gap, "holds": gap <= tolerance}


# -----------------------------------------------------------------------------
# Relations
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class Relation:
    target: str
    t: TensorMap

    @property
    def upper(self):
        return self.t.upper

    @property
    def lower(self):
        return self.t.lower


def emit_relations(target, n):
    """The defining intertwiner relations of a bistochastic intermediate object at size n."""
    if target == 'BNo':
        return [Relation(target, t_conjugated(n, 3))]
    if target == 'CNo':
        return [Relation(target, t_conjugated(n, 3, ''.join(letters)))
                for letters in itertools.product('ob', repeat=3)]
    if target == 'CNx':
        return [Relation(target, t_conjugated(n, 3, 'obo'))]
    if target == 'CNoo':
        return [Relation(target, t_conjugated(n, 4, colors)) for colors in ('obob', 'obbo')]
    if target == 'UNss':
        return [Relation(target, build_map(crossing_partition(4, colors), n)) for colors in ('obob', 'obbo')]
    raise ValueError(f"unknown relation target {target!r}; known: {', '.join(TARGETS)}")


def _classical_model(target, n):
    if target == 'BNo':
        return GroupModel('BN', n)
    if target == 'UNss':
        return GroupModel('UN', n)
    return GroupModel('CN', n)


def relation_compliance(target, n, count=None, seed=None, tolerance=1e-8):
    """Check every emitted relation against seeded samples of the classical group."""
    count = DEFAULT_CONFIG.samples if count is None else count
    seed = DEFAULT_CONFIG.seed if seed is None else seed
    relations = emit_relations(target, n)
    model = _classical_model(target, n)
    failures = []
    for index, g in enumerate(samples(model, count, seed)):
        for relation in relations:
            if not intertwines(relation.t, g, tolerance=tolerance):
                failures.append({"sample": index, "upper": relation.upper.letters, "lower": relation.lower.letters})
    return {
        "target": target,
        "group": model.label,
        "n": n,
        "relations": len(relations),
        "samples": count,
        "seed": seed,
        "tolerance": tolerance,
        "failures": failures[:10],
        "holds": not failures,
    }


def exact_bistochastic_elements(n, generators_only=True):
    """
    Elements F·diag(1, h)·Fᵀ of B_N for signed permutation matrices h of size n − 1, as object
    arrays over QQ(√n) (QQ when n is a square).
    """
    if n < 3:
        raise PreconditionError(f"exact bistochastic elements need n >= 3, got {n}")
    field, frame = _exact_householder(n)
    inner = hyperoctahedral(n - 1)
    pool = generators(inner) if generators_only else monomial_elements(inner)
    found = []
    for element in pool:
        block = np.full((n, n), field.zero, dtype=object)
        block[0, 0] = field.one
        for col, (row, e) in enumerate(zip(element.perm, element.exps)):
            block[row + 1, col + 1] = field.one if e % 2 == 0 else -field.one
        found.append(frame.dot(block).dot(frame.T))
    return field, found


def exact_compliance(n, generators_only=True):
    """The B_N relation checked exactly against the elements of ``exact_bistochastic_elements``."""
    field, pool = exact_bistochastic_elements(n, generators_only)
    t = to_array(t_conjugated(n, 3), exact_entries=True)
    t = np.vectorize(lambda value: field.convert_from(value.x, QQ), otypes=[object])(t)
    failures = 0
    for g in pool:
        power = np.kron(np.kron(g, g), g)
        if not np.all(power.dot(t) == t.dot(power)):
            failures += 1
    return {"n": n, "field": str(field), "elements": len(pool), "failures": failures, "holds": failures == 0}


def relation_envelope(target, n, bound):
    """
    Partitions whose maps lie in the tensor category generated by the singleton and the
    relation maps of ``target`` (real targets only), within ``bound`` legs.
    """
    if target != 'BNo':
        raise PreconditionError(f"relation envelopes are computed for BNo only, got {target}")
    seeds = [build_map(singleton(), n)]
    seeds += [relation.t for relation in emit_relations(target, n)]
    closed = close_linear(seeds, n, bound, real=True)
    cells = {}
    for word in words_up_to(bound, real=True):
        span = closed.fixed_cell(word)
        cells[word] = frozenset(rho for rho in enumerate_partitions('', word) if span.contains(build_map(rho, n)))
    table = CategoryTable(bound=bound, cells=cells, real=True, status=closed.status)
    comparison = table_equal(table, named_table('NC12', bound, real=True))
    return {"table": table, "expected": "NC12", "comparison": comparison}

