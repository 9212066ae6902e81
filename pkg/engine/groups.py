"""
Matrix-group models at fixed N and their intertwiner spaces.

Reflection-type groups (S_N, H_N^s, H_N^{s,d}, explicit monomial groups) are held as monomial
elements (permutation, exponents mod s): column j carries ζ_s^{e_j} at row σ(j). Their fixed
spaces come out exactly by phase propagation over the generators, or by averaging over all
elements. Continuous groups (O_N, U_N, U_N^d, B_N, C_N, conjugated models) are sampled from
their Haar measure with a seeded numpy Generator and get numeric fixed spaces.
"""
import itertools
import json
import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.linalg import eigh
from scipy.stats import ortho_group, unitary_group
from sympy.polys.domains import QQ, QQ_I

from .config import DEFAULT_CONFIG
from .errors import BudgetExceededError, ExactnessError, PreconditionError
from .linmaps import (
    SpanBasis, TensorMap, _settle, colored_power, decode, encode, exact, rotate_map, to_array, unrotate_map,
)
from .partitions import ColoredWord, _as_word

logger = logging.getLogger(__name__)

MONOMIAL_KINDS = ('SN', 'HNs', 'HNsd', 'Finite', 'trivial')
SAMPLED_KINDS = ('ON', 'UN', 'UNd', 'BN', 'CN', 'Conjugated')

EXACT_AVERAGE = 'exact_average'
GENERATOR_CHECK = 'generator_check'
SAMPLED = 'sampled'

_I_POWERS = (QQ_I(1, 0), QQ_I(0, 1), QQ_I(-1, 0), QQ_I(0, -1))


def root_of_unity(s, e):
    """ζ_s^e as a QQ_I element; only the fourth roots of unity are available exactly."""
    e %= s
    if (4 * e) % s:
        raise ExactnessError(f"ζ_{s}^{e} is not a Gaussian rational")
    return _I_POWERS[(4 * e) // s]


@dataclass(frozen=True)
class MonomialElement:
    perm: tuple
    exps: tuple
    order: int = 1

    @property
    def n(self):
        return len(self.perm)

    def compose(self, other):
        """self·other."""
        perm = tuple(self.perm[other.perm[j]] for j in range(other.n))
        exps = tuple((other.exps[j] + self.exps[other.perm[j]]) % self.order for j in range(other.n))
        return MonomialElement(perm, exps, self.order)

    def determinant_exponent(self):
        """(sign of σ, Σe): det = sign·ζ^{Σe}."""
        sign = 1
        seen = [False] * self.n
        for start in range(self.n):
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = self.perm[j]
                length += 1
            if length and length % 2 == 0:
                sign = -sign
        return sign, sum(self.exps) % self.order

    def act(self, index, word, n):
        """g^{⊗w} e_I = ζ^χ e_J; returns (J, χ)."""
        digits = decode(index, len(word), n)
        phase = 0
        for digit, letter in zip(digits, word):
            phase += self.exps[digit] if letter == 'o' else -self.exps[digit]
        return encode([self.perm[digit] for digit in digits], n), phase % self.order

    def trace_exponents(self, size):
        return [self.exps[i] for i in range(size) if self.perm[i] == i]

    def to_exact(self):
        matrix = np.full((self.n, self.n), QQ_I.zero, dtype=object)
        for j in range(self.n):
            matrix[self.perm[j], j] = root_of_unity(self.order, self.exps[j])
        return matrix

    def to_numeric(self):
        matrix = np.zeros((self.n, self.n), dtype=complex)
        for j in range(self.n):
            matrix[self.perm[j], j] = np.exp(2j * np.pi * self.exps[j] / self.order)
        return matrix


@dataclass(eq=False)
class GroupModel:
    kind: str
    n: int
    s: int = 1
    d: int = 1
    elements: Optional[tuple] = None
    base: Optional['GroupModel'] = None
    frame: Optional[object] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in MONOMIAL_KINDS + SAMPLED_KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"matrix size must be at least 1, got {self.n}")
        if self.kind in ('HNs', 'HNsd') and self.s < 1:
            raise ValueError("the cyclic order s must be positive")
        if self.kind == 'HNsd' and (self.d % 2 or math.lcm(2, self.s) % self.d):
            raise ValueError(f"H_N^(s,d) needs 2 | d | lcm(2, s), got s={self.s}, d={self.d}")
        if self.kind == 'UNd' and self.d < 1:
            raise ValueError("U_N^d needs d >= 1")
        if self.kind in ('BN', 'CN') and self.n < 2:
            raise ValueError("bistochastic models need N >= 2")
        if self.kind == 'Finite':
            if not self.elements:
                raise ValueError("a Finite group needs its element list")
            self.elements = tuple(_as_monomial(matrix) for matrix in self.elements)
            self.s = self.elements[0].order
        if self.kind == 'Conjugated' and (self.base is None or self.frame is None):
            raise ValueError("a Conjugated group needs a base group and a frame")

    @property
    def exact(self):
        return self.kind in MONOMIAL_KINDS

    @property
    def label(self):
        if self.kind == 'HNs':
            return f"H_{self.n}^{self.s}"
        if self.kind == 'HNsd':
            return f"H_{self.n}^({self.s},{self.d})"
        if self.kind == 'UNd':
            return f"U_{self.n}^{self.d}"
        return f"{self.kind}({self.n})"

    @property
    def order(self):
        """Group order for finite kinds."""
        n, s, d = self.n, self.s, self.d
        if self.kind == 'SN':
            return math.factorial(n)
        if self.kind == 'HNs':
            return math.factorial(n) * s ** n
        if self.kind == 'HNsd':
            return math.factorial(n) * s ** (n - 1) * math.gcd(s, d)
        if self.kind == 'trivial':
            return 1
        if self.kind == 'Finite':
            return len(self.elements)
        raise PreconditionError(f"{self.label} is not finite")


def _as_monomial(matrix):
    if isinstance(matrix, MonomialElement):
        return matrix
    matrix = np.asarray(matrix, dtype=object)
    n = matrix.shape[0]
    perm, exps = [None] * n, [0] * n
    for row in range(n):
        for col in range(n):
            value = exact(matrix[row, col])
            if not value:
                continue
            if perm[col] is not None or value not in _I_POWERS:
                raise ValueError("Finite elements must be monomial with entries in {±1, ±i}")
            perm[col], exps[col] = row, _I_POWERS.index(value)
    if None in perm or sorted(perm) != list(range(n)):
        raise ValueError("Finite elements must be monomial matrices")
    return MonomialElement(tuple(perm), tuple(exps), 4)


# -----------------------------------------------------------------------------
# Constructors and specs
# -----------------------------------------------------------------------------
def symmetric(n):
    return GroupModel('SN', n)


def hyperoctahedral(n, s=2):
    return GroupModel('HNs', n, s=s)


def reflection(n, s, d):
    return GroupModel('HNsd', n, s=s, d=d)


def trivial(n):
    return GroupModel('trivial', n)


def parse_group_spec(spec):
    """
    :param spec: dict or JSON text such as {"kind": "HNsd", "N": 3, "s": 4, "d": 2}
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed group spec: {exc}") from exc
    if not isinstance(spec, dict) or 'kind' not in spec or 'N' not in spec:
        raise ValueError("a group spec needs 'kind' and 'N'")
    kind, n = spec['kind'], int(spec['N'])
    if kind == 'Finite':
        elements = tuple(np.array(matrix, dtype=object) for matrix in spec.get('elements', ()))
        return GroupModel('Finite', n, elements=elements)
    if kind == 'Conjugated':
        return GroupModel('Conjugated', n, base=parse_group_spec(spec['base']), frame=spec.get('frame', 'householder'))
    return GroupModel(kind, n, s=int(spec.get('s', 1)), d=int(spec.get('d', 1)))


def group_spec(g):
    spec = {"kind": g.kind, "N": g.n}
    if g.kind in ('HNs', 'HNsd'):
        spec["s"] = g.s
    if g.kind in ('HNsd', 'UNd'):
        spec["d"] = g.d
    if g.kind == 'Finite':
        spec["elements"] = [[[str(QQ_I.to_sympy(v)) for v in row] for row in e.to_exact()] for e in g.elements]
    if g.kind == 'Conjugated':
        spec["base"] = group_spec(g.base)
        spec["frame"] = g.frame if isinstance(g.frame, str) else 'explicit'
    return spec


# -----------------------------------------------------------------------------
# Finite kinds
# -----------------------------------------------------------------------------
def generators(g):
    """Monomial generators of a finite model."""
    n, s = g.n, g.s
    if g.kind == 'trivial':
        return []
    if g.kind == 'Finite':
        return list(g.elements)
    if g.kind not in ('SN', 'HNs', 'HNsd'):
        raise PreconditionError(f"{g.label} has no monomial generators")
    zeros = (0,) * n
    found = []
    if n >= 2:
        found.append(MonomialElement((1, 0) + tuple(range(2, n)), zeros, s))
        found.append(MonomialElement(tuple((j + 1) % n for j in range(n)), zeros, s))
    identity = tuple(range(n))
    if g.kind == 'HNs' and s > 1:
        found.append(MonomialElement(identity, (1,) + zeros[1:], s))
    if g.kind == 'HNsd' and s > 1:
        if n >= 2:
            found.append(MonomialElement(identity, (1, s - 1) + zeros[2:], s))
        step = s // math.gcd(s, g.d)
        if step % s:
            found.append(MonomialElement(identity, (step,) + zeros[1:], s))
    return found


def monomial_elements(g):
    """All elements as MonomialElement, deterministic order."""
    if 'monomial' in g._cache:
        return g._cache['monomial']
    n, s = g.n, g.s
    if g.kind == 'Finite':
        found = list(dict.fromkeys(g.elements))
    elif g.kind == 'trivial':
        found = [MonomialElement(tuple(range(n)), (0,) * n, 1)]
    elif g.kind in ('SN', 'HNs', 'HNsd'):
        exponent_range = range(s) if g.kind != 'SN' else range(1)
        found = []
        for perm in itertools.permutations(range(n)):
            for exps in itertools.product(exponent_range, repeat=n):
                if g.kind == 'HNsd' and (g.d * sum(exps)) % s:
                    continue
                found.append(MonomialElement(perm, exps, s))
    else:
        raise PreconditionError(f"{g.label} cannot be enumerated")
    g._cache['monomial'] = found
    return found


def elements(g):
    """
    Full enumeration of a finite model: exact QQ_I object arrays when s | 4, complex arrays
    otherwise (with an exactness downgrade).
    """
    found = monomial_elements(g)
    if 4 % g.s == 0:
        return [element.to_exact() for element in found]
    logger.warning("%s has entries outside QQ(i); elements are returned in floating point", g.label)
    return [element.to_numeric() for element in found]


def is_homogeneous(g):
    """True iff the model contains every N x N permutation matrix."""
    if g.kind in ('SN', 'HNs', 'HNsd'):
        return True
    if g.kind == 'trivial':
        return g.n == 1
    if g.kind == 'Finite':
        present = {(e.perm, e.exps) for e in monomial_elements(g)}
        zeros = (0,) * g.n
        return all((perm, zeros) in present for perm in itertools.permutations(range(g.n)))
    if g.kind == 'Conjugated':
        logger.warning("homogeneity of %s is taken on trust", g.label)
    return True


# -----------------------------------------------------------------------------
# Sampling
# -----------------------------------------------------------------------------
def _haar_unitary(n, rng):
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=rng)


def _haar_orthogonal(n, rng):
    if n == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    return ortho_group.rvs(n, random_state=rng)


def _frame(g):
    from .halflib import fourier_matrix, householder_matrix

    if isinstance(g.frame, str):
        return householder_matrix(g.n) if g.frame == 'householder' else fourier_matrix(g.n)
    return np.asarray(g.frame, dtype=complex)


def haar_sample(g, rng):
    """
    One Haar-distributed element of a sampled model.

    :param rng: numpy Generator (or seed)
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = g.n
    if g.kind == 'UN':
        return _haar_unitary(n, rng)
    if g.kind == 'ON':
        return _haar_orthogonal(n, rng)
    if g.kind == 'UNd':
        # U_N^d is the disjoint union of the cosets w^j SU_N
        u = _haar_unitary(n, rng)
        target = np.exp(2j * np.pi * rng.integers(g.d) / g.d)
        u = u.copy()
        u[:, 0] *= target / np.linalg.det(u)
        return u
    if g.kind in ('BN', 'CN'):
        from .halflib import fourier_matrix, householder_matrix

        inner = _haar_orthogonal(n - 1, rng) if g.kind == 'BN' else _haar_unitary(n - 1, rng)
        frame = householder_matrix(n) if g.kind == 'BN' else fourier_matrix(n)
        block = np.eye(n, dtype=complex if g.kind == 'CN' else float)
        block[1:, 1:] = inner
        return frame @ block @ frame.conj().T
    if g.kind == 'Conjugated':
        frame = _frame(g)
        if g.base.exact:
            pool = monomial_elements(g.base)
            inner = pool[rng.integers(len(pool))].to_numeric()
        else:
            inner = haar_sample(g.base, rng)
        return frame @ inner @ frame.conj().T
    raise PreconditionError(f"{g.label} is exact and is not sampled")


def samples(g, count, seed):
    rng = np.random.default_rng(seed)
    return [haar_sample(g, rng) for _ in range(count)]


# -----------------------------------------------------------------------------
# Intertwiner spaces
# -----------------------------------------------------------------------------
@dataclass
class IntertwinerSpace:
    upper: ColoredWord
    lower: ColoredWord
    n: int
    method: str
    fixed: Optional[SpanBasis] = None
    vectors: Optional[np.ndarray] = None
    threshold: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    eigenvalues: Optional[np.ndarray] = None

    @property
    def exact(self):
        return self.fixed is not None

    @property
    def word(self):
        return self.upper.conjugate() + self.lower

    @property
    def dimension(self):
        return self.fixed.rank if self.exact else self.vectors.shape[1]

    @property
    def basis(self):
        """Exact basis on (upper, lower)."""
        if not self.exact:
            raise ExactnessError("a sampled intertwiner space has no exact basis")
        k = len(self.upper)
        return SpanBasis(self.upper, self.lower, self.n, [unrotate_map(v, k) for v in self.fixed.basis()])

    def _fixed_vector(self, t):
        if (t.upper, t.lower) == (self.upper, self.lower) or (t.is_fixed_point and t.lower == self.word):
            return t if t.is_fixed_point else rotate_map(t)
        raise PreconditionError(f"{t!r} does not live on {self.upper}->{self.lower}")

    def residual(self, t):
        """‖ξ − VV*ξ‖ / ‖ξ‖ for the one-row vector ξ of t."""
        xi = to_array(self._fixed_vector(t))[:, 0].astype(complex)
        norm = np.linalg.norm(xi)
        if norm == 0:
            return 0.0
        if self.exact:
            vectors = _orthonormal(self.fixed)
        else:
            vectors = self.vectors
        if vectors.shape[1] == 0:
            return 1.0
        projected = vectors @ (vectors.conj().T @ xi)
        return float(np.linalg.norm(xi - projected) / norm)

    def contains(self, t, tolerance=None):
        if self.exact:
            return self.fixed.contains(self._fixed_vector(t))
        tolerance = DEFAULT_CONFIG.tolerance if tolerance is None else tolerance
        return self.residual(t) < tolerance

    def to_json(self):
        found = {"upper": self.upper.letters, "lower": self.lower.letters, "n": self.n,
                 "method": self.method, "dimension": self.dimension}
        if not self.exact:
            found.update({"threshold": self.threshold, "samples": self.samples, "seed": self.seed})
        return found


def _orthonormal(basis):
    if basis.rank == 0:
        return np.zeros((basis.n ** len(basis.lower), 0), dtype=complex)
    columns = np.hstack([to_array(v).astype(complex) for v in basis.basis()])
    q, _ = np.linalg.qr(columns)
    return q


def _check_budget(n, r, budget, sampled):
    size = n ** r
    needed = size * size * 16 if sampled else size * 256
    if needed > budget:
        raise BudgetExceededError(f"a fixed space on {r} factors at N={n} needs about {needed} bytes, budget is {budget}")


def _phase_fixed_space(g, word):
    """Fix(g^{⊗w}) for monomial generators: x_{σI} = ζ^χ x_I propagated along orbits."""
    n, s = g.n, g.s
    gens = generators(g)
    size = n ** len(word)
    potential = [None] * size
    basis = SpanBasis('', word, n)
    for root in range(size):
        if potential[root] is not None:
            continue
        potential[root] = 0
        component, consistent = [root], True
        queue = deque([root])
        while queue:
            index = queue.popleft()
            for element in gens:
                target, phase = element.act(index, word, n)
                value = (potential[index] + phase) % s
                if potential[target] is None:
                    potential[target] = value
                    component.append(target)
                    queue.append(target)
                elif potential[target] != value:
                    consistent = False
        if consistent:
            entries = {(index, 0): root_of_unity(s, potential[index]) for index in component}
            entries, domain = _settle(entries, QQ_I)
            basis.add(TensorMap('', word, n, entries, domain))
    return basis


def _root_sum(s, counts):
    """Exact Σ counts[e]·ζ_s^e, when it is a Gaussian rational."""
    if all((4 * e) % s == 0 for e in counts):
        total = QQ_I.zero
        for e, count in counts.items():
            total += root_of_unity(s, e) * count
        return total
    for shift in range(1, s):
        if all(counts.get((e + shift) % s, 0) == count for e, count in counts.items()):
            return QQ_I.zero
    raise ExactnessError(f"a sum of {s}-th roots of unity is not a Gaussian rational")


def _average_fixed_space(g, word):
    """Range of the exact average (1/|G|) Σ g^{⊗w}."""
    n = g.n
    pool = monomial_elements(g)
    size = n ** len(word)
    order = QQ(len(pool))
    basis = SpanBasis('', word, n)
    for index in range(size):
        phases = {}
        for element in pool:
            target, phase = element.act(index, word, n)
            phases.setdefault(target, Counter())[phase] += 1
        entries = {(target, 0): _root_sum(g.s, counts) / order for target, counts in phases.items()}
        entries, domain = _settle(entries, QQ_I)
        if entries:
            basis.add(TensorMap('', word, n, entries, domain))
    return basis


def _sampled_fixed_space(g, word, config):
    n = g.n
    size = n ** len(word)
    rng = np.random.default_rng(config.seed)
    average = np.zeros((size, size), dtype=complex)
    for _ in range(config.samples):
        average += colored_power(haar_sample(g, rng), word)
    average /= config.samples
    defect = np.eye(size) - (average + average.conj().T) / 2
    values, vectors = eigh(defect)
    top = max(float(values[-1]), 1e-300)
    cut = config.rank_threshold * top
    kernel = values <= cut
    near = (values > cut / 100) & (values < cut * 100)
    if np.any(near):
        logger.warning("ill-conditioned rank for %s on %s: eigenvalues cluster at the threshold %.3g",
                       g.label, word, cut)
    return vectors[:, kernel], values


def fixed_space(g, word, method=None, config=None):
    """Intertwiner space on (∅, word)."""
    config = config or DEFAULT_CONFIG
    word = _as_word(word)
    if method is None:
        method = GENERATOR_CHECK if g.exact else SAMPLED
    key = (word, method, config.seed, config.samples, config.rank_threshold)
    if key in g._cache:
        return g._cache[key]
    _check_budget(g.n, len(word), config.memory_budget, method == SAMPLED)
    if method == SAMPLED:
        if g.exact:
            raise PreconditionError(f"{g.label} is exact; use {GENERATOR_CHECK} or {EXACT_AVERAGE}")
        vectors, values = _sampled_fixed_space(g, word, config)
        space = IntertwinerSpace(ColoredWord(), word, g.n, SAMPLED, vectors=vectors,
                                 threshold=config.rank_threshold, samples=config.samples,
                                 seed=config.seed, eigenvalues=values)
    elif method in (GENERATOR_CHECK, EXACT_AVERAGE):
        if not g.exact:
            raise PreconditionError(f"{g.label} is sampled; exact methods need a finite model")
        compute = _phase_fixed_space if method == GENERATOR_CHECK else _average_fixed_space
        space = IntertwinerSpace(ColoredWord(), word, g.n, method, fixed=compute(g, word))
    else:
        raise ValueError(f"unknown intertwiner method {method!r}")
    g._cache[key] = space
    return space


def intertwiner_space(g, upper, lower, method=None, config=None):
    """Hom(u^{⊗upper}, u^{⊗lower}), computed on the one-row word upper̄·lower."""
    upper, lower = _as_word(upper), _as_word(lower)
    space = fixed_space(g, upper.conjugate() + lower, method, config)
    return IntertwinerSpace(upper, lower, space.n, space.method, space.fixed, space.vectors,
                            space.threshold, space.samples, space.seed, space.eigenvalues)


def residual(g, t, config=None):
    """Relative distance of a map from the (sampled or exact) intertwiner space."""
    return intertwiner_space(g, t.upper, t.lower, config=config).residual(t)


# -----------------------------------------------------------------------------
# Characters
# -----------------------------------------------------------------------------
def character_moment(g, k, t=1, config=None):
    """
    E[χ_t^k] with χ_t = Σ_{i < [tN]} u_ii.

    Exact (a sympy number) for finite models with s | 4; a float estimate otherwise.
    """
    t = Fraction(t)
    if not 0 < t <= 1:
        raise ValueError(f"truncation t must lie in (0, 1], got {t}")
    size = math.floor(t * g.n)
    if g.exact:
        pool = monomial_elements(g)
        if 4 % g.s == 0:
            total = QQ_I.zero
            for element in pool:
                trace = QQ_I.zero
                for e in element.trace_exponents(size):
                    trace += root_of_unity(g.s, e)
                total += trace ** k
            return QQ_I.to_sympy(total / QQ(len(pool)))
        logger.warning("moments of %s are computed in floating point", g.label)
        values = [sum(np.exp(2j * np.pi * e / g.s) for e in element.trace_exponents(size)) ** k for element in pool]
        return complex(np.mean(values)).real
    config = config or DEFAULT_CONFIG
    rng = np.random.default_rng(config.seed)
    values = [np.trace(haar_sample(g, rng)[:size, :size]) ** k for _ in range(config.samples)]
    return complex(np.mean(values)).real


def moment_sequence(g, k_max, t=1, config=None):
    return [character_moment(g, k, t, config) for k in range(1, k_max + 1)]
