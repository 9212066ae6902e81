"""
Colored two-row set partitions.

Legs are numbered from 0 internally: legs 0..k-1 form the upper row (left to right) and
legs k..k+l-1 the lower row (left to right). The text format and the JSON mirror use
1-based legs, e.g. ``ob|:(1,2)`` for the cap on the word ○●.

A partition with an empty upper row is said to be in one-row (fixed point) form. The
closure engines work exclusively with one-row partitions and reach every (k,l) cell
through ``to_fixed_point`` / ``from_fixed_point``.
"""
import itertools
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property

from sympy.utilities.iterables import multiset_partitions

from .errors import PreconditionError, WordMismatchError

WHITE = 'o'
BLACK = 'b'
_FLIP = {WHITE: BLACK, BLACK: WHITE}
_ALIASES = {'○': WHITE, '●': BLACK, 'w': WHITE, 'O': WHITE, 'B': BLACK}

_TEXT_RE = re.compile(r'^([ob]*)\|([ob]*):((?:\(\d+(?:,\d+)*\))*)$')


@dataclass(frozen=True, order=True)
class ColoredWord:
    letters: str = ''

    def __post_init__(self):
        letters = ''.join(_ALIASES.get(c, c) for c in str(self.letters))
        if set(letters) - {WHITE, BLACK}:
            raise ValueError(f"invalid colored word: {self.letters!r}")
        object.__setattr__(self, 'letters', letters)

    @classmethod
    def white(cls, length):
        return cls(WHITE * length)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return ColoredWord(self.letters[item])
        return self.letters[item]

    def __add__(self, other):
        return ColoredWord(self.letters + _as_word(other).letters)

    def __str__(self):
        return self.letters

    @property
    def charge(self):
        return self.letters.count(WHITE) - self.letters.count(BLACK)

    @property
    def sort_key(self):
        return (len(self.letters), self.letters)

    def flipped(self):
        return ColoredWord(''.join(_FLIP[c] for c in self.letters))

    def reversed(self):
        return ColoredWord(self.letters[::-1])

    def conjugate(self):
        """Reversed and color-switched word, the word a row turns into under rotation."""
        return ColoredWord(''.join(_FLIP[c] for c in reversed(self.letters)))


def _as_word(word):
    return word if isinstance(word, ColoredWord) else ColoredWord(word or '')


def words_up_to(bound, real=False):
    """One-row words of length <= bound, ordered by length then letters."""
    for length in range(bound + 1):
        if real:
            yield ColoredWord.white(length)
            continue
        for letters in itertools.product((BLACK, WHITE), repeat=length):
            yield ColoredWord(''.join(letters))


@dataclass(frozen=True)
class Partition:
    upper: ColoredWord
    lower: ColoredWord
    blocks: tuple

    def __post_init__(self):
        upper, lower = _as_word(self.upper), _as_word(self.lower)
        blocks = tuple(sorted(tuple(sorted(block)) for block in self.blocks))
        legs = sorted(leg for block in blocks for leg in block)
        if any(not block for block in blocks) or legs != list(range(len(upper) + len(lower))):
            raise ValueError(f"blocks {self.blocks} do not partition {len(upper) + len(lower)} legs")
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'blocks', blocks)

    @property
    def k(self):
        return len(self.upper)

    @property
    def l(self):
        return len(self.lower)

    @property
    def leg_count(self):
        return len(self.upper) + len(self.lower)

    @property
    def block_count(self):
        return len(self.blocks)

    @property
    def word(self):
        """Letters of all legs in leg order."""
        return self.upper + self.lower

    @property
    def is_fixed_point(self):
        return self.k == 0

    @cached_property
    def labels(self):
        labels = [0] * self.leg_count
        for index, block in enumerate(self.blocks):
            for leg in block:
                labels[leg] = index
        return tuple(labels)

    @cached_property
    def signs(self):
        # ○ counts +1 on the lower row; the upper row counts with switched colors
        signs = []
        for leg, letter in enumerate(self.word):
            sign = 1 if letter == WHITE else -1
            signs.append(-sign if leg < self.k else sign)
        return tuple(signs)

    @cached_property
    def circle_order(self):
        """Legs counterclockwise: upper row left to right, then lower row right to left."""
        return tuple(range(self.k)) + tuple(range(self.leg_count - 1, self.k - 1, -1))

    def block_weights(self):
        return tuple(sum(self.signs[leg] for leg in block) for block in self.blocks)

    def __str__(self):
        return format_partition(self)


# -----------------------------------------------------------------------------
# Formats
# -----------------------------------------------------------------------------
def format_partition(pi):
    blocks = ''.join('(' + ','.join(str(leg + 1) for leg in block) + ')' for block in pi.blocks)
    return f"{pi.upper}|{pi.lower}:{blocks}"


def parse_partition(text):
    """
    Parse ``UPPER|LOWER:(b1)(b2)...`` with 1-based legs.

    :param text: e.g. ``oo|oo:(1,4)(2,3)`` for the basic crossing.
    """
    cleaned = ''.join(_ALIASES.get(c, c) for c in text.strip().replace(' ', ''))
    match = _TEXT_RE.match(cleaned)
    if not match:
        raise ValueError(f"malformed partition text: {text!r}")
    upper, lower, body = match.groups()
    blocks = [tuple(int(leg) - 1 for leg in chunk.split(',')) for chunk in re.findall(r'\(([\d,]+)\)', body)]
    return Partition(ColoredWord(upper), ColoredWord(lower), tuple(blocks))


def partition_to_json(pi):
    return {
        "upper": pi.upper.letters,
        "lower": pi.lower.letters,
        "blocks": [[leg + 1 for leg in block] for block in pi.blocks],
    }


def partition_from_json(data):
    blocks = tuple(tuple(leg - 1 for leg in block) for block in data["blocks"])
    return Partition(ColoredWord(data["upper"]), ColoredWord(data["lower"]), blocks)


def read_partition_file(path):
    """One partition per line in text format; ``#`` starts a comment."""
    found = []
    with open(path) as handle:
        for line in handle:
            line = line.split('#', 1)[0].strip()
            if line:
                found.append(parse_partition(line))
    return found


# -----------------------------------------------------------------------------
# Constructors
# -----------------------------------------------------------------------------
def identity(word):
    word = _as_word(word)
    k = len(word)
    return Partition(word, word, tuple((i, k + i) for i in range(k)))


def cup(word):
    """The pair on two lower legs, an element of P(∅, word)."""
    word = _as_word(word)
    if len(word) != 2:
        raise ValueError("a cup has exactly two legs")
    return Partition(ColoredWord(), word, ((0, 1),))


def cap(word):
    word = _as_word(word)
    if len(word) != 2:
        raise ValueError("a cap has exactly two legs")
    return Partition(word, ColoredWord(), ((0, 1),))


def basic_crossing(upper='oo', lower=None):
    """Upper leg 1 to lower leg 2 and upper leg 2 to lower leg 1."""
    upper = _as_word(upper)
    lower = upper.reversed() if lower is None else _as_word(lower)
    return Partition(upper, lower, ((0, 3), (1, 2)))


def singleton(color=WHITE, row='lower'):
    word = ColoredWord(color)
    if row == 'upper':
        return Partition(word, ColoredWord(), ((0,),))
    return Partition(ColoredWord(), word, ((0,),))


def one_block(upper, lower):
    upper, lower = _as_word(upper), _as_word(lower)
    legs = len(upper) + len(lower)
    return Partition(upper, lower, (tuple(range(legs)),) if legs else ())


def discrete(upper, lower):
    upper, lower = _as_word(upper), _as_word(lower)
    return Partition(upper, lower, tuple((leg,) for leg in range(len(upper) + len(lower))))


def is_basic_crossing(pi):
    return pi.k == 2 and pi.l == 2 and pi.blocks == ((0, 3), (1, 2))


# -----------------------------------------------------------------------------
# Enumeration
# -----------------------------------------------------------------------------
def enumerate_partitions(upper, lower):
    """All partitions of P(upper, lower), sorted by canonical blocks."""
    upper, lower = _as_word(upper), _as_word(lower)
    legs = len(upper) + len(lower)
    if legs == 0:
        return [Partition(upper, lower, ())]
    found = [Partition(upper, lower, tuple(tuple(b) for b in blocks)) for blocks in multiset_partitions(legs)]
    return sorted(found, key=lambda pi: pi.blocks)


# -----------------------------------------------------------------------------
# Gluing
# -----------------------------------------------------------------------------
def _components(node_count, edges):
    graph = [[] for _ in range(node_count)]
    for x, y in edges:
        graph[x].append(y)
        graph[y].append(x)
    component = [None] * node_count
    count = 0
    for main in range(node_count):
        if component[main] is not None:
            continue
        stack = [main]
        while stack:
            x = stack.pop()
            if component[x] is not None:
                continue
            component[x] = count
            stack.extend(graph[x])
        count += 1
    return component, count


def _glue(parts, joins, outer):
    """
    Merge the blocks of several partitions along identified legs.

    :param parts: partitions, legs addressed as (part index, leg)
    :param joins: pairs of addressed legs that get identified
    :param outer: addressed legs that survive, in output order
    :return: (blocks over output positions, number of closed components)
    """
    offsets = list(itertools.accumulate([0] + [p.block_count for p in parts]))

    def node(address):
        part, leg = address
        return offsets[part] + parts[part].labels[leg]

    component, count = _components(offsets[-1], [(node(a), node(b)) for a, b in joins])
    grouped = defaultdict(list)
    for position, address in enumerate(outer):
        grouped[component[node(address)]].append(position)
    return tuple(tuple(block) for block in grouped.values()), count - len(grouped)


# -----------------------------------------------------------------------------
# Category operations
# -----------------------------------------------------------------------------
def tensor(pi, sigma):
    k1, l1, k2 = pi.k, pi.l, sigma.k
    blocks = [tuple(leg if leg < k1 else leg + k2 for leg in block) for block in pi.blocks]
    blocks += [tuple(leg + k1 if leg < k2 else leg + k1 + l1 for leg in block) for block in sigma.blocks]
    return Partition(pi.upper + sigma.upper, pi.lower + sigma.lower, tuple(blocks))


def compose(pi, sigma):
    """
    Glue the lower row of ``pi`` to the upper row of ``sigma`` (pi first, then sigma).

    :return: (partition in P(pi.upper, sigma.lower), number of erased closed loops)
    """
    if pi.lower != sigma.upper:
        raise WordMismatchError(f"cannot compose: lower word {pi.lower} differs from upper word {sigma.upper}")
    joins = [((0, pi.k + j), (1, j)) for j in range(pi.l)]
    outer = [(0, i) for i in range(pi.k)] + [(1, sigma.k + m) for m in range(sigma.l)]
    blocks, loops = _glue([pi, sigma], joins, outer)
    return Partition(pi.upper, sigma.lower, blocks), loops


def involution(pi):
    """Upside-down turning with switched colors."""
    k, l = pi.k, pi.l
    moved = {**{k + j: j for j in range(l)}, **{i: l + i for i in range(k)}}
    blocks = tuple(tuple(moved[leg] for leg in block) for block in pi.blocks)
    return Partition(pi.lower.flipped(), pi.upper.flipped(), blocks)


def adjoint(pi):
    """Upside-down turning keeping the colors; the partition of the conjugate transpose map."""
    turned = involution(pi)
    return Partition(turned.upper.flipped(), turned.lower.flipped(), turned.blocks)


def rotate_ccw(pi):
    if pi.k == 0:
        raise PreconditionError("rotate_ccw needs a nonempty upper row")
    k = pi.k
    moved = {0: k - 1, **{i: i - 1 for i in range(1, k)}}
    blocks = tuple(tuple(moved.get(leg, leg) for leg in block) for block in pi.blocks)
    return Partition(pi.upper[1:], pi.upper[:1].flipped() + pi.lower, blocks)


def rotate_cw(pi):
    if pi.l == 0:
        raise PreconditionError("rotate_cw needs a nonempty lower row")
    k = pi.k
    moved = {k: 0, **{i: i + 1 for i in range(k)}}
    blocks = tuple(tuple(moved.get(leg, leg) for leg in block) for block in pi.blocks)
    return Partition(pi.lower[:1].flipped() + pi.upper, pi.lower[1:], blocks)


def to_fixed_point(pi):
    """The k-fold counterclockwise rotation, landing in P(∅, k̄l)."""
    k = pi.k
    blocks = tuple(tuple(k - 1 - leg if leg < k else leg for leg in block) for block in pi.blocks)
    return Partition(ColoredWord(), pi.upper.conjugate() + pi.lower, blocks)


def from_fixed_point(rho, k):
    """Inverse of ``to_fixed_point``: move the first k legs of a one-row partition up."""
    if not rho.is_fixed_point or not 0 <= k <= rho.l:
        raise PreconditionError(f"cannot lift {k} legs of {rho}")
    blocks = tuple(tuple(k - 1 - leg if leg < k else leg for leg in block) for block in rho.blocks)
    return Partition(rho.lower[:k].conjugate(), rho.lower[k:], blocks)


def cyclic_shift(rho):
    """One-row rotation: the last leg moves to the front, colors unchanged."""
    if not rho.is_fixed_point:
        raise PreconditionError("cyclic_shift acts on one-row partitions")
    r = rho.l
    if r == 0:
        return rho
    blocks = tuple(tuple((leg + 1) % r for leg in block) for block in rho.blocks)
    return Partition(ColoredWord(), rho.lower[-1:] + rho.lower[:-1], blocks)


def reverse(rho):
    """One-row image of the involution: legs and letters read backwards."""
    if not rho.is_fixed_point:
        raise PreconditionError("reverse acts on one-row partitions")
    r = rho.l
    blocks = tuple(tuple(r - 1 - leg for leg in block) for block in rho.blocks)
    return Partition(ColoredWord(), rho.lower.reversed(), blocks)


def contractible(left, right, c, real=False):
    a, b = len(left), len(right)
    if not 0 <= c <= min(a, b):
        return False
    return real or all(left[a - 1 - t] != right[t] for t in range(c))


def contract(x, y, c, real=False):
    """
    Planar composition of one-row partitions: the last c legs of x are glued, nested, to
    the first c legs of y. c = 0 is the tensor product.

    :param real: ignore colors (color-blind categories)
    :return: (one-row partition, loops)
    """
    if not (x.is_fixed_point and y.is_fixed_point):
        raise PreconditionError("contract acts on one-row partitions")
    if not contractible(x.lower, y.lower, c, real):
        raise WordMismatchError(f"cannot contract {c} legs of {x.lower} with {y.lower}")
    a, b = x.l, y.l
    joins = [((0, a - 1 - t), (1, t)) for t in range(c)]
    outer = [(0, p) for p in range(a - c)] + [(1, q) for q in range(c, b)]
    blocks, loops = _glue([x, y], joins, outer)
    return Partition(ColoredWord(), x.lower[:a - c] + y.lower[c:], blocks), loops


def cap_legs(pi, position):
    """
    Semicircle capping of the circle-adjacent legs at circle positions ``position`` and
    ``position + 1`` (cyclically), through composition with cup/cap-augmented identities.

    :return: (partition, loops)
    """
    r, k, l = pi.leg_count, pi.k, pi.l
    if r < 2 or not 0 <= position < r:
        raise PreconditionError(f"no cap position {position} on {r} legs")
    if position == r - 1:
        if k and l:
            return _cap_lower(rotate_ccw(pi), 0)
        return _cap_right(rotate_cw(pi) if k == 0 else rotate_ccw(pi))
    if position < k - 1:
        return _cap_upper(pi, position)
    if position == k - 1:
        return _cap_right(pi)
    return _cap_lower(pi, l - 2 - (position - k))


def _cap_upper(pi, i):
    u = pi.upper
    augmented = tensor(tensor(identity(u[:i]), cup(u[i:i + 2])), identity(u[i + 2:]))
    return compose(augmented, pi)


def _cap_lower(pi, j):
    w = pi.lower
    augmented = tensor(tensor(identity(w[:j]), cap(w[j:j + 2])), identity(w[j + 2:]))
    return compose(pi, augmented)


def _cap_right(pi):
    # partial trace joining the rightmost upper and rightmost lower legs
    u, w = pi.upper, pi.lower
    extra = u[-1:].flipped()
    opened = tensor(identity(u[:-1]), cup(u[-1:] + extra))
    middle, first = compose(opened, tensor(pi, identity(extra)))
    closed = tensor(identity(w[:-1]), cap(w[-1:] + extra))
    result, second = compose(middle, closed)
    return result, first + second


# -----------------------------------------------------------------------------
# Lattice structure
# -----------------------------------------------------------------------------
def _check_same_words(pi, sigma):
    if pi.upper != sigma.upper or pi.lower != sigma.lower:
        raise WordMismatchError(f"partitions live on different words: {pi} vs {sigma}")


def join(pi, sigma):
    """Finest common coarsening."""
    _check_same_words(pi, sigma)
    edges = [(block[0], leg) for block in pi.blocks + sigma.blocks for leg in block[1:]]
    component, _ = _components(pi.leg_count, edges)
    grouped = defaultdict(list)
    for leg, comp in enumerate(component):
        grouped[comp].append(leg)
    return Partition(pi.upper, pi.lower, tuple(tuple(b) for b in grouped.values()))


def kernel(indices, upper, lower):
    upper, lower = _as_word(upper), _as_word(lower)
    if len(indices) != len(upper) + len(lower):
        raise ValueError(f"index tuple of length {len(indices)} does not fit {len(upper) + len(lower)} legs")
    grouped = defaultdict(list)
    for leg, value in enumerate(indices):
        grouped[value].append(leg)
    return Partition(upper, lower, tuple(tuple(b) for b in grouped.values()))


def is_refinement(pi, sigma):
    """True iff pi <= sigma, every block of pi sitting inside a block of sigma."""
    _check_same_words(pi, sigma)
    return all(len({sigma.labels[leg] for leg in block}) == 1 for block in pi.blocks)


def mobius(pi, sigma):
    if not is_refinement(pi, sigma):
        raise PreconditionError(f"mobius needs comparable partitions, got {pi} and {sigma}")
    merged = Counter(sigma.labels[block[0]] for block in pi.blocks)
    value = 1
    for b in merged.values():
        value *= (-1) ** (b - 1) * math.factorial(b - 1)
    return value


# -----------------------------------------------------------------------------
# Planarity
# -----------------------------------------------------------------------------
def is_noncrossing(pi):
    remaining = Counter(pi.labels)
    opened, stack = set(), []
    for leg in pi.circle_order:
        block = pi.labels[leg]
        if not (stack and stack[-1] == block):
            if block in opened:
                return False
            opened.add(block)
            stack.append(block)
        remaining[block] -= 1
        if remaining[block] == 0:
            stack.pop()
    return True


def crossing_count(pi):
    """Number of unordered block pairs that cross on the circle."""
    position = {leg: p for p, leg in enumerate(pi.circle_order)}
    count = 0
    for x, y in itertools.combinations(range(pi.block_count), 2):
        marks = sorted([(position[leg], x) for leg in pi.blocks[x]] + [(position[leg], y) for leg in pi.blocks[y]])
        runs = [label for index, (_, label) in enumerate(marks) if index == 0 or marks[index - 1][1] != label]
        count += len(runs) >= 4
    return count


# -----------------------------------------------------------------------------
# Named categories
# -----------------------------------------------------------------------------
def _is_matching(pi, real):
    if real:
        return True
    return all(sum(pi.signs[leg] for leg in block) == 0 for block in pi.blocks if len(block) == 2)


def _sizes_within(pi, sizes):
    return all(len(block) in sizes for block in pi.blocks)


# predicates take (partition, s, real); in real mode the matching condition is vacuous
_PREDICATES = {
    'P': lambda pi, s, real: True,
    'NC': lambda pi, s, real: is_noncrossing(pi),
    'P2': lambda pi, s, real: _sizes_within(pi, {2}),
    'NC2': lambda pi, s, real: _sizes_within(pi, {2}) and _is_matching(pi, real) and is_noncrossing(pi),
    'MatchingP2': lambda pi, s, real: _sizes_within(pi, {2}) and _is_matching(pi, real),
    'MatchingNC2': lambda pi, s, real: _sizes_within(pi, {2}) and _is_matching(pi, real) and is_noncrossing(pi),
    'P12': lambda pi, s, real: _sizes_within(pi, {1, 2}),
    'MatchingP12': lambda pi, s, real: _sizes_within(pi, {1, 2}) and _is_matching(pi, real),
    'NC12': lambda pi, s, real: _sizes_within(pi, {1, 2}) and is_noncrossing(pi),
    'MatchingNC12': lambda pi, s, real: _sizes_within(pi, {1, 2}) and _is_matching(pi, real) and is_noncrossing(pi),
    'Ps': lambda pi, s, real: all(weight % s == 0 for weight in pi.block_weights()),
    'Peven': lambda pi, s, real: all(len(block) % 2 == 0 for block in pi.blocks),
    'NCeven': lambda pi, s, real: all(len(block) % 2 == 0 for block in pi.blocks) and is_noncrossing(pi),
    'H242D': lambda pi, s, real: all(len(block) % 2 == 0 for block in pi.blocks) and sum(pi.signs) % 4 == 0,
}

_COLOR_BLIND = {'P', 'NC', 'P2', 'P12', 'NC12', 'Peven', 'NCeven'}


@dataclass(frozen=True)
class CategoryName:
    tag: str
    s: int = None

    def __post_init__(self):
        if self.tag not in _PREDICATES:
            raise ValueError(f"unknown category {self.tag!r}; known: {', '.join(_PREDICATES)}")
        if self.tag == 'Ps' and (self.s is None or self.s < 1):
            raise ValueError("Ps needs a positive parameter s")

    @classmethod
    def parse(cls, text):
        if isinstance(text, CategoryName):
            return text
        match = re.fullmatch(r'\s*(\w+?)(?:\((\d+)\))?\s*', str(text))
        if not match:
            raise ValueError(f"malformed category name {text!r}")
        tag, s = match.groups()
        return cls(tag, int(s) if s else None)

    @property
    def color_blind(self):
        return self.tag in _COLOR_BLIND or (self.tag == 'Ps' and self.s <= 2)

    def contains(self, pi, real=False):
        """:param real: colors ignored, so horizontal strings need not connect opposite colors"""
        return _PREDICATES[self.tag](pi, self.s, real)

    def __str__(self):
        return f"Ps({self.s})" if self.tag == 'Ps' else self.tag


def is_member(pi, category, real=False):
    return CategoryName.parse(category).contains(pi, real)
