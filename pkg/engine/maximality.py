"""
Order-2 maximality checks for inclusions span(D) ⊂ span(E) and semicircle-capping descents
of crossing partitions to the basic crossing.
"""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd

from .categories import close_linear, named_table, span_table, table_contains, table_equal
from .config import DEFAULT_CONFIG
from .errors import PreconditionError, WordMismatchError
from .linmaps import build_map, linear_combination, rotate_map
from .partitions import (
    CategoryName, ColoredWord, Partition, cap_legs, compose, crossing_count, format_partition,
    from_fixed_point, identity, is_basic_crossing, parse_partition, rotate_ccw, rotate_cw, singleton, tensor,
    words_up_to,
)

logger = logging.getLogger(__name__)

REACHES_SPAN_E = 'reaches_span_E'
STUCK = 'stuck'

DEFAULT_COEFFICIENTS = ((1, 1), (1, -1), (2, -3), (5, 7), (1, 1000))

SERIES = {
    'S': ('NC', 'P'),
    'O': ('NC2', 'P2'),
    'B': ('NC12', 'P12'),
    'H': ('NCeven', 'Peven'),
}


# -----------------------------------------------------------------------------
# Semicircle capping
# -----------------------------------------------------------------------------
def erase_leg(pi, position):
    """
    Compose a singleton onto the leg at circle position ``position``.

    :return: (partition, loops, the composed augmented identity)
    """
    leg = pi.circle_order[position]
    if leg < pi.k:
        u = pi.upper
        augmented = tensor(tensor(identity(u[:leg]), singleton(u[leg], 'lower')), identity(u[leg + 1:]))
        result, loops = compose(augmented, pi)
    else:
        j = leg - pi.k
        w = pi.lower
        augmented = tensor(tensor(identity(w[:j]), singleton(w[j], 'upper')), identity(w[j + 1:]))
        result, loops = compose(pi, augmented)
    return result, loops, augmented


def _apply(pi, step):
    op = step["op"]
    if op == 'cap':
        result, loops = cap_legs(pi, step["position"])
        return result, loops
    if op == 'compose_with':
        result, loops, _ = erase_leg(pi, step["position"])
        return result, loops
    if op == 'rotate_ccw':
        return rotate_ccw(pi), 0
    if op == 'rotate_cw':
        return rotate_cw(pi), 0
    raise ValueError(f"unknown capping operation {op!r}")


@dataclass
class CappingCertificate:
    start: Partition
    steps: list = field(default_factory=list)
    end: Partition = None

    def to_json(self):
        return {
            "start": format_partition(self.start),
            "steps": self.steps,
            "end": format_partition(self.end),
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(parse_partition(data["start"]), list(data["steps"]), parse_partition(data["end"]))


def _moves(pi, matching, singletons):
    signs = pi.signs
    order = pi.circle_order
    r = pi.leg_count
    for position in range(r):
        if matching and signs[order[position]] + signs[order[(position + 1) % r]]:
            continue
        result, loops = cap_legs(pi, position)
        yield {"op": "cap", "position": position, "loops": loops}, result
    if singletons:
        for position in range(r):
            result, loops, augmented = erase_leg(pi, position)
            yield {"op": "compose_with", "position": position, "partition": format_partition(augmented),
                   "loops": loops}, result


def _straighten(pi, steps):
    """Rotate a four-leg crossing into P(2, 2)."""
    while pi.k != 2:
        op = 'rotate_cw' if pi.k < 2 else 'rotate_ccw'
        pi, _ = _apply(pi, {"op": op})
        steps.append({"op": op, "result": format_partition(pi)})
    return pi


def capping_search(pi, depth=None, matching=False, singletons=False, config=None):
    """
    Breadth-first descent from a crossing partition to the basic crossing, keeping at least one
    crossing after every step.

    :param matching: only cap legs of opposite signs
    :param singletons: also allow erasing a leg with a singleton
    :raises PreconditionError: pi is noncrossing, or no descent exists within ``depth`` steps
    """
    config = config or DEFAULT_CONFIG
    depth = config.capping_depth if depth is None else depth
    if crossing_count(pi) == 0:
        raise PreconditionError(f"{format_partition(pi)} is noncrossing")
    frontier = [(pi, [])]
    seen = {pi}
    for level in range(depth + 1):
        for state, steps in frontier:
            if state.leg_count == 4:
                steps = list(steps)
                end = _straighten(state, steps)
                if not is_basic_crossing(end):
                    raise AssertionError(f"four-leg crossing {format_partition(end)} is not the basic crossing")
                return CappingCertificate(pi, steps, end)
        if level == depth:
            break
        children = []
        for state, steps in frontier:
            for step, result in _moves(state, matching, singletons):
                if result in seen or crossing_count(result) == 0:
                    continue
                seen.add(result)
                children.append((result, steps + [dict(step, result=format_partition(result))]))
        children.sort(key=lambda item: (item[0].leg_count, -crossing_count(item[0]), item[0].blocks))
        frontier = children
        logger.debug("capping level %d: %d states", level + 1, len(frontier))
        if not frontier:
            break
    raise PreconditionError(f"no capping certificate for {format_partition(pi)} found within depth {depth}")


def replay(certificate):
    """
    Re-run every step and compare with the recorded snapshots.

    :return: dict with "valid" and, on failure, the first failing step index
    """
    pi = certificate.start
    for index, step in enumerate(certificate.steps):
        pi, loops = _apply(pi, step)
        if format_partition(pi) != step["result"] or loops != step.get("loops", 0):
            return {"valid": False, "failed_step": index}
        if crossing_count(pi) == 0:
            return {"valid": False, "failed_step": index, "reason": "crossing lost"}
    valid = pi == certificate.end and is_basic_crossing(pi)
    return {"valid": valid, "failed_step": None if valid else len(certificate.steps)}


# -----------------------------------------------------------------------------
# Order-2 checks
# -----------------------------------------------------------------------------
def _whiten(pi):
    return Partition(ColoredWord.white(pi.k), ColoredWord.white(pi.l), pi.blocks)


def _base_maps(d, bound, real, n):
    table = named_table(d, bound, real)
    return [build_map(rho, n) for word in table.words() for rho in sorted(table.cells[word], key=lambda rho: rho.blocks)]


def order2_check(d, e, pi, sigma, alpha, beta, n, bound, base_maps=None, real=None):
    """
    Close span(D) together with αT_π + βT_σ and compare with span(E) within ``bound``.

    :param base_maps: precomputed maps of the D table, reused across instances
    :param real: compare the color-blind analogues; defaults to True when both tags are color-blind
    """
    d, e = CategoryName.parse(d), CategoryName.parse(e)
    real = d.color_blind and e.color_blind if real is None else real
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not alpha or not beta:
        raise PreconditionError("α and β must be nonzero; the condition degenerates to order 1")
    if (pi.upper, pi.lower) != (sigma.upper, sigma.lower):
        raise WordMismatchError(f"{format_partition(pi)} and {format_partition(sigma)} live on different words")
    if not (e.contains(pi, real) and e.contains(sigma, real)):
        raise PreconditionError(f"both partitions must lie in {e}")
    if d.contains(pi, real) and d.contains(sigma, real):
        raise PreconditionError(f"π and σ both lie in {d}")
    if real:
        pi, sigma = _whiten(pi), _whiten(sigma)
    combination = linear_combination([alpha, beta], [build_map(pi, n), build_map(sigma, n)])
    if not combination:
        raise PreconditionError("αT_π + βT_σ vanishes")
    if base_maps is None:
        base_maps = _base_maps(d, bound, real, n)
    closed = close_linear(base_maps + [rotate_map(combination)], n, bound, real)
    target = span_table(named_table(e, bound, real), n)
    inside = table_contains(closed, target)
    comparison = table_equal(closed, target) if inside else inside
    found = {
        "D": str(d),
        "E": str(e),
        "pi": format_partition(pi),
        "sigma": format_partition(sigma),
        "alpha": str(alpha),
        "beta": str(beta),
        "n": n,
        "bound": bound,
        "real": real,
        "status": closed.status,
        "verdict": REACHES_SPAN_E if comparison else STUCK,
    }
    if not comparison:
        found["witness"] = comparison.to_json()
        found["sizes"] = {"closure": closed.sizes(), "target": target.sizes()}
    return found


# -----------------------------------------------------------------------------
# Series runs
# -----------------------------------------------------------------------------
def _candidate_pairs(d, e, bound):
    """Every (π, σ) on a common (k, l) cell of E, one-row pairs split at each k, not both in D."""
    table = named_table(e, bound, real=True)
    pairs = []
    for word in words_up_to(bound, real=True):
        members = sorted(table.fixed_cell(word), key=lambda rho: rho.blocks)
        for i, first in enumerate(members):
            for second in members[i:]:
                if d.contains(first, real=True) and d.contains(second, real=True):
                    continue
                for k in range(len(word) + 1):
                    pairs.append((from_fixed_point(first, k), from_fixed_point(second, k)))
    return pairs


def _run_instance(payload):
    index, d, e, pi, sigma, alpha, beta, n, bound = payload
    try:
        found = order2_check(d, e, pi, sigma, alpha, beta, n, bound, _instance_maps(d, bound, n), real=True)
    except PreconditionError as exc:
        found = {"pi": format_partition(pi), "sigma": format_partition(sigma), "alpha": str(alpha),
                 "beta": str(beta), "verdict": "skipped", "reason": str(exc)}
    found["instance"] = index
    return found


_MAPS = {}


def _instance_maps(d, bound, n):
    key = (str(d), bound, n)
    if key not in _MAPS:
        _MAPS[key] = _base_maps(CategoryName.parse(d), bound, True, n)
    return _MAPS[key]


def series_runner(series, n, bound, coefficients=DEFAULT_COEFFICIENTS, pair_budget=50, seed=None, workers=None):
    """
    Sample up to ``pair_budget`` (π, σ) pairs from the two-row E cells, run every coefficient pair
    and aggregate verdicts. Series run on the color-blind analogues.

    Any stuck instance is logged as a potential counterexample and listed in full.
    """
    if series not in SERIES:
        raise ValueError(f"unknown series {series!r}; known: {', '.join(SERIES)}")
    seed = DEFAULT_CONFIG.seed if seed is None else seed
    workers = DEFAULT_CONFIG.workers if workers is None else workers
    d, e = (CategoryName.parse(tag) for tag in SERIES[series])
    rng = np.random.default_rng(seed)
    pairs = _candidate_pairs(d, e, bound)
    if len(pairs) > pair_budget:
        chosen = sorted(rng.choice(len(pairs), size=pair_budget, replace=False))
        pairs = [pairs[i] for i in chosen]
    payloads = []
    for pi, sigma in pairs:
        for alpha, beta in coefficients:
            payloads.append((len(payloads), str(d), str(e), pi, sigma, alpha, beta, n, bound))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_instance, payloads))
    else:
        records = [_run_instance(payload) for payload in payloads]
    records.sort(key=lambda record: record["instance"])

    frame = pd.DataFrame.from_records(records)
    counts = frame.groupby("verdict").size().to_dict() if len(frame) else {}
    stuck = [record for record in records if record["verdict"] == STUCK]
    for record in stuck:
        logger.warning("potential counterexample in series %s: %s", series, record)
    return {
        "series": series,
        "D": str(d),
        "E": str(e),
        "n": n,
        "bound": bound,
        "seed": seed,
        "coefficients": [[str(Fraction(a)), str(Fraction(b))] for a, b in coefficients],
        "pairs": len(pairs),
        "instances": len(records),
        "counts": {verdict: int(count) for verdict, count in counts.items()},
        "stuck": stuck,
        "expected_inconclusive": series == 'H',
        "records": records,
    }
