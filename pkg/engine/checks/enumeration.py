from ..categories import STABLE_WITHIN_BOUND, close_linear, close_partitions
from ..framework import INCONCLUSIVE, PASS
from ..linmaps import build_map
from ..partitions import enumerate_partitions, format_partition, parse_partition, read_partition_file


def run_enumerate_api(config, upper='', lower=''):
    found = enumerate_partitions(upper, lower)
    return {
        "verdict": PASS,
        "report": {"enumeration": {"words": f"{upper or '∅'} -> {lower or '∅'}", "partitions": len(found)}},
        "result": {"upper": upper, "lower": lower, "count": len(found),
                   "partitions": [format_partition(pi) for pi in found]},
    }


def _generators(gens):
    if gens is None:
        return []
    if isinstance(gens, str):
        return read_partition_file(gens)
    return [parse_partition(item) if isinstance(item, str) else item for item in gens]


def run_close_api(config, gens=None, bound=None, linear=False, n=None, real=False):
    """
    :param gens: path of a partition file, or a list of partitions / partition texts
    :param linear: close the maps T_π at size n instead of the partitions
    """
    bound = config.bounds.closure if bound is None else bound
    generators = _generators(gens)
    if linear:
        if n is None:
            raise ValueError("a linear closure needs the matrix size n")
        table = close_linear([build_map(pi, n) for pi in generators], n, bound, real)
    else:
        table = close_partitions(generators, bound, real)
    verdict = PASS if table.status == STABLE_WITHIN_BOUND else INCONCLUSIVE
    return {
        "verdict": verdict,
        "report": {
            "closure": {"generators": len(generators), "bound": bound, "kind": table.kind,
                        "status": table.status, "generations": table.generations},
            "cell sizes": {f"|{word}": size for word, size in table.sizes().items()},
        },
        "result": table.to_json(),
    }
