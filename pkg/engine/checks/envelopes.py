from ..easiness import brauer_check, easy_envelope
from ..framework import FAIL, PASS
from ..groups import parse_group_spec


def run_envelope_api(config, group=None, bound=None):
    """
    :param group: group spec, JSON text or dict
    """
    g = parse_group_spec(group)
    bound = config.bounds.closure if bound is None else bound
    envelope = easy_envelope(g, bound, config)
    closed = envelope.is_category()
    result = envelope.to_json()
    result["is_category"] = closed
    if not g.exact:
        result["residuals"] = envelope.residuals
    return {
        "verdict": PASS if closed else FAIL,
        "report": {
            "envelope": {"group": g.label, "bound": bound, "closed under the category operations": closed},
            "cell sizes": {f"|{word}": size for word, size in envelope.table.sizes().items()},
        },
        "result": result,
    }


def run_brauer_api(config, group=None, bound=None):
    g = parse_group_spec(group)
    bound = config.bounds.closure if bound is None else bound
    found = brauer_check(g, bound, config)
    comparison = found["comparison"]
    return {
        "verdict": PASS if comparison else FAIL,
        "report": {
            "expected envelope": {"group": g.label, "category": found["expected"], "bound": bound},
            "comparison": {"equal": comparison.equal, "cell": comparison.cell, "side": comparison.side},
        },
        "result": {"expected": found["expected"], "comparison": comparison.to_json(),
                   "envelope": found["envelope"].to_json()},
    }
