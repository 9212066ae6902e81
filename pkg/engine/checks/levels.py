from ..easiness import FIXED_POINTS, easiness_level_probe, presentation_level_probe
from ..framework import FAIL, INCONCLUSIVE, PASS
from ..groups import parse_group_spec


def run_level_api(config, group=None, pmax=1, harvest_bound=None, closure_bound=None, harvest=FIXED_POINTS,
                  presentation_level=None):
    g = parse_group_spec(group)
    harvest_bound = config.bounds.harvest if harvest_bound is None else harvest_bound
    closure_bound = config.bounds.closure if closure_bound is None else closure_bound
    report = easiness_level_probe(g, pmax, harvest_bound, closure_bound, harvest, presentation_level, config)
    verdict = PASS if report.level is not None else FAIL
    return {
        "verdict": verdict,
        "report": {
            "probe": {"group": g.label, "bounds": f"{harvest_bound},{closure_bound}", "harvest": harvest},
            "per p": {f"p={p}": found["verdict"] + (f" at {found['witness_cell']}" if "witness_cell" in found else "")
                      for p, found in report.per_p.items()},
        },
        "result": report.to_json(),
    }


def run_presentation_api(config, group=None, rmax=1, bound=None):
    g = parse_group_spec(group)
    bound = config.bounds.closure if bound is None else bound
    report = presentation_level_probe(g, rmax, bound, config)
    return {
        "verdict": PASS if report.level is not None else INCONCLUSIVE,
        "report": {
            "probe": {"group": g.label, "r_max": rmax, "bound": bound},
            "tried": {f"r={r}": verdict for r, verdict in report.tried.items()},
        },
        "result": report.to_json(),
    }
