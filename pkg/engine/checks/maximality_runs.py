import json

from ..framework import FAIL, INCONCLUSIVE, PASS
from ..maximality import DEFAULT_COEFFICIENTS, REACHES_SPAN_E, STUCK, CappingCertificate, replay, series_runner


def run_maximality_api(config, series='S', n=None, bound=None, coefficients=None, budget=50):
    bound = config.bounds.closure if bound is None else bound
    if n is None:
        raise ValueError("a maximality run needs the matrix size n")
    coefficients = DEFAULT_COEFFICIENTS if coefficients is None else coefficients
    report = series_runner(series, n, bound, coefficients, budget, config.seed, config.workers)
    stuck = report["counts"].get(STUCK, 0)
    if stuck:
        verdict = INCONCLUSIVE if report["expected_inconclusive"] else FAIL
    elif report["counts"].get(REACHES_SPAN_E, 0):
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    sections = {
        "series": {"inclusion": f"{report['D']} ⊂ {report['E']}", "n": n, "bound": bound,
                   "pairs": report["pairs"], "instances": report["instances"]},
        "verdicts": report["counts"],
    }
    if stuck:
        sections["potential counterexamples"] = {
            f"#{record['instance']}": f"{record['pi']} / {record['sigma']} ({record['alpha']}, {record['beta']})"
            for record in report["stuck"]
        }
    return {"verdict": verdict, "report": sections, "result": report}


def run_replay_api(config, cert=None):
    """
    :param cert: path of a certificate JSON file, or the certificate itself
    """
    if isinstance(cert, str):
        with open(cert) as handle:
            cert = json.load(handle)
    certificate = cert if isinstance(cert, CappingCertificate) else CappingCertificate.from_json(cert)
    found = replay(certificate)
    return {
        "verdict": PASS if found["valid"] else FAIL,
        "report": {"replay": {"steps": len(certificate.steps), "valid": found["valid"],
                              "failed step": found["failed_step"]}},
        "result": dict(found, certificate=certificate.to_json()),
    }
