from ..easiness import DOCUMENTED_EXPECTATIONS
from ..framework import FAIL, PASS
from ..halflib import (
    COMPLEX, REAL, TARGETS, build_F, emit_relations, exact_compliance, frame_independence, relation_compliance,
    triple_equality,
)


def run_halflib_api(config, n=None, legs=3, compliance_samples=20):
    """
    :param compliance_samples: classical samples per relation target (each check builds
        n^legs x n^legs tensor powers)
    """
    if n is None:
        raise ValueError("verify-halflib needs the matrix size n")
    frames = {flavor: build_F(n, flavor).check() for flavor in (REAL, COMPLEX)}
    equality = triple_equality(n, legs)
    independence = frame_independence(n, legs, seed=config.seed)
    counts = {target: len(emit_relations(target, n)) for target in TARGETS}
    targets = ('BNo', 'CNo', 'CNx') if legs == 3 else ('CNoo', 'UNss')
    compliance = {target: relation_compliance(target, n, compliance_samples, config.seed) for target in targets}
    exact = exact_compliance(n) if n in (3, 4) else None
    holds = (all(found["holds"] for found in frames.values()) and equality["holds"] and independence["holds"]
             and all(found["holds"] for found in compliance.values())
             and (exact is None or exact["holds"]))
    return {
        "verdict": PASS if holds else FAIL,
        "report": {
            "frames": {flavor: "ok" if found["holds"] else "violated" for flavor, found in frames.items()},
            "crossing map": {"legs": legs, "conjugated = explicit = Möbius": equality["holds"],
                             "frame independence gap": f"{independence['gap']:.3g}"},
            "relations": counts,
            "classical compliance": {target: found["holds"] for target, found in compliance.items()},
            "exact bistochastic generators": {"n": n, "holds": "n/a" if exact is None else exact["holds"]},
        },
        "result": {
            "frames": frames,
            "triple_equality": equality,
            "frame_independence": independence,
            "relation_counts": counts,
            "compliance": compliance,
            "exact_compliance": exact,
            "documented_expectations": DOCUMENTED_EXPECTATIONS,
        },
    }
