from .enumeration import run_close_api, run_enumerate_api
from .envelopes import run_brauer_api, run_envelope_api
from .halfliberation import run_halflib_api
from .levels import run_level_api, run_presentation_api
from .maximality_runs import run_maximality_api, run_replay_api

# Registry to map CLI subcommand names to their check functions
CHECKS_REGISTRY = {
    "enumerate": run_enumerate_api,
    "close": run_close_api,
    "envelope": run_envelope_api,
    "brauer": run_brauer_api,
    "level": run_level_api,
    "presentation": run_presentation_api,
    "verify-halflib": run_halflib_api,
    "maximality": run_maximality_api,
    "replay": run_replay_api,
}


def get_check(check_name: str):
    """
    Retrieve a check function by its name.
    """
    return CHECKS_REGISTRY.get(check_name)
