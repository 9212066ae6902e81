import os
from dataclasses import dataclass, field, replace

from dotenv import load_dotenv

OUTPUT_FORMATS = ('json', 'text')


@dataclass(frozen=True)
class Bounds:
    harvest: int = 4
    closure: int = 4
    legs: int = 6


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20240601
    memory_budget: int = 256 * 1024 * 1024
    bounds: Bounds = field(default_factory=Bounds)
    tolerance: float = 1e-6
    rank_threshold: float = 1e-6
    samples: int = 2000
    max_subsets: int = 250000
    capping_depth: int = 6
    output: str = 'json'
    workers: int = 1

    def __post_init__(self):
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"output must be one of {OUTPUT_FORMATS}, got {self.output!r}")
        if self.samples < 1 or self.workers < 1 or self.memory_budget < 1:
            raise ValueError("samples, workers and memory_budget must be positive")

    def with_overrides(self, **overrides):
        """Copy with CLI overrides; None values keep the current setting."""
        bounds = {key: overrides.pop(key) for key in ('harvest', 'closure', 'legs') if key in overrides}
        bounds = {key: value for key, value in bounds.items() if value is not None}
        changes = {key: value for key, value in overrides.items() if value is not None}
        if bounds:
            changes['bounds'] = replace(self.bounds, **bounds)
        return replace(self, **changes)

    def sampling(self):
        """Settings every sampled-path result embeds."""
        return {"seed": self.seed, "tolerance": self.tolerance, "samples": self.samples,
                "rank_threshold": self.rank_threshold}

    def to_dict(self):
        return {
            "seed": self.seed,
            "memory_budget": self.memory_budget,
            "bounds": {"harvest": self.bounds.harvest, "closure": self.bounds.closure, "legs": self.bounds.legs},
            "tolerance": self.tolerance,
            "rank_threshold": self.rank_threshold,
            "samples": self.samples,
            "max_subsets": self.max_subsets,
            "capping_depth": self.capping_depth,
            "output": self.output,
            "workers": self.workers,
        }


_ENV_FIELDS = {
    'PARTITIONS_SEED': ('seed', int),
    'PARTITIONS_MEMORY_BUDGET': ('memory_budget', int),
    'PARTITIONS_TOLERANCE': ('tolerance', float),
    'PARTITIONS_RANK_THRESHOLD': ('rank_threshold', float),
    'PARTITIONS_SAMPLES': ('samples', int),
    'PARTITIONS_MAX_SUBSETS': ('max_subsets', int),
    'PARTITIONS_CAPPING_DEPTH': ('capping_depth', int),
    'PARTITIONS_OUTPUT': ('output', str),
    'PARTITIONS_WORKERS': ('workers', int),
}

_ENV_BOUNDS = {
    'PARTITIONS_HARVEST_BOUND': 'harvest',
    'PARTITIONS_CLOSURE_BOUND': 'closure',
    'PARTITIONS_LEG_BOUND': 'legs',
}


def _parse(name, raw, cast):
    try:
        return cast(raw.strip())
    except ValueError as exc:
        raise ValueError(f"cannot parse {name}={raw!r}") from exc


def load_config(env=None):
    """
    Build the run configuration from ``PARTITIONS_*`` variables.

    :param env: mapping to read instead of the process environment (a .env file is loaded
        into the process environment first)
    """
    if env is None:
        load_dotenv()
        env = os.environ
    values = {}
    for name, (attr, cast) in _ENV_FIELDS.items():
        if env.get(name):
            values[attr] = _parse(name, env[name], cast)
    bounds = {}
    for name, attr in _ENV_BOUNDS.items():
        if env.get(name):
            bounds[attr] = _parse(name, env[name], int)
    return RunConfig(bounds=Bounds(**bounds), **values)


DEFAULT_CONFIG = RunConfig()
