"""Run-wide defaults.

Every tunable default used by the library and the command line lives in
:data:`DEFAULTS`.  CLI flags override individual fields; the effective
values are embedded in every output file so a run can be reproduced from
its own output.

Fields
------
seed : int
    Seed used when neither ``--seed`` nor ``BOHR_SAMPLER_SEED`` is given.
probe_grid, probe_random : int
    Finite surrogate for "every a in I" in matching checks: a uniform grid
    of ``probe_grid`` points plus ``probe_random`` seeded uniform points.
trials : int
    Monte Carlo trial count.
family_cap : int
    Maximum number of n-subsets enumerated in Monte Carlo 𝔓-family scans;
    above it a seeded random sub-enumeration of this size is used.
grid_cap : int
    Maximum cardinality of a chirp grid that may be iterated.
tsbd_kmax_cap : int
    Largest block index for which (k!)^4 schedules are materialized.
dyadic_level : int
    Default box family resolution 2**-level per axis for discrepancy.
sojourn_step : float
    Default time step for sojourn-fraction sampling in discrepancy.
sup_step : float
    Default grid step for sup-norm estimates.
rcond : float
    Relative singular value cutoff for rank decisions in reconstruction.
int_enum_cap : int
    Largest integer interval enumerated by the ℤ neighborhood path.
"""

import dataclasses
import hashlib
import json


@dataclasses.dataclass(frozen=True)
class Defaults:
    seed: int = 0
    probe_grid: int = 1000
    probe_random: int = 1000
    trials: int = 10_000
    family_cap: int = 1_000_000
    grid_cap: int = 1_000_000
    tsbd_kmax_cap: int = 12
    dyadic_level: int = 5
    sojourn_step: float = 2.0**-10
    sup_step: float = 1e-3
    rcond: float = 1e-12
    int_enum_cap: int = 10_000_000

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)


DEFAULTS = Defaults()

SEED_ENV_VAR = "BOHR_SAMPLER_SEED"


def config_hash(config):
    """Stable SHA-256 of a JSON-serializable config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
