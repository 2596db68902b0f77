"""Guards and suite sizes in one record.

Defaults can be overridden from a JSON file (``--config``) and then from CLI
flags. Every explicit limit in the package reads from :data:`DEFAULTS` unless a
``Config`` is passed in.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


class GuardExceeded(ValueError):
    """A size guard would be exceeded by the requested computation."""


@dataclass(frozen=True)
class Config:
    # pattern analysis (cycles, automorphisms, canonical forms) is exhaustive
    node_cap: int = 12
    # 2^|E(F)| edge subsets are enumerated for a subgraph spectrum
    spectrum_edge_cap: int = 20
    # |V(G)|^|V(F)| maps for brute-force counting
    brute_guard: int = 10**9
    # elimination width for the dense DP
    dp_width_cap: int = 8
    # |V(G)|^(width+1) entries touched by one dense elimination step
    dense_budget: int = 3 * 10**7
    tensor_part_guard: int = 10**4
    product_guard: int = 10**5
    random_kernel_retries: int = 50
    # property-suite sizes
    oracle_cases: int = 500
    mirror_cases: int = 200
    balanced_cases: int = 300
    expansion_cases: int = 200
    identity_cases: int = 100
    goodman_cases: int = 100
    positivity_cases: int = 200
    multiplicativity_cases: int = 100
    seed: int = 20240611

    def updated(self, **overrides) -> "Config":
        known = {f.name for f in fields(self)}
        clean = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(clean) - known
        if unknown:
            raise KeyError(f"unknown config keys: {sorted(unknown)}")
        return replace(self, **clean)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULTS = Config()


def load_config(path: str | Path | None = None, **overrides) -> Config:
    cfg = DEFAULTS
    if path is not None:
        data = json.loads(Path(path).read_text())
        cfg = cfg.updated(**data)
    return cfg.updated(**overrides)
