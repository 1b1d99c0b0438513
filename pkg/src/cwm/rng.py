"""Deterministic random-stream derivation.

Every stochastic routine in the package draws from a stream derived from an
integer seed plus the indices that identify the unit of work (draw number,
replicate number, grid point, ...).  Streams are independent of execution
order and of worker count, so parallel runs reproduce serial runs bit for
bit.
"""

import numpy as np

__all__ = ["spawn_rng", "derive_seed"]


def spawn_rng(*key: int) -> np.random.Generator:
    """Return a generator keyed on the given integers.

    Uses the counter-based Philox bit generator under a SeedSequence mix of
    the key parts, so (seed, i) and (seed, j) give independent streams for
    i != j.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def derive_seed(*key: int) -> int:
    """Collapse a key tuple into a single integer seed (stable across runs)."""
    return int(np.random.SeedSequence(key).generate_state(1, np.uint64)[0])
