"""Seeded, splittable random streams.

Every stochastic operation in the package draws from a numpy Generator that
is derived from a user seed plus a fixed integer path, so any run can be
replayed bit-for-bit and independent streams never share state. The path
convention:

    stream(seed)                 session-level stream
    stream(seed, ROUNDS, i)      stream for round i of a session
    stream(seed, COIN)           public coin for test-round selection
    stream(seed, SESSIONS, k)    per-session stream inside a Monte Carlo sweep

Derivation uses ``numpy.random.SeedSequence(entropy=seed, spawn_key=path)``,
which is the documented way to build non-overlapping child streams.
"""

from __future__ import annotations

import numpy as np

RandomStream = np.random.Generator

# spawn-key domains
ROUNDS = 0
COIN = 1
SESSIONS = 2


def stream(seed: int, *path: int) -> RandomStream:
    """Return the deterministic Generator at `path` under `seed`."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.PCG64(ss))


def round_stream(seed: int, index: int) -> RandomStream:
    """The stream round `index` of a session under `seed` draws from."""
    return stream(seed, ROUNDS, index)


def child_seed(seed: int, *path: int) -> int:
    """Derive an integer seed at `path`, e.g. one per Monte Carlo session."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def session_seeds(seed: int, n: int) -> list[int]:
    """Independent per-session seeds for an n-session Monte Carlo sweep."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(SESSIONS,))
    return [int(s) for s in ss.generate_state(n, dtype=np.uint64)]
