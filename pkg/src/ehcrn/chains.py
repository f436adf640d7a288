"""Correlated two-state Markov chains and reproducible random streams.

Both the spectrum occupancy process (idle / occupied) and the energy
arrival process (harvesting / not harvesting) are instances of the same
two-state chain, parameterised by the two self-transition probabilities.
States are encoded as the integers ``STATE_A = 0`` and ``STATE_B = 1`` so
the simulator can work on plain integer arrays.
"""

from dataclasses import dataclass

import numpy as np

STATE_A = 0
STATE_B = 1


@dataclass(frozen=True)
class TwoStateChain:
    """A correlated binary Markov process.

    ``stay_a`` is the probability of remaining in state A on the next
    slot, ``stay_b`` the probability of remaining in state B.  ``labels``
    carries semantic tags for the two states (for messages only).
    """

    stay_a: float
    stay_b: float
    labels: tuple[str, str] = ("A", "B")

    def __post_init__(self):
        for name, p in (("stay_a", self.stay_a), ("stay_b", self.stay_b)):
            if not 0.0 <= float(p) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
        if self.stay_a == 1.0 and self.stay_b == 1.0:
            raise ValueError(
                f"degenerate chain ({self.labels[0]}/{self.labels[1]}): both "
                "self-transition probabilities are 1, so both states are "
                "absorbing and no unique stationary distribution exists"
            )


def steady_state(chain: TwoStateChain) -> tuple[float, float]:
    """Stationary probabilities (pi_a, pi_b) of the chain.

    pi_a = (1 - stay_b) / (2 - stay_a - stay_b); the pair is the fixed
    point of the 2x2 transition matrix and sums to 1 exactly because the
    second entry is constructed as the complement.
    """
    pi_a = (1.0 - chain.stay_b) / (2.0 - chain.stay_a - chain.stay_b)
    return pi_a, 1.0 - pi_a


def step_chain(chain: TwoStateChain, current: int, rng: "RandomStream") -> int:
    """Advance the chain one slot; consumes exactly one uniform draw."""
    u = rng.uniform()
    if current == STATE_A:
        return STATE_A if u < chain.stay_a else STATE_B
    if current == STATE_B:
        return STATE_B if u < chain.stay_b else STATE_A
    raise ValueError(f"current state must be {STATE_A} or {STATE_B}, got {current!r}")


class RandomStream:
    """A reproducible random source addressed by (seed, stream_id).

    Identical (seed, stream_id) pairs yield identical sample sequences
    across runs and across degrees of parallelism; distinct stream ids on
    the same seed give statistically independent substreams.  Each stream
    is single-owner: one simulation replication per instance.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed = int(seed)
        stream_id = int(stream_id)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
        if not 0 <= stream_id < 2**32:
            raise ValueError(f"stream_id must be in [0, 2**32), got {stream_id!r}")
        self.seed = seed
        self.stream_id = stream_id
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream_id,)))
        )

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy generator (single-owner, stateful)."""
        return self._gen

    def uniform(self) -> float:
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(n)

    def normals(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)

    @staticmethod
    def derive_seed(seed: int, *key: int) -> int:
        """Derive a child seed from a base seed and an integer key path.

        Deterministic and collision-resistant; used to give every sweep
        point its own independent seed that is reported alongside the
        results.
        """
        ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
        return int(ss.generate_state(1, np.uint64)[0])

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"
