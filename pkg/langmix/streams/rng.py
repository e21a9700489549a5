"""
Reproducible random number generation.

Streams are numpy ``Philox`` counter-based generators keyed through ``SeedSequence``:
``(seed, *keys)`` always maps to the same generator, so replica blocks, stream
innovations and Langevin noise each draw from their own independent stream regardless
of how work is scheduled.
"""

import numpy as np

# Key channels inside one replica block.
STREAM_CHANNEL = 0
NOISE_CHANNEL = 1
INIT_CHANNEL = 2
AUX_CHANNEL = 3

MAX_SEED = 2**64 - 1


def rng_algorithm() -> str:
    """Identifier recorded in every manifest."""
    return f"numpy.random.Philox+SeedSequence/numpy-{np.__version__}"


def make_generator(seed: int, *keys: int) -> np.random.Generator:
    """Build the generator for ``seed`` and derived keys (block index, channel, ...)."""
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(sequence))
