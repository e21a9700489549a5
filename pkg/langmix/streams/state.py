"""
Live stream generator state.

Innovations are drawn time-major with shape (steps, paths, m), so n calls of
:func:`stream_next` consume exactly the same innovations, in the same order, as one
call of :func:`stream_take` with n steps.
"""

from typing import Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve

from langmix.errors import ContractViolationError, DomainError
from langmix.streams.rng import STREAM_CHANNEL, make_generator, rng_algorithm
from langmix.streams.spec import LinearProcessSpec

# Above this truncation order outputs are computed by FFT convolution.
_DIRECT_MAX_K = 64
# Bound on floats held per chunk when drawing stationary samples.
_CHUNK_FLOATS = 1 << 22


class StreamState:
    """Single-owner generator state for ``paths`` independent copies of a stream."""

    def __init__(self, seed: int, paths: int = 1, keys: Tuple[int, ...] = ()):
        """
        Initialize an empty state; call :func:`stream_init` before advancing.

        Args:
            seed: Unsigned 64-bit seed
            paths: Number of independent paths advanced together
            keys: Extra derivation keys (block index, ...) appended to the seed
        """
        if paths < 1:
            raise DomainError(f"paths must be positive, got {paths}")
        self.seed = int(seed)
        self.keys = tuple(keys)
        self.paths = int(paths)
        self.n = 0
        self.ring: Optional[np.ndarray] = None
        self.rng = make_generator(self.seed, *self.keys, STREAM_CHANNEL)

    @property
    def algorithm(self) -> str:
        return rng_algorithm()

    @property
    def initialized(self) -> bool:
        return self.ring is not None


def stream_init(
    spec: LinearProcessSpec, seed: int, paths: int = 1, keys: Tuple[int, ...] = ()
) -> StreamState:
    """Create a state with the ring pre-warmed by the innovations eps_{-K..0}."""
    state = StreamState(seed, paths, keys)
    state.ring = state.rng.standard_normal((spec.K + 1, state.paths, spec.m))
    return state


def stream_take(state: StreamState, spec: LinearProcessSpec, steps: int) -> np.ndarray:
    """
    Emit X_{n+1}, ..., X_{n+steps} and advance the state.

    Returns:
        Array of shape (steps, paths, m)
    """
    if state.ring is None:
        raise ContractViolationError("Stream state ring is not initialized; call stream_init")
    if state.ring.shape[0] != spec.K + 1 or state.ring.shape[2] != spec.m:
        raise ContractViolationError(
            f"Ring shape {state.ring.shape} does not match spec (K={spec.K}, m={spec.m})"
        )
    if steps < 0:
        raise DomainError(f"steps must be nonnegative, got {steps}")
    if steps == 0:
        return np.empty((0, state.paths, spec.m))

    K = spec.K
    a = spec.coefficients
    fresh = state.rng.standard_normal((steps, state.paths, spec.m))
    buffer = np.concatenate([state.ring[1:], fresh], axis=0)

    if K <= _DIRECT_MAX_K:
        out = np.zeros_like(fresh)
        for k in range(K + 1):
            if a[k] != 0.0:
                out += a[k] * buffer[K - k : K - k + steps]
    else:
        out = fftconvolve(buffer, a[:, None, None], mode="valid", axes=0)

    state.ring = np.concatenate([state.ring, fresh], axis=0)[-(K + 1) :]
    state.n += steps
    return out


def stream_next(state: StreamState, spec: LinearProcessSpec) -> Tuple[np.ndarray, StreamState]:
    """Emit X_{n+1} = sum_k a_k eps_{n+1-k} (shape (paths, m)) and advance by one."""
    value = stream_take(state, spec, 1)[0]
    return value, state


def stationary_draws(spec: LinearProcessSpec, samples: int, seed: int) -> np.ndarray:
    """
    Independent draws from the stationary law of the truncated process.

    Each draw is the first output of its own path; paths are generated in chunks so
    memory stays bounded for long truncations.

    Returns:
        Array of shape (samples, m)
    """
    per_chunk = max(1, _CHUNK_FLOATS // ((spec.K + 2) * spec.m))
    out = np.empty((samples, spec.m))
    for chunk, start in enumerate(range(0, samples, per_chunk)):
        size = min(per_chunk, samples - start)
        state = stream_init(spec, seed, paths=size, keys=(chunk,))
        out[start : start + size] = stream_take(state, spec, 1)[0]
    return out
