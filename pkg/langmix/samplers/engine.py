"""
Replica-block execution.

Replicas are split into fixed blocks of REPLICA_BLOCK; block b draws every random
number from generators keyed by (seed, b, channel), so results do not depend on the
worker count. Blocks run on a thread pool and are reduced in block order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from langmix.config.settings import get_settings

REPLICA_BLOCK = 1024
STREAM_CHUNK = 256


def replica_blocks(replicas: int) -> List[Tuple[int, int]]:
    """(block index, block size) pairs covering ``replicas``."""
    return [
        (b, min(REPLICA_BLOCK, replicas - start))
        for b, start in enumerate(range(0, replicas, REPLICA_BLOCK))
    ]


@dataclass
class Moments:
    """
    Count, mean and centred sum of squares of a per-replica quantity at each record point.

    Blocks are combined with the pairwise update, so the variance is never a difference
    of raw second moments.
    """

    count: np.ndarray
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def zeros(cls, records: int) -> "Moments":
        return cls(np.zeros(records), np.zeros(records), np.zeros(records))

    def _combine(self, index: Any, count: Any, mean: Any, m2: Any) -> None:
        n_a = self.count[index]
        total = n_a + count
        with np.errstate(invalid="ignore", divide="ignore"):
            share = np.where(total > 0, count / total, 0.0)
        delta = mean - self.mean[index]
        self.mean[index] = self.mean[index] + delta * share
        self.m2[index] = self.m2[index] + m2 + delta * delta * n_a * share
        self.count[index] = total

    def add(self, index: int, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return
        mean = float(np.mean(values))
        m2 = float(np.sum((values - mean) ** 2))
        self._combine(index, float(values.size), mean, m2)

    def merge(self, other: "Moments") -> None:
        self._combine(slice(None), other.count, other.mean, other.m2)

    def mean_se(self) -> Tuple[np.ndarray, np.ndarray]:
        """Mean and standard error of the mean at each record point."""
        n = self.count
        var = np.where(n > 1, self.m2 / np.maximum(n - 1.0, 1.0), 0.0)
        return self.mean.copy(), np.sqrt(var / np.maximum(n, 1.0))


@dataclass
class BlockResult:
    """Moments produced by one replica block, keyed by trace name."""

    count: int
    traces: Dict[str, Moments] = field(default_factory=dict)
    window: Dict[str, Moments] = field(default_factory=dict)
    final_states: Optional[np.ndarray] = None

    def merge(self, other: "BlockResult") -> None:
        self.count += other.count
        for name, moments in other.traces.items():
            self.traces[name].merge(moments)
        for name, moments in other.window.items():
            self.window[name].merge(moments)
        if other.final_states is not None:
            self.final_states = (
                other.final_states
                if self.final_states is None
                else np.concatenate([self.final_states, other.final_states])
            )


def run_blocks(
    task: Callable[[int, int], BlockResult], replicas: int, threads: Optional[int] = None
) -> BlockResult:
    """Run ``task(block, size)`` for every block and reduce the results in block order."""
    blocks = replica_blocks(replicas)
    workers = max(1, min(threads or get_settings().threads, len(blocks)))
    logger.debug(f"Running {replicas} replicas in {len(blocks)} blocks on {workers} workers")

    if workers == 1:
        results = [task(b, size) for b, size in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda bs: task(*bs), blocks))

    total = results[0]
    for result in results[1:]:
        total.merge(result)
    return total


def window_mask(record_points: np.ndarray, horizon: int) -> np.ndarray:
    """Record points in the last third of the horizon."""
    return record_points >= (2 * horizon) / 3.0


def chunk_bounds(horizon: int, chunk: int = STREAM_CHUNK) -> Sequence[Tuple[int, int]]:
    """Half-open step ranges [start, stop) of at most ``chunk`` steps."""
    return [(start, min(start + chunk, horizon)) for start in range(0, horizon, chunk)]
