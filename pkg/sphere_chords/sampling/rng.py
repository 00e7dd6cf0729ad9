"""Seeded random streams, sample batches and deterministic sharding."""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.logging import get_logger


logger = get_logger(__name__)


@dataclass
class RngStream:
    """
    A reproducible random stream.

    Identical (seed, stream_id) pairs produce identical draws: the generator is
    seeded from ``SeedSequence(seed, spawn_key=(stream_id,))``.
    """
    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("Seed and stream id must be non-negative")
        sequence = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.default_rng(sequence)


def as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    return rng.generator if isinstance(rng, RngStream) else rng


@dataclass
class SampleBatch:
    """Accepted samples together with acceptance bookkeeping."""
    values: npt.NDArray[np.float64]
    n_attempted: int
    n_accepted: int = field(init=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        self.n_accepted = int(len(self.values))
        if self.n_accepted > self.n_attempted:
            raise DomainError(
                f"Accepted {self.n_accepted} samples out of {self.n_attempted} attempts"
            )

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_attempted if self.n_attempted else 0.0

    @property
    def acceptance_se(self) -> float:
        """Binomial standard error of the acceptance rate."""
        if not self.n_attempted:
            return 0.0
        p = self.acceptance_rate
        return float(np.sqrt(p * (1.0 - p) / self.n_attempted))

    @classmethod
    def merge(cls, batches: list["SampleBatch"]) -> "SampleBatch":
        """Concatenate batches in order and sum their attempts."""
        if not batches:
            return cls(values=np.empty((0,)), n_attempted=0)
        return cls(
            values=np.concatenate([b.values for b in batches], axis=0),
            n_attempted=sum(b.n_attempted for b in batches),
        )


def shard_sizes(n: int, workers: int) -> list[int]:
    """Split n draws over workers; earlier workers take the remainder."""
    if n < 0 or workers < 1:
        raise DomainError(f"Need n >= 0 and workers >= 1, got n={n}, workers={workers}")
    base, extra = divmod(n, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


# Stream ids reserved per independent estimate; sharded workers use offset + w.
STREAM_BLOCK = 1024


def run_sharded(
    task: Callable[[int, RngStream], SampleBatch],
    n: int,
    seed: int,
    workers: Optional[int] = None,
    stream_offset: int = 0,
) -> SampleBatch:
    """
    Run ``task(n_w, stream_w)`` on streams (seed, stream_offset + w) and merge in worker order.

    The output depends only on (n, seed, workers, stream_offset), never on scheduling.
    """
    workers = get_settings().execution.workers if workers is None else workers
    if workers > STREAM_BLOCK:
        raise DomainError(f"At most {STREAM_BLOCK} workers are supported, got {workers}")
    sizes = shard_sizes(n, workers)
    streams = [RngStream(seed=seed, stream_id=stream_offset + w) for w in range(workers)]
    if workers == 1:
        return task(sizes[0], streams[0])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        batches = list(pool.map(task, sizes, streams))
    merged = SampleBatch.merge(batches)
    logger.debug("merged shards", workers=workers, n=n, accepted=merged.n_accepted)
    return merged
