"""Deterministic random streams for reproducible (and parallel) Monte Carlo.

Streams are counter-based (Philox) and keyed by ``(master_seed, stream_id)``:
the same key produces the same draw sequence on every platform and for any
number of concurrently running streams.  Parallel trials therefore use
``stream_id = trial_index`` and merge results in index order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    """A named, reproducible random stream.

    Parameters
    ----------
    master_seed : int
        Experiment-level seed.
    stream_id : int
        Sub-stream selector (e.g. the trial index).
    """

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = int(master_seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._generator = np.random.Generator(
            np.random.Philox(key=np.array([self.master_seed, self.stream_id], dtype=np.uint64))
        )

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def substream(self, stream_id: int) -> "RngStream":
        """A fresh stream with the same master seed and a new stream id."""
        return RngStream(self.master_seed, stream_id)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"
