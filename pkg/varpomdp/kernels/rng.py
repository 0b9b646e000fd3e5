# The MIT License (MIT)
# Copyright © 2024 varpomdp developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

from typing import Tuple, Union
from dataclasses import dataclass

import numpy as np


MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A named position in a counter-based random number space.

    Two streams with the same (seed, stream_id, path) produce the same draws. Parallel
    sites never share a generator: each derives its own substream with `substream`, so
    the result of a run does not depend on execution order or thread count.
    """

    seed: int
    stream_id: int = 0
    path: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & MASK64)

    def substream(self, *keys: int) -> "RngStream":
        return RngStream(
            seed=self.seed,
            stream_id=self.stream_id,
            path=self.path + tuple(int(k) & MASK64 for k in keys),
        )

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id,) + self.path
        )
        return np.random.Generator(np.random.Philox(sequence))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    raise TypeError(f"Expected RngStream or numpy Generator, got {type(rng).__name__}")


def as_stream(rng) -> RngStream:
    """Coerces a seed, stream or generator into an RngStream for substream derivation."""
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    if isinstance(rng, np.random.Generator):
        return RngStream(int(rng.integers(0, 2**63)))
    raise TypeError(f"Expected a seed, RngStream or numpy Generator, got {type(rng).__name__}")
