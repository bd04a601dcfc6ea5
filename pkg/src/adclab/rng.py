"""Seeded random streams shared by sampling, initialization and training.

One generator type is used everywhere: numpy's Philox, a 64-bit
counter-based generator keyed directly with ``(seed, stream)``.  Normal
variates are produced by Box-Muller on the uniform stream rather than by
``Generator.normal`` so that the distributional behaviour is pinned to the
uniform stream alone and is reproducible for any port that consumes
uniforms in the same order.
"""

from __future__ import annotations

import numpy as np

# Stream ids carve independent substreams out of one run seed.
STREAM_PARAMS = 0
STREAM_TRAIN = 1
STREAM_EVAL = 2
STREAM_PLOT = 3


def philox_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream); same key, same stream."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(gen: np.random.Generator, n: int) -> np.ndarray:
    """n doubles uniform on [0, 1)."""
    return gen.random(n)


def normals(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via Box-Muller on the uniform stream.

    Consumes 2*ceil(n/2) uniforms.  The log argument is 1-u which lies in
    (0, 1], so no clamping is needed.
    """
    m = (n + 1) // 2
    u1 = 1.0 - gen.random(m)
    u2 = gen.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:n]
