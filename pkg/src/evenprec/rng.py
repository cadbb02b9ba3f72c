"""Counter-based random streams.

Item ``i`` (a round, a Monte Carlo sample, a trial) always draws from
Philox counter block ``i`` under the key ``seed``. A block holds four
doubles, so results do not depend on how the work is chunked or threaded.
"""
import numpy as np

BLOCK = 4


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles of shape ``(count, 4)`` for items ``start..start+count-1``."""
    bitgen = np.random.Philox(key=int(seed))
    if start:
        bitgen.advance(int(start))
    return np.random.Generator(bitgen).random(BLOCK * int(count)).reshape(count, BLOCK)


def item_generator(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for item ``index`` (for draws of variable length)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream), int(index)])))
