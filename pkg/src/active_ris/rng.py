"""Deterministic random-stream derivation.

All stochastic code in the toolkit draws from numpy Generators built here.
Streams are derived from (master seed, integer keys) through SeedSequence,
so every estimate is reproducible bit-for-bit from its seed alone and
independent of how work is scheduled.

Monte-Carlo loops are partitioned into fixed-size batches of trials; batch
``i`` always uses the stream keyed ``(seed, i)`` and results are accumulated
in batch order.  The partition depends only on (seed, trials), never on
thread or process count.
"""

import numpy as np

# Trials per substream.  Fixed: changing it changes every estimate.
BATCH_TRIALS = 32768


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the substream addressed by (seed, *keys)."""
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in keys]])
    return np.random.Generator(np.random.SFC64(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """Collapse (seed, *keys) into a fresh 63-bit master seed."""
    ss = np.random.SeedSequence([int(seed), *[int(k) for k in keys]])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


def batches(seed: int, trials: int):
    """Yield (batch_index, batch_size, Generator) covering ``trials``."""
    done = 0
    index = 0
    while done < trials:
        size = min(BATCH_TRIALS, trials - done)
        yield index, size, stream(seed, index)
        done += size
        index += 1
