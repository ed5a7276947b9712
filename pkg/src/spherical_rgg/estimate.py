"""Monte Carlo plumbing shared by the estimators.

Every randomized estimator splits its budget into a fixed number of batches.
Batch ``i`` draws from its own stream, spawned from the root seed by index, so
the result depends only on the seed and the batch layout, never on how many
workers evaluated the batches.  Standard errors come from the spread of the
batch means.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

MIN_BATCHES = 64


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo estimate with batch-mean standard errors.

    Attributes
    ----------
    mean : float or complex
    stderr_re, stderr_im : float
        Standard errors of the real and imaginary parts.
    samples : int
        Number of draws that went into ``mean``.
    """

    mean: complex
    stderr_re: float
    stderr_im: float
    samples: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("an estimate needs at least one sample")
        if not (self.stderr_re >= 0 and self.stderr_im >= 0):
            raise ValueError("standard errors must be nonnegative")

    @property
    def stderr(self):
        """Standard error of the modulus, ``hypot(stderr_re, stderr_im)``."""
        return float(np.hypot(self.stderr_re, self.stderr_im))

    @property
    def real(self):
        return float(np.real(self.mean))

    @property
    def imag(self):
        return float(np.imag(self.mean))

    @classmethod
    def from_batches(cls, batch_means, batch_sizes):
        """Combine per-batch means into one estimate.

        The grand mean is size-weighted; the standard error is the standard
        deviation of the batch means divided by ``sqrt(batches)``, which is
        exact for equal batch sizes and a close approximation otherwise.
        """
        means = np.asarray(batch_means)
        sizes = np.asarray(batch_sizes, dtype=float)
        total = int(sizes.sum())
        mean = np.sum(means * sizes) / sizes.sum()
        k = means.size
        if k > 1:
            se_re = float(np.std(means.real, ddof=1) / np.sqrt(k))
            se_im = float(np.std(means.imag, ddof=1) / np.sqrt(k)) if np.iscomplexobj(means) else 0.0
        else:
            se_re = se_im = 0.0
        if not np.iscomplexobj(means):
            mean = float(mean)
        else:
            mean = complex(mean)
        return cls(mean, se_re, se_im, total)


def as_seed_sequence(rng):
    """Turn an int, ``SeedSequence`` or ``Generator`` into a ``SeedSequence``.

    A ``Generator`` is consumed: four words are drawn from it to seed the
    sequence, so repeated calls with the same generator give fresh streams.
    """
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, np.random.Generator):
        return np.random.SeedSequence(rng.integers(0, 2**63, size=4).tolist())
    if rng is None:
        raise ValueError("an explicit seed is required")
    return np.random.SeedSequence(int(rng))


def as_generator(rng):
    """Return ``rng`` if it is a ``Generator``, else seed a fresh one."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(as_seed_sequence(rng))


def split_budget(total, batches):
    """Sizes of ``batches`` nearly equal parts summing to ``total``."""
    total = int(total)
    batches = int(batches)
    if total < batches:
        raise ValueError(f"budget {total} is smaller than the {batches} batches")
    base, extra = divmod(total, batches)
    return [base + (i < extra) for i in range(batches)]


def run_batches(fn, total, rng, *, batches=MIN_BATCHES, workers=1):
    """Evaluate ``fn(generator, size)`` on every batch and combine.

    Parameters
    ----------
    fn : callable
        Returns a 1-D array of per-draw values for one batch.
    total : int
        Overall number of draws.
    rng : int, SeedSequence or Generator
        Root of the per-batch streams.
    batches : int
        Number of batches, at least 64.
    workers : int
        Threads used to evaluate batches; does not change the result.

    Returns
    -------
    McEstimate
    """
    if batches < MIN_BATCHES:
        raise ValueError(f"need at least {MIN_BATCHES} batches, got {batches}")
    sizes = split_budget(total, batches)
    children = as_seed_sequence(rng).spawn(batches)

    def one(i):
        values = np.asarray(fn(np.random.default_rng(children[i]), sizes[i]))
        return values.mean()

    if workers <= 1:
        means = [one(i) for i in range(batches)]
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            means = list(pool.map(one, range(batches)))
    return McEstimate.from_batches(np.array(means), sizes)
