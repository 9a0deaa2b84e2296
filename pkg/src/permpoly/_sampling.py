"""Reproducible block-parallel sampling shared by the Monte-Carlo estimators.

Samples are grouped into fixed-size blocks.  Block ``b`` draws from its own
generator keyed on ``(seed, b)``, so the sample stream depends only on the seed
and the block size, never on how many workers evaluate the blocks.  Block
outputs are concatenated in block order before any reduction.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

BLOCK_SIZE = 2048

SEED_ENV = "PERMPOLY_SEED"


def block_rng(seed, block):
    """Generator for block ``block`` of the stream keyed on ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(block),)))


def resolve_seed(seed=None):
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env)
    return 0


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with componentwise standard error.

    ``stderr`` is a complex number whose real and imaginary parts are the
    standard errors of the real and imaginary parts of ``mean``.
    """

    mean: complex
    stderr: complex
    n_samples: int
    seed: int

    @classmethod
    def from_samples(cls, values, seed):
        values = np.asarray(values)
        m = values.shape[0]
        if m < 2:
            raise ValueError("an estimate needs at least two samples")
        mean = complex(np.mean(values))
        se_re = float(np.std(values.real, ddof=1) / math.sqrt(m))
        if np.iscomplexobj(values):
            se_im = float(np.std(values.imag, ddof=1) / math.sqrt(m))
        else:
            se_im = 0.0
        return cls(mean, complex(se_re, se_im), m, int(seed))

    @property
    def relative_stderr(self):
        scale = abs(self.mean)
        return abs(self.stderr) / scale if scale > 0 else math.inf

    def z_score(self, reference):
        return z_score(self.mean, self.stderr, reference)

    def to_dict(self):
        return {
            "mean": {"re": self.mean.real, "im": self.mean.imag},
            "stderr": {"re": self.stderr.real, "im": self.stderr.imag},
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def z_score(mean, stderr, reference, atol=1e-12):
    """Largest componentwise |difference| / stderr.

    A component that agrees with the reference to ``atol`` (relative to the
    magnitude involved) contributes 0, so that rounding noise in a component
    that is exactly zero in theory cannot produce a spurious z-score.  A
    component with zero standard error that disagrees contributes ``inf``.
    """
    diff = complex(mean) - complex(reference)
    se = complex(stderr)
    scale = max(1.0, abs(complex(mean)), abs(complex(reference)))
    worst = 0.0
    for d, s in ((diff.real, se.real), (diff.imag, se.imag)):
        if abs(d) <= atol * scale:
            continue
        worst = max(worst, abs(d) / s) if s > 0 else math.inf
    return worst


def combined_z(est_a, est_b):
    """z-score of the difference of two independent estimates."""
    se = complex(math.hypot(est_a.stderr.real, est_b.stderr.real),
                 math.hypot(est_a.stderr.imag, est_b.stderr.imag))
    return z_score(est_a.mean - est_b.mean, se, 0.0)


def _run_block(fn, seed, m_total, block):
    start = block * BLOCK_SIZE
    count = min(BLOCK_SIZE, m_total - start)
    return fn(block_rng(seed, block), count)


def run_blocks(fn, m_total, seed, workers=1):
    """Evaluate ``fn(rng, count)`` over all blocks and concatenate in order.

    ``fn`` must return an array whose first axis has length ``count``.  With
    ``workers > 1`` blocks are farmed out to a process pool; ``fn`` must then be
    picklable (a module-level function or a ``functools.partial`` of one).
    """
    n_blocks = -(-int(m_total) // BLOCK_SIZE)
    job = partial(_run_block, fn, seed, int(m_total))
    if workers is None or workers <= 1 or n_blocks == 1:
        parts = [job(b) for b in range(n_blocks)]
    else:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            parts = list(pool.map(job, range(n_blocks)))
    return np.concatenate(parts, axis=0)
