# core/sampling.py
"""Halton and Latin Hypercube parameter sets on [-1, 1]^J."""
import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ArgumentError

logger = logging.getLogger(__name__)

HALTON = "halton"
LATIN_HYPERCUBE = "latin_hypercube"


@dataclass
class SampleSet:
    """Parameter points (one row per point) plus the metadata that regenerates them."""

    points: np.ndarray
    kind: str
    skip: int = 0
    seed: int = None

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def header(self):
        """Metadata stored next to the points in snapshot archives."""
        return {"kind": self.kind, "count": len(self), "dim": self.dim, "skip": self.skip, "seed": self.seed}

    @classmethod
    def from_header(cls, header, points):
        points = np.asarray(points, dtype=float)
        if points.shape != (header["count"], header["dim"]):
            raise ArgumentError(f"Stored points have shape {points.shape}, header says ({header['count']}, {header['dim']})")
        return cls(points=points, kind=header["kind"], skip=header.get("skip", 0), seed=header.get("seed"))

    def regenerate(self):
        """Rebuild the set from its metadata alone."""
        if self.kind == HALTON:
            return halton(len(self), self.dim, self.skip)
        return latin_hypercube(len(self), self.dim, self.seed)


def first_primes(count):
    """Return the first `count` primes."""
    primes = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def radical_inverse(index, base):
    """Digit reversal of a non-negative integer in the given base, a value in [0, 1)."""
    if base < 2:
        raise ArgumentError(f"Radical inverse base must be >= 2, got {base}")
    if index < 0:
        raise ArgumentError(f"Radical inverse index must be non-negative, got {index}")
    index = int(index)
    inv_base = 1.0 / base
    factor = inv_base
    value = 0.0
    while index > 0:
        index, digit = divmod(index, base)
        value += digit * factor
        factor *= inv_base
    return value


def halton(count, dim, skip=0):
    """Plain (unscrambled) Halton points; point i uses index skip + i + 1."""
    if count < 0 or dim < 1 or skip < 0:
        raise ArgumentError(f"Invalid Halton request count={count}, dim={dim}, skip={skip}")
    bases = first_primes(dim)
    points = np.empty((count, dim))
    for i in range(count):
        for d, base in enumerate(bases):
            points[i, d] = 2.0 * radical_inverse(skip + i + 1, base) - 1.0
    logger.debug(f"Generated {count} Halton points in dimension {dim} (skip={skip})")
    return SampleSet(points=points, kind=HALTON, skip=skip)


def latin_hypercube(count, dim, seed=0):
    """
    Stratified sample with one point per stratum and dimension.

    Uses numpy's counter-based Philox generator so the permutations are
    reproducible across platforms for a given seed.
    """
    if count < 1 or dim < 1:
        raise ArgumentError(f"Invalid Latin Hypercube request count={count}, dim={dim}")
    rng = np.random.Generator(np.random.Philox(seed))
    points = np.empty((count, dim))
    for d in range(dim):
        strata = rng.permutation(count)
        offsets = rng.random(count)
        points[:, d] = -1.0 + 2.0 * (strata + offsets) / count
    np.clip(points, -1.0, 1.0, out=points)
    logger.debug(f"Generated {count} Latin Hypercube points in dimension {dim} (seed={seed})")
    return SampleSet(points=points, kind=LATIN_HYPERCUBE, seed=seed)
