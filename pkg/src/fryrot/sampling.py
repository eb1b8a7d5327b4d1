"""Seeded random streams and the few distributions the simulators need."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class RngStream:
    """A reproducible, independently keyed random stream.

    Streams are addressed by a master seed plus a tuple of integer keys,
    e.g. ``(cell, replicate, bootstrap)``. The generator for a key is built
    from a :class:`numpy.random.SeedSequence` spawn key, so it does not
    depend on the order in which streams are created or consumed.
    """

    master_seed: int = 0
    stream_id: tuple[int, ...] = ()

    def child(self, *keys: int) -> "RngStream":
        return RngStream(self.master_seed, self.stream_id + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.master_seed),
                                    spawn_key=self.stream_id)
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an RngStream or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return RngStream(int(rng)).generator()


def uniform_angle(rng, size=None):
    """Uniform angle(s) on ``[0, 2*pi)``."""
    return as_generator(rng).uniform(0.0, TWO_PI, size)


def kappa_from_a(a: float, kappa_max: float) -> float:
    """von Mises concentration for anisotropy degree ``a``.

    ``kappa = kappa_max * (1 - exp(1 - 1/a))``; ``a = 1`` gives the uniform
    case and ``a -> 0`` approaches ``kappa_max``.
    """
    if not (0.0 < a <= 1.0):
        raise ValueError(f"anisotropy degree must lie in (0, 1], got {a}")
    if kappa_max < 0:
        raise ValueError(f"kappa_max must be non-negative, got {kappa_max}")
    return float(kappa_max * -np.expm1(1.0 - 1.0 / a)) + 0.0


def sample_von_mises(mu: float, kappa: float, rng, size=None):
    """Draw from the von Mises law on the circle, returned in ``[0, 2*pi)``."""
    if kappa < 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    gen = as_generator(rng)
    if kappa == 0:
        return gen.uniform(0.0, TWO_PI, size)
    return np.mod(gen.vonmises(mu, kappa, size), TWO_PI)


def chi2_quantile_df2(p: float) -> float:
    """Quantile of the chi-square distribution with two degrees of freedom."""
    if not (0.0 <= p < 1.0):
        raise ValueError(f"probability must lie in [0, 1), got {p}")
    return float(-2.0 * np.log1p(-p))


def sigma_from_R(R: float, p: float = 0.94) -> float:
    """Gaussian scale such that a fraction ``p`` of 2-d displacements lies
    within distance ``R``: ``sigma = R / sqrt(chi2_2(p))``."""
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return float(R / np.sqrt(chi2_quantile_df2(p)))
