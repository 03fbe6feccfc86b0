"""Random-matrix Monte Carlo oracle for the compression spectrum.

A deterministic N x N diagonal matrix realizes the target spectral
distribution (multiplicities apportioned by largest remainder), a Haar
random projection of rank floor(t*N) compresses it, and the rescaled
eigenvalues of the compression approximate the (1/t)-th free convolution
power.  The Kolmogorov-Smirnov distance against the exactly computed power
quantifies the agreement.

Haar sampling follows the QR recipe: orthonormalize a complex Ginibre
matrix and fix the phase ambiguity by rescaling columns so the R diagonal
is positive real.  The compression only ever needs the first d columns,
which are drawn directly as the QR orthonormalization of an N x d Ginibre
panel (the same distribution as slicing a full Haar unitary, without the
N^3 cost).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .freepower import FreePowerResult
from .measures import HermitianSpec
from .rng import GENERATOR_NAME, STREAM_HAAR, complex_normal, stream


def _phase_fixed_q(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[diag == 0] = 1.0
    return q * (diag / np.abs(diag)).conj()


def haar_unitary(N: int, seed: int) -> np.ndarray:
    """Haar-distributed N x N unitary, deterministic in (N, seed)."""
    if N < 1:
        raise DomainError("need N >= 1")
    z = complex_normal(stream(seed, STREAM_HAAR), (N, N))
    return _phase_fixed_q(z)


def haar_columns(N: int, d: int, seed: int) -> np.ndarray:
    """First d columns of a Haar unitary, drawn as an N x d isometry."""
    if not 1 <= d <= N:
        raise DomainError("need 1 <= d <= N")
    z = complex_normal(stream(seed, STREAM_HAAR), (N, d))
    return _phase_fixed_q(z)


def floor_fraction(t: float, N: int) -> int:
    """floor(t*N) with a 1e-9 guard against binary representation of t."""
    tn = t * N
    d = math.floor(tn)
    if tn - d > 1.0 - 1e-9:
        d += 1
    return d


def apportion_counts(spec: HermitianSpec, N: int) -> np.ndarray:
    """Largest-remainder apportionment of D_i*N/k into exactly N slots."""
    quota = spec.multiplicities * (N / spec.k)
    counts = np.floor(quota).astype(int)
    short = N - int(counts.sum())
    if short > 0:
        remainders = quota - np.floor(quota)
        # ties broken toward lower index for determinism
        order = np.lexsort((np.arange(len(quota)), -remainders))
        counts[order[:short]] += 1
    return counts


@dataclass(frozen=True)
class CompressionSample:
    """Spectrum of one rescaled Haar compression t^-1 * (W* A W)."""

    N: int
    t: float
    seed: int
    eigenvalues: np.ndarray

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=float)
        if not np.all(np.isfinite(eig)):
            raise DomainError("eigenvalues must be finite")
        eig.flags.writeable = False
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def d(self) -> int:
        return self.eigenvalues.size

    def metadata(self) -> dict:
        return {"N": self.N, "t": self.t, "seed": self.seed, "d": self.d,
                "generator": GENERATOR_NAME}


def compressed_spectrum(spec: HermitianSpec, t: float, N: int, seed: int) -> CompressionSample:
    """Eigenvalues of the rescaled compression of the spec's diagonal model.

    A is diagonal with eigenvalue x_i repeated per largest-remainder
    apportionment of D_i*N/k; W holds the first floor(t*N) columns of a
    Haar unitary; the sample is the sorted spectrum of t^-1 * (W* A W).
    """
    if N < 100:
        raise DomainError("need N >= 100 for a meaningful compression")
    if not 0.0 < t <= 1.0:
        raise DomainError("t must lie in (0, 1]")
    d = floor_fraction(t, N)
    if d == 0:
        raise DomainError("floor(t*N) vanished; increase t or N")
    counts = apportion_counts(spec, N)
    diag = np.repeat(spec.eigenvalues, counts)
    w = haar_columns(N, d, seed)
    compression = (w.conj().T * diag) @ w / t
    compression = 0.5 * (compression + compression.conj().T)
    eigs = np.linalg.eigvalsh(compression)
    return CompressionSample(N=N, t=float(t), seed=int(seed), eigenvalues=eigs)


def ks_distance(sample: CompressionSample, result: FreePowerResult) -> float:
    """Sup distance between the sample's empirical CDF and the power's CDF."""
    if sample.d == 0:
        raise DomainError("empty sample")
    if abs(result.T - 1.0 / sample.t) > 1e-9 * result.T:
        raise DomainError("sample parameter t does not match the computed power")
    xs = np.sort(sample.eigenvalues)
    cdf = np.atleast_1d(result.cdf(xs))
    n = xs.size
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))
