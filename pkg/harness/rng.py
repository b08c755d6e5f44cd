"""
harness/rng.py

Seedable, portable random streams.

Every stream is numpy's PCG64 bit generator seeded through
SeedSequence(entropy=seed, spawn_key=(crc32(stream_name),)), so the
verification cases and the algorithm runs each get an independent stream
derived from (seed, case id). Measurement sampling draws one double
u = Generator.random() and returns the first index whose cumulative
probability exceeds u·Σp; a re-implementation of PCG64 plus that rule
reproduces every sampled index.
"""

import zlib

import numpy as np


def make_rng(seed: int, stream: str = "") -> np.random.Generator:
    key = zlib.crc32(stream.encode("utf-8"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(key,))))


def sample_index(rng: np.random.Generator, probabilities) -> int:
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("Need a non-empty 1-D probability vector")
    if np.any(p < 0):
        raise ValueError("Probabilities must be non-negative")
    cumulative = np.cumsum(p)
    total = cumulative[-1]
    if total <= 0:
        raise ValueError("Probabilities sum to zero")
    u = rng.random()
    idx = int(np.searchsorted(cumulative, u * total, side="right"))
    return min(idx, p.size - 1)


# ─── Random operands for property checks ─────────────────────────────────────

def random_complex_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase fix on R's diagonal."""
    z = random_complex_matrix(rng, dim) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
