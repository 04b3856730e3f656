"""Seed derivation and content digests.

All randomness in the package flows from explicit integer seeds. Child
streams are derived with `mix_seed`, a splitmix64 chain absorbing one
64-bit word per argument: mixing is associative-free and documented, so
"per-K seed = mix(base_seed, K)" means the same bits on every platform.
Samplers consume seeds either through numpy's PCG64 generator or through
the PCG32 kernel embedded in the jitted Gibbs loops.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x &= _MASK64
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_seed(base: int, *parts: int) -> int:
    """Derive a child seed: fold each part into a splitmix64 chain.

    mix_seed(s) != s by design, so a derived stream never collides with
    the stream that spawned it.
    """
    state = _splitmix64(base & _MASK64)
    for part in parts:
        state = _splitmix64(state ^ (part & _MASK64))
    return state


def rng_for(base: int, *parts: int) -> np.random.Generator:
    """numpy PCG64 generator on the derived stream."""
    return np.random.Generator(np.random.PCG64(mix_seed(base, *parts)))


def stable_json(obj: Any) -> str:
    """Canonical JSON: sorted keys, no whitespace variance, repr floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_json(obj: Any) -> str:
    return digest_bytes(stable_json(obj).encode("utf-8"))


def digest_arrays(*arrays: np.ndarray) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a)
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()
