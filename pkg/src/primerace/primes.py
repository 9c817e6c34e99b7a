"""Miller-Rabin primality, prime scanning, and logarithms of big integers."""

from __future__ import annotations

import math
import random

# Smallest composite strong pseudoprime to the first k prime bases (Sorenson-Webster
# et al.); testing against the bases below is deterministic up to each threshold.
_MR_THRESHOLDS = [
    (2047, (2,)),
    (1373653, (2, 3)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318665857834031151167461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)),
    (3317044064679887385961981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
]

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
_PROBABILISTIC_ROUNDS = 64


def _mr_witness(n: int, d: int, r: int, a: int) -> bool:
    """True when a witnesses that n is composite."""
    a %= n
    if a == 0:
        return False
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 3.3e24; 64 fixed-seed rounds beyond."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for threshold, bases in _MR_THRESHOLDS:
        if n < threshold:
            return not any(_mr_witness(n, d, r, a) for a in bases)
    rng = random.Random(n)  # deterministic per n, so verdicts are reproducible
    return not any(
        _mr_witness(n, d, r, rng.randrange(2, n - 1)) for _ in range(_PROBABILISTIC_ROUNDS)
    )


# Wheel of residues used to pre-sieve candidates before Miller-Rabin.
_SIEVE_PRIMES: list[int] = []


def _sieve_primes() -> list[int]:
    global _SIEVE_PRIMES
    if not _SIEVE_PRIMES:
        bound = 3000
        flags = bytearray([1]) * (bound + 1)
        flags[0] = flags[1] = 0
        for i in range(2, int(bound**0.5) + 1):
            if flags[i]:
                flags[i * i :: i] = bytes(len(flags[i * i :: i]))
        _SIEVE_PRIMES = [i for i in range(3, bound + 1) if flags[i]]
    return _SIEVE_PRIMES


def next_prime_1mod4(lower: int, upper: int | None = None) -> int | None:
    """Smallest prime p > lower with p = 1 mod 4, or None when upper is exhausted."""
    n = lower + 1
    n += (1 - n) % 4
    sieve = _sieve_primes()
    while upper is None or n <= upper:
        small = next((p for p in sieve if n % p == 0), None)
        if (small is None or small == n) and is_prime(n):
            return n
        n += 4
    return None


def log_int(n: int) -> float:
    """Natural log of a positive integer, ~1e-15 relative at any size."""
    if n <= 0:
        raise ValueError("log_int needs a positive integer")
    if n.bit_length() <= 53:
        return math.log(n)
    shift = n.bit_length() - 53
    return math.log(n >> shift) + shift * math.log(2)


def int_above_exp(x: float, margin: float = 1e-9) -> int:
    """An integer strictly above e^(x + margin).

    The margin keeps float comparisons of log_int against x unambiguous: the next
    integer above e^x can be relatively within one log-ulp of it.
    """
    x = x + margin
    if x < 36:
        return int(math.exp(x)) + 1
    k = max(1, int(x / math.log(2)) - 48)
    mantissa = math.exp(x - k * math.log(2))  # roughly 2^48, safely inside float range
    return (int(mantissa) + 2) << k
