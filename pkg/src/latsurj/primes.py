"""Primality testing, prime generation, and bounded integer factorization.

The factorizer is deliberately budgeted: trial division up to a fixed limit,
then Brent-style Pollard rho with a bounded iteration count.  Callers that
need totality (the certifier, the exposure simulator) catch
:class:`FactorizationError` and fall back to Smith-form based reasoning.
All routines are deterministic: no randomized seeds enter the rho cycle.
"""

from __future__ import annotations

import math
import threading
from functools import lru_cache
from typing import Dict, List

TRIAL_DIVISION_LIMIT = 10**6
RHO_ITERATION_BUDGET = 2_000_000


class FactorizationError(Exception):
    """A cofactor resisted the factoring budget."""


def sieve_primes(limit: int) -> List[int]:
    """All primes <= limit via a sieve of Eratosthenes."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(sieve) if f]


@lru_cache(maxsize=1)
def _trial_primes() -> List[int]:
    return sieve_primes(TRIAL_DIVISION_LIMIT)


# Deterministic Miller-Rabin witness set: the first 13 primes decide
# primality for all n < 3.3 * 10^24; beyond that the test is probabilistic
# with error below 4^-13 per composite.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test with a fixed witness set."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho_brent(n: int, c: int, budget: int) -> tuple[int | None, int]:
    """One Brent rho attempt on odd composite n.

    Returns (factor or None, iterations consumed).  Deterministic for a
    given polynomial offset c.
    """
    y, r, q = 2, 1, 1
    g = 1
    used = 0
    x = ys = y
    while g == 1 and used < budget:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            step = min(128, r - k)
            for _ in range(step):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            used += step
            g = math.gcd(q, n)
            k += step
        r *= 2
    if g == n:
        # The batched gcd collapsed; replay one step at a time.
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    if 1 < g < n:
        return g, used
    return None, used


def factorize(n: int, rho_budget: int = RHO_ITERATION_BUDGET) -> Dict[int, int]:
    """Factor |n| completely or raise FactorizationError.

    Trial division first, then bounded Pollard rho on the surviving
    cofactors.  The rho budget is shared across all cofactors of one call.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    factors: Dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    if n > 1 and n <= TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT:
        # trial division reached sqrt(n), so the cofactor is prime
        factors[n] = factors.get(n, 0) + 1
        return factors

    remaining = rho_budget
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        found = None
        for c in (1, 3, 5, 7, 9, 11):
            if remaining <= 0:
                break
            found, used = _pollard_rho_brent(m, c, remaining)
            remaining -= used
            if found is not None:
                break
        if found is None:
            raise FactorizationError(f"cofactor {m} resisted the factoring budget")
        stack.append(found)
        stack.append(m // found)
    return factors


def prime_divisors(n: int) -> set[int]:
    """Set of prime divisors of |n| (n nonzero)."""
    if n == 0:
        raise ValueError("0 has no prime divisor set")
    if abs(n) == 1:
        return set()
    return set(factorize(n))


_CRT_PRIME_CACHE: List[int] = []
_CRT_PRIME_LOCK = threading.Lock()


def crt_primes(count: int) -> List[int]:
    """The first `count` primes below 2^30, descending.

    Used as CRT moduli; they stay below 2^30 so int64 products of two
    residues cannot overflow during vectorized elimination.  The cache is
    locked: concurrent trial workers extend it through determinant calls.
    """
    if len(_CRT_PRIME_CACHE) < count:
        with _CRT_PRIME_LOCK:
            candidate = _CRT_PRIME_CACHE[-1] - 2 if _CRT_PRIME_CACHE else 2**30 - 1
            while len(_CRT_PRIME_CACHE) < count:
                if is_probable_prime(candidate):
                    _CRT_PRIME_CACHE.append(candidate)
                candidate -= 2
    return _CRT_PRIME_CACHE[:count]
