"""Integer factorization and multiplicative arithmetic helpers.

Factoring is trial division over a fixed prime table followed by Brent-cycle
Pollard rho with deterministic parameters, so results never depend on run
order.  Completed factorizations can be persisted in an append-only text
cache (one ``n=p1^e1,p2^e2,...`` line per integer) shared between runs; the
cache location comes from the ``CHARFIELD_CACHE`` environment variable or an
explicit ``cache_dir`` argument.
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass
from math import gcd, isqrt, prod

from .errors import FactorizationIncomplete, NonPrime

log = logging.getLogger(__name__)

TRIAL_LIMIT = 1_000_000
_RHO_ITER_BUDGET = 1 << 20
_RHO_ATTEMPTS = 24

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n below 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _small_primes() -> list[int]:
    primes = getattr(_small_primes, "_table", None)
    if primes is None:
        sieve = bytearray([1]) * TRIAL_LIMIT
        sieve[0] = sieve[1] = 0
        for i in range(2, isqrt(TRIAL_LIMIT) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        primes = [i for i in range(TRIAL_LIMIT) if sieve[i]]
        _small_primes._table = primes
    return primes


def _brent_rho(n: int, budget: int) -> int | None:
    """One Brent-cycle factoring pass; returns a nontrivial factor or None.

    The constant of the iteration map steps deterministically, so repeated
    calls on the same n retrace the same search.
    """
    if n % 2 == 0:
        return 2
    for attempt in range(_RHO_ATTEMPTS):
        c = 1 + attempt
        y, m_blk, g, r, q = 2 + attempt, 128, 1, 1, 1
        spent = 0
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m_blk, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m_blk
            spent += 2 * r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


@dataclass(frozen=True)
class IntFactorization:
    """Complete factorization of a positive integer.

    factors is sorted by prime and every listed prime passed the
    deterministic primality test before being accepted.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if prod(p**e for p, e in self.factors) != self.n:
            raise ValueError(f"factor product mismatch for {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def phi(self) -> int:
        return prod((p - 1) * p ** (e - 1) for p, e in self.factors)

    def mu(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    def w_count(self) -> int:
        """Number of squarefree divisors, 2 to the number of distinct primes."""
        return 1 << len(self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def squarefree_divisors(self) -> list[int]:
        divs = [1]
        for p, _ in self.factors:
            divs = divs + [d * p for d in divs]
        return sorted(divs)


class FactorCache:
    """Append-only disk cache of complete factorizations.

    Reads tolerate damage: any line that fails to parse, lists a composite
    "prime", or whose product disagrees with its key is skipped with a
    logged warning.  Writes are serialized through one lock and each entry
    goes out as a single appended line.
    """

    def __init__(self, cache_dir: str | None):
        self.path = os.path.join(cache_dir, "factorizations.txt") if cache_dir else None
        self._mem: dict[int, tuple[tuple[int, int], ...]] = {}
        self._lock = threading.Lock()
        self._loaded = False

    def _load(self):
        if self._loaded or self.path is None:
            self._loaded = True
            return
        self._loaded = True
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                parsed = self._parse(line)
                if parsed is None:
                    log.warning("skipping corrupt cache line %d in %s: %r", lineno, self.path, line)
                    continue
                n, factors = parsed
                self._mem[n] = factors

    @staticmethod
    def _parse(line: str) -> tuple[int, tuple[tuple[int, int], ...]] | None:
        try:
            key, body = line.split("=", 1)
            n = int(key)
            factors = []
            for part in body.split(","):
                if "^" in part:
                    p, e = part.split("^", 1)
                    factors.append((int(p), int(e)))
                else:
                    factors.append((int(part), 1))
        except ValueError:
            return None
        if n < 1 or factors != sorted(factors) or len({p for p, _ in factors}) != len(factors):
            return None
        if prod(p**e for p, e in factors) != n:
            return None
        if not all(e >= 1 and is_prime(p) for p, e in factors):
            return None
        return n, tuple(factors)

    def get(self, n: int) -> tuple[tuple[int, int], ...] | None:
        with self._lock:
            self._load()
            return self._mem.get(n)

    def put(self, n: int, factors: tuple[tuple[int, int], ...]):
        with self._lock:
            self._load()
            if n in self._mem:
                return
            self._mem[n] = factors
            if self.path is None:
                return
            os.makedirs(os.path.dirname(self.path), exist_ok=True)
            body = ",".join(f"{p}^{e}" if e > 1 else str(p) for p, e in factors)
            with open(self.path, "a", encoding="ascii") as fh:
                fh.write(f"{n}={body}\n")


_default_cache = FactorCache(os.environ.get("CHARFIELD_CACHE"))


def set_cache_dir(cache_dir: str | None):
    """Point the shared factorization cache at a different directory."""
    global _default_cache
    _default_cache = FactorCache(cache_dir)


def factor_int(n: int, cache: FactorCache | None = None, budget: int = _RHO_ITER_BUDGET) -> IntFactorization:
    """Factor a positive integer completely or raise FactorizationIncomplete."""
    if n < 1:
        raise ValueError("factor_int needs a positive integer")
    cache = cache if cache is not None else _default_cache
    hit = cache.get(n)
    if hit is not None:
        return IntFactorization(n, hit)

    found: dict[int, int] = {}
    rem = n
    for p in _small_primes():
        if p * p > rem:
            break
        while rem % p == 0:
            found[p] = found.get(p, 0) + 1
            rem //= p
    pending = [rem] if rem > 1 else []
    while pending:
        m = pending.pop()
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        d = _brent_rho(m, budget)
        if d is None:
            raise FactorizationIncomplete(f"gave up factoring {m} (from {n})")
        pending.extend((d, m // d))

    factors = tuple(sorted(found.items()))
    result = IntFactorization(n, factors)
    cache.put(n, factors)
    return result


def prime_power_split(q: int) -> tuple[int, int]:
    """Write q as p**s with p prime, or raise NonPrime."""
    if q < 2:
        raise NonPrime(f"{q} is not a prime power")
    for p, e in factor_int(q).factors:
        if p**e == q:
            return p, e
    raise NonPrime(f"{q} is not a prime power")


def prime_powers_up_to(limit: int) -> list[int]:
    """All prime powers q with 2 <= q <= limit, ascending."""
    out = []
    for q in range(2, limit + 1):
        f = factor_int(q).factors
        if len(f) == 1:
            out.append(q)
    return out
