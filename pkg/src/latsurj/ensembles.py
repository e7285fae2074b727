"""Finite-support integer distributions and seeded matrix samplers.

Weights are exact rationals so balance parameters, convolutions, and the
enumeration oracles in the tests stay exact.  Sampling draws a uniform
integer below the common denominator and selects by cumulative weight,
so no floating point enters the stream.  Per-trial substreams derive from
(master seed, trial index) through a splittable seed sequence, which makes
parallel experiments order-independent.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from . import primes as _primes
from .exact_linalg import IntMatrix

IID_RECT = "iid_rect"
SYMMETRIC_PLUS = "symmetric_plus"


@dataclass(frozen=True)
class Distribution:
    """Integer-valued law with exact rational weights summing to 1."""

    atoms: Tuple[Tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        atoms = tuple(sorted((int(v), Fraction(w)) for v, w in self.atoms))
        object.__setattr__(self, "atoms", atoms)
        values = [v for v, _ in atoms]
        if len(set(values)) != len(values):
            raise ValueError("atom values must be distinct")
        if not atoms:
            raise ValueError("empty distribution")
        if any(w <= 0 or w > 1 for _, w in atoms):
            raise ValueError("weights must lie in (0, 1]")
        if sum(w for _, w in atoms) != 1:
            raise ValueError("weights must sum to exactly 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, Fraction]]) -> "Distribution":
        return cls(tuple(pairs))

    @classmethod
    def uniform(cls, values: Sequence[int]) -> "Distribution":
        vals = list(values)
        return cls(tuple((v, Fraction(1, len(vals))) for v in vals))

    @property
    def values(self) -> Tuple[int, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def weights(self) -> Tuple[Fraction, ...]:
        return tuple(w for _, w in self.atoms)

    def weight_of(self, value: int) -> Fraction:
        for v, w in self.atoms:
            if v == value:
                return w
        return Fraction(0)

    @property
    def max_weight(self) -> Fraction:
        return max(self.weights)

    @property
    def is_degenerate(self) -> bool:
        return len(self.atoms) == 1

    @property
    def diameter(self) -> int:
        vs = self.values
        return vs[-1] - vs[0]

    @cached_property
    def common_denominator(self) -> int:
        return math.lcm(*(w.denominator for w in self.weights))

    @cached_property
    def _cumulative_numerators(self) -> np.ndarray:
        d = self.common_denominator
        acc = 0
        cums = []
        for _, w in self.atoms:
            acc += int(w * d)
            cums.append(acc)
        return np.array(cums, dtype=np.int64)

    def literal(self) -> str:
        """Canonical config-file / CLI literal, e.g. "0:9/10,1:1/10"."""
        return ",".join(f"{v}:{w.numerator}/{w.denominator}" for v, w in self.atoms)


def sparse_bernoulli(alpha: Fraction | int | str) -> Distribution:
    """The {0,1} law with P(1) = alpha."""
    a = Fraction(alpha)
    if not 0 < a < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    return Distribution(((0, 1 - a), (1, a)))


def alpha_mod_p(dist: Distribution, p: int) -> Fraction:
    """1 minus the largest residue-class mass of dist mod p."""
    if not _primes.is_probable_prime(p):
        raise ValueError(f"{p} is not prime")
    masses: Dict[int, Fraction] = {}
    for v, w in dist.atoms:
        r = v % p
        masses[r] = masses.get(r, Fraction(0)) + w
    return 1 - max(masses.values())


def alpha_min(dist: Distribution) -> Fraction:
    """Balance parameter: the minimum of alpha_mod_p over all primes.

    Only primes dividing some difference of support values can merge
    distinct atoms, so the search space is the prime divisors of the
    pairwise differences; every larger prime yields 1 - max single weight.
    A single-atom law is degenerate and reports 0.
    """
    if dist.is_degenerate:
        return Fraction(0)
    candidates: set[int] = set()
    vals = dist.values
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            candidates |= _primes.prime_divisors(vals[j] - vals[i])
    best = 1 - dist.max_weight
    for p in sorted(candidates):
        a = alpha_mod_p(dist, p)
        if a < best:
            best = a
    return best


def symmetrize(dist: Distribution) -> Distribution:
    """Law of xi - xi' for independent copies xi, xi' of dist.

    The balance identities alpha <= alpha' <= 2*alpha (with alpha read off
    the single largest weight and 1 - alpha' the mass at zero) hold exactly
    and are asserted.
    """
    conv: Dict[int, Fraction] = {}
    for v1, w1 in dist.atoms:
        for v2, w2 in dist.atoms:
            key = v1 - v2
            conv[key] = conv.get(key, Fraction(0)) + w1 * w2
    out = Distribution(tuple(conv.items()))
    alpha = 1 - dist.max_weight
    alpha_sym = 1 - out.weight_of(0)
    assert alpha <= alpha_sym <= 2 * alpha
    return out


# -- distribution literals ----------------------------------------------

_BERNOULLI_RE = re.compile(r"^bernoulli\((.+)\)$")


def parse_distribution(text: str) -> Distribution:
    """Parse a distribution literal.

    Accepted forms: "0:9/10,1:1/10" (value:weight pairs), "uniform01",
    "uniform-1,0,1" (uniform on the listed values), "bernoulli(1/10)".
    """
    s = text.strip()
    if s == "uniform01":
        return Distribution.uniform([0, 1])
    m = _BERNOULLI_RE.match(s)
    if m:
        return sparse_bernoulli(Fraction(m.group(1)))
    if s.startswith("uniform"):
        rest = s[len("uniform") :]
        values = [int(t) for t in rest.split(",") if t != ""]
        if not values:
            raise ValueError(f"no values in uniform literal {text!r}")
        return Distribution.uniform(values)
    pairs = []
    for part in s.split(","):
        if ":" not in part:
            raise ValueError(f"bad atom {part!r} in distribution literal")
        v, w = part.split(":", 1)
        pairs.append((int(v), Fraction(w)))
    return Distribution(tuple(pairs))


# -- seeded sampling -----------------------------------------------------


def derive_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit substream seed for (master seed, trial index)."""
    ss = np.random.SeedSequence((int(master_seed), int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of one random-matrix draw.

    iid_rect fills an n x m matrix with iid entries; symmetric_plus fills
    an n x n symmetric block (upper triangle iid, mirrored) and appends u
    iid columns.
    """

    kind: str
    n: int
    dist: Distribution
    seed: int
    m: int | None = None
    u: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in (IID_RECT, SYMMETRIC_PLUS):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind == IID_RECT:
            m = self.n if self.m is None else self.m
            if m < self.n:
                raise ValueError("iid_rect requires m >= n")
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "u", m - self.n)
        else:
            u = 0 if self.u is None else self.u
            if u < 0:
                raise ValueError("symmetric_plus requires u >= 0")
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "m", self.n + u)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n, self.m)


def _draw_values(dist: Distribution, count: int, gen: np.random.Generator) -> np.ndarray:
    """Exact sampling: uniform digits below the common denominator,
    bucketed by cumulative numerator."""
    d = dist.common_denominator
    digits = gen.integers(0, d, size=count, dtype=np.int64)
    idx = np.searchsorted(dist._cumulative_numerators, digits, side="right")
    return np.array(dist.values, dtype=np.int64)[idx]


def sample_array(spec: EnsembleSpec) -> np.ndarray:
    """Sampled matrix as an int64 array; deterministic in (spec, seed)."""
    if any(abs(v) >= 2**62 for v in spec.dist.values):
        raise OverflowError("support does not fit the array sampler")
    gen = _generator(spec.seed)
    n, m = spec.shape
    if spec.kind == IID_RECT:
        return _draw_values(spec.dist, n * m, gen).reshape(n, m)
    tri_count = n * (n + 1) // 2
    extra_count = n * spec.u
    draws = _draw_values(spec.dist, tri_count + extra_count, gen)
    out = np.empty((n, m), dtype=np.int64)
    iu = np.triu_indices(n)
    sym = np.empty((n, n), dtype=np.int64)
    sym[iu] = draws[:tri_count]
    sym.T[iu] = draws[:tri_count]
    out[:, :n] = sym
    if spec.u:
        out[:, n:] = draws[tri_count:].reshape(n, spec.u)
    return out


def sample_matrix(spec: EnsembleSpec) -> IntMatrix:
    """Sampled matrix as an IntMatrix; same stream as sample_array."""
    return IntMatrix.from_array(sample_array(spec))


def sample_columns(dist: Distribution, n: int, count: int, gen: np.random.Generator) -> List[Tuple[int, ...]]:
    """`count` fresh iid columns of height n, drawn column by column."""
    draws = _draw_values(dist, n * count, gen)
    return [tuple(int(x) for x in draws[k * n : (k + 1) * n]) for k in range(count)]
