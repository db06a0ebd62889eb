"""Bounded completely multiplicative functions defined by their prime values.

A function f with f(1) = 1 and f(mn) = f(m) f(n) for all m, n is pinned
down by its values on primes.  A `MultiplicativeSpec` packages a default
rule for those values, a finite override map, and a declared sup bound.
Prime values are memoized per spec, and whole value tables f(1..limit)
can be materialized against a sieve for grid work.

Seeded randomness uses the splitmix64 finalizer on (prime position XOR
seed): the same seed reproduces the same signs on any platform and in any
process, with no shared generator state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from ._kernels import _fill_mult_table
from .errors import DomainError, RangeError
from .sieve import SieveTables, factorize, is_prime, prime_position

_M64 = (1 << 64) - 1
_BOUND_SLACK = 1e-12


def splitmix64(x: int) -> int:
    """The splitmix64 finalizer (pure 64-bit mixing, no state)."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _splitmix64_vec(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


# ---------------------------------------------------------------------------
# Prime value rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    """f(p) = value for every prime p (value may be complex)."""

    value: complex


@dataclass(frozen=True)
class ByClass:
    """f(p) chosen by the residue class of p mod 4."""

    two: float
    one_mod4: float
    three_mod4: float


@dataclass(frozen=True)
class SeededSign:
    """f(p) = +/-1 from the top bit of splitmix64(prime position XOR seed)."""

    seed: int


@dataclass(frozen=True)
class SeededPhase:
    """f(p) = exp(2 pi i u) with u = splitmix64(prime position XOR seed) / 2**64."""

    seed: int


@dataclass(frozen=True)
class LiouvilleRule:
    """f(p) = -1 for every prime, i.e. f(n) = (-1)**Omega(n)."""


@dataclass(frozen=True)
class OneRule:
    """f(p) = 1 for every prime, i.e. f identically 1."""


@dataclass(frozen=True)
class PowerOf:
    """Derived rule: f(p) = base(p) ** exponent."""

    base: "MultiplicativeSpec"
    exponent: int


@dataclass(frozen=True)
class PointwiseProduct:
    """Derived rule: f(p) = product of part(p) over all parts."""

    parts: tuple["MultiplicativeSpec", ...]


Rule = Union[Constant, ByClass, SeededSign, SeededPhase, LiouvilleRule, OneRule, PowerOf, PointwiseProduct]


def _is_small_int(v) -> bool:
    if isinstance(v, complex):
        return v.imag == 0 and _is_small_int(v.real)
    return float(v) in (-1.0, 0.0, 1.0)


def _is_complex(v) -> bool:
    return isinstance(v, complex) and v.imag != 0


@dataclass(eq=False)
class MultiplicativeSpec:
    """A bounded completely multiplicative function given by prime values.

    Immutable by convention after construction; the private caches only
    memoize pure results, so concurrent readers always observe the same
    values.
    """

    rule: Rule
    overrides: dict[int, complex] = field(default_factory=dict)
    bound: float = 1.0
    name: str = ""

    _prime_cache: dict = field(default_factory=dict, repr=False)
    _table_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.bound <= 0:
            raise DomainError(f"bound must be positive, got {self.bound}")
        for p, v in self.overrides.items():
            if not is_prime(p):
                raise DomainError(f"override key {p} is not prime")
            if abs(v) > self.bound + _BOUND_SLACK:
                raise DomainError(f"override value {v!r} at p={p} exceeds bound {self.bound}")
        for v in self._rule_values():
            if abs(v) > self.bound + _BOUND_SLACK:
                raise DomainError(f"rule value {v!r} exceeds bound {self.bound}")

    def _rule_values(self):
        r = self.rule
        if isinstance(r, Constant):
            return (r.value,)
        if isinstance(r, ByClass):
            return (r.two, r.one_mod4, r.three_mod4)
        if isinstance(r, (SeededSign, SeededPhase, LiouvilleRule, OneRule)):
            return (1.0,) if isinstance(r, OneRule) else (-1.0, 1.0)
        return ()  # derived rules validated through their parts

    # -- classification ----------------------------------------------------

    @property
    def is_complex(self) -> bool:
        r = self.rule
        if isinstance(r, SeededPhase):
            return True
        if isinstance(r, Constant) and _is_complex(r.value):
            return True
        if isinstance(r, PowerOf):
            return r.base.is_complex
        if isinstance(r, PointwiseProduct):
            return any(s.is_complex for s in r.parts)
        return any(_is_complex(v) for v in self.overrides.values())

    @property
    def is_sign_valued(self) -> bool:
        """True when every prime value lies in {-1, 0, +1}."""
        r = self.rule
        if isinstance(r, (LiouvilleRule, OneRule, SeededSign)):
            base_ok = True
        elif isinstance(r, Constant):
            base_ok = _is_small_int(r.value)
        elif isinstance(r, ByClass):
            base_ok = all(_is_small_int(v) for v in (r.two, r.one_mod4, r.three_mod4))
        elif isinstance(r, PowerOf):
            base_ok = r.base.is_sign_valued
        elif isinstance(r, PointwiseProduct):
            base_ok = all(s.is_sign_valued for s in r.parts)
        else:
            base_ok = False
        return base_ok and all(_is_small_int(v) for v in self.overrides.values())

    @property
    def is_exact(self) -> bool:
        """True when prime values are exact rationals (every real value is:
        binary floats are dyadic).  Complex-valued specs are not exact."""
        if self.is_complex:
            return False
        r = self.rule
        if isinstance(r, SeededPhase):
            return False
        if isinstance(r, PowerOf):
            return r.base.is_exact
        if isinstance(r, PointwiseProduct):
            return all(s.is_exact for s in r.parts)
        return True

    @property
    def dtype(self) -> np.dtype:
        if self.is_complex:
            return np.dtype(np.complex128)
        if self.is_sign_valued:
            return np.dtype(np.int8)
        return np.dtype(np.float64)

    # -- prime values -------------------------------------------------------

    def _rule_value_at(self, p: int, position: int | None) -> complex:
        r = self.rule
        if isinstance(r, OneRule):
            return 1
        if isinstance(r, LiouvilleRule):
            return -1
        if isinstance(r, Constant):
            return r.value
        if isinstance(r, ByClass):
            if p == 2:
                return r.two
            return r.one_mod4 if p % 4 == 1 else r.three_mod4
        if isinstance(r, SeededSign):
            pos = prime_position(p) if position is None else position
            return 1 if splitmix64(pos ^ r.seed) >> 63 == 0 else -1
        if isinstance(r, SeededPhase):
            pos = prime_position(p) if position is None else position
            u = splitmix64(pos ^ r.seed) / 2.0**64
            return cmath.exp(2j * math.pi * u)
        if isinstance(r, PowerOf):
            return prime_value(r.base, p, position=position) ** r.exponent
        if isinstance(r, PointwiseProduct):
            out = 1
            for s in r.parts:
                out = out * prime_value(s, p, position=position)
            return out
        raise TypeError(f"unknown rule {r!r}")

    def prime_values(self, primes: np.ndarray, positions: np.ndarray | None = None) -> np.ndarray:
        """Vectorized f(p) over an ascending prefix of the primes.

        positions defaults to 0..len(primes)-1, which is correct whenever
        `primes` is a prefix of the full prime sequence (e.g. a sieve's
        prime list, possibly cut at some bound).
        """
        primes = np.asarray(primes, dtype=np.int64)
        if positions is None:
            positions = np.arange(len(primes), dtype=np.uint64)
        r = self.rule
        if isinstance(r, OneRule):
            vals = np.ones(len(primes), dtype=self.dtype)
        elif isinstance(r, LiouvilleRule):
            vals = np.full(len(primes), -1, dtype=self.dtype)
        elif isinstance(r, Constant):
            vals = np.full(len(primes), r.value, dtype=self.dtype)
        elif isinstance(r, ByClass):
            vals = np.where(primes % 4 == 1, r.one_mod4, r.three_mod4)
            vals = np.where(primes == 2, r.two, vals).astype(self.dtype)
        elif isinstance(r, SeededSign):
            mixed = _splitmix64_vec(positions.astype(np.uint64) ^ np.uint64(r.seed & _M64))
            vals = np.where((mixed >> np.uint64(63)) == 0, 1, -1).astype(self.dtype)
        elif isinstance(r, SeededPhase):
            mixed = _splitmix64_vec(positions.astype(np.uint64) ^ np.uint64(r.seed & _M64))
            u = mixed.astype(np.float64) / 2.0**64
            vals = np.exp(2j * np.pi * u)
        elif isinstance(r, PowerOf):
            vals = r.base.prime_values(primes, positions).astype(self.dtype) ** r.exponent
        elif isinstance(r, PointwiseProduct):
            vals = np.ones(len(primes), dtype=self.dtype)
            for s in r.parts:
                vals = vals * s.prime_values(primes, positions).astype(self.dtype)
        else:
            raise TypeError(f"unknown rule {r!r}")
        if self.overrides:
            for p, v in self.overrides.items():
                idx = int(np.searchsorted(primes, p))
                if idx < len(primes) and int(primes[idx]) == p:
                    vals[idx] = v
        return vals

    def value_table(self, tables: SieveTables) -> np.ndarray:
        """f(n) for n = 0..tables.limit as one array (index 0 is unused, 0).

        Cached per (limit, dtype); two sieves with the same limit hold
        identical tables, so the cache key does not need the sieve itself.
        """
        key = (tables.limit, self.dtype.str)
        table = self._table_cache.get(key)
        if table is not None:
            return table
        limit = tables.limit
        out = np.zeros(limit + 1, dtype=self.dtype)
        if limit >= 1:
            out[1] = 1
        if limit >= 2:
            pvals = np.zeros(limit + 1, dtype=self.dtype)
            pvals[tables.primes] = self.prime_values(tables.primes)
            _fill_mult_table(tables.spf, pvals, out)
        out.setflags(write=False)
        self._table_cache[key] = out
        return out


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def prime_value(spec: MultiplicativeSpec, p: int, position: int | None = None):
    """f(p) for a single prime; DomainError when p is not prime."""
    p = int(p)
    cached = spec._prime_cache.get(p)
    if cached is not None:
        return cached
    if p in spec.overrides:
        v = spec.overrides[p]
    else:
        if not is_prime(p):
            raise DomainError(f"prime_value: {p} is not prime")
        v = spec._rule_value_at(p, position)
    spec._prime_cache[p] = v
    return v


def evaluate(spec: MultiplicativeSpec, n: int, tables: SieveTables):
    """f(n) via the sieve factorization; f(1) = 1 exactly."""
    out = 1
    for p, e in factorize(n, tables):
        out = out * prime_value(spec, p) ** e
    return out


def evaluate_power(spec: MultiplicativeSpec, n: int, k: int, tables: SieveTables):
    """f(n) ** k computed as a product of f(p) ** (e k), avoiding the
    intermediate cancellation of evaluating f(n) first."""
    k = int(k)
    if k < 1:
        raise RangeError(f"power k must be >= 1, got {k}")
    out = 1
    for p, e in factorize(n, tables):
        out = out * prime_value(spec, p) ** (e * k)
    return out


def exact_prime_value(spec: MultiplicativeSpec, p: int) -> Fraction:
    """f(p) as an exact Fraction; DomainError for non-exact (complex) specs."""
    if not spec.is_exact:
        raise DomainError(f"spec {spec.name or spec.rule!r} has no exact rational values")
    v = prime_value(spec, p)
    if isinstance(v, complex):
        v = v.real
    return Fraction(v) if not isinstance(v, int) else Fraction(v, 1)


def evaluate_exact(spec: MultiplicativeSpec, n: int, tables: SieveTables) -> Fraction:
    """f(n) as an exact Fraction (real-valued specs only)."""
    out = Fraction(1)
    for p, e in factorize(n, tables):
        out *= exact_prime_value(spec, p) ** e
    return out


def power_spec(spec: MultiplicativeSpec, k: int) -> MultiplicativeSpec:
    """The completely multiplicative function p -> f(p)**k."""
    k = int(k)
    if k < 1:
        raise RangeError(f"power k must be >= 1, got {k}")
    if k == 1:
        return spec
    return MultiplicativeSpec(
        rule=PowerOf(spec, k),
        bound=spec.bound**k,
        name=f"{spec.name or 'f'}^{k}",
    )


def product_spec(specs, name: str = "") -> MultiplicativeSpec:
    """The pointwise product p -> prod_j f_j(p) of several functions."""
    parts = tuple(specs)
    if not parts:
        return one_spec()
    if len(parts) == 1:
        return parts[0]
    bound = 1.0
    for s in parts:
        bound *= s.bound
    return MultiplicativeSpec(
        rule=PointwiseProduct(parts),
        bound=bound,
        name=name or "*".join(s.name or "f" for s in parts),
    )


# -- convenience constructors ----------------------------------------------


def one_spec() -> MultiplicativeSpec:
    return MultiplicativeSpec(rule=OneRule(), name="one")


def liouville_spec() -> MultiplicativeSpec:
    return MultiplicativeSpec(rule=LiouvilleRule(), name="liouville")


def constant_spec(value, bound: float | None = None, name: str = "") -> MultiplicativeSpec:
    b = max(1.0, abs(value)) if bound is None else bound
    return MultiplicativeSpec(rule=Constant(value), bound=b, name=name or f"const({value})")


def by_class_spec(two: float, one_mod4: float, three_mod4: float, name: str = "") -> MultiplicativeSpec:
    b = max(1.0, abs(two), abs(one_mod4), abs(three_mod4))
    return MultiplicativeSpec(
        rule=ByClass(two, one_mod4, three_mod4),
        bound=b,
        name=name or f"by_class({two},{one_mod4},{three_mod4})",
    )


def seeded_sign_spec(seed: int, name: str = "") -> MultiplicativeSpec:
    return MultiplicativeSpec(rule=SeededSign(int(seed)), name=name or f"seeded_sign({seed})")


def seeded_phase_spec(seed: int, name: str = "") -> MultiplicativeSpec:
    return MultiplicativeSpec(rule=SeededPhase(int(seed)), name=name or f"seeded_phase({seed})")


def split_agree_spec() -> MultiplicativeSpec:
    """-1 at 2 and at inert primes (3 mod 4), +1 at split primes (1 mod 4).

    On sums of two coprime squares this tracks the parity of the pair, so
    its coprime-grid averages have the exactly known limit 1/3.
    """
    return by_class_spec(-1.0, 1.0, -1.0, name="split_agree")


# -- serialization -----------------------------------------------------------


def spec_to_dict(spec: MultiplicativeSpec) -> dict:
    """Config-block form of a spec (inverse of spec_from_dict)."""
    r = spec.rule
    if isinstance(r, OneRule):
        block: dict = {"rule": "one"}
    elif isinstance(r, LiouvilleRule):
        block = {"rule": "liouville"}
    elif isinstance(r, Constant):
        v = r.value
        block = {"rule": "constant", "value": [v.real, v.imag] if _is_complex(v) else float(v.real if isinstance(v, complex) else v)}
    elif isinstance(r, ByClass):
        block = {"rule": "by_class", "two": r.two, "one_mod4": r.one_mod4, "three_mod4": r.three_mod4}
    elif isinstance(r, SeededSign):
        block = {"rule": "seeded_sign", "seed": r.seed}
    elif isinstance(r, SeededPhase):
        block = {"rule": "seeded_phase", "seed": r.seed}
    else:
        raise DomainError(f"derived spec {spec.name!r} has no config form")
    block["bound"] = spec.bound
    if spec.overrides:
        block["overrides"] = {
            str(p): ([v.real, v.imag] if _is_complex(v) else float(v.real if isinstance(v, complex) else v))
            for p, v in spec.overrides.items()
        }
    return block


def _value_from_json(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise DomainError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return float(v)


def spec_from_dict(block: dict, name: str = "") -> MultiplicativeSpec:
    """Build a spec from its config block; DomainError on malformed blocks."""
    if not isinstance(block, dict) or "rule" not in block:
        raise DomainError(f"spec block must be a dict with a 'rule' key, got {block!r}")
    rule_name = block["rule"]
    if rule_name == "one":
        rule: Rule = OneRule()
    elif rule_name == "liouville":
        rule = LiouvilleRule()
    elif rule_name == "constant":
        rule = Constant(_value_from_json(block["value"]))
    elif rule_name == "by_class":
        rule = ByClass(float(block["two"]), float(block["one_mod4"]), float(block["three_mod4"]))
    elif rule_name == "seeded_sign":
        rule = SeededSign(int(block["seed"]))
    elif rule_name == "seeded_phase":
        rule = SeededPhase(int(block["seed"]))
    else:
        raise DomainError(f"unknown rule {rule_name!r}")
    overrides = {int(p): _value_from_json(v) for p, v in block.get("overrides", {}).items()}
    bound = float(block.get("bound", 1.0))
    return MultiplicativeSpec(rule=rule, overrides=overrides, bound=bound, name=name)
