"""Gaussian integer arithmetic, canonical prime factorization, and evaluation
of real-valued completely multiplicative functions on the nonzero ring.

Every nonzero z factors as unit * prod(pi ** e) over canonical Gaussian
primes, where the canonical associate is the unique rotate with re > 0 and
im >= 0.  Rational primes embed three ways: 2 ramifies through (1 + i),
p = 3 mod 4 stays prime, and p = 1 mod 4 splits into the conjugate pair
(a + b i, b + a i) with a > b > 0, found through gcd(p, s + i) for a
square root s of -1 mod p.
"""

from __future__ import annotations

import re as _re
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError
from .multfunc import MultiplicativeSpec, prime_value
from .sieve import SieveTables, factorize, is_prime


@dataclass(frozen=True)
class GaussInt:
    """A Gaussian integer re + im * i."""

    re: int
    im: int

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conjugate(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def __str__(self) -> str:
        return f"{self.re}{self.im:+d}i"


def norm(z: GaussInt) -> int:
    """re**2 + im**2, always a nonnegative rational integer."""
    return z.re * z.re + z.im * z.im


def parse_gauss(text: str) -> GaussInt:
    """Parse 'a+bi' / 'a-bi' strings as used in config override keys."""
    m = _re.fullmatch(r"\s*(-?\d+)\s*([+-]\s*\d+)\s*i\s*", text)
    if not m:
        raise DomainError(f"cannot parse Gaussian integer {text!r} (expected 'a+bi')")
    return GaussInt(int(m.group(1)), int(m.group(2).replace(" ", "")))


# ---------------------------------------------------------------------------
# Arithmetic helpers on raw (re, im) pairs; tuples keep the per-point
# factorization loop cheap.
# ---------------------------------------------------------------------------


def _mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _norm2(a):
    return a[0] * a[0] + a[1] * a[1]


def _exact_div(a, b):
    """a / b when b divides a exactly, else None."""
    nb = _norm2(b)
    tr = a[0] * b[0] + a[1] * b[1]
    ti = a[1] * b[0] - a[0] * b[1]
    if tr % nb or ti % nb:
        return None
    return (tr // nb, ti // nb)


def _rounded_div(a, b):
    nb = _norm2(b)
    tr = a[0] * b[0] + a[1] * b[1]
    ti = a[1] * b[0] - a[0] * b[1]
    # nearest integer quotient in both coordinates keeps norm(remainder) <= nb/2
    qr = (2 * tr + nb) // (2 * nb)
    qi = (2 * ti + nb) // (2 * nb)
    return (qr, qi)


def _gauss_gcd(a, b):
    # Euclid with rounded quotients: norm(remainder) <= norm(b)/2, so it terminates.
    while _norm2(b):
        q = _rounded_div(a, b)
        qb = _mul(q, b)
        a, b = b, (a[0] - qb[0], a[1] - qb[1])
    return a


def _canonical(a):
    """The rotate of a by a power of i with re > 0 and im >= 0."""
    re0, im0 = a
    for _ in range(4):
        if re0 > 0 and im0 >= 0:
            return (re0, im0)
        re0, im0 = -im0, re0
    raise DomainError("zero has no canonical associate")


def sqrt_minus_one(p: int) -> int:
    """The square root s of -1 mod p with 0 < s < p/2, for p = 1 mod 4.

    Deterministic construction: raise the least quadratic non-residue to
    the power (p - 1)/4 and fold s to p - s when s > p/2.
    """
    p = int(p)
    if not is_prime(p) or p % 4 != 1:
        raise DomainError(f"sqrt_minus_one needs a prime = 1 mod 4, got {p}")
    n = 2
    while pow(n, (p - 1) // 2, p) != p - 1:
        n += 1
    s = pow(n, (p - 1) // 4, p)
    if s > p // 2:
        s = p - s
    return s


_split_lock = threading.Lock()
_split_cache: dict[int, tuple[int, int]] = {}


def split_prime(p: int) -> tuple[int, int]:
    """Canonical factor (a, b) with a > b > 0 and a**2 + b**2 = p, for
    p = 1 mod 4; its conjugate partner is the canonical prime (b, a)."""
    with _split_lock:
        hit = _split_cache.get(p)
    if hit is not None:
        return hit
    s = sqrt_minus_one(p)
    g = _gauss_gcd((p, 0), (s, 1))
    a, b = _canonical(g)
    if a < b:
        a, b = b, a
    if a * a + b * b != p:
        raise DomainError(f"split of {p} failed (gcd gave {g})")
    with _split_lock:
        _split_cache[p] = (a, b)
    return (a, b)


@dataclass(frozen=True)
class GaussFactorization:
    """unit * prod(prime ** exponent) with canonical, (norm, im)-sorted primes."""

    unit: GaussInt
    factors: tuple[tuple[GaussInt, int], ...]

    def value(self) -> GaussInt:
        out = self.unit
        for pi, e in self.factors:
            for _ in range(e):
                out = out * pi
        return out


_UNITS = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}


def _factor_raw(re0: int, im0: int, tables: SieveTables) -> tuple[int, list[tuple[int, int, int]]]:
    """Factor re0 + im0*i; returns (unit power of i, [(pre, pim, e), ...])."""
    n = re0 * re0 + im0 * im0
    if n == 0:
        raise DomainError("cannot factor 0 in the Gaussian integers")
    if n > tables.limit:
        raise CapacityError(f"norm {n} exceeds the sieve limit {tables.limit}")
    rem = (re0, im0)
    out: list[tuple[int, int, int]] = []
    for p, e in factorize(n, tables):
        if p == 2:
            pi = (1, 1)
            for _ in range(e):
                rem = _exact_div(rem, pi)
            out.append((1, 1, e))
        elif p % 4 == 3:
            if e & 1:
                raise DomainError(f"norm {n} has odd exponent at inert prime {p}")
            half = e // 2
            pi = (p, 0)
            for _ in range(half):
                rem = _exact_div(rem, pi)
            out.append((p, 0, half))
        else:
            a, b = split_prime(p)
            pi = (a, b)
            cnt = 0
            while cnt < e:
                nxt = _exact_div(rem, pi)
                if nxt is None:
                    break
                rem = nxt
                cnt += 1
            rest = e - cnt
            if cnt:
                out.append((a, b, cnt))
            if rest:
                bar = (b, a)
                for _ in range(rest):
                    rem = _exact_div(rem, bar)
                out.append((b, a, rest))
    unit_pow = _UNITS.get(rem)
    if unit_pow is None:
        raise DomainError(f"factorization left non-unit remainder {rem}")
    return unit_pow, out


def factor_gaussian(z: GaussInt, tables: SieveTables) -> GaussFactorization:
    """Canonical factorization of a nonzero Gaussian integer with
    norm(z) <= tables.limit.  The multiply-back product recovers z exactly."""
    unit_pow, raw = _factor_raw(z.re, z.im, tables)
    units = [GaussInt(1, 0), GaussInt(0, 1), GaussInt(-1, 0), GaussInt(0, -1)]
    factors = tuple(
        (GaussInt(a, b), e)
        for a, b, e in sorted(raw, key=lambda t: (t[0] * t[0] + t[1] * t[1], t[1]))
    )
    return GaussFactorization(unit=units[unit_pow], factors=factors)


# ---------------------------------------------------------------------------
# Multiplicative functions on the nonzero Gaussian integers
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class GaussianMultSpec:
    """Real-valued completely multiplicative f on the nonzero Gaussian
    integers.

    Either composed with the norm (norm_of = g means f = g(norm(.))), or
    given directly by f(i) in {+1, -1}, a default value on canonical
    primes, and overrides keyed by canonical prime.  Real-valuedness
    forces f(i) in {+1, -1} since f(i)**4 = f(1) = 1.
    """

    norm_of: MultiplicativeSpec | None = None
    unit_value_i: int = 1
    default_value: float = 1.0
    overrides: dict[tuple[int, int], float] = field(default_factory=dict)
    bound: float = 1.0
    name: str = ""

    _prime_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.unit_value_i not in (1, -1):
            raise DomainError(f"f(i) must be +1 or -1, got {self.unit_value_i}")
        if self.norm_of is not None:
            if self.norm_of.is_complex:
                raise DomainError("norm composition needs a real-valued base function")
            return
        if abs(self.default_value) > self.bound + 1e-12:
            raise DomainError(f"default value {self.default_value} exceeds bound {self.bound}")
        for key, v in self.overrides.items():
            a, b = key
            if not (a > 0 and b >= 0):
                raise DomainError(f"override key {key} is not a canonical prime (re > 0, im >= 0)")
            nk = a * a + b * b
            if not (is_prime(nk) or (b == 0 and a % 4 == 3 and is_prime(a))):
                raise DomainError(f"override key {key} is not a Gaussian prime")
            if abs(v) > self.bound + 1e-12:
                raise DomainError(f"override value {v} at {key} exceeds bound {self.bound}")

    @property
    def is_sign_valued(self) -> bool:
        if self.norm_of is not None:
            return self.norm_of.is_sign_valued
        vals = [self.default_value, *self.overrides.values()]
        return all(float(v) in (-1.0, 0.0, 1.0) for v in vals)


def _gauss_prime_value(gspec: GaussianMultSpec, key: tuple[int, int]):
    hit = gspec._prime_cache.get(key)
    if hit is not None:
        return hit
    if gspec.norm_of is not None:
        if key[1] == 0:  # inert prime p has norm p**2, so the value is g(p)**2
            v = prime_value(gspec.norm_of, key[0]) ** 2
        else:  # ramified or split primes have prime norm
            v = prime_value(gspec.norm_of, key[0] * key[0] + key[1] * key[1])
    else:
        v = gspec.overrides.get(key, gspec.default_value)
    gspec._prime_cache[key] = v
    return v


def _unit_value(gspec: GaussianMultSpec, unit_pow: int):
    if gspec.norm_of is not None:
        return 1
    return gspec.unit_value_i**unit_pow


def eval_gauss(gspec: GaussianMultSpec, z: GaussInt, tables: SieveTables):
    """f(z) = f(unit) * prod f(pi)**e over the canonical factorization."""
    unit_pow, raw = _factor_raw(z.re, z.im, tables)
    out = _unit_value(gspec, unit_pow)
    for a, b, e in raw:
        out = out * _gauss_prime_value(gspec, (a, b)) ** e
    return out


def embedded_prime_value(gspec: GaussianMultSpec, p: int, tables: SieveTables):
    """f at the rational prime p embedded as p + 0i, computed from the
    class of p without needing norm(p) = p**2 inside the sieve:

        f(2) = f(i) f(1+i)**2              (2 = -i (1+i)**2, f(-i) = f(i))
        f(p) = f(p + 0i)                   (p = 3 mod 4, inert)
        f(p) = f(i) f(a+bi) f(b+ai)        (p = 1 mod 4: (a+bi)(b+ai) = p i,
                                            so p = -i (a+bi)(b+ai))
    """
    p = int(p)
    if gspec.norm_of is not None:
        return prime_value(gspec.norm_of, p) ** 2
    if p == 2:
        return _unit_value(gspec, 1) * _gauss_prime_value(gspec, (1, 1)) ** 2
    if p % 4 == 3:
        return _gauss_prime_value(gspec, (p, 0))
    a, b = split_prime(p)
    return _unit_value(gspec, 1) * _gauss_prime_value(gspec, (a, b)) * _gauss_prime_value(gspec, (b, a))


def embedded_prime_values(gspec: GaussianMultSpec, primes: np.ndarray, tables: SieveTables) -> np.ndarray:
    """Vectorized embedded_prime_value over an ascending prefix of primes."""
    if gspec.norm_of is not None:
        return gspec.norm_of.prime_values(primes).astype(np.float64) ** 2
    return np.array([embedded_prime_value(gspec, int(p), tables) for p in primes], dtype=np.float64)


def value_grid(gspec: GaussianMultSpec, N: int, tables: SieveTables, mask: np.ndarray | None = None) -> np.ndarray:
    """f(m + i n) over 1 <= m, n <= N through per-point Gaussian
    factorization (the honest ring-side route, no norm shortcut).

    Entries outside the optional selection mask are left at 0.  Returns an
    int64 grid for sign-valued specs, float64 otherwise."""
    if 2 * N * N > tables.limit:
        raise CapacityError(f"grid needs norms up to {2 * N * N} but the sieve covers {tables.limit}")
    sign_valued = gspec.is_sign_valued
    out = np.zeros((N, N), dtype=np.int64 if sign_valued else np.float64)
    for m in range(1, N + 1):
        row = out[m - 1]
        for n in range(1, N + 1):
            if mask is not None and not mask[m - 1, n - 1]:
                continue
            unit_pow, raw = _factor_raw(m, n, tables)
            v = _unit_value(gspec, unit_pow)
            for a, b, e in raw:
                v = v * _gauss_prime_value(gspec, (a, b)) ** e
            row[n - 1] = v
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def gauss_spec_from_dict(block: dict, named_specs: dict[str, MultiplicativeSpec], name: str = "") -> GaussianMultSpec:
    """Build a Gaussian spec from its config block.  A 'norm_of' key names
    an ordinary spec; otherwise unit_value_i / default / overrides apply,
    with override keys written as 'a+bi'."""
    if not isinstance(block, dict):
        raise DomainError(f"gaussian spec block must be a dict, got {block!r}")
    if "norm_of" in block:
        base = named_specs.get(block["norm_of"])
        if base is None:
            raise DomainError(f"gaussian spec references unknown function {block['norm_of']!r}")
        return GaussianMultSpec(norm_of=base, bound=base.bound, name=name)
    overrides = {}
    for key, v in block.get("overrides", {}).items():
        z = parse_gauss(key)
        overrides[(z.re, z.im)] = float(v)
    return GaussianMultSpec(
        unit_value_i=int(block.get("unit_value_i", 1)),
        default_value=float(block.get("default", 1.0)),
        overrides=overrides,
        bound=float(block.get("bound", 1.0)),
        name=name,
    )


def gauss_spec_to_dict(gspec: GaussianMultSpec) -> dict:
    if gspec.norm_of is not None:
        return {"norm_of": gspec.norm_of.name}
    block: dict = {
        "unit_value_i": gspec.unit_value_i,
        "default": gspec.default_value,
        "bound": gspec.bound,
    }
    if gspec.overrides:
        block["overrides"] = {f"{a}{b:+d}i": v for (a, b), v in gspec.overrides.items()}
    return block
