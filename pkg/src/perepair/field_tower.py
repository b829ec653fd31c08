"""Arithmetic in binary extension fields GF(2^N) with subfield lattices.

Elements are polynomials over GF(2) packed into Python ints: bit ``i`` holds
the coefficient of ``x^i``.  One :class:`FieldCtx` owns a single polynomial
basis representation of GF(2^N); every subfield GF(2^m), m | N, lives inside
it and is addressed through a :class:`SubfieldHandle` (membership is the
Frobenius fixed-point test ``e^(2^m) == e``).  On top of that the module
provides trace maps onto arbitrary subfields, trace-dual bases, primitive and
defining element tests, and budgeted integer factorization (trial division
followed by Brent's variant of Pollard rho) for the multiplicative-order
checks.

Performance notes: multiplication is carry-less with a 4-bit window table and
a sparse-modulus folding reduction; squaring spreads bytes through a
precomputed 16-bit table; repeated Frobenius maps (traces, membership tests)
use a cached N x N GF(2) matrix.  Everything is exact; exponents are
arbitrary-precision throughout.
"""

from __future__ import annotations

import math
import time
from itertools import count

from .errors import PERepairError

__all__ = [
    "FieldCtx",
    "FieldElem",
    "SubfieldHandle",
    "BasisOverSubfield",
    "make_field",
    "add",
    "mul",
    "inv",
    "power",
    "frobenius",
    "trace_to",
    "is_in_subfield",
    "is_primitive_in_subfield",
    "degree_over",
    "dual_basis",
    "factor_integer",
    "clmul",
    "clsq",
    "poly_degree",
    "poly_mod",
    "poly_divmod",
    "poly_gcd",
    "poly_inv_mod",
    "poly_from_exponents",
    "is_irreducible",
    "smallest_irreducible",
    "gf2_rank",
]


# --------------------------------------------------------------------------
# carry-less polynomial arithmetic on ints (bit i = coefficient of x^i)

# byte -> 16 bits with the byte's bits spread to even positions (squaring map)
_SPREAD = tuple(
    sum(((b >> i) & 1) << (2 * i) for i in range(8)) for b in range(256)
)


def clmul(a: int, b: int) -> int:
    """Carry-less product of two binary polynomials."""
    if a == 0 or b == 0:
        return 0
    if a.bit_length() < b.bit_length():
        a, b = b, a
    # window table: t[j] = j(x) * b(x) for all 4-bit j
    t = [0] * 16
    t[1] = b
    t[2] = b << 1
    t[4] = b << 2
    t[8] = b << 3
    for j in (3, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15):
        t[j] = t[j & (j - 1)] ^ t[j & -j]
    acc = 0
    for byte in a.to_bytes((a.bit_length() + 7) // 8, "big"):
        acc = (acc << 8) ^ (t[byte >> 4] << 4) ^ t[byte & 15]
    return acc


def clsq(a: int) -> int:
    """Carry-less square: spreads every coefficient bit to position 2i."""
    if a == 0:
        return 0
    raw = a.to_bytes((a.bit_length() + 7) // 8, "little")
    out = bytearray(2 * len(raw))
    for i, byte in enumerate(raw):
        s = _SPREAD[byte]
        out[2 * i] = s & 0xFF
        out[2 * i + 1] = s >> 8
    return int.from_bytes(out, "little")


def poly_degree(p: int) -> int:
    """Degree of a binary polynomial (-1 for the zero polynomial)."""
    return p.bit_length() - 1


def _tail_shifts(f: int) -> tuple:
    """Exponents of f below its leading term, descending."""
    tail = f ^ (1 << poly_degree(f))
    shifts = []
    while tail:
        b = tail.bit_length() - 1
        shifts.append(b)
        tail ^= 1 << b
    return tuple(shifts)


def poly_mod(a: int, f: int) -> int:
    """a mod f for binary polynomials, f nonconstant."""
    n = poly_degree(f)
    if n < 1:
        raise ValueError("modulus must have degree >= 1")
    shifts = _tail_shifts(f)
    if not shifts or shifts[0] <= n // 2:
        # sparse/low tail: fold the overflow down through x^n = tail(x)
        mask = (1 << n) - 1
        hi = a >> n
        while hi:
            a &= mask
            for sh in shifts:
                a ^= hi << sh
            hi = a >> n
        return a
    da = poly_degree(a)
    while da >= n:
        a ^= f << (da - n)
        da = poly_degree(a)
    return a


def poly_divmod(a: int, b: int) -> tuple:
    """Quotient and remainder of binary polynomials."""
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = poly_degree(b)
    q = 0
    da = poly_degree(a)
    while da >= db:
        sh = da - db
        q |= 1 << sh
        a ^= b << sh
        da = poly_degree(a)
    return q, a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return a


def poly_inv_mod(a: int, f: int) -> int:
    """Inverse of a modulo f (binary polynomials, gcd(a, f) = 1)."""
    if a == 0:
        raise PERepairError("ZERO_INVERSE", "cannot invert zero")
    r0, r1 = f, poly_mod(a, f)
    s0, s1 = 0, 1
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 ^ clmul(q, s1)
    if r0 != 1:
        raise ValueError("element not invertible for this modulus")
    return poly_mod(s0, f)


def poly_from_exponents(*exponents: int) -> int:
    """Binary polynomial with the given term exponents, e.g. (4, 1, 0)."""
    p = 0
    for e in exponents:
        p ^= 1 << e
    return p


def is_irreducible(f: int) -> bool:
    """Rabin's test: x^(2^n) = x mod f and gcd(x^(2^(n/p)) - x, f) = 1."""
    n = poly_degree(f)
    if n < 1:
        return False
    if n == 1:
        return True
    if not (f & 1):
        return False  # divisible by x
    checkpoints = {n // p for p in _small_prime_factors(n)}
    y = 2  # the polynomial x
    for j in range(1, n + 1):
        y = poly_mod(clsq(y), f)
        if j in checkpoints and poly_gcd(y ^ 2, f) != 1:
            return False
    return y == 2


def smallest_irreducible(n: int) -> int:
    """First irreducible of degree n, coefficient vectors ordered
    lexicographically low-degree-first."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    if n == 1:
        return 2  # x itself
    base = (1 << n) | 1
    width = n - 1
    for b in count(0):
        mid = 0
        for i in range(1, n):
            if (b >> (width - i)) & 1:
                mid |= 1 << i
        f = base | mid
        if is_irreducible(f):
            return f
        if b >= (1 << width) - 1:  # pragma: no cover - irreducibles exist
            raise AssertionError("no irreducible polynomial found")


def gf2_rank(rows) -> int:
    """Rank over GF(2) of bit-vector rows given as ints."""
    pivots = {}
    rank = 0
    for row in rows:
        while row:
            b = row.bit_length() - 1
            other = pivots.get(b)
            if other is None:
                pivots[b] = row
                rank += 1
                break
            row ^= other
    return rank


# --------------------------------------------------------------------------
# integer factorization: trial division to 10^6, then Brent's rho

_TRIAL_LIMIT = 10 ** 6
_trial_primes_cache = None


def _trial_primes():
    global _trial_primes_cache
    if _trial_primes_cache is None:
        sieve = bytearray([1]) * _TRIAL_LIMIT
        sieve[0] = sieve[1] = 0
        for i in range(2, int(_TRIAL_LIMIT ** 0.5) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _trial_primes_cache = [i for i in range(_TRIAL_LIMIT) if sieve[i]]
    return _trial_primes_cache


def _small_prime_factors(n: int):
    """Prime factors of a small integer by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# deterministic below 3.3 * 10^24; beyond that the extra bases make the
# composite-acceptance probability negligible for our (non-adversarial) inputs
_MR_BASES_LARGE = _MR_BASES_SMALL + (41, 43, 47, 53, 59, 61, 67, 71, 73, 79)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    bases = _MR_BASES_SMALL if n < 3317044064679887385961981 else _MR_BASES_LARGE
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int, c: int, deadline: float):
    """One Brent-rho round; returns a nontrivial factor, 0 to retry with a
    different c, or None on deadline."""
    y, m = 2, 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            if time.monotonic() > deadline:
                return None
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * (x - y) % n
            g = math.gcd(q, n)
            k += m
        r <<= 1
    if g == n:
        g = 1
        y = ys
        while g == 1:
            if time.monotonic() > deadline:
                return None
            y = (y * y + c) % n
            g = math.gcd(x - y, n)
    return 0 if g == n else g


def _factor_with_budget(x: int, deadline: float):
    """Factor as far as the deadline allows.

    Returns (factors, leftover): a {prime: exponent} dict and the unfactored
    composite remainder (1 when factorization completed).
    """
    factors = {}
    for p in _trial_primes():
        if p * p > x:
            break
        while x % p == 0:
            factors[p] = factors.get(p, 0) + 1
            x //= p
    if x == 1:
        return factors, 1
    leftover = 1
    stack = [x]
    while stack:
        n = stack.pop()
        if n == 1:
            continue
        if _is_probable_prime(n):
            factors[n] = factors.get(n, 0) + 1
            continue
        d = 0
        c = 1
        while d == 0:
            d = _brent_rho(n, c, deadline)
            c += 1
        if d is None:
            leftover *= n
            continue
        stack.append(d)
        stack.append(n // d)
    return factors, leftover


def factor_integer(x: int, budget: float = 10.0):
    """Full factorization of x >= 2 as a sorted list of (prime, exponent).

    Trial division up to 10^6, then Pollard rho (Brent) under a wall-clock
    budget in seconds; raises FACTORIZATION_TIMEOUT if the budget runs out
    before the factorization completes.
    """
    if x < 2:
        raise ValueError("factor_integer requires x >= 2")
    factors, leftover = _factor_with_budget(x, time.monotonic() + budget)
    if leftover != 1:
        raise PERepairError(
            "FACTORIZATION_TIMEOUT",
            f"unfactored composite of {leftover.bit_length()} bits remains",
        )
    return sorted(factors.items())


def _divisors(n: int):
    """All divisors of a small integer, ascending."""
    divs = [1]
    facts = {}
    m = n
    d = 2
    while d * d <= m:
        while m % d == 0:
            facts[d] = facts.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        facts[m] = facts.get(m, 0) + 1
    for p, e in facts.items():
        divs = [dv * p ** i for dv in divs for i in range(e + 1)]
    return sorted(divs)


def _cyclotomic_values(n: int):
    """{d: Phi_d(2)} for every divisor d of n; the product over all d
    equals 2^n - 1."""
    divs = _divisors(n)
    vals = {}
    for d in divs:
        v = (1 << d) - 1
        for e in divs:
            if e < d and d % e == 0:
                v //= vals[e]
        vals[d] = v
    return vals


def _factor_mersenne_like(n_bits: int, budget: float):
    """Best-effort factorization of 2^n - 1 via its cyclotomic pieces.

    Returns (factors dict, cofactor, complete).  Unfactored pieces multiply
    into the composite cofactor instead of failing the whole call.
    """
    pieces = [v for d, v in sorted(_cyclotomic_values(n_bits).items()) if v > 1]
    deadline = time.monotonic() + budget
    factors = {}
    cofactor = 1
    for v in pieces:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            cofactor *= v
            continue
        piece_deadline = time.monotonic() + min(
            remaining, max(0.05, budget / len(pieces))
        )
        found, leftover = _factor_with_budget(v, piece_deadline)
        for p, e in found.items():
            factors[p] = factors.get(p, 0) + e
        cofactor *= leftover
    return factors, cofactor, cofactor == 1


# --------------------------------------------------------------------------
# field context and elements


class FieldElem:
    """Element of a FieldCtx; supports +, -, *, **, and .inverse()."""

    __slots__ = ("ctx", "v")

    def __init__(self, ctx: "FieldCtx", v: int):
        self.ctx = ctx
        self.v = v

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx and other.ctx.modulus != self.ctx.modulus:
                raise ValueError("elements belong to different fields")
            return other.v
        if isinstance(other, int):
            if not 0 <= other < (1 << self.ctx.degree_bits):
                raise ValueError("int out of range for this field")
            return other
        return NotImplemented

    def __add__(self, other):
        w = self._coerce(other)
        if w is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.v ^ w)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        w = self._coerce(other)
        if w is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx._mul(self.v, w))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return FieldElem(self.ctx, self.ctx._pow(self.v, k))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.ctx, self.ctx._inv(self.v))

    def __truediv__(self, other):
        w = self._coerce(other)
        if w is NotImplemented:
            return NotImplemented
        return FieldElem(self.ctx, self.ctx._mul(self.v, self.ctx._inv(w)))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.v == other.v and self.ctx.modulus == other.ctx.modulus
        if isinstance(other, int):
            return self.v == other
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.modulus, self.v))

    def __bool__(self):
        return self.v != 0

    def hex(self) -> str:
        return self.ctx.to_hex(self)

    def __repr__(self):
        return f"FieldElem({self.hex()})"


class FieldCtx:
    """GF(2^N) with a fixed modulus, verified-or-trusted primitive generator,
    and the (possibly partial) factorization of the group order 2^N - 1.

    Immutable after construction; internal caches (subfield handles, Frobenius
    matrices) are memos only.  Build instances through :func:`make_field`.
    """

    def __init__(self, degree_bits, modulus, generator_value,
                 order_factorization, order_cofactor, generator_verified):
        self.degree_bits = degree_bits
        self.modulus = modulus
        self.order = (1 << degree_bits) - 1
        self.order_factorization = tuple(order_factorization)
        self.order_cofactor = order_cofactor
        self.generator_verified = generator_verified
        self._mask = (1 << degree_bits) - 1
        self._shifts = _tail_shifts(modulus)
        self._sparse = not self._shifts or self._shifts[0] <= degree_bits // 2
        self._hexw = (degree_bits + 3) // 4
        self._subfields = {}
        self._frob_rows = {}
        self._trace_rows = {}
        self.generator = FieldElem(self, generator_value)

    # -- raw int arithmetic ------------------------------------------------

    def _fold(self, c: int) -> int:
        n = self.degree_bits
        if self._sparse:
            hi = c >> n
            while hi:
                c &= self._mask
                for sh in self._shifts:
                    c ^= hi << sh
                hi = c >> n
            return c
        return poly_mod(c, self.modulus)

    def _mul(self, a: int, b: int) -> int:
        return self._fold(clmul(a, b))

    def _sq(self, a: int) -> int:
        return self._fold(clsq(a))

    def _inv(self, a: int) -> int:
        if a == 0:
            raise PERepairError("ZERO_INVERSE", "cannot invert zero")
        if self.degree_bits == 1:
            return 1
        return poly_inv_mod(a, self.modulus)

    def _pow(self, a: int, k: int) -> int:
        if k < 0:
            raise ValueError("exponent must be non-negative")
        if k == 0:
            return 1
        if a == 0:
            return 0
        if k.bit_length() <= 16:
            r = 1
            b = a
            while k:
                if k & 1:
                    r = self._mul(r, b)
                k >>= 1
                if k:
                    b = self._sq(b)
            return r
        # 4-bit windowed square-and-multiply for big exponents
        tbl = [1, a]
        for _ in range(14):
            tbl.append(self._mul(tbl[-1], a))
        r = 1
        started = False
        for byte in k.to_bytes((k.bit_length() + 7) // 8, "big"):
            for nib in (byte >> 4, byte & 15):
                if started:
                    r = self._sq(self._sq(self._sq(self._sq(r))))
                if nib:
                    r = self._mul(r, tbl[nib]) if started else tbl[nib]
                    started = True
        return r

    # -- element plumbing ----------------------------------------------------

    def elem(self, v: int) -> FieldElem:
        if not 0 <= v <= self._mask:
            raise ValueError("value out of range for this field")
        return FieldElem(self, v)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    def to_hex(self, e: FieldElem) -> str:
        return format(e.v, f"0{self._hexw}x")

    def from_hex(self, s: str) -> FieldElem:
        v = int(s, 16)
        if not 0 <= v <= self._mask:
            raise ValueError("hex value out of range for this field")
        return FieldElem(self, v)

    @property
    def modulus_hex(self) -> str:
        return format(self.modulus, "x")

    # -- subfields and Frobenius --------------------------------------------

    def subfield(self, m: int) -> "SubfieldHandle":
        if m < 1 or self.degree_bits % m != 0:
            raise PERepairError(
                "NOT_A_SUBFIELD_DEGREE",
                f"{m} does not divide {self.degree_bits}",
            )
        handle = self._subfields.get(m)
        if handle is None:
            handle = SubfieldHandle(self, m)
            self._subfields[m] = handle
        return handle

    def _frob_matrix(self, m: int):
        """Rows of e -> e^(2^m) in the monomial basis (row i = image of x^i)."""
        rows = self._frob_rows.get(m)
        if rows is None:
            if self.degree_bits == 1:
                rows = (1,)
            else:
                img = 2  # the polynomial x
                for _ in range(m):
                    img = self._sq(img)
                acc = [1]
                for _ in range(self.degree_bits - 1):
                    acc.append(self._mul(acc[-1], img))
                rows = tuple(acc)
            self._frob_rows[m] = rows
        return rows

    def _apply_rows(self, rows, v: int) -> int:
        acc = 0
        while v:
            low = v & -v
            acc ^= rows[low.bit_length() - 1]
            v ^= low
        return acc

    def _frob(self, v: int, m: int) -> int:
        """e^(2^m) using the cached matrix when present, else squarings."""
        rows = self._frob_rows.get(m)
        if rows is not None:
            return self._apply_rows(rows, v)
        for _ in range(m):
            v = self._sq(v)
        return v

    def _trace_matrix(self, m: int):
        """Rows of e -> e + e^(2^m) + ... (the trace onto GF(2^m)),
        built once so each trace costs a single matrix application."""
        rows = self._trace_rows.get(m)
        if rows is None:
            frob = self._frob_matrix(m)
            steps = self.degree_bits // m
            out = []
            for i in range(self.degree_bits):
                acc = cur = 1 << i
                for _ in range(steps - 1):
                    cur = self._apply_rows(frob, cur)
                    acc ^= cur
                out.append(acc)
            rows = tuple(out)
            self._trace_rows[m] = rows
        return rows

    def _degree_over(self, v: int, m: int) -> int:
        """Smallest d >= 1 with v^(2^(m*d)) == v."""
        y = v
        for d in range(1, self.degree_bits // m + 1):
            y = self._frob(y, m)
            if y == v:
                return d
        raise AssertionError("element degree did not divide the tower")

    def __repr__(self):
        return f"FieldCtx(GF(2^{self.degree_bits}), modulus=0x{self.modulus_hex})"


class SubfieldHandle:
    """GF(2^m) inside a FieldCtx, addressed by its canonical generator
    g^((2^N-1)/(2^m-1)).

    ``order_verified`` is True when the ambient generator's primitivity is
    fully verified (then the canonical generator provably has order 2^m - 1);
    trusted-generator contexts propagate their caveat here.
    """

    __slots__ = ("ctx", "degree_bits", "canonical_generator", "order_verified",
                 "_order_factors", "_gf2_basis")

    def __init__(self, ctx: FieldCtx, m: int):
        self.ctx = ctx
        self.degree_bits = m
        if m == ctx.degree_bits:
            gen = ctx.generator
        else:
            exp = ctx.order // ((1 << m) - 1)
            gen = FieldElem(ctx, ctx._pow(ctx.generator.v, exp))
        self.canonical_generator = gen
        if m > 1 and ctx._degree_over(gen.v, 1) != m:
            raise AssertionError(
                "canonical subfield generator is not defining; "
                "the ambient generator cannot be primitive"
            )
        self.order_verified = ctx.generator_verified
        self._order_factors = None
        self._gf2_basis = None

    def order_factorization(self, budget: float = 10.0):
        """Prime factorization of 2^m - 1, derived from the ambient context
        when complete, otherwise factored directly under the budget."""
        if self._order_factors is None:
            order = (1 << self.degree_bits) - 1
            if order == 1:
                self._order_factors = ()
                return self._order_factors
            rem = order
            found = []
            if self.ctx.order_cofactor == 1:
                for p, _ in self.ctx.order_factorization:
                    e = 0
                    while rem % p == 0:
                        rem //= p
                        e += 1
                    if e:
                        found.append((p, e))
            if rem != 1:
                for p, e in factor_integer(rem, budget):
                    found.append((p, e))
            self._order_factors = tuple(sorted(found))
        return self._order_factors

    def gf2_basis(self):
        """Powers gamma^0..gamma^(m-1): a GF(2)-basis of the subfield,
        as raw ints."""
        if self._gf2_basis is None:
            ctx = self.ctx
            cur = 1
            rows = [1]
            for _ in range(self.degree_bits - 1):
                cur = ctx._mul(cur, self.canonical_generator.v)
                rows.append(cur)
            self._gf2_basis = tuple(rows)
        return self._gf2_basis

    def __repr__(self):
        return f"SubfieldHandle(GF(2^{self.degree_bits}) in GF(2^{self.ctx.degree_bits}))"


class BasisOverSubfield:
    """Ordered, linearly independent vectors of E over a subfield.

    Validation expands each vector against the subfield's GF(2)-basis and
    checks rank over GF(2), which is exactly independence over the subfield.
    """

    __slots__ = ("subfield", "vectors")

    def __init__(self, subfield: SubfieldHandle, vectors, validate: bool = True):
        self.subfield = subfield
        self.vectors = tuple(vectors)
        if validate:
            m = subfield.degree_bits
            ctx = subfield.ctx
            rows = []
            sigma = subfield.gf2_basis()
            for vec in self.vectors:
                for s in sigma:
                    rows.append(ctx._mul(vec.v, s))
            if gf2_rank(rows) != len(self.vectors) * m:
                raise PERepairError(
                    "SINGULAR_GRAM",
                    "vectors are linearly dependent over the subfield",
                )

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)


# --------------------------------------------------------------------------
# construction

_field_cache = {}


def make_field(degree_bits: int, modulus: int | None = None, *,
               factor_budget: float = 6.0,
               strict_factorization: bool = False) -> FieldCtx:
    """Build GF(2^degree_bits).

    With no modulus, picks the lexicographically smallest irreducible
    polynomial of that degree (coefficient vectors compared low-degree-first),
    so repeated runs agree byte-for-byte.  The generator is the smallest
    polynomial (as an integer) that is defining over GF(2) and passes the
    order test against every known prime factor of 2^N - 1.

    When 2^N - 1 cannot be fully factored within ``factor_budget`` seconds the
    context is still returned, with the unfactored composite recorded in
    ``order_cofactor`` and ``generator_verified = False`` — the generator then
    passed every available necessary test but its primitivity rests on the
    published parameters (this is the documented caveat for degree 2310).
    Pass ``strict_factorization=True`` to turn that situation into
    FACTORIZATION_TIMEOUT instead.
    """
    if degree_bits < 1:
        raise ValueError("degree_bits must be >= 1")
    if modulus is None:
        modulus = smallest_irreducible(degree_bits)
    else:
        if poly_degree(modulus) != degree_bits:
            raise PERepairError(
                "REDUCIBLE_MODULUS",
                f"modulus degree {poly_degree(modulus)} != {degree_bits}",
            )
        if not is_irreducible(modulus):
            raise PERepairError("REDUCIBLE_MODULUS", "modulus is reducible")

    key = (degree_bits, modulus, strict_factorization)
    cached = _field_cache.get(key)
    if cached is not None:
        return cached

    if degree_bits == 1:
        ctx = FieldCtx(1, modulus, 1, (), 1, True)
        _field_cache[key] = ctx
        return ctx

    factors, cofactor, complete = _factor_mersenne_like(degree_bits, factor_budget)
    if strict_factorization and not complete:
        raise PERepairError(
            "FACTORIZATION_TIMEOUT",
            f"2^{degree_bits}-1 not fully factored within {factor_budget}s",
        )

    order = (1 << degree_bits) - 1
    proper = [d for d in _divisors(degree_bits) if d < degree_bits]
    probe = FieldCtx(degree_bits, modulus, 1, (), 1, False)  # arithmetic only
    generator_value = None
    for cand in count(2):
        # defining over GF(2): fixed by no proper Frobenius power
        y = cand
        ok = True
        for j in range(1, degree_bits):
            y = probe._sq(y)
            if j in proper and y == cand:
                ok = False
                break
        if not ok:
            continue
        if all(probe._pow(cand, order // p) != 1 for p in factors):
            generator_value = cand
            break

    ctx = FieldCtx(
        degree_bits,
        modulus,
        generator_value,
        sorted(factors.items()),
        cofactor,
        complete,
    )
    _field_cache[key] = ctx
    return ctx


# --------------------------------------------------------------------------
# module-level operations over elements and handles


def add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def inv(a: FieldElem) -> FieldElem:
    return a.inverse()


def power(a: FieldElem, k: int) -> FieldElem:
    return a ** k


def frobenius(e: FieldElem, sub_bits: int) -> FieldElem:
    """e^(2^m), by m repeated squarings; m must divide the field degree."""
    ctx = e.ctx
    if sub_bits < 1 or ctx.degree_bits % sub_bits != 0:
        raise PERepairError(
            "NOT_A_SUBFIELD_DEGREE",
            f"{sub_bits} does not divide {ctx.degree_bits}",
        )
    v = e.v
    for _ in range(sub_bits):
        v = ctx._sq(v)
    return FieldElem(ctx, v)


def trace_to(e: FieldElem, sub: SubfieldHandle) -> FieldElem:
    """Trace of e onto the subfield: e + e^q + ... + e^(q^(N/m - 1)), q = 2^m."""
    ctx = e.ctx
    m = sub.degree_bits
    if ctx.degree_bits == m:
        return e
    return FieldElem(ctx, ctx._apply_rows(ctx._trace_matrix(m), e.v))


def is_in_subfield(e: FieldElem, sub: SubfieldHandle) -> bool:
    """Frobenius fixed-point membership test."""
    return e.ctx._frob(e.v, sub.degree_bits) == e.v


def is_primitive_in_subfield(e: FieldElem, sub: SubfieldHandle,
                             budget: float = 10.0) -> bool:
    """True iff e generates the subfield's multiplicative group."""
    if not e:
        raise ValueError("zero is not in the multiplicative group")
    if not is_in_subfield(e, sub):
        return False
    order = (1 << sub.degree_bits) - 1
    if order == 1:
        return True
    ctx = e.ctx
    if ctx._pow(e.v, order) != 1:
        return False
    return all(
        ctx._pow(e.v, order // p) != 1
        for p, _ in sub.order_factorization(budget)
    )


def degree_over(e: FieldElem, sub: SubfieldHandle) -> int:
    """Degree of the minimal polynomial of e over the subfield."""
    return e.ctx._degree_over(e.v, sub.degree_bits)


def dual_basis(b: BasisOverSubfield) -> BasisOverSubfield:
    """Trace-dual basis: returns d with trace_to(b_i * d_j) = delta_ij.

    Forms the Gram matrix T_ij = Tr(b_i b_j) (entries in the subfield), solves
    T X = I by Gaussian elimination with first-nonzero pivoting, and sets
    d_i = sum_j X_ij b_j.
    """
    sub = b.subfield
    ctx = sub.ctx
    n = len(b.vectors)
    if n * sub.degree_bits != ctx.degree_bits:
        raise PERepairError(
            "SINGULAR_GRAM",
            f"{n} vectors cannot form a basis over GF(2^{sub.degree_bits})",
        )
    gram = []
    for bi in b.vectors:
        row = []
        for bj in b.vectors:
            t = trace_to(bi * bj, sub)
            row.append(t.v)
        gram.append(row)
    x = _invert_matrix(ctx, gram)
    duals = []
    for i in range(n):
        acc = 0
        for j in range(n):
            acc ^= ctx._mul(x[i][j], b.vectors[j].v)
        duals.append(FieldElem(ctx, acc))
    return BasisOverSubfield(sub, duals, validate=False)


def _invert_matrix(ctx: FieldCtx, rows):
    """Invert a square matrix of raw field values by Gauss-Jordan."""
    n = len(rows)
    aug = [list(rows[i]) + [1 if j == i else 0 for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            raise PERepairError("SINGULAR_GRAM", "matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_piv = ctx._inv(aug[col][col])
        aug[col] = [ctx._mul(inv_piv, val) for val in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [
                    val ^ ctx._mul(factor, aug[col][j])
                    for j, val in enumerate(aug[r])
                ]
    return [row[n:] for row in aug]
