"""Reed-Solomon codes over an explicit evaluation set.

A codeword is the evaluation of a degree-bounded message polynomial at n
distinct points of the symbol field.  The dual code of RS(n, k, A) is the
generalized RS code with column multipliers v_i = prod_{j != i}
(alpha_i - alpha_j)^{-1}; ``parity_check`` evaluates those dual constraints
and ``naive_decode`` (Lagrange interpolation through any k coordinates) is
the module's correctness oracle for everything downstream.

Polynomials are coefficient lists of FieldElem in ascending degree order;
degrees stay tiny (<= n), so evaluation is plain Horner.
"""

from __future__ import annotations

from .errors import PERepairError
from ._util import atomic_write_text, digest_of
from .field_tower import FieldCtx, FieldElem

__all__ = [
    "EvaluationSet",
    "MessagePoly",
    "Codeword",
    "DualMultipliers",
    "encode",
    "dual_multipliers",
    "annihilator",
    "poly_eval",
    "parity_check",
    "naive_decode",
    "save_codeword",
    "load_codeword",
]


class EvaluationSet:
    """Ordered, pairwise distinct evaluation points in one field."""

    __slots__ = ("ctx", "points")

    def __init__(self, ctx: FieldCtx, points):
        self.ctx = ctx
        self.points = tuple(points)
        if not self.points:
            raise ValueError("evaluation set must contain at least one point")
        seen = set()
        for p in self.points:
            if p.v in seen:
                raise PERepairError(
                    "DUPLICATE_INDEX", f"repeated evaluation point {p.hex()}"
                )
            seen.add(p.v)

    @property
    def n(self) -> int:
        return len(self.points)

    def digest(self) -> str:
        return digest_of(
            {
                "degree_bits": self.ctx.degree_bits,
                "modulus": self.ctx.modulus_hex,
                "points": [p.hex() for p in self.points],
            }
        )


class MessagePoly:
    """Message polynomial; the coefficient count is the code dimension k."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        self.coefficients = tuple(coefficients)
        if not self.coefficients:
            raise ValueError("message polynomial needs at least one coefficient")

    @property
    def k(self) -> int:
        return len(self.coefficients)

    def evaluate(self, x: FieldElem) -> FieldElem:
        return poly_eval(self.coefficients, x)


class Codeword:
    __slots__ = ("symbols", "plan_digest")

    def __init__(self, symbols, plan_digest: str):
        self.symbols = tuple(symbols)
        self.plan_digest = plan_digest

    @property
    def n(self) -> int:
        return len(self.symbols)


class DualMultipliers:
    """GRS column multipliers of the dual code, bound to their point set."""

    __slots__ = ("eval_set", "v")

    def __init__(self, eval_set: EvaluationSet, v):
        self.eval_set = eval_set
        self.v = tuple(v)


def poly_eval(coefficients, x: FieldElem) -> FieldElem:
    """Horner evaluation of an ascending coefficient list."""
    acc = coefficients[-1]
    for c in reversed(coefficients[:-1]):
        acc = acc * x + c
    return acc


def encode(msg: MessagePoly, A: EvaluationSet, plan_digest: str | None = None) -> Codeword:
    """Evaluate the message polynomial at every point of A.

    The codeword is stamped with the evaluation set's digest unless the
    caller provides the digest of a richer plan artifact.
    """
    if msg.k > A.n:
        raise PERepairError(
            "DIMENSION_EXCEEDS_LENGTH", f"k={msg.k} exceeds n={A.n}"
        )
    symbols = [msg.evaluate(p) for p in A.points]
    return Codeword(symbols, plan_digest or A.digest())


def dual_multipliers(A: EvaluationSet) -> DualMultipliers:
    """v_i = prod over j != i of (alpha_i - alpha_j)^{-1}."""
    out = []
    for i, ai in enumerate(A.points):
        prod = A.ctx.one
        for j, aj in enumerate(A.points):
            if j != i:
                prod = prod * (ai - aj)
        out.append(prod.inverse())
    return DualMultipliers(A, out)


def annihilator(points, ctx: FieldCtx | None = None) -> list:
    """Monic polynomial prod (x - p) over the given points, ascending
    coefficients; the empty product is the constant 1 (ctx tells an empty
    product which field it lives in)."""
    if not points:
        if ctx is None:
            raise ValueError("empty annihilator needs an explicit field")
        return [ctx.one]
    ctx = points[0].ctx
    coeffs = [ctx.one]
    for p in points:
        # multiply by (x + p): shift up and add p * current
        coeffs = [ctx.zero] + coeffs
        for i in range(len(coeffs) - 1):
            coeffs[i] = coeffs[i] + p * coeffs[i + 1]
    return coeffs


def parity_check(c: Codeword, g, v: DualMultipliers, k: int | None = None) -> FieldElem:
    """Dual-code syndrome sum_i v_i * g(alpha_i) * c_i.

    Zero for every valid codeword when deg(g) <= n - k - 1; pass k to have
    that precondition enforced.
    """
    A = v.eval_set
    if len(c.symbols) != A.n:
        raise PERepairError(
            "PLAN_MISMATCH", "codeword length disagrees with evaluation set"
        )
    if k is not None and len(g) - 1 > A.n - k - 1:
        raise PERepairError(
            "DEGREE_TOO_HIGH",
            f"parity polynomial degree {len(g) - 1} > {A.n - k - 1}",
        )
    acc = A.ctx.zero
    for vi, ai, ci in zip(v.v, A.points, c.symbols):
        acc = acc + vi * poly_eval(g, ai) * ci
    return acc


def naive_decode(symbols_at, A: EvaluationSet) -> MessagePoly:
    """Lagrange interpolation through k (index, symbol) pairs.

    Returns the unique polynomial of degree < k agreeing with the given
    coordinates of the evaluation set.
    """
    indices = [i for i, _ in symbols_at]
    if len(set(indices)) != len(indices):
        raise PERepairError("DUPLICATE_INDEX", "repeated coordinate index")
    for i in indices:
        if not 0 <= i < A.n:
            raise ValueError(f"coordinate index {i} out of range")
    ctx = A.ctx
    pts = [A.points[i] for i in indices]
    ys = [y for _, y in symbols_at]
    k = len(pts)
    # master polynomial P = prod (x - p); each Lagrange numerator is P/(x - p)
    master = annihilator(pts)
    coeffs = [ctx.zero] * k
    for p, y in zip(pts, ys):
        # synthetic division of master by (x + p), ascending coefficients
        quot = [ctx.zero] * k
        quot[k - 1] = master[k]
        for d in range(k - 2, -1, -1):
            quot[d] = master[d + 1] + p * quot[d + 1]
        scale = y * poly_eval(quot, p).inverse()
        for d in range(k):
            coeffs[d] = coeffs[d] + scale * quot[d]
    return MessagePoly(coeffs)


# ------------------------------------------------------------------ file I/O


def save_codeword(c: Codeword, ctx: FieldCtx, path) -> None:
    lines = [
        f"plan_digest={c.plan_digest}",
        f"n={c.n}",
        f"degree_bits={ctx.degree_bits}",
    ]
    lines.extend(s.hex() for s in c.symbols)
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_codeword(path, ctx: FieldCtx) -> Codeword:
    try:
        raw = open(path, "r", encoding="ascii").read()
    except OSError as exc:
        raise PERepairError("CORRUPT_FILE", f"cannot read {path}: {exc}")
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    try:
        digest = lines[0].removeprefix("plan_digest=")
        n = int(lines[1].removeprefix("n="))
        bits = int(lines[2].removeprefix("degree_bits="))
        if (
            not lines[0].startswith("plan_digest=")
            or not lines[1].startswith("n=")
            or not lines[2].startswith("degree_bits=")
            or len(lines) != 3 + n
        ):
            raise ValueError("bad header")
        if bits != ctx.degree_bits:
            raise ValueError(f"field degree {bits} != {ctx.degree_bits}")
        symbols = [ctx.from_hex(ln.strip()) for ln in lines[3:]]
    except (IndexError, ValueError) as exc:
        raise PERepairError("CORRUPT_FILE", f"{path}: {exc}")
    return Codeword(symbols, digest)
