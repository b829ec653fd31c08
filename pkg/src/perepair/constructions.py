"""Plan builders for the two partial-exclusion RS constructions.

Both constructions partition the n code coordinates into l exclusion groups;
group i holds t_i evaluation points, all primitive in the subfield
GF(q^{p_i}) of the symbol field E (q = 2^base_bits, p_i distinct primes).
When a node of group i fails, no node of group i helps with the repair.

* Construction 1 fixes a shift count s = d - k + 1 and requires
  p_i = 1 (mod s); the symbol field is GF(q^{u s}) with u = prod p_i, and
  every single-node repair contacts exactly d = k + s - 1 helpers.
* Construction 2 fixes the redundancy r = n - k and sizes the groups as
  t_i = r - p_i + 1; the symbol field is GF(q^u) and a failure in group i is
  repaired by all n - t_i survivors outside the group.

A plan bundles the resolved parameters, the symbol field, the evaluation
set, and a content digest; it is immutable and safe to share.
"""

from __future__ import annotations

import warnings

from .errors import PERepairError
from ._util import atomic_write_text, canonical_json, digest_of
from .field_tower import (
    factor_integer,
    is_primitive_in_subfield,
    make_field,
    smallest_irreducible,
)
from .rs_codes import EvaluationSet

__all__ = [
    "ExclusionGroup",
    "Construction1Plan",
    "Construction2Plan",
    "C1Parameters",
    "find_primes_c1",
    "build_plan_c1",
    "build_plan_c2",
    "c1_parameters",
    "subpacketization_of",
    "save_plan",
    "load_plan",
]


class ExclusionGroup:
    """One exclusion set: a prime, its flexibility, and t_i points that are
    primitive in the degree-(base_bits * p) subfield of E."""

    __slots__ = ("index", "prime", "t", "points", "point_exponents")

    def __init__(self, index, prime, t, points, point_exponents):
        self.index = index  # 1-based, matching group numbering in reports
        self.prime = prime
        self.t = t
        self.points = tuple(points)
        self.point_exponents = tuple(point_exponents)


def _euler_phi(x: int, budget: float = 20.0) -> int:
    phi = 1
    for p, e in factor_integer(x, budget):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def find_primes_c1(s: int, l: int, min_t, base_bits: int = 1):
    """The l smallest distinct primes p = 1 (mod s) whose subfields hold
    enough primitive elements: phi(q^p - 1) >= min_t[i], matched ascending."""
    if s < 1 or l < 2:
        raise ValueError("need s >= 1 and l >= 2")
    need = sorted(min_t)
    if len(need) != l:
        raise ValueError("min_t must have one entry per group")
    q = 1 << base_bits
    out = []
    cand = 1
    while len(out) < l:
        cand += 1
        if any(cand % p == 0 for p in out):
            continue
        if not _is_prime_small(cand):
            continue
        if cand % s != 1 % s:
            continue
        if _euler_phi(q ** cand - 1) < need[len(out)]:
            continue
        out.append(cand)
    return tuple(out)


def _is_prime_small(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class _PlanBase:
    """Shared plumbing: node addressing, evaluation set, digest."""

    def _finish(self, groups):
        self.groups = tuple(groups)
        self.n = sum(g.t for g in groups)
        self.t_max = max(g.t for g in groups)
        points = []
        node_group = []
        for gi, g in enumerate(groups):
            points.extend(g.points)
            node_group.extend([gi] * g.t)
        self.eval_set = EvaluationSet(self.ctx, points)
        self._node_group = tuple(node_group)
        self.digest = digest_of(self.payload())
        self._cache = {}

    def locate(self, node: int):
        """Global node index -> (group position 0-based, offset in group)."""
        if not 0 <= node < self.n:
            raise ValueError(f"node index {node} out of range")
        gi = self._node_group[node]
        offset = node - sum(g.t for g in self.groups[:gi])
        return gi, offset

    def group_nodes(self, gi: int):
        start = sum(g.t for g in self.groups[:gi])
        return range(start, start + self.groups[gi].t)


class Construction1Plan(_PlanBase):
    construction = 1

    def __init__(self, base_bits, s, k, groups_spec, ctx):
        self.base_bits = base_bits
        self.s = s
        self.k = k
        self.d = k + s - 1
        self.ctx = ctx
        self.primes = tuple(p for p, _, _ in groups_spec)
        self.u = 1
        for p in self.primes:
            self.u *= p
        self.u_list = tuple(self.u // p for p in self.primes)
        self.L = self.u * s  # sub-packetization in q-symbols
        groups = [
            ExclusionGroup(i + 1, p, t, pts, exps)
            for i, (p, t, (pts, exps)) in enumerate(groups_spec)
        ]
        self._finish(groups)

    def payload(self):
        return {
            "construction": 1,
            "base_bits": self.base_bits,
            "s": self.s,
            "k": self.k,
            "primes": list(self.primes),
            "t": [g.t for g in self.groups],
            "point_exponents": [list(g.point_exponents) for g in self.groups],
            "modulus_hex": self.ctx.modulus_hex,
        }


class Construction2Plan(_PlanBase):
    construction = 2

    def __init__(self, base_bits, r, groups_spec, ctx):
        self.base_bits = base_bits
        self.r = r
        self.ctx = ctx
        self.primes = tuple(p for p, _, _ in groups_spec)
        self.u = 1
        for p in self.primes:
            self.u *= p
        self.u_list = tuple(self.u // p for p in self.primes)
        self.L = self.u
        groups = [
            ExclusionGroup(i + 1, p, t, pts, exps)
            for i, (p, t, (pts, exps)) in enumerate(groups_spec)
        ]
        self._finish(groups)
        self.k = self.n - r

    def payload(self):
        return {
            "construction": 2,
            "base_bits": self.base_bits,
            "r": self.r,
            "primes": list(self.primes),
            "t": [g.t for g in self.groups],
            "point_exponents": [list(g.point_exponents) for g in self.groups],
            "modulus_hex": self.ctx.modulus_hex,
        }


def _resolve_points(ctx, base_bits, prime, t, exponents):
    """Points of one group: powers of the canonical generator of the
    degree-(base_bits*prime) subfield, validated primitive and distinct."""
    sub = ctx.subfield(base_bits * prime)
    order = (1 << (base_bits * prime)) - 1
    if exponents is None:
        exponents = []
        e = 0
        while len(exponents) < t:
            e += 1
            if _gcd(e, order) == 1:
                exponents.append(e)
    exponents = [int(e) for e in exponents]
    if len(exponents) != t:
        raise ValueError(f"group of size {t} got {len(exponents)} exponents")
    gamma = sub.canonical_generator
    points = []
    for e in exponents:
        if not 1 <= e < order or _gcd(e, order) != 1:
            raise PERepairError(
                "CONSTRAINT_VIOLATION",
                f"exponent {e} does not give a primitive point of GF(2^{base_bits * prime})",
            )
        points.append(gamma ** e)
    if len({p.v for p in points}) != t:
        raise PERepairError("DUPLICATE_INDEX", "repeated evaluation point in group")
    for p in points:
        if not is_primitive_in_subfield(p, sub):
            raise PERepairError(
                "CONSTRAINT_VIOLATION",
                "evaluation point failed the subfield primitivity check",
            )
    return points, exponents


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _check_point_degrees(plan):
    """Every point of group i must have degree p_i over GF(q^{u_i}): the
    symbol field is generated over that subfield by any single point."""
    ctx = plan.ctx
    for g, u_i in zip(plan.groups, plan.u_list):
        m = plan.base_bits * u_i
        for p in g.points:
            if ctx._degree_over(p.v, m) != g.prime:
                raise PERepairError(
                    "CONSTRAINT_VIOLATION",
                    f"point {p.hex()} is not defining over GF(2^{m})",
                )


def build_plan_c1(base_bits, t_list, *, s=None, k=None, d=None,
                  primes=None, point_exponents=None, modulus=None,
                  factor_budget=6.0):
    """Resolve and validate a Construction-1 plan.

    Give s (then k defaults to its maximum n - t - s + 1) or give (k, d)
    to derive s = d - k + 1; groups are normalized to ascending flexibility.
    Evaluation points default to the smallest exponents of each canonical
    subfield generator that are coprime to the subfield's group order.
    """
    if s is None:
        if k is None or d is None:
            raise ValueError("give s, or both k and d")
        s = d - k + 1
        if s < 1:
            raise ValueError("need d >= k")
    elif d is not None and k is not None and d != k + s - 1:
        raise ValueError(f"inconsistent parameters: d={d} but k+s-1={k + s - 1}")
    if s == 1:
        warnings.warn(
            "s=1 degenerates to one-shot interpolation repair; "
            "bandwidth equals the naive bound",
            stacklevel=2,
        )

    t_list = list(t_list)
    if len(t_list) < 2 or min(t_list) < 1:
        raise ValueError("need at least two groups with positive flexibility")
    if primes is None:
        order = sorted(range(len(t_list)), key=lambda i: t_list[i])
        primes = find_primes_c1(s, len(t_list), [t_list[i] for i in order], base_bits)
        pairs = [(primes[rank], t_list[i]) for rank, i in enumerate(order)]
        if point_exponents is not None:
            raise ValueError("explicit exponents require explicit primes")
    else:
        primes = [int(p) for p in primes]
        if len(primes) != len(t_list):
            raise ValueError("one prime per group")
        pairs = list(zip(primes, t_list))
    # normalize to ascending flexibility, tie-broken by prime
    exps = list(point_exponents) if point_exponents is not None else [None] * len(pairs)
    triples = sorted(zip(pairs, exps), key=lambda z: (z[0][1], z[0][0]))
    pairs = [pt for pt, _ in triples]
    exps = [e for _, e in triples]

    q = 1 << base_bits
    seen = set()
    for p, t in pairs:
        if not _is_prime_small(p) or p in seen:
            raise PERepairError("BAD_PRIME", f"{p} is not a fresh prime")
        seen.add(p)
        if p % s != 1 % s:
            raise PERepairError("BAD_PRIME", f"{p} != 1 mod {s}")
        if t > _euler_phi(q ** p - 1, factor_budget):
            raise PERepairError(
                "INSUFFICIENT_PRIMITIVES",
                f"group of {t} points exceeds phi(q^{p}-1) primitive elements",
            )

    n = sum(t for _, t in pairs)
    t_max = max(t for _, t in pairs)
    if k is None:
        k = n - t_max - s + 1
    if k < 1 or k > n - t_max:
        raise PERepairError(
            "RATE_VIOLATION", f"k={k} outside [1, n - t] = [1, {n - t_max}]"
        )
    if k + s - 1 > n - t_max:
        raise PERepairError(
            "RATE_VIOLATION",
            f"locality d = k+s-1 = {k + s - 1} exceeds n - t = {n - t_max}",
        )

    u = 1
    for p, _ in pairs:
        u *= p
    degree = base_bits * u * s
    if modulus is None:
        modulus = smallest_irreducible(degree)
    ctx = make_field(degree, modulus, factor_budget=factor_budget)

    groups_spec = [
        (p, t, _resolve_points(ctx, base_bits, p, t, e))
        for (p, t), e in zip(pairs, exps)
    ]
    plan = Construction1Plan(base_bits, s, k, groups_spec, ctx)
    _check_point_degrees(plan)
    assert plan.L * base_bits == ctx.degree_bits
    return plan


def build_plan_c2(base_bits, r, primes, *, point_exponents=None, modulus=None,
                  factor_budget=6.0):
    """Resolve and validate a Construction-2 plan: t_i = r - p_i + 1."""
    primes = [int(p) for p in primes]
    if len(primes) < 2:
        raise ValueError("need at least two groups")
    q = 1 << base_bits
    seen = set()
    for p in primes:
        if not _is_prime_small(p) or p in seen:
            raise PERepairError(
                "CONSTRAINT_VIOLATION", f"{p} is not a fresh prime"
            )
        seen.add(p)
        t = r - p + 1
        if t < 2:
            raise PERepairError(
                "CONSTRAINT_VIOLATION",
                f"r - p + 1 = {t} < 2 for prime {p}",
            )
        if t > _euler_phi(q ** p - 1, factor_budget):
            raise PERepairError(
                "CONSTRAINT_VIOLATION",
                f"group needs {t} primitive points, more than phi(q^{p}-1)",
            )

    u = 1
    for p in primes:
        u *= p
    degree = base_bits * u
    if modulus is None:
        modulus = smallest_irreducible(degree)
    ctx = make_field(degree, modulus, factor_budget=factor_budget)

    exps = list(point_exponents) if point_exponents is not None else [None] * len(primes)
    if len(exps) != len(primes):
        raise ValueError("one exponent list per group")
    groups_spec = [
        (p, r - p + 1, _resolve_points(ctx, base_bits, p, r - p + 1, e))
        for p, e in zip(primes, exps)
    ]
    plan = Construction2Plan(base_bits, r, groups_spec, ctx)
    if plan.k < 1:
        raise PERepairError("RATE_VIOLATION", f"k = n - r = {plan.k} < 1")
    for g in plan.groups:
        assert plan.k <= plan.n - g.t  # per-group locality admits k helpers
    _check_point_degrees(plan)
    assert plan.L * base_bits == ctx.degree_bits
    return plan


class C1Parameters:
    """Arithmetic-only view of a Construction-1 parameter set (no field
    build), for sizes where the symbol field is far beyond desk scale."""

    __slots__ = ("base_bits", "s", "k", "d", "n", "t_max", "primes", "u",
                 "L", "repair_bits", "naive_bits")

    def __init__(self, base_bits, s, k, d, n, t_max, primes, u):
        self.base_bits = base_bits
        self.s = s
        self.k = k
        self.d = d
        self.n = n
        self.t_max = t_max
        self.primes = primes
        self.u = u
        self.L = u * s
        self.repair_bits = d * u * base_bits
        self.naive_bits = k * self.L * base_bits


def c1_parameters(base_bits, t_list, *, s, k=None, primes=None) -> C1Parameters:
    """Resolve Construction-1 numerology without building GF(q^{us})."""
    t_list = sorted(t_list)
    if primes is None:
        primes = find_primes_c1(s, len(t_list), t_list, base_bits)
    n = sum(t_list)
    t_max = max(t_list)
    if k is None:
        k = n - t_max - s + 1
    d = k + s - 1
    if k < 1 or d > n - t_max:
        raise PERepairError("RATE_VIOLATION", f"(n,k,d)=({n},{k},{d}) infeasible")
    q = 1 << base_bits
    for p, t in zip(sorted(primes), t_list):
        if p % s != 1 % s:
            raise PERepairError("BAD_PRIME", f"{p} != 1 mod {s}")
        if t > _euler_phi(q ** p - 1):
            raise PERepairError("INSUFFICIENT_PRIMITIVES", f"t={t} at prime {p}")
    u = 1
    for p in primes:
        u *= p
    return C1Parameters(base_bits, s, k, d, n, t_max, tuple(sorted(primes)), u)


def subpacketization_of(plan) -> int:
    """Sub-packetization in q-symbols: s*u (Construction 1) or u."""
    return plan.L


# ------------------------------------------------------------------ file I/O


def save_plan(plan, path) -> None:
    payload = plan.payload()
    payload["digest"] = plan.digest
    atomic_write_text(path, canonical_json(payload) + "\n")


def load_plan(path, factor_budget: float = 6.0):
    """Parse, digest-verify, rebuild, and re-validate a plan file."""
    import json

    try:
        raw = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise PERepairError("CORRUPT_FILE", f"cannot read {path}: {exc}")
    try:
        payload = json.loads(raw)
        stored = payload.pop("digest")
        construction = payload["construction"]
        base_bits = payload["base_bits"]
        primes = payload["primes"]
        t = payload["t"]
        exps = payload["point_exponents"]
        modulus = int(payload["modulus_hex"], 16)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise PERepairError("CORRUPT_FILE", f"{path}: {exc}")
    if digest_of(payload) != stored:
        raise PERepairError("DIGEST_MISMATCH", f"{path}: plan digest mismatch")
    if construction == 1:
        plan = build_plan_c1(
            base_bits,
            t,
            s=payload["s"],
            k=payload["k"],
            primes=primes,
            point_exponents=exps,
            modulus=modulus,
            factor_budget=factor_budget,
        )
    elif construction == 2:
        plan = build_plan_c2(
            base_bits,
            payload["r"],
            primes,
            point_exponents=exps,
            modulus=modulus,
            factor_budget=factor_budget,
        )
        if [g.t for g in plan.groups] != list(t):
            raise PERepairError("CORRUPT_FILE", f"{path}: stored t disagrees with r")
    else:
        raise PERepairError("CORRUPT_FILE", f"{path}: unknown construction {construction}")
    if plan.digest != stored:
        raise PERepairError("DIGEST_MISMATCH", f"{path}: rebuilt plan differs")
    return plan
