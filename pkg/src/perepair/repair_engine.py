"""Partial-exclusion repair: trace queries, repair subspaces, reconstruction.

The engine recovers one erased RS symbol without touching the failed node's
exclusion group.  Every helper is sent multipliers, returns subfield traces
of (multiplier * stored symbol), and the decoder reassembles the erased
symbol through a trace-dual basis.  Bandwidth is counted in exact bits:
a GF(2^m) response is m bits, and at the canonical locality the total equals
the cut-set bound.

The two schemes share their skeleton and differ in the query plan:

* Construction 1 (locality d, shift count s = d - k + 1): the helper prefix
  R of groups defines a residue subfield GF(q^{u-bar}); each helper answers
  one query per basis element of a repair subspace S with
  dim_{GF(q^{u-bar})} S = u/u-bar.
* Construction 2: all survivors outside the failed group help, one query
  each, responses in GF(q^{u_i}).
"""

from __future__ import annotations

from .errors import PERepairError
from ._util import canonical_json
from .field_tower import BasisOverSubfield, dual_basis, trace_to
from .rs_codes import annihilator, dual_multipliers, poly_eval

__all__ = [
    "RepairSubspace",
    "RepairQuery",
    "RepairTranscript",
    "cutset_bits",
    "relative_exponent",
    "lemma1_subspace",
    "verify_span",
    "select_helpers_c1",
    "repair_c1",
    "repair_c2",
]


class RepairSubspace:
    """Verified repair subspace over a residue subfield.

    basis spans S over ``subfield``; ``beta`` is the ambient generator used
    to build it and ``exponent`` the point exponent e of the span condition
    S + a^e S + ... + a^{e(s-1)} S = E.
    """

    __slots__ = ("subfield", "basis", "beta", "exponent")

    def __init__(self, subfield, basis, beta, exponent):
        self.subfield = subfield
        self.basis = basis
        self.beta = beta
        self.exponent = exponent


class RepairQuery:
    __slots__ = ("helper", "multiplier", "response_subfield")

    def __init__(self, helper, multiplier, response_subfield):
        self.helper = helper
        self.multiplier = multiplier
        self.response_subfield = response_subfield


class RepairTranscript:
    """Everything one repair did: who helped, what they were asked, what
    they answered, and the exact bit accounting."""

    __slots__ = ("failed", "helpers", "queries", "responses",
                 "per_helper_bits", "bits_transmitted", "cutset_bits",
                 "recovered", "verified")

    def __init__(self, failed, helpers, queries, responses, per_helper_bits,
                 bits_transmitted, cutset, recovered):
        self.failed = failed
        self.helpers = list(helpers)
        self.queries = queries
        self.responses = responses
        self.per_helper_bits = list(per_helper_bits)
        self.bits_transmitted = bits_transmitted
        self.cutset_bits = cutset
        self.recovered = recovered
        self.verified = None  # set by callers holding ground truth

    def to_payload(self) -> dict:
        return {
            "failed": self.failed,
            "helpers": self.helpers,
            "per_helper_bits": self.per_helper_bits,
            "bits_transmitted": self.bits_transmitted,
            "cutset_bits": self.cutset_bits,
            "recovered": self.recovered.hex(),
            "verified": self.verified,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_payload()) + "\n"


def cutset_bits(d_helpers: int, k: int, L_qsyms: int, base_bits: int) -> int:
    """ceil(d*L/(d-k+1)) base-field symbols, in bits."""
    if d_helpers < k:
        raise PERepairError(
            "TOO_FEW_HELPERS", f"d={d_helpers} cannot reach dimension k={k}"
        )
    num = d_helpers * L_qsyms
    den = d_helpers - k + 1
    return -(-num // den) * base_bits


def relative_exponent(plan, node: int) -> int:
    """Exponent e with (first group point)^e == the node's point.

    Point exponents are stored relative to the group subfield's canonical
    generator, so e is their ratio mod q^{p_i}-1 (the first exponent is a
    unit because the point is primitive).
    """
    gi, off = plan.locate(node)
    g = plan.groups[gi]
    order = (1 << (plan.base_bits * g.prime)) - 1
    return g.point_exponents[off] * pow(g.point_exponents[0], -1, order) % order


def lemma1_subspace(plan, group: int, e: int = 1, helper_groups=None) -> RepairSubspace:
    """Repair subspace for one point of a Construction-1 group, over
    GF(q^{u-bar}).

    The subspace belongs to the point alpha_1^e (alpha_1 = the group's
    first point): its base layer is the s-shift set
    {beta^mu * (alpha_1^e)^(mu + sigma*s)} plus the closing sum element,
    lifted from GF(q^{u_i}) down to the residue field of the helper groups
    by a power basis of the intermediate subfield.  Each node of the group
    needs its own exponent (see relative_exponent); a single subspace does
    not shift-span for the other points of the group.  Independence and the
    span condition for alpha_1^e are verified; if the ambient generator
    fails as beta, small powers of it are tried in order.
    """
    if plan.construction != 1:
        raise ValueError("repair subspaces of this shape exist for construction 1")
    g = plan.groups[group]
    if helper_groups is None:
        helper_groups = tuple(j for j in range(len(plan.groups)) if j != group)
    helper_groups = tuple(helper_groups)
    if group in helper_groups or not helper_groups:
        raise ValueError("helper groups must be nonempty and exclude the failed group")
    cache_key = ("subspace", group, e, helper_groups)
    cached = plan._cache.get(cache_key)
    if cached is not None:
        return cached

    ctx = plan.ctx
    a = plan.base_bits
    q = 1 << a
    s = plan.s
    p_i = g.prime
    order_i = q ** p_i - 1
    if not 1 <= e < order_i or e % ((order_i) // (q - 1)) == 0:
        raise PERepairError(
            "BAD_EXPONENT",
            f"e={e} must lie in [1, {order_i}) off multiples of {(order_i) // (q - 1)}",
        )

    u_i = plan.u_list[group]
    ubar = 1
    for j in helper_groups:
        ubar *= plan.groups[j].prime
    if u_i % ubar:
        raise ValueError("helper groups must exclude the repaired group's prime")
    sub = ctx.subfield(a * ubar)
    alpha_e = g.points[0] ** e

    lift = [ctx.one]
    if u_i != ubar:
        delta = ctx.subfield(a * u_i).canonical_generator
        for _ in range(u_i // ubar - 1):
            lift.append(lift[-1] * delta)

    generator = ctx.generator
    last_error = None
    for beta_exp in range(1, 33):
        beta = generator ** beta_exp
        base = []
        beta_mu = ctx.one
        for mu in range(s):
            point_pow = alpha_e ** mu
            step = alpha_e ** s
            for _ in range((p_i - 1) // s):
                base.append(beta_mu * point_pow)
                point_pow = point_pow * step
            beta_mu = beta_mu * beta
        closing = ctx.zero
        beta_t = ctx.one
        top = alpha_e ** (p_i - 1)
        for _ in range(s):
            closing = closing + beta_t * top
            beta_t = beta_t * beta
        base.append(closing)
        vectors = [b * f for b in base for f in lift]
        try:
            basis = BasisOverSubfield(sub, vectors)
        except PERepairError as exc:
            last_error = exc
            continue
        subspace = RepairSubspace(sub, basis, beta, e)
        if verify_span(subspace, g.points[0], s):
            plan._cache[cache_key] = subspace
            return subspace
        last_error = None
    raise PERepairError(
        "SPAN_FAILURE",
        f"no workable beta among g^1..g^32 for group {g.index}"
        + (f" (last: {last_error})" if last_error else ""),
    )


def verify_span(S: RepairSubspace, alpha, s: int) -> bool:
    """True iff S + a^e S + ... + a^{e(s-1)} S is the whole field,
    by a GF(2)-rank computation."""
    from .field_tower import gf2_rank

    ctx = alpha.ctx
    sigma = S.subfield.gf2_basis()
    alpha_e = alpha ** S.exponent
    rows = []
    shift = ctx.one
    for _ in range(s):
        for b in S.basis:
            bw = (shift * b).v
            for sg in sigma:
                rows.append(ctx._mul(bw, sg))
        shift = shift * alpha_e
    return gf2_rank(rows) == ctx.degree_bits


def _helper_prefix(plan, excluded_group: int, d: int):
    """Minimal prefix R of groups (excluded group skipped) with enough
    nodes, then round-robin across R until d helpers are picked."""
    order = [j for j in range(len(plan.groups)) if j != excluded_group]
    R = []
    capacity = 0
    for j in order:
        R.append(j)
        capacity += plan.groups[j].t
        if capacity >= d:
            break
    queues = {j: list(plan.group_nodes(j)) for j in R}
    helpers = []
    z = 0
    while len(helpers) < d:
        j = R[z % len(R)]
        z += 1
        if queues[j]:
            helpers.append(queues[j].pop(0))
    return helpers, tuple(R)


def select_helpers_c1(plan, failed: int, d: int):
    """d helper nodes for a Construction-1 repair, never inside the failed
    node's exclusion group."""
    gi, _ = plan.locate(failed)
    t_i = plan.groups[gi].t
    if not plan.k <= d <= plan.n - t_i:
        raise PERepairError(
            "LOCALITY_OUT_OF_RANGE",
            f"d={d} outside [{plan.k}, {plan.n - t_i}]",
        )
    return _helper_prefix(plan, gi, d)[0]


def _dual_mults(plan):
    v = plan._cache.get("dual_multipliers")
    if v is None:
        v = dual_multipliers(plan.eval_set)
        plan._cache["dual_multipliers"] = v
    return v


def _check_pairing(plan, codeword):
    if codeword.plan_digest != plan.digest:
        raise PERepairError(
            "PLAN_MISMATCH", "codeword was not produced under this plan"
        )
    if len(codeword.symbols) != plan.n:
        raise PERepairError("PLAN_MISMATCH", "codeword length disagrees with plan")


def repair_c1(plan, codeword, failed: int, d: int | None = None) -> RepairTranscript:
    """Construction-1 repair of one node at locality d (default k+s-1).

    Localities above the canonical k+s-1 still repair correctly (the helper
    prefix grows and responses shrink proportionally) but transmit more than
    the cut-set bound; below it the shifted parity polynomials would exceed
    the dual degree bound, so such d are rejected.
    """
    if plan.construction != 1:
        raise ValueError("plan is not a Construction-1 plan")
    _check_pairing(plan, codeword)
    gi, _ = plan.locate(failed)
    t_i = plan.groups[gi].t
    if d is None:
        d = plan.d
    if not plan.d <= d <= plan.n - t_i:
        raise PERepairError(
            "LOCALITY_OUT_OF_RANGE",
            f"d={d} outside [{plan.d}, {plan.n - t_i}] for this scheme",
        )
    ctx = plan.ctx
    s = plan.s
    key = ("repair1", failed, d)
    prep = plan._cache.get(key)
    if prep is None:
        helpers, R = _helper_prefix(plan, gi, d)
        S = lemma1_subspace(plan, gi, relative_exponent(plan, failed),
                            helper_groups=R)
        sub = S.subfield
        helper_set = set(helpers)
        silenced = [
            plan.eval_set.points[i]
            for i in range(plan.n)
            if i not in helper_set and i != failed
        ]
        h = annihilator(silenced, ctx)
        v = _dual_mults(plan)
        mults = []
        helper_pows = []
        for idx in helpers:
            alpha_h = plan.eval_set.points[idx]
            base_mult = poly_eval(h, alpha_h) * v.v[idx]
            mults.append([e_m * base_mult for e_m in S.basis])
            pows = [ctx.one]
            for _ in range(s - 1):
                pows.append(pows[-1] * alpha_h)
            helper_pows.append(pows)
        # reconstruction basis B_{m,w} = e_m * alpha_f^w * h(alpha_f) * v_f
        alpha_f = plan.eval_set.points[failed]
        f_mult = poly_eval(h, alpha_f) * v.v[failed]
        B = []
        for e_m in S.basis:
            acc = e_m * f_mult
            for _ in range(s):
                B.append(acc)
                acc = acc * alpha_f
        B_basis = BasisOverSubfield(sub, B)  # full-rank assertion
        duals = dual_basis(B_basis)
        prep = (helpers, sub, mults, helper_pows, duals.vectors, len(S.basis))
        plan._cache[key] = prep
    helpers, sub, mults, helper_pows, dual_vecs, dim_s = prep

    queries = []
    responses = []
    response_bits = sub.degree_bits
    for hi, idx in enumerate(helpers):
        for mult in mults[hi]:
            queries.append(RepairQuery(idx, mult, sub))
            responses.append(trace_to(mult * codeword.symbols[idx], sub))
    per_helper_bits = [dim_s * response_bits] * len(helpers)
    bits = sum(per_helper_bits)

    recovered = ctx.zero
    for m in range(dim_s):
        for w in range(s):
            lhs = ctx.zero
            for hi in range(len(helpers)):
                lhs = lhs + helper_pows[hi][w] * responses[hi * dim_s + m]
            recovered = recovered + lhs * dual_vecs[m * s + w]

    cutset = cutset_bits(d, plan.k, plan.L, plan.base_bits)
    assert bits == d * plan.u * plan.base_bits
    return RepairTranscript(
        failed, helpers, queries, responses, per_helper_bits, bits, cutset, recovered
    )


def repair_c2(plan, codeword, failed: int) -> RepairTranscript:
    """Construction-2 repair: one trace from every survivor outside the
    failed node's group."""
    if plan.construction != 2:
        raise ValueError("plan is not a Construction-2 plan")
    _check_pairing(plan, codeword)
    gi, _ = plan.locate(failed)
    g = plan.groups[gi]
    ctx = plan.ctx
    key = ("repair2", failed)
    prep = plan._cache.get(key)
    if prep is None:
        sub = ctx.subfield(plan.base_bits * plan.u_list[gi])
        group_nodes = set(plan.group_nodes(gi))
        helpers = [i for i in range(plan.n) if i not in group_nodes]
        silenced = [
            plan.eval_set.points[i] for i in group_nodes if i != failed
        ]
        h = annihilator(silenced, ctx)
        v = _dual_mults(plan)
        mults = []
        helper_pows = []
        for idx in helpers:
            alpha_h = plan.eval_set.points[idx]
            mults.append(poly_eval(h, alpha_h) * v.v[idx])
            pows = [ctx.one]
            for _ in range(g.prime - 1):
                pows.append(pows[-1] * alpha_h)
            helper_pows.append(pows)
        alpha_f = plan.eval_set.points[failed]
        f_mult = poly_eval(h, alpha_f) * v.v[failed]
        B = []
        acc = f_mult
        for _ in range(g.prime):
            B.append(acc)
            acc = acc * alpha_f
        B_basis = BasisOverSubfield(sub, B)  # full-rank assertion
        duals = dual_basis(B_basis)
        prep = (helpers, sub, mults, helper_pows, duals.vectors)
        plan._cache[key] = prep
    helpers, sub, mults, helper_pows, dual_vecs = prep

    queries = []
    responses = []
    for hi, idx in enumerate(helpers):
        queries.append(RepairQuery(idx, mults[hi], sub))
        responses.append(trace_to(mults[hi] * codeword.symbols[idx], sub))
    per_helper_bits = [sub.degree_bits] * len(helpers)
    bits = sum(per_helper_bits)

    recovered = ctx.zero
    for w in range(g.prime):
        lhs = ctx.zero
        for hi in range(len(helpers)):
            lhs = lhs + helper_pows[hi][w] * responses[hi]
        recovered = recovered + lhs * dual_vecs[w]

    d = plan.n - g.t
    cutset = cutset_bits(d, plan.k, plan.L, plan.base_bits)
    assert bits == cutset
    return RepairTranscript(
        failed, helpers, queries, responses, per_helper_bits, bits, cutset, recovered
    )
