import random

import pytest

from perepair.constructions import build_plan_c1
from perepair.errors import PERepairError
from perepair.field_tower import BasisOverSubfield
from perepair.repair_engine import (
    RepairSubspace,
    cutset_bits,
    lemma1_subspace,
    relative_exponent,
    repair_c1,
    repair_c2,
    select_helpers_c1,
    verify_span,
)
from perepair.rs_codes import Codeword, MessagePoly, encode, naive_decode


def make_codeword(plan, rng):
    msg = MessagePoly(
        [plan.ctx.elem(rng.getrandbits(plan.ctx.degree_bits)) for _ in range(plan.k)]
    )
    return encode(msg, plan.eval_set, plan_digest=plan.digest)


def test_cutset_bits_values():
    assert cutset_bits(9, 8, 2310, 1) == 10395
    assert cutset_bits(10, 9, 30, 2) == 300
    assert cutset_bits(11, 9, 30, 2) == 220
    assert cutset_bits(13, 9, 30, 2) == 156
    assert cutset_bits(3, 2, 30, 1) == 45
    assert cutset_bits(5, 3, 7, 1) == 12  # ceiling of 35/3
    assert cutset_bits(8, 8, 4, 1) == 32  # d = k downloads everything


def test_cutset_bits_needs_k_helpers():
    with pytest.raises(PERepairError) as ei:
        cutset_bits(7, 8, 4, 1)
    assert ei.value.code == "TOO_FEW_HELPERS"


def test_relative_exponent(toy_c1, toy_c2):
    assert [relative_exponent(toy_c1, i) for i in range(6)] == [1, 2, 3, 1, 2, 3]
    # first group of the C2 toy: exponents relative to the first point
    assert [relative_exponent(toy_c2, i) for i in range(7)] == [1, 2, 4, 7, 8, 11, 13]


def test_lemma1_subspace_shape(toy_c1):
    S = lemma1_subspace(toy_c1, 0)
    assert len(list(S.basis)) == 3
    assert S.subfield.degree_bits == 5
    assert S.exponent == 1
    assert S.beta == toy_c1.ctx.generator
    assert verify_span(S, toy_c1.groups[0].points[0], toy_c1.s)
    # cached: same object on repeat
    assert lemma1_subspace(toy_c1, 0) is S


def test_lemma1_every_node_has_a_verified_subspace(toy_c1):
    for gi, g in enumerate(toy_c1.groups):
        for node in toy_c1.group_nodes(gi):
            e = relative_exponent(toy_c1, node)
            S = lemma1_subspace(toy_c1, gi, e)
            assert verify_span(S, g.points[0], toy_c1.s)


def test_lemma1_subspace_is_specific_to_its_point(toy_c1):
    # the e=1 subspace spans with shifts of the first point only; the other
    # points of the group need their own exponent
    S = lemma1_subspace(toy_c1, 1, 1)
    assert verify_span(S, toy_c1.groups[1].points[0], 2)
    second = toy_c1.groups[1].points[1]
    rows_span = verify_span(
        RepairSubspace(S.subfield, S.basis, S.beta, 1), second, 2
    )
    assert not rows_span


def test_lemma1_bad_exponent(toy_c1):
    for e in (0, -3, (1 << 5) - 1, 1 << 5):
        with pytest.raises(PERepairError) as ei:
            lemma1_subspace(toy_c1, 1, e)
        assert ei.value.code == "BAD_EXPONENT"


def test_lemma1_bad_exponent_divisibility():
    # q=4, p=3: exponents divisible by (q^3-1)/(q-1) = 21 give points of the
    # base field, which can never define the extension
    plan = build_plan_c1(2, [2, 2], s=2, primes=[3, 5])
    with pytest.raises(PERepairError) as ei:
        lemma1_subspace(plan, 0, 21)
    assert ei.value.code == "BAD_EXPONENT"
    assert lemma1_subspace(plan, 0, 2).exponent == 2


def test_lemma1_rejects_degenerate_helper_groups(toy_c1):
    with pytest.raises(ValueError):
        lemma1_subspace(toy_c1, 0, 1, helper_groups=(0,))
    with pytest.raises(ValueError):
        lemma1_subspace(toy_c1, 0, 1, helper_groups=())


def test_verify_span_s1_full_basis(toy_c1):
    ctx = toy_c1.ctx
    sub = ctx.subfield(5)
    g = ctx.generator
    basis = BasisOverSubfield(sub, [g ** j for j in range(6)])
    S = RepairSubspace(sub, basis, g, 1)
    assert verify_span(S, toy_c1.eval_set.points[0], 1)


def test_select_helpers_round_robin(toy_c1, toy_c1_wide):
    assert select_helpers_c1(toy_c1, 0, 3) == [3, 4, 5]
    assert select_helpers_c1(toy_c1, 4, 3) == [0, 1, 2]
    # wide plan: helpers cycle across the prefix groups
    assert select_helpers_c1(toy_c1_wide, 0, 3) == [3, 4, 5]
    assert select_helpers_c1(toy_c1_wide, 0, 5) == [3, 6, 4, 7, 5]
    assert select_helpers_c1(toy_c1_wide, 3, 4) == [0, 6, 1, 7]


def test_select_helpers_never_in_failed_group(toy_c1, toy_c1_wide):
    for plan in (toy_c1, toy_c1_wide):
        for node in range(plan.n):
            gi, _ = plan.locate(node)
            banned = set(plan.group_nodes(gi))
            for d in range(plan.k, plan.n - plan.groups[gi].t + 1):
                chosen = select_helpers_c1(plan, node, d)
                assert len(chosen) == d == len(set(chosen))
                assert not banned & set(chosen)


def test_select_helpers_locality_range(toy_c1):
    with pytest.raises(PERepairError) as ei:
        select_helpers_c1(toy_c1, 0, 1)
    assert ei.value.code == "LOCALITY_OUT_OF_RANGE"
    with pytest.raises(PERepairError) as ei:
        select_helpers_c1(toy_c1, 0, 4)
    assert ei.value.code == "LOCALITY_OUT_OF_RANGE"


def test_repair_c1_recovers_every_node(toy_c1):
    rng = random.Random(20240601)
    for trial in range(5):
        cw = make_codeword(toy_c1, rng)
        for failed in range(toy_c1.n):
            tr = repair_c1(toy_c1, cw, failed)
            assert tr.recovered == cw.symbols[failed]
            assert tr.bits_transmitted == tr.cutset_bits == 45
            assert tr.per_helper_bits == [15, 15, 15]
            # group 1 queries 3 symbols of GF(2^5), group 2 queries 5 of GF(2^3)
            dim = 3 if failed < 3 else 5
            assert len(tr.queries) == len(tr.responses) == 3 * dim


def test_repair_c1_matches_interpolation_oracle(toy_c1):
    rng = random.Random(99)
    cw = make_codeword(toy_c1, rng)
    for failed in range(toy_c1.n):
        tr = repair_c1(toy_c1, cw, failed)
        others = [i for i in range(toy_c1.n) if i != failed][: toy_c1.k]
        poly = naive_decode([(i, cw.symbols[i]) for i in others], toy_c1.eval_set)
        assert tr.recovered == poly.evaluate(toy_c1.eval_set.points[failed])


def test_repair_c1_zero_codeword(toy_c1):
    ctx = toy_c1.ctx
    cw = encode(
        MessagePoly([ctx.zero, ctx.zero]), toy_c1.eval_set, plan_digest=toy_c1.digest
    )
    tr = repair_c1(toy_c1, cw, 5)
    assert tr.recovered == ctx.zero
    assert all(not r for r in tr.responses)


def test_repair_never_reads_the_failed_node(toy_c1, toy_c2):
    rng = random.Random(4242)
    for plan, fn in ((toy_c1, repair_c1), (toy_c2, repair_c2)):
        cw = make_codeword(plan, rng)
        failed = plan.n - 1
        garbage = list(cw.symbols)
        garbage[failed] = plan.ctx.elem(rng.getrandbits(plan.ctx.degree_bits))
        broken = Codeword(garbage, cw.plan_digest)
        assert fn(plan, broken, failed).recovered == cw.symbols[failed]


def test_repair_c1_locality_range(toy_c1, toy_c1_wide):
    rng = random.Random(8)
    cw = make_codeword(toy_c1, rng)
    for d in (2, 4):  # below k+s-1 and above n-t
        with pytest.raises(PERepairError) as ei:
            repair_c1(toy_c1, cw, 0, d=d)
        assert ei.value.code == "LOCALITY_OUT_OF_RANGE"
    # d = k is selectable for helper listing but below the repair threshold
    cw_wide = make_codeword(toy_c1_wide, rng)
    assert select_helpers_c1(toy_c1_wide, 0, 2) == [3, 4]
    with pytest.raises(PERepairError) as ei:
        repair_c1(toy_c1_wide, cw_wide, 0, d=2)
    assert ei.value.code == "LOCALITY_OUT_OF_RANGE"


def test_repair_c1_plan_mismatch(toy_c1, toy_c1_wide):
    rng = random.Random(77)
    cw = make_codeword(toy_c1, rng)
    with pytest.raises(PERepairError) as ei:
        repair_c1(toy_c1_wide, cw, 0)
    assert ei.value.code == "PLAN_MISMATCH"
    unlabeled = encode(
        MessagePoly([toy_c1.ctx.one, toy_c1.ctx.one]), toy_c1.eval_set
    )
    with pytest.raises(PERepairError) as ei:
        repair_c1(toy_c1, unlabeled, 0)
    assert ei.value.code == "PLAN_MISMATCH"


def test_repair_wrong_construction(toy_c1, toy_c2):
    rng = random.Random(3)
    cw1 = make_codeword(toy_c1, rng)
    cw2 = make_codeword(toy_c2, rng)
    with pytest.raises(ValueError):
        repair_c2(toy_c1, cw1, 0)
    with pytest.raises(ValueError):
        repair_c1(toy_c2, cw2, 0)


def test_repair_c1_above_canonical_locality(toy_c1_wide):
    """More helpers than k+s-1 still repair, trading bandwidth for spread."""
    rng = random.Random(5150)
    plan = toy_c1_wide
    cw = make_codeword(plan, rng)
    tr = repair_c1(plan, cw, 0)
    assert tr.recovered == cw.symbols[0]
    assert tr.bits_transmitted == tr.cutset_bits == 315
    for d, expect_cut in ((4, 280), (5, 263), (6, 252)):
        tr = repair_c1(plan, cw, 0, d=d)
        assert tr.recovered == cw.symbols[0]
        assert tr.bits_transmitted == d * plan.u * plan.base_bits
        assert tr.cutset_bits == expect_cut
        assert tr.bits_transmitted > tr.cutset_bits


def test_repair_c1_partial_prefix_group(toy_c1_wide):
    # failing in the middle group routes all queries to the first group
    rng = random.Random(31337)
    plan = toy_c1_wide
    cw = make_codeword(plan, rng)
    tr = repair_c1(plan, cw, 3)
    assert tr.recovered == cw.symbols[3]
    assert tr.helpers == [0, 1, 2]
    assert tr.bits_transmitted == tr.cutset_bits == 315


def test_repair_c2_recovers_every_node(toy_c2):
    rng = random.Random(60606)
    for trial in range(5):
        cw = make_codeword(toy_c2, rng)
        for failed in range(toy_c2.n):
            tr = repair_c2(toy_c2, cw, failed)
            assert tr.recovered == cw.symbols[failed]
            want = 36 if failed < 7 else 28
            assert tr.bits_transmitted == tr.cutset_bits == want
            gi, _ = toy_c2.locate(failed)
            assert not set(tr.helpers) & set(toy_c2.group_nodes(gi))
            assert len(tr.helpers) == toy_c2.n - toy_c2.groups[gi].t


def test_repair_c2_matches_interpolation_oracle(toy_c2):
    rng = random.Random(11)
    cw = make_codeword(toy_c2, rng)
    for failed in (0, 6, 7, 12):
        tr = repair_c2(toy_c2, cw, failed)
        others = [i for i in range(toy_c2.n) if i != failed][: toy_c2.k]
        poly = naive_decode([(i, cw.symbols[i]) for i in others], toy_c2.eval_set)
        assert tr.recovered == poly.evaluate(toy_c2.eval_set.points[failed])


def test_transcript_payload_shape(toy_c1):
    rng = random.Random(2)
    cw = make_codeword(toy_c1, rng)
    tr = repair_c1(toy_c1, cw, 1)
    payload = tr.to_payload()
    assert payload["failed"] == 1
    assert payload["helpers"] == [3, 4, 5]
    assert payload["per_helper_bits"] == [15, 15, 15]
    assert payload["bits_transmitted"] == 45
    assert payload["cutset_bits"] == 45
    assert toy_c1.ctx.from_hex(payload["recovered"]) == tr.recovered
    assert payload["verified"] is None
    tr.verified = tr.recovered == cw.symbols[1]
    assert tr.to_payload()["verified"] is True
    assert tr.to_json().endswith("\n")
