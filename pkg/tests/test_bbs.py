import hashlib
import random
from dataclasses import replace

import pymcl
import pytest
from hypothesis import given
from hypothesis import strategies as st

from didmember import bbs
from didmember.crypto import ORDER, OpCounters, SigningKeyPair
from didmember.crypto.groups import fr
from didmember.errors import (
    AlreadyRevoked,
    BadSignature,
    DecodeError,
    InvalidPoint,
    InvalidSignature,
    ProtocolOrder,
    RevokedKey,
    StaleKey,
    StaleList,
    StaleTimestamp,
    UnknownMember,
    UnknownSigner,
)
from didmember.ledger import INDEX_RL, Ledger, LedgerRecord, RecordKind

DIGEST = hashlib.sha256(b"message").digest()
SCALAR_FIELDS = ("c", "s_alpha", "s_beta", "s_x", "s_delta1", "s_delta2", "s_y")


def relation_oracle(gsk, gpk):
    """e(A, w + x*g2) * e(h1, g2)^y == e(g1, g2), straight on the library."""
    lhs = pymcl.pairing(gsk.A, gpk.w + gpk.g2 * fr(gsk.x)) * pymcl.pairing(gpk.h1, gpk.g2) ** fr(gsk.y)
    return lhs == pymcl.pairing(gpk.g1, gpk.g2)


def small_group(seed, n=4):
    r = random.Random(seed)
    gpk, tpsk = bbs.keygen(rng=r)
    keys = {f"m{i}": bbs.join(tpsk, gpk, f"m{i}", rng=r) for i in range(n)}
    return gpk, tpsk, keys, SigningKeyPair.generate(r), r


# ---------------------------------------------------------------- keys

def test_keygen_linear_encryption_bases(rng):
    gpk, tpsk = bbs.keygen(rng=rng)
    assert gpk.u * fr(tpsk.xi1) == gpk.h
    assert gpk.v * fr(tpsk.xi2) == gpk.h
    assert gpk.w == gpk.g2 * fr(tpsk.gamma)
    assert gpk.epoch == 0


def test_gpk_bytes_roundtrip(group):
    gpk = group[0]
    assert bbs.GroupPublicKey.from_bytes(gpk.to_bytes()) == gpk
    with pytest.raises(DecodeError):
        bbs.GroupPublicKey.from_bytes(gpk.to_bytes()[:-1])


def test_every_joined_key_satisfies_relation(group):
    gpk, tpsk, keys, _ = group
    for mid, gsk in keys.items():
        assert relation_oracle(gsk, gpk)
        assert bbs.key_relation_holds(gsk, gpk)
        assert tpsk.member_registry[mid].A == gsk.A
        assert tpsk.member_registry[mid].x == gsk.x


def test_distinct_members_get_distinct_x(group):
    assert len({g.x for g in group[2].values()}) == len(group[2])


# ---------------------------------------------------------------- join

def test_join_node_costs_two_g1_mults(rng):
    gpk, tpsk = bbs.keygen(rng=rng)
    node = OpCounters()
    bbs.join(tpsk, gpk, "n", node, rng=rng)
    assert node.g1_mul_count == 2 and node.pairing_count == 0


def test_join_wrong_y_rejected(rng):
    gpk, tpsk = bbs.keygen(rng=rng)
    y, Y = bbs.join_node_start(gpk, rng=rng)
    t = bbs.JoinTranscript(Y, "n")
    t.record_challenge(*bbs.join_tp_respond(tpsk, gpk, Y, rng=rng))
    t.record_answer(bbs.join_node_answer(t.H, (y + 1) % ORDER))
    assert not bbs.join_tp_finalize(tpsk, gpk, t)
    assert t.status is bbs.JoinStatus.REJECTED and "n" not in tpsk.member_registry


def test_join_steps_out_of_order(rng):
    gpk, tpsk = bbs.keygen(rng=rng)
    _, Y = bbs.join_node_start(gpk, rng=rng)
    t = bbs.JoinTranscript(Y)
    with pytest.raises(ProtocolOrder):
        t.record_answer(Y)
    with pytest.raises(ProtocolOrder):
        bbs.join_tp_finalize(tpsk, gpk, t)
    t.record_challenge(*bbs.join_tp_respond(tpsk, gpk, Y, rng=rng))
    with pytest.raises(ProtocolOrder):
        t.record_challenge(1, Y, Y)


def test_join_input_validation(rng):
    gpk, tpsk = bbs.keygen(rng=rng)
    with pytest.raises(ValueError):
        bbs.join_node_start(gpk, y=ORDER)
    with pytest.raises(InvalidPoint):
        bbs.join_tp_respond(tpsk, gpk, pymcl.G1())
    with pytest.raises(InvalidPoint):
        bbs.join_tp_respond(tpsk, gpk, b"\x00" * 48 + b"\x01")
    bbs.join(tpsk, gpk, "dup", rng=rng)
    with pytest.raises(ValueError):
        bbs.join(tpsk, gpk, "dup", rng=rng)


def test_tp_view_does_not_determine_key(rng):
    # the TP sees (Y, x, A, H, B) but a key with a different y does not satisfy the relation
    gpk, tpsk = bbs.keygen(rng=rng)
    gsk = bbs.join(tpsk, gpk, "n", rng=rng)
    assert not relation_oracle(replace(gsk, y=(gsk.y + 1) % ORDER), gpk)


# ---------------------------------------------------------- sign/verify

def test_sign_verify_and_costs(group, rng):
    gpk, _, keys, _ = group
    gsk = keys["m0"]
    pre = OpCounters()
    gpk.constants(pre)
    gsk.e_a_g2(gpk, pre)
    s_ctx = OpCounters()
    sig = bbs.bbs_sign(gsk, gpk, DIGEST, s_ctx, rng)
    assert (s_ctx.hash_count, s_ctx.g1_mul_count, s_ctx.pairing_count) == (1, 5, 0)
    assert s_ctx.multi_mul_profile == {2: 2} and s_ctx.multi_exp_profile == {4: 1}
    v_ctx = OpCounters()
    assert bbs.bbs_verify(gpk, DIGEST, sig, v_ctx)
    assert v_ctx.pairing_count == 1 and v_ctx.hash_count == 1
    assert v_ctx.multi_mul_profile == {2: 4} and v_ctx.multi_exp_profile == {4: 1}
    assert v_ctx.multi_mul_g2_profile == {2: 1} and v_ctx.g1_mul_count == 0


def test_signatures_are_randomized(group, rng):
    gpk, _, keys, _ = group
    a = bbs.bbs_sign(keys["m1"], gpk, DIGEST, rng=rng)
    b = bbs.bbs_sign(keys["m1"], gpk, DIGEST, rng=rng)
    assert a.T1 != b.T1 and a.T3 != b.T3


def test_wrong_digest_fails(group, rng):
    gpk, _, keys, _ = group
    sig = bbs.bbs_sign(keys["m2"], gpk, DIGEST, rng=rng)
    assert not bbs.bbs_verify(gpk, hashlib.sha256(b"other").digest(), sig)


@given(st.sampled_from(SCALAR_FIELDS + ("T1", "T2", "T3")), st.integers(1, 2 ** 64))
def test_any_field_tamper_fails(group, field, delta):
    gpk, _, keys, _ = group
    sig = bbs.bbs_sign(keys["m3"], gpk, DIGEST, rng=random.Random(delta))
    if field.startswith("T"):
        bad = replace(sig, **{field: getattr(sig, field) + gpk.h * fr(delta)})
    else:
        bad = replace(sig, **{field: (getattr(sig, field) + delta) % ORDER})
    assert not bbs.bbs_verify(gpk, DIGEST, bad)


def test_signature_wire_roundtrip(group, rng):
    gpk, _, keys, _ = group
    sig = bbs.bbs_sign(keys["m4"], gpk, DIGEST, rng=rng)
    data = sig.to_bytes()
    assert len(data) == bbs.BbsSignature.WIRE_SIZE
    assert bbs.bbs_verify(gpk, DIGEST, bbs.BbsSignature.from_bytes(data, gpk.epoch))
    with pytest.raises(DecodeError):
        bbs.BbsSignature.from_bytes(data[:-1])


def test_epoch_mismatch(group, rng):
    gpk, _, keys, _ = group
    with pytest.raises(StaleKey):
        bbs.bbs_sign(replace(keys["m5"], epoch=1), gpk, DIGEST, rng=rng)
    sig = bbs.bbs_sign(keys["m5"], gpk, DIGEST, rng=rng)
    assert not bbs.bbs_verify(gpk, DIGEST, replace(sig, epoch=1))


def test_open_identifies_signer(group, rng):
    gpk, tpsk, keys, _ = group
    sig = bbs.bbs_sign(keys["m6"], gpk, DIGEST, rng=rng)
    A = bbs.open_signature(tpsk, gpk, DIGEST, sig)
    assert A == keys["m6"].A and bbs.identify_member(tpsk, A) == "m6"
    with pytest.raises(InvalidSignature):
        bbs.open_signature(tpsk, gpk, b"\x00" * 32, sig)
    with pytest.raises(UnknownSigner):
        bbs.identify_member(tpsk, gpk.g1)


# ----------------------------------------------------------- revocation

def test_revocation_flow():
    gpk, tpsk, keys, tp, r = small_group(11)
    ledger = Ledger()
    ctx = OpCounters()
    rl, gpk1 = bbs.revoke(tpsk, gpk, "m0", tp, 1, ledger, ctx)
    assert gpk1.epoch == 1 and len(rl.entries) == 1
    assert bbs.fetch_revocation_list(ledger, tp.pk) == rl
    assert bbs.published_revocations(ledger) == 1
    for mid in ("m1", "m2", "m3"):
        u_ctx = OpCounters()
        new, gpk_node = bbs.update_member(keys[mid], gpk, rl.entries[0], u_ctx)
        assert gpk_node == gpk1
        assert relation_oracle(new, gpk1)
        assert u_ctx.multi_mul_profile == {3: 1} and u_ctx.g2_mul_count == 1
        sig = bbs.bbs_sign(new, gpk1, DIGEST, rng=r)
        assert bbs.bbs_verify(gpk1, DIGEST, sig)
        assert bbs.identify_member(tpsk, bbs.open_signature(tpsk, gpk1, DIGEST, sig)) == mid
    with pytest.raises(RevokedKey):
        bbs.update_member(keys["m0"], gpk, rl.entries[0])
    old = bbs.bbs_sign(keys["m0"], gpk, DIGEST, rng=r)
    assert not bbs.bbs_verify(gpk1, DIGEST, replace(old, epoch=1))
    forced = bbs.bbs_sign(replace(keys["m0"], epoch=1), gpk1, DIGEST, rng=r)
    assert not bbs.bbs_verify(gpk1, DIGEST, forced)


def test_two_revocations_and_catch_up():
    gpk, tpsk, keys, tp, r = small_group(12, 5)
    ledger = Ledger()
    _, gpk1 = bbs.revoke(tpsk, gpk, "m1", tp, 1, ledger)
    rl, gpk2 = bbs.revoke(tpsk, gpk1, "m3", tp, 2, ledger)
    assert [e.epoch for e in rl.entries] == [0, 1]
    gsk, view = bbs.catch_up(keys["m0"], gpk, rl)
    assert view == gpk2 and relation_oracle(gsk, gpk2)
    assert bbs.catch_up(None, gpk, rl)[1] == gpk2
    with pytest.raises(RevokedKey):
        bbs.catch_up(keys["m3"], gpk, rl)
    with pytest.raises(StaleList):
        bbs.update_public(gpk, rl.entries[1])


def test_revocation_errors():
    gpk, tpsk, _, tp, _ = small_group(13, 2)
    ledger = Ledger()
    with pytest.raises(UnknownMember):
        bbs.revoke(tpsk, gpk, "nobody", tp, 1, ledger)
    _, gpk1 = bbs.revoke(tpsk, gpk, "m0", tp, 1, ledger)
    with pytest.raises(StaleTimestamp):
        bbs.revoke(tpsk, gpk1, "m1", tp, 1, ledger)
    with pytest.raises(AlreadyRevoked):
        bbs.revoke(tpsk, gpk1, "m0", tp, 2, ledger)


def test_revocation_list_checks(rng):
    gpk, tpsk, _, tp, _ = small_group(14, 2)
    ledger = Ledger()
    rl, _ = bbs.revoke(tpsk, gpk, "m0", tp, 5, ledger)
    assert bbs.RevocationList.from_payload(rl.to_payload()) == rl
    with pytest.raises(BadSignature):
        bbs.fetch_revocation_list(ledger, SigningKeyPair.generate(rng).pk)
    with pytest.raises(StaleList):
        bbs.fetch_revocation_list(ledger, tp.pk, cached_ts=6)
    forged = bbs.RevocationList(rl.entries, 9, rl.signature)
    ledger.store(INDEX_RL, LedgerRecord(RecordKind.REVOCATION_LIST, forged.to_payload()))
    with pytest.raises(BadSignature):
        bbs.fetch_revocation_list(ledger, tp.pk)


def test_no_revocation_list_means_zero():
    assert bbs.published_revocations(Ledger()) == 0


# ------------------------------------------------------- bulk properties

def test_completeness_200_pairs(group):
    gpk, _, keys, _ = group
    r = random.Random(200)
    members = sorted(keys)
    for _ in range(200):
        digest = r.randbytes(32)
        sig = bbs.bbs_sign(keys[r.choice(members)], gpk, digest, rng=r)
        assert bbs.bbs_verify(gpk, digest, sig)


def test_field_mutation_200_trials(group):
    gpk, _, keys, _ = group
    r = random.Random(201)
    rejected = 0
    for i in range(200):
        sig = bbs.bbs_sign(keys["m0"], gpk, DIGEST, rng=r)
        field_name = (SCALAR_FIELDS + ("T1", "T2", "T3"))[i % 10]
        value = getattr(sig, field_name)
        if field_name.startswith("T"):
            bad = replace(sig, **{field_name: value + gpk.g1 * fr(r.randrange(1, ORDER))})
        else:
            bad = replace(sig, **{field_name: (value + r.randrange(1, ORDER)) % ORDER})
        rejected += not bbs.bbs_verify(gpk, DIGEST, bad)
    assert rejected == 200


def test_open_recovers_every_member(group):
    gpk, tpsk, keys, _ = group
    r = random.Random(202)
    for mid, gsk in keys.items():
        sig = bbs.bbs_sign(gsk, gpk, DIGEST, rng=r)
        assert bbs.open_signature(tpsk, gpk, DIGEST, sig) == gsk.A
        assert bbs.identify_member(tpsk, gsk.A) == mid


def test_tp_cannot_sign_for_member_without_y(group):
    gpk, tpsk, keys, _ = group
    r = random.Random(203)
    record = tpsk.member_registry["m1"]
    forged_key = bbs.GroupPrivateKey(record.A, record.x, 0, gpk.epoch)
    assert not relation_oracle(forged_key, gpk)
    sig = bbs.bbs_sign(forged_key, gpk, DIGEST, rng=r)
    assert not bbs.bbs_verify(gpk, DIGEST, sig)


def test_join_views_differ_with_y(rng):
    gpk, _ = bbs.keygen(rng=rng)
    _, Y1 = bbs.join_node_start(gpk, y=5)
    _, Y2 = bbs.join_node_start(gpk, y=6)
    assert Y1 != Y2


def test_rl_signing_bytes_layout():
    gpk, tpsk, _, tp, _ = small_group(15, 2)
    rl, _ = bbs.revoke(tpsk, gpk, "m0", tp, 3, Ledger())
    raw = rl.signing_bytes()
    assert len(raw) == 32 + 3 * 48 + 96 + 8
    assert raw[:32] == rl.entries[0].x_r.to_bytes(32, "big")
    assert raw[-8:] == (3).to_bytes(8, "big")
