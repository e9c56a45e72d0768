import pymcl
import pytest
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.hkdf import HKDF
from hypothesis import given
from hypothesis import strategies as st

from didmember.crypto import (
    ORDER,
    OpCounters,
    SigningKeyPair,
    decode_g1,
    decode_g2,
    decode_scalar,
    encode_g1,
    encode_g2,
    encode_scalar,
    g1_mul,
    g2_mul,
    gt_exp,
    hkdf_seeds,
    multi_exp_gt,
    multi_scalar_mul,
    multi_scalar_mul_g2,
    pairing,
    random_g1,
    random_g2,
    sha256,
    sign,
    verify,
)
from didmember.crypto.groups import fr
from didmember.crypto.hashing import MAX_SEEDS, hkdf_expand_blocks, hkdf_extract
from didmember.errors import DecodeError, InvalidParameter, InvalidPoint

scalars = st.integers(min_value=-(ORDER * 2), max_value=ORDER * 2)
byte_strings = st.binary(max_size=256)


# -------------------------------------------------------------- hashing

def test_sha256_known_vectors():
    assert sha256(b"").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    assert sha256(b"abc").hex() == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")


def test_sha256_counts_one_hash():
    ctx = OpCounters()
    sha256(b"x", ctx)
    sha256(b"y", ctx)
    assert ctx.hash_count == 2


@pytest.mark.parametrize("ikm, salt, info, prk, okm", [
    (bytes([0x0B] * 22), bytes(range(13)), bytes(range(0xF0, 0xFA)),
     "077709362c2e32df0ddc3f0dc47bba6390b6c73bb50f9c3122ec844ad7c2b3e5",
     "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865"),
    (bytes([0x0B] * 22), b"", b"",
     "19ef24a32c717b167f33a91d6f648bdf96596776afdb6377ac434c1c293ccb04",
     "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8"),
])
def test_hkdf_rfc5869_vectors(ikm, salt, info, prk, okm):
    got_prk = hkdf_extract(salt, ikm)
    assert got_prk.hex() == prk
    out = b"".join(hkdf_expand_blocks(got_prk, info, 2))
    assert out[:42].hex() == okm


@given(st.binary(min_size=1, max_size=64), byte_strings, byte_strings,
       st.integers(min_value=1, max_value=40))
def test_hkdf_seeds_match_library_hkdf(master, salt, info, k):
    oracle = HKDF(algorithm=hashes.SHA256(), length=32 * k, salt=salt or None, info=info)
    assert b"".join(hkdf_seeds(master, salt, info, k)) == oracle.derive(master)


@given(st.integers(min_value=1, max_value=MAX_SEEDS))
def test_hkdf_cost_is_2_plus_2k(k):
    ctx = OpCounters()
    seeds = hkdf_seeds(b"S" * 32, b"salt", b"info", k, ctx)
    assert len(seeds) == k
    assert ctx.hash_count == 2 + 2 * k


@pytest.mark.parametrize("k", [0, -1, MAX_SEEDS + 1])
def test_hkdf_rejects_bad_k(k):
    with pytest.raises(InvalidParameter):
        hkdf_seeds(b"S", b"", b"", k)


def test_hkdf_deterministic_and_info_separated():
    a = hkdf_seeds(b"S" * 32, b"s", b"gen0", 8)
    assert a == hkdf_seeds(b"S" * 32, b"s", b"gen0", 8)
    assert not set(a) & set(hkdf_seeds(b"S" * 32, b"s", b"gen1", 8))


# ------------------------------------------------------------- counters

def test_counter_delta_and_merge():
    ctx = OpCounters()
    sha256(b"a", ctx)
    before = ctx.snapshot()
    sha256(b"b", ctx)
    ctx.multi_mul_profile[2] += 3
    d = ctx.delta(before)
    assert d.hash_count == 1 and d.multi_mul_profile == {2: 3}
    total = OpCounters()
    total.merge(d)
    total.merge(d)
    assert total.hash_count == 2 and total.multi_mul_profile[2] == 6
    assert OpCounters.from_dict(total.as_dict()) == total
    assert OpCounters().is_zero() and not total.is_zero()


# ------------------------------------------------------------ signatures

def test_sign_verify_roundtrip(rng):
    kp = SigningKeyPair.generate(rng)
    sig = sign(kp.sk, b"msg")
    assert len(sig) == 64
    assert verify(kp.pk, b"msg", sig)
    assert not verify(kp.pk, b"msh", sig)
    assert not verify(SigningKeyPair.generate(rng).pk, b"msg", sig)
    # deterministic
    assert sign(kp.sk, b"msg") == sig


def test_signature_decode_errors(rng):
    kp = SigningKeyPair.generate(rng)
    with pytest.raises(DecodeError):
        verify(kp.pk[:31], b"m", bytes(64))
    with pytest.raises(DecodeError):
        verify(kp.pk, b"m", bytes(63))
    with pytest.raises(DecodeError):
        SigningKeyPair.from_seed(b"short")


@given(st.binary(max_size=128), st.integers(min_value=0, max_value=63),
       st.integers(min_value=0, max_value=7))
def test_any_signature_bit_flip_rejected(msg, byte, bit):
    kp = SigningKeyPair.from_seed(bytes(range(32)))
    sig = bytearray(sign(kp.sk, msg))
    sig[byte] ^= 1 << bit
    assert not verify(kp.pk, msg, bytes(sig))


# ---------------------------------------------------------------- groups

def test_pairing_bilinear(rng):
    p, q = random_g1(rng), random_g2(rng)
    a, b = 123456789, 987654321
    ctx = OpCounters()
    lhs = pairing(g1_mul(p, a), g2_mul(q, b), ctx)
    rhs = gt_exp(pairing(p, q, ctx), a * b % ORDER, ctx)
    assert lhs == rhs
    assert ctx.pairing_count == 2 and ctx.gt_exp_count == 1


def test_pairing_rejects_swapped_arguments(rng):
    with pytest.raises(InvalidPoint):
        pairing(random_g2(rng), random_g1(rng))


@given(st.lists(scalars, min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_multi_scalar_mul_matches_naive_sum(ks, r):
    points = [random_g1(r) for _ in ks]
    naive = pymcl.G1()
    for p, k in zip(points, ks):
        naive = naive + p * fr(k)
    ctx = OpCounters()
    assert multi_scalar_mul(points, ks, ctx) == naive
    if len(ks) > 1:
        assert ctx.multi_mul_profile == {len(ks): 1} and ctx.g1_mul_count == 0
    else:
        assert ctx.g1_mul_count == 1


@given(st.lists(scalars, min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_multi_scalar_mul_g2_matches_naive_sum(ks, r):
    points = [random_g2(r) for _ in ks]
    naive = pymcl.G2()
    for p, k in zip(points, ks):
        naive = naive + p * fr(k)
    assert multi_scalar_mul_g2(points, ks) == naive


@given(st.lists(scalars, min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_multi_exp_gt_matches_naive_product(ks, r):
    base = pymcl.pairing(random_g1(r), random_g2(r))
    elems = [base ** fr(r.randrange(1, ORDER)) for _ in ks]
    naive = pymcl.GT()
    for e, k in zip(elems, ks):
        naive = naive * e ** fr(k)
    ctx = OpCounters()
    assert multi_exp_gt(elems, ks, ctx) == naive
    assert ctx.multi_exp_profile.get(len(ks), 0) == (len(ks) > 1)


def test_multi_ops_reject_length_mismatch(rng):
    with pytest.raises(InvalidParameter):
        multi_scalar_mul([random_g1(rng)], [1, 2])
    with pytest.raises(InvalidParameter):
        multi_exp_gt([], [])


def test_all_zero_exponents_give_identity(rng):
    assert multi_scalar_mul([random_g1(rng), random_g1(rng)], [0, ORDER]) == pymcl.G1()


@given(st.integers(min_value=0, max_value=ORDER - 1))
def test_scalar_encoding_roundtrip(k):
    assert decode_scalar(encode_scalar(k)) == k


def test_scalar_decoding_rejects_unreduced():
    with pytest.raises(InvalidParameter):
        decode_scalar(ORDER.to_bytes(32, "big"))
    with pytest.raises(InvalidParameter):
        decode_scalar(bytes(31))


def test_point_encoding_roundtrip(rng):
    p, q = random_g1(rng), random_g2(rng)
    assert decode_g1(encode_g1(p)) == p
    assert decode_g2(encode_g2(q)) == q


@given(st.binary(min_size=48, max_size=48))
def test_random_g1_bytes_decode_or_raise_invalid_point(data):
    try:
        p = decode_g1(data)
    except InvalidPoint:
        return
    assert encode_g1(p) == data or decode_g1(encode_g1(p)) == p


def test_point_decoding_rejects_bad_length(rng):
    with pytest.raises(InvalidPoint):
        decode_g1(encode_g1(random_g1(rng))[:-1])
    with pytest.raises(InvalidPoint):
        decode_g2(b"\xff" * 96)

