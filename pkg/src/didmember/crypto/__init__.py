from .counters import OpCounters
from .groups import (
    ORDER,
    decode_g1,
    decode_g2,
    decode_scalar,
    encode_g1,
    encode_g2,
    encode_gt,
    encode_scalar,
    g1_generator,
    g1_identity,
    g1_mul,
    g2_generator,
    g2_mul,
    gt_exp,
    gt_identity,
    hash_to_scalar,
    inverse,
    multi_exp_gt,
    multi_scalar_mul,
    multi_scalar_mul_g2,
    pairing,
    random_g1,
    random_g2,
    random_scalar,
)
from .hashing import hkdf_seeds, hmac_sha256, sha256
from .signing import SigningKeyPair, sign, verify

__all__ = [
    "ORDER", "OpCounters", "SigningKeyPair",
    "decode_g1", "decode_g2", "decode_scalar", "encode_g1", "encode_g2", "encode_gt",
    "encode_scalar", "g1_generator", "g1_identity", "g1_mul", "g2_generator", "g2_mul",
    "gt_exp", "gt_identity", "hash_to_scalar", "hkdf_seeds", "hmac_sha256", "inverse",
    "multi_exp_gt", "multi_scalar_mul", "multi_scalar_mul_g2", "pairing", "random_g1",
    "random_g2", "random_scalar", "sha256", "sign", "verify",
]
