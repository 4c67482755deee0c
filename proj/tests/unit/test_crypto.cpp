#include <gtest/gtest.h>

#include "sedna/crypto.hpp"
#include "sedna/error.hpp"
#include "support.hpp"

using namespace sedna;
using namespace sedna::crypto;

TEST(Hash, Sha256KnownVectors) {
  EXPECT_EQ(to_hex(hash({}).view()), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(to_hex(hash(as_bytes("abc")).view()), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Commit, OpensOnlyWithSameInputs) {
  Rng rng(1);
  const auto sigma = test::random_bytes(rng, kRandomnessSize);
  const auto payload = test::random_bytes(rng, 100);
  const auto c = commit(sigma, payload);

  Bytes tagged;
  append(tagged, kCommitTag);
  append(tagged, sigma);
  append(tagged, payload);
  EXPECT_EQ(c.value, hash(tagged));

  EXPECT_TRUE(verify_opening(c, sigma, payload));
  auto other = payload;
  other[0] ^= 1;
  EXPECT_FALSE(verify_opening(c, sigma, other));
  auto sigma2 = sigma;
  sigma2[31] ^= 0x80;
  EXPECT_FALSE(verify_opening(c, sigma2, payload));
}

TEST(Commit, RejectsWrongRandomnessLength) {
  const Bytes short_sigma(31, 0);
  try {
    (void)commit(short_sigma, as_bytes("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidRandomness);
  }
  EXPECT_FALSE(verify_opening(Commitment{}, short_sigma, as_bytes("x")));
}

TEST(Txid, HashOfPreimageThenCommitment) {
  const Bytes pre = from_hex("00010203");
  Commitment c;
  c.value = hash(as_bytes("c"));
  Bytes joined = pre;
  append(joined, c.value.view());
  EXPECT_EQ(derive_txid(pre, c), hash(joined));
  Commitment c2 = c;
  c2.value.bytes[0] ^= 1;
  EXPECT_NE(derive_txid(pre, c), derive_txid(pre, c2));
}

TEST(Signature, Ed25519RoundTripAndRejections) {
  const auto key = test::key_from(9);
  const auto msg = as_bytes("SEDNA/HDR message");
  const auto sig = sign(key, msg);
  EXPECT_TRUE(verify(key.public_key, msg, sig));
  EXPECT_EQ(sign(key, msg), sig);  // deterministic

  auto bad = sig;
  bad.bytes[5] ^= 1;
  EXPECT_FALSE(verify(key.public_key, msg, bad));
  EXPECT_FALSE(verify(test::key_from(10).public_key, msg, sig));
  EXPECT_FALSE(verify(key.public_key, as_bytes("other"), sig));
  // Wrong lengths fail rather than throw.
  EXPECT_FALSE(verify(ByteView(key.public_key).first(31), msg, ByteView(sig.bytes)));
  EXPECT_FALSE(verify(ByteView(key.public_key), msg, ByteView(sig.bytes).first(63)));
}

TEST(Signature, KeyFromSeedIsDeterministic) {
  EXPECT_EQ(test::key_from(3).public_key, test::key_from(3).public_key);
  EXPECT_NE(test::key_from(3).public_key, test::key_from(4).public_key);
}
