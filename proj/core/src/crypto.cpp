#include "sedna/crypto.hpp"

#include <sodium.h>

#include <cstring>

#include "sedna/error.hpp"

namespace sedna::crypto {
namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

static_assert(crypto_hash_sha256_BYTES == kDigestSize);
static_assert(crypto_sign_PUBLICKEYBYTES == kPublicKeySize);
static_assert(crypto_sign_SECRETKEYBYTES == kSecretKeySize);
static_assert(crypto_sign_BYTES == kSignatureSize);
static_assert(crypto_sign_SEEDBYTES == 32);

}  // namespace

KeyPair KeyPair::from_seed(const std::array<std::uint8_t, 32>& seed) {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  return kp;
}

KeyPair KeyPair::generate() {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
  return kp;
}

Digest hash(ByteView data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

Commitment commit(ByteView sigma, ByteView payload) {
  if (sigma.size() != kRandomnessSize) {
    throw Error(Errc::kInvalidRandomness,
                "commitment randomness must be " + std::to_string(kRandomnessSize) + " bytes, got " +
                    std::to_string(sigma.size()));
  }
  ensure_sodium();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  crypto_hash_sha256_update(&st, reinterpret_cast<const unsigned char*>(kCommitTag.data()),
                            kCommitTag.size());
  crypto_hash_sha256_update(&st, sigma.data(), sigma.size());
  crypto_hash_sha256_update(&st, payload.data(), payload.size());
  Commitment c;
  crypto_hash_sha256_final(&st, c.value.bytes.data());
  return c;
}

bool verify_opening(const Commitment& c, ByteView sigma, ByteView payload) {
  if (sigma.size() != kRandomnessSize) return false;
  return commit(sigma, payload) == c;
}

Digest derive_txid(ByteView h_pre, const Commitment& c) {
  Bytes buf;
  buf.reserve(h_pre.size() + kDigestSize);
  append(buf, h_pre);
  append(buf, c.value.view());
  return hash(buf);
}

Signature sign(const KeyPair& key, ByteView message) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       key.secret_key.data());
  return sig;
}

bool verify(ByteView public_key, ByteView message, ByteView signature) {
  if (public_key.size() != kPublicKeySize || signature.size() != kSignatureSize) return false;
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

}  // namespace sedna::crypto
