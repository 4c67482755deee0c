#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

#include "sedna/bytes.hpp"

namespace sedna::crypto {

// Domain-separation tags. Every hashed or signed message class carries one.
inline constexpr std::string_view kCommitTag = "SEDNA/COM";
inline constexpr std::string_view kHeaderTag = "SEDNA/HDR";
inline constexpr std::string_view kBundleTag = "SEDNA/BND";
inline constexpr std::string_view kSymbolTag = "SEDNA/SYM";

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kRandomnessSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;
inline constexpr std::size_t kSignatureSize = 64;

/// SHA-256 output. Used for commitments, transaction ids and coefficient seeds.
struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  ByteView view() const { return bytes; }
  auto operator<=>(const Digest&) const = default;
};

using CommitRandomness = std::array<std::uint8_t, kRandomnessSize>;

struct Commitment {
  Digest value;
  auto operator<=>(const Commitment&) const = default;
};

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;

struct Signature {
  std::array<std::uint8_t, kSignatureSize> bytes{};
  auto operator<=>(const Signature&) const = default;
};

/// Ed25519 key pair. Signing is deterministic for a fixed (key, message).
struct KeyPair {
  std::array<std::uint8_t, kSecretKeySize> secret_key{};
  PublicKey public_key{};

  static KeyPair from_seed(const std::array<std::uint8_t, 32>& seed);
  static KeyPair generate();
};

Digest hash(ByteView data);

/// hash("SEDNA/COM" || sigma || payload). Throws Errc::kInvalidRandomness when
/// sigma is not exactly 32 bytes.
Commitment commit(ByteView sigma, ByteView payload);
bool verify_opening(const Commitment& c, ByteView sigma, ByteView payload);

/// txID = H(h_pre || C), with h_pre the canonical preimage-header encoding.
Digest derive_txid(ByteView h_pre, const Commitment& c);

Signature sign(const KeyPair& key, ByteView message);

// Total on untrusted input: wrong key or signature sizes simply fail.
bool verify(ByteView public_key, ByteView message, ByteView signature);
inline bool verify(const PublicKey& pk, ByteView message, const Signature& sig) {
  return verify(ByteView(pk), message, ByteView(sig.bytes));
}

}  // namespace sedna::crypto

template <>
struct std::hash<sedna::crypto::Digest> {
  std::size_t operator()(const sedna::crypto::Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};
