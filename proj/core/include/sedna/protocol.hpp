#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sedna/bytes.hpp"
#include "sedna/codec.hpp"
#include "sedna/crypto.hpp"
#include "sedna/rng.hpp"

namespace sedna::protocol {

/// Fee/accounting fields hashed into the transaction id. The canonical
/// encoding is fixed-order and big-endian:
///   fee_per_byte u64 || max_fee u64 || u16 len || sender_pubkey || nonce u64 ||
///   declared_message_len u64
struct PreimageHeader {
  Bytes sender_pubkey;
  std::uint64_t fee_per_byte = 0;
  std::uint64_t max_fee = 0;
  std::uint64_t nonce = 0;
  std::uint64_t declared_message_len = 0;  // S = |sigma| + |payload|

  Bytes serialize() const;
  static PreimageHeader parse(ByteReader& in);
  bool operator==(const PreimageHeader&) const = default;
};

struct PublicHeader {
  PreimageHeader pre;
  crypto::Commitment commitment;
  crypto::Signature header_sig;

  Bytes serialize() const;
  static PublicHeader parse(ByteReader& in);
  bool operator==(const PublicHeader&) const = default;
};

struct Transaction {
  PublicHeader header;
  codec::Message message;  // sender side only
  crypto::Digest txid;

  ByteView sigma() const { return ByteView(message).first(crypto::kRandomnessSize); }
  ByteView payload() const { return ByteView(message).subspan(crypto::kRandomnessSize); }
};

/// Lane-addressed carrier of coded symbols for one transaction. Lanes are
/// 1-based. Wire form (canonical, used for fee accounting):
///   txid || lane u16 || count u32 || (index u64 || value)* || bundle_sig || header
struct Bundle {
  crypto::Digest txid;
  std::uint32_t lane = 0;
  std::vector<std::uint64_t> indices;  // strictly increasing
  std::vector<Bytes> symbols;          // aligned with indices
  crypto::Signature bundle_sig;
  PublicHeader header;

  Bytes serialize() const;
  std::uint64_t wire_size() const;
  /// Inverse of serialize(); value_len is the per-symbol length, which the wire
  /// form does not carry.
  static Bundle parse(ByteView data, std::size_t value_len);
  bool operator==(const Bundle&) const = default;
};

/// "SEDNA/HDR" || txid
Bytes header_signing_message(const crypto::Digest& txid);
/// "SEDNA/BND" || txid || lane u16 || count u32 || (index u64 || len u32 || value)*
Bytes bundle_signing_message(const crypto::Digest& txid, std::uint32_t lane,
                             std::span<const std::uint64_t> indices, std::span<const Bytes> symbols);

enum class Variant { kNaive, kMds, kRateless };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

/// A sender's submission strategy. `lanes` is m. For kMds, shares_needed is k
/// and the code has m shares. For kRateless, each bundle carries
/// symbols_per_bundle symbols of symbol_len bytes.
struct StrategyConfig {
  Variant variant = Variant::kRateless;
  std::uint32_t lanes = 1;
  std::uint32_t symbols_per_bundle = 1;
  std::uint32_t shares_needed = 1;
  std::uint32_t symbol_len = 256;
  double epsilon = 0.05;

  /// Throws Errc::kInvalidConfig unless 1 <= lanes <= n and the variant fields
  /// are usable.
  void validate(std::uint32_t n) const;
};

struct NaiveParams {
  std::uint64_t message_len = 0;
};

using CodingParams = std::variant<NaiveParams, codec::MdsParams, codec::RatelessParams>;

CodingParams coding_params(const StrategyConfig& config, std::uint64_t message_len);
/// Distinct symbols needed before decoding is attempted (1, k or K).
std::uint64_t decode_threshold(const CodingParams& params);
/// Byte length of one symbol value on the wire.
std::uint64_t symbol_value_len(const CodingParams& params);
std::uint64_t message_len(const CodingParams& params);

/// Per-bundle and per-symbol metadata of the canonical wire format, in the
/// shape of the bandwidth cost model (M_h, M_s). Naive and MDS bundles carry a
/// single index, folded into the per-bundle figure.
struct WireMetadata {
  std::uint64_t per_bundle = 0;
  std::uint64_t per_symbol = 0;
};
WireMetadata wire_metadata(Variant variant, std::size_t pubkey_len = crypto::kPublicKeySize);

struct FeeFields {
  std::uint64_t fee_per_byte = 1;
  std::uint64_t max_fee = 0;
  std::uint64_t nonce = 0;
};

/// Single-owner sender state. index_cursor only moves forward, so every index
/// set handed out by build_bundles for a coded variant is fresh.
struct SenderState {
  Transaction tx;
  crypto::KeyPair key;
  std::uint64_t index_cursor = 0;
};

SenderState build_transaction(ByteView payload, const FeeFields& fees, const crypto::KeyPair& key,
                              Rng& rng);

/// Uniform m-subset of {1..n}, sorted ascending.
std::vector<std::uint32_t> sample_lanes(std::uint32_t n, std::uint32_t m, Rng& rng);

std::vector<Bundle> build_bundles(SenderState& state, std::span<const std::uint32_t> lanes,
                                  const StrategyConfig& config);

struct VerifyPolicy {
  std::uint64_t fee_floor = 1;
};

/// The four admission checks: txid recomputation, header signature,
/// accounting predicate and bundle signature, plus structural sanity.
/// Never throws.
bool verify_bundle(const Bundle& bundle, const VerifyPolicy& policy = {});

/// Checks 1 and 2 alone. Every bundle of a transaction carries the same
/// header, so callers may memoise this.
bool verify_header(const PublicHeader& header, const crypto::Digest& txid);
/// Structure, accounting and bundle signature; sound only together with a
/// passing verify_header(bundle.header, bundle.txid).
bool verify_bundle_body(const Bundle& bundle, const VerifyPolicy& policy = {});

/// c_e from the Byzantine bound f and the user's censorship parameter c
/// (n = 3f + 1 model).
std::uint32_t effective_censors(std::uint32_t n, std::uint32_t f, std::uint32_t c);

}  // namespace sedna::protocol
