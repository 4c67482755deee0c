#include "sedna/protocol.hpp"

#include <algorithm>
#include <numeric>

#include "sedna/error.hpp"

namespace sedna::protocol {
namespace {

constexpr std::uint64_t kIndexBytes = 8;

void put_digest(Bytes& out, const crypto::Digest& d) { append(out, d.view()); }

crypto::Digest read_digest(ByteReader& in) {
  crypto::Digest d;
  auto b = in.take(crypto::kDigestSize);
  std::copy(b.begin(), b.end(), d.bytes.begin());
  return d;
}

crypto::Signature read_signature(ByteReader& in) {
  crypto::Signature s;
  auto b = in.take(crypto::kSignatureSize);
  std::copy(b.begin(), b.end(), s.bytes.begin());
  return s;
}

__extension__ using u128 = unsigned __int128;

bool fee_covers(std::uint64_t fee_per_byte, std::uint64_t bytes, std::uint64_t max_fee) {
  const u128 due = static_cast<u128>(fee_per_byte) * bytes;
  return due <= max_fee;
}

}  // namespace

Bytes PreimageHeader::serialize() const {
  Bytes out;
  out.reserve(34 + sender_pubkey.size());
  put_u64(out, fee_per_byte);
  put_u64(out, max_fee);
  put_u16(out, static_cast<std::uint16_t>(sender_pubkey.size()));
  append(out, sender_pubkey);
  put_u64(out, nonce);
  put_u64(out, declared_message_len);
  return out;
}

PreimageHeader PreimageHeader::parse(ByteReader& in) {
  PreimageHeader h;
  h.fee_per_byte = in.u64();
  h.max_fee = in.u64();
  auto pk = in.take(in.u16());
  h.sender_pubkey.assign(pk.begin(), pk.end());
  h.nonce = in.u64();
  h.declared_message_len = in.u64();
  return h;
}

Bytes PublicHeader::serialize() const {
  Bytes out = pre.serialize();
  put_digest(out, commitment.value);
  append(out, ByteView(header_sig.bytes));
  return out;
}

PublicHeader PublicHeader::parse(ByteReader& in) {
  PublicHeader h;
  h.pre = PreimageHeader::parse(in);
  h.commitment.value = read_digest(in);
  h.header_sig = read_signature(in);
  return h;
}

Bytes Bundle::serialize() const {
  Bytes out;
  out.reserve(wire_size());
  put_digest(out, txid);
  put_u16(out, static_cast<std::uint16_t>(lane));
  put_u32(out, static_cast<std::uint32_t>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    put_u64(out, indices[i]);
    append(out, symbols[i]);
  }
  append(out, ByteView(bundle_sig.bytes));
  append(out, header.serialize());
  return out;
}

std::uint64_t Bundle::wire_size() const {
  std::uint64_t size = crypto::kDigestSize + 2 + 4 + crypto::kSignatureSize;
  for (const auto& s : symbols) size += kIndexBytes + s.size();
  size += 34 + header.pre.sender_pubkey.size() + crypto::kDigestSize + crypto::kSignatureSize;
  return size;
}

Bundle Bundle::parse(ByteView data, std::size_t value_len) {
  ByteReader in(data);
  Bundle b;
  b.txid = read_digest(in);
  b.lane = in.u16();
  const std::uint32_t count = in.u32();
  if (std::uint64_t(count) * (kIndexBytes + value_len) > in.remaining()) {
    throw Error(Errc::kMalformedInput, "bundle symbol count exceeds buffer");
  }
  b.indices.reserve(count);
  b.symbols.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    b.indices.push_back(in.u64());
    auto v = in.take(value_len);
    b.symbols.emplace_back(v.begin(), v.end());
  }
  b.bundle_sig = read_signature(in);
  b.header = PublicHeader::parse(in);
  if (!in.done()) throw Error(Errc::kMalformedInput, "trailing bytes after bundle");
  return b;
}

Bytes header_signing_message(const crypto::Digest& txid) {
  Bytes out;
  append(out, crypto::kHeaderTag);
  put_digest(out, txid);
  return out;
}

Bytes bundle_signing_message(const crypto::Digest& txid, std::uint32_t lane,
                             std::span<const std::uint64_t> indices, std::span<const Bytes> symbols) {
  Bytes out;
  append(out, crypto::kBundleTag);
  put_digest(out, txid);
  put_u16(out, static_cast<std::uint16_t>(lane));
  put_u32(out, static_cast<std::uint32_t>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    put_u64(out, indices[i]);
    put_u32(out, static_cast<std::uint32_t>(symbols[i].size()));
    append(out, symbols[i]);
  }
  return out;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kNaive:
      return "naive";
    case Variant::kMds:
      return "mds";
    case Variant::kRateless:
      return "rateless";
  }
  return "unknown";
}

Variant parse_variant(std::string_view s) {
  if (s == "naive") return Variant::kNaive;
  if (s == "mds") return Variant::kMds;
  if (s == "rateless") return Variant::kRateless;
  throw Error(Errc::kInvalidConfig, "unknown variant '" + std::string(s) + "'");
}

void StrategyConfig::validate(std::uint32_t n) const {
  if (lanes < 1 || lanes > n) {
    throw Error(Errc::kInvalidConfig,
                "lane count m=" + std::to_string(lanes) + " must satisfy 1 <= m <= n=" + std::to_string(n));
  }
  if (n > 0xffff) throw Error(Errc::kInvalidConfig, "lane ids are encoded as u16");
  switch (variant) {
    case Variant::kNaive:
      break;
    case Variant::kMds:
      if (shares_needed < 1 || shares_needed > lanes || lanes > codec::kMaxMdsShares) {
        throw Error(Errc::kInvalidConfig, "MDS requires 1 <= k <= m <= 255");
      }
      break;
    case Variant::kRateless:
      if (symbols_per_bundle < 1) throw Error(Errc::kInvalidConfig, "symbols per bundle must be >= 1");
      if (symbol_len < 1) throw Error(Errc::kInvalidConfig, "symbol length must be >= 1");
      if (!(epsilon > 0.0)) throw Error(Errc::kInvalidConfig, "epsilon must be > 0");
      break;
  }
}

CodingParams coding_params(const StrategyConfig& config, std::uint64_t message_len) {
  switch (config.variant) {
    case Variant::kNaive:
      return NaiveParams{message_len};
    case Variant::kMds:
      return codec::MdsParams::make(config.lanes, config.shares_needed, message_len);
    case Variant::kRateless:
      return codec::RatelessParams::make(message_len, config.symbol_len, config.epsilon);
  }
  throw Error(Errc::kInvalidConfig, "unknown variant");
}

std::uint64_t decode_threshold(const CodingParams& params) {
  struct Visitor {
    std::uint64_t operator()(const NaiveParams&) const { return 1; }
    std::uint64_t operator()(const codec::MdsParams& p) const { return p.shares_needed; }
    std::uint64_t operator()(const codec::RatelessParams& p) const { return p.decode_threshold(); }
  };
  return std::visit(Visitor{}, params);
}

std::uint64_t symbol_value_len(const CodingParams& params) {
  struct Visitor {
    std::uint64_t operator()(const NaiveParams& p) const { return p.message_len; }
    std::uint64_t operator()(const codec::MdsParams& p) const { return p.share_len(); }
    std::uint64_t operator()(const codec::RatelessParams& p) const { return p.symbol_len; }
  };
  return std::visit(Visitor{}, params);
}

std::uint64_t message_len(const CodingParams& params) {
  return std::visit([](const auto& p) -> std::uint64_t { return p.message_len; }, params);
}

WireMetadata wire_metadata(Variant variant, std::size_t pubkey_len) {
  const std::uint64_t header = 34 + pubkey_len + crypto::kDigestSize + crypto::kSignatureSize;
  const std::uint64_t fixed = crypto::kDigestSize + 2 + 4 + crypto::kSignatureSize + header;
  if (variant == Variant::kRateless) return {fixed, kIndexBytes};
  return {fixed + kIndexBytes, 0};
}

SenderState build_transaction(ByteView payload, const FeeFields& fees, const crypto::KeyPair& key,
                              Rng& rng) {
  if (payload.empty()) throw Error(Errc::kInvalidConfig, "payload must be non-empty");
  crypto::CommitRandomness sigma;
  for (std::size_t i = 0; i < sigma.size(); i += 8) {
    const std::uint64_t word = rng();
    for (std::size_t b = 0; b < 8; ++b) sigma[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }

  SenderState state;
  state.key = key;
  auto& tx = state.tx;
  tx.message.reserve(sigma.size() + payload.size());
  append(tx.message, sigma);
  append(tx.message, payload);

  auto& pre = tx.header.pre;
  pre.sender_pubkey.assign(key.public_key.begin(), key.public_key.end());
  pre.fee_per_byte = fees.fee_per_byte;
  pre.max_fee = fees.max_fee;
  pre.nonce = fees.nonce;
  pre.declared_message_len = tx.message.size();

  tx.header.commitment = crypto::commit(sigma, payload);
  tx.txid = crypto::derive_txid(pre.serialize(), tx.header.commitment);
  tx.header.header_sig = crypto::sign(key, header_signing_message(tx.txid));
  return state;
}

std::vector<std::uint32_t> sample_lanes(std::uint32_t n, std::uint32_t m, Rng& rng) {
  if (m < 1 || m > n) {
    throw Error(Errc::kInvalidConfig,
                "sample size m=" + std::to_string(m) + " must satisfy 1 <= m <= n=" + std::to_string(n));
  }
  // Partial Fisher-Yates over 1..n.
  std::vector<std::uint32_t> lanes(n);
  std::iota(lanes.begin(), lanes.end(), 1u);
  for (std::uint32_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
    std::swap(lanes[i], lanes[pick(rng)]);
  }
  lanes.resize(m);
  std::sort(lanes.begin(), lanes.end());
  return lanes;
}

std::vector<Bundle> build_bundles(SenderState& state, std::span<const std::uint32_t> lanes,
                                  const StrategyConfig& config) {
  const auto& tx = state.tx;
  const CodingParams params = coding_params(config, tx.message.size());

  std::vector<Bundle> bundles;
  bundles.reserve(lanes.size());
  for (std::size_t r = 0; r < lanes.size(); ++r) {
    Bundle b;
    b.txid = tx.txid;
    b.lane = lanes[r];
    b.header = tx.header;
    switch (config.variant) {
      case Variant::kNaive:
        b.indices.push_back(0);
        b.symbols.push_back(codec::naive_package(tx.message));
        break;
      case Variant::kMds: {
        // Once the 255 field points are spent, resubmission cycles through them
        // again; repeats are absorbed by first-occurrence dedup.
        const std::uint64_t index = (state.index_cursor + r) % codec::kMaxMdsShares;
        auto share = codec::mds_share(tx.message, static_cast<std::uint32_t>(index),
                                      std::get<codec::MdsParams>(params));
        b.indices.push_back(index);
        b.symbols.push_back(std::move(share.value));
        break;
      }
      case Variant::kRateless: {
        const auto& rp = std::get<codec::RatelessParams>(params);
        const std::uint64_t first = state.index_cursor + r * config.symbols_per_bundle;
        for (std::uint64_t j = first; j < first + config.symbols_per_bundle; ++j) {
          b.indices.push_back(j);
          b.symbols.push_back(codec::rateless_symbol(tx.message, j, rp).value);
        }
        break;
      }
    }
    b.bundle_sig = crypto::sign(state.key, bundle_signing_message(b.txid, b.lane, b.indices, b.symbols));
    bundles.push_back(std::move(b));
  }

  switch (config.variant) {
    case Variant::kNaive:
      state.index_cursor = std::max<std::uint64_t>(state.index_cursor, 1);
      break;
    case Variant::kMds:
      state.index_cursor += lanes.size();
      break;
    case Variant::kRateless:
      state.index_cursor += lanes.size() * std::uint64_t(config.symbols_per_bundle);
      break;
  }
  return bundles;
}

bool verify_header(const PublicHeader& header, const crypto::Digest& txid) {
  try {
    // 1. Hash consistency.
    if (crypto::derive_txid(header.pre.serialize(), header.commitment) != txid) return false;
    // 2. Header signature.
    return crypto::verify(header.pre.sender_pubkey, header_signing_message(txid), ByteView(header.header_sig.bytes));
  } catch (...) {
    return false;
  }
}

bool verify_bundle_body(const Bundle& bundle, const VerifyPolicy& policy) {
  try {
    if (bundle.lane < 1 || bundle.lane > 0xffff) return false;
    if (bundle.indices.size() != bundle.symbols.size() || bundle.indices.empty()) return false;
    if (!std::is_sorted(bundle.indices.begin(), bundle.indices.end()) ||
        std::adjacent_find(bundle.indices.begin(), bundle.indices.end()) != bundle.indices.end()) {
      return false;
    }
    const auto& pre = bundle.header.pre;
    // 3. Accounting: pay-for-bytes at or above the floor.
    if (pre.fee_per_byte < policy.fee_floor) return false;
    if (!fee_covers(pre.fee_per_byte, bundle.wire_size(), pre.max_fee)) return false;
    // 4. Bundle signature.
    return crypto::verify(pre.sender_pubkey,
                          bundle_signing_message(bundle.txid, bundle.lane, bundle.indices, bundle.symbols),
                          ByteView(bundle.bundle_sig.bytes));
  } catch (...) {
    return false;
  }
}

bool verify_bundle(const Bundle& bundle, const VerifyPolicy& policy) {
  return verify_header(bundle.header, bundle.txid) && verify_bundle_body(bundle, policy);
}

std::uint32_t effective_censors(std::uint32_t n, std::uint32_t f, std::uint32_t c) {
  if (c >= n) throw Error(Errc::kInvalidConfig, "censorship parameter c must be <= n - 1");
  if (c <= f) return c;
  if (c <= 2 * f) {
    const std::int64_t ce = std::int64_t(n) - (2 * std::int64_t(f) + 1) + c;
    return static_cast<std::uint32_t>(std::clamp<std::int64_t>(ce, 0, n));
  }
  return n;
}

}  // namespace sedna::protocol
