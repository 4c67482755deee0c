#include "sedna/ledger.hpp"

#include <algorithm>
#include <numeric>

#include "sedna/error.hpp"

namespace sedna::ledger {

namespace {

constexpr std::string_view kLedgerMagic = "SEDNALG1";

std::size_t bundle_value_len(const Bundle& b) { return b.symbols.empty() ? 0 : b.symbols.front().size(); }

// Opens a decoded message against the header commitment.
InclusionKind open_message(const Bytes& message, const protocol::PublicHeader& header, Bytes& payload) {
  if (message.size() <= crypto::kRandomnessSize) return InclusionKind::kDiscardedInvalid;
  const ByteView msg(message);
  const ByteView sigma = msg.first(crypto::kRandomnessSize);
  const ByteView body = msg.subspan(crypto::kRandomnessSize);
  if (!crypto::verify_opening(header.commitment, sigma, body)) return InclusionKind::kDiscardedInvalid;
  payload.assign(body.begin(), body.end());
  return InclusionKind::kIncluded;
}

}  // namespace

bool BundleVerifier::check(const Bundle& bundle) {
  const auto key = crypto::hash(bundle.serialize());
  if (verified_.contains(key)) return true;
  Bytes header_key(bundle.txid.bytes.begin(), bundle.txid.bytes.end());
  sedna::append(header_key, bundle.header.serialize());
  const auto hkey = crypto::hash(header_key);
  if (!headers_.contains(hkey)) {
    if (!protocol::verify_header(bundle.header, bundle.txid)) return false;
    headers_.insert(hkey);
  }
  if (!protocol::verify_bundle_body(bundle, policy_)) return false;
  verified_.insert(key);
  return true;
}

FinalizedLedger::FinalizedLedger(std::uint32_t lanes) : lanes_(lanes) {
  if (lanes == 0) throw Error(Errc::kInvalidConfig, "ledger needs at least one lane");
}

const std::vector<Block>& FinalizedLedger::slot(std::uint64_t t) const {
  if (t == 0 || t > slots_.size()) throw Error(Errc::kInvalidConfig, "slot height out of range");
  return slots_[t - 1];
}

void FinalizedLedger::append(std::vector<Block> blocks, BundleVerifier& verifier) {
  if (blocks.size() != lanes_) throw Error(Errc::kMalformedInput, "slot vector must hold one block per lane");
  const std::uint64_t t = height() + 1;
  for (std::uint32_t i = 0; i < lanes_; ++i) {
    Block& blk = blocks[i];
    if (blk.lane != i + 1) throw Error(Errc::kMalformedInput, "blocks out of lane order");
    if (blk.slot != t) throw Error(Errc::kMalformedInput, "block slot does not match height");
    for (const auto& b : blk.bundles) {
      if (b.lane != blk.lane) throw Error(Errc::kMalformedInput, "bundle addressed to another lane");
      if (!verifier.check(b)) throw Error(Errc::kMalformedInput, "block contains an invalid bundle");
    }
  }
  slots_.push_back(std::move(blocks));
}

Bytes FinalizedLedger::serialize() const {
  Bytes out;
  sedna::append(out, kLedgerMagic);
  put_u32(out, lanes_);
  put_u64(out, height());
  for (const auto& slot : slots_) {
    for (const auto& blk : slot) {
      put_u32(out, blk.lane);
      put_u64(out, blk.slot);
      put_u32(out, static_cast<std::uint32_t>(blk.bundles.size()));
      for (const auto& b : blk.bundles) {
        const Bytes wire = b.serialize();
        put_u32(out, static_cast<std::uint32_t>(bundle_value_len(b)));
        put_u32(out, static_cast<std::uint32_t>(wire.size()));
        sedna::append(out, wire);
      }
    }
  }
  return out;
}

FinalizedLedger FinalizedLedger::parse(ByteView data, BundleVerifier& verifier) {
  ByteReader in(data);
  const ByteView magic = in.take(kLedgerMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kLedgerMagic.begin()))
    throw Error(Errc::kMalformedInput, "not a serialized ledger");
  FinalizedLedger ledger(in.u32());
  const std::uint64_t slots = in.u64();
  for (std::uint64_t t = 0; t < slots; ++t) {
    std::vector<Block> blocks(ledger.lanes());
    for (auto& blk : blocks) {
      blk.lane = in.u32();
      blk.slot = in.u64();
      const std::uint32_t count = in.u32();
      for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t value_len = in.u32();
        const std::uint32_t len = in.u32();
        blk.bundles.push_back(Bundle::parse(in.take(len), value_len));
      }
    }
    ledger.append(std::move(blocks), verifier);
  }
  if (!in.done()) throw Error(Errc::kMalformedInput, "trailing bytes after ledger");
  return ledger;
}

bool Mempool::enqueue(Bundle bundle, BundleVerifier& verifier) {
  if (bundle.lane == 0 || bundle.lane > queues_.size()) return false;
  if (!verifier.check(bundle)) return false;
  queues_[bundle.lane - 1].push_back(std::move(bundle));
  return true;
}

AdversaryModel sample_adversary(std::uint32_t n, std::uint32_t censored, bool collects_symbols, Rng& rng) {
  AdversaryModel adv;
  adv.collects_symbols = collects_symbols;
  if (censored > n) throw Error(Errc::kInvalidConfig, "more censored lanes than lanes");
  if (censored == 0) return adv;
  const auto lanes = protocol::sample_lanes(n, censored, rng);
  adv.censored_lanes.insert(lanes.begin(), lanes.end());
  return adv;
}

std::uint64_t run_slot(FinalizedLedger& ledger, Mempool& pending, const AdversaryModel& adversary,
                       BundleVerifier& verifier) {
  if (pending.lanes() != ledger.lanes()) throw Error(Errc::kInvalidConfig, "mempool and ledger lane counts differ");
  const std::uint64_t t = ledger.height() + 1;
  std::vector<Block> blocks(ledger.lanes());
  for (std::uint32_t i = 1; i <= ledger.lanes(); ++i) {
    Block& blk = blocks[i - 1];
    blk.lane = i;
    blk.slot = t;
    auto& q = pending.queue(i);
    if (!adversary.censored_lanes.contains(i)) blk.bundles = std::move(q);
    q.clear();
  }
  ledger.append(std::move(blocks), verifier);
  return t;
}

DedupView scan_dedup(const FinalizedLedger& ledger, const crypto::Digest& txid, std::uint64_t height) {
  DedupView view;
  height = std::min(height, ledger.height());
  for (std::uint64_t t = 1; t <= height; ++t) {
    for (const auto& blk : ledger.slot(t)) {
      for (std::uint32_t pos = 0; pos < blk.bundles.size(); ++pos) {
        const Bundle& b = blk.bundles[pos];
        if (b.txid != txid) continue;
        for (std::size_t r = 0; r < b.indices.size(); ++r)
          view.try_emplace(b.indices[r], DedupEntry{b.symbols[r], Occurrence{t, blk.lane, pos}});
      }
    }
  }
  return view;
}

InclusionTracker::InclusionTracker(const crypto::Digest& txid, protocol::CodingParams params,
                                   std::optional<protocol::PublicHeader> header)
    : params_(std::move(params)), header_(std::move(header)) {
  record_.txid = txid;
}

void InclusionTracker::observe(const std::vector<Block>& slot_blocks, std::uint64_t height) {
  if (done()) return;
  bool grew = false;
  for (const auto& blk : slot_blocks) {
    for (std::uint32_t pos = 0; pos < blk.bundles.size(); ++pos) {
      const Bundle& b = blk.bundles[pos];
      if (b.txid != record_.txid) continue;
      if (!header_) header_ = b.header;
      for (std::size_t r = 0; r < b.indices.size(); ++r) {
        if (view_.try_emplace(b.indices[r], DedupEntry{b.symbols[r], Occurrence{height, blk.lane, pos}}).second)
          grew = true;
      }
    }
  }
  if (grew && view_.size() >= protocol::decode_threshold(params_)) attempt_decode(height);
}

void InclusionTracker::attempt_decode(std::uint64_t height) {
  ++attempts_;
  std::optional<Bytes> message;
  bool inconsistent = false;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, protocol::NaiveParams>) {
          const auto it = view_.find(0);
          if (it != view_.end()) message = it->second.value;
        } else if constexpr (std::is_same_v<P, codec::MdsParams>) {
          std::vector<codec::Share> shares;
          for (const auto& [j, e] : view_) {
            if (j >= codec::kMaxMdsShares || e.value.size() != p.share_len()) continue;
            shares.push_back({static_cast<std::uint32_t>(j), e.value});
            if (shares.size() == p.shares_needed) break;
          }
          if (shares.size() == p.shares_needed) message = codec::mds_decode(shares, p);
        } else {
          std::vector<codec::Symbol> symbols;
          symbols.reserve(view_.size());
          for (const auto& [j, e] : view_) {
            if (e.value.size() != p.symbol_len) continue;
            symbols.push_back({j, e.value});
          }
          auto out = codec::rateless_decode(symbols, p);
          if (out.status == codec::DecodeStatus::kInconsistent) inconsistent = true;
          if (out.ok()) message = std::move(out.message);
        }
      },
      params_);
  if (inconsistent) {
    // First-occurrence symbols of one honest encoding are always consistent.
    record_.kind = InclusionKind::kDiscardedInvalid;
    record_.height = height;
    return;
  }
  if (!message) return;
  if (message->size() != protocol::message_len(params_)) {
    record_.kind = InclusionKind::kDiscardedInvalid;
    record_.height = height;
    return;
  }
  record_.kind = open_message(*message, *header_, record_.payload);
  record_.height = height;
}

InclusionRecord inclusion_height(const FinalizedLedger& ledger, const crypto::Digest& txid,
                                 const std::optional<protocol::PublicHeader>& header,
                                 const protocol::CodingParams& params) {
  InclusionTracker tracker(txid, params, header);
  for (std::uint64_t t = 1; t <= ledger.height() && !tracker.done(); ++t) tracker.observe(ledger.slot(t), t);
  return tracker.record();
}

std::vector<ExecutionEntry> execution_order(const FinalizedLedger& ledger,
                                            const std::map<crypto::Digest, protocol::CodingParams>& known) {
  std::map<crypto::Digest, InclusionTracker> trackers;
  for (const auto& [txid, params] : known) trackers.emplace(txid, InclusionTracker(txid, params));
  for (std::uint64_t t = 1; t <= ledger.height(); ++t)
    for (auto& [txid, tr] : trackers) tr.observe(ledger.slot(t), t);
  std::vector<ExecutionEntry> order;
  for (const auto& [txid, tr] : trackers)
    if (tr.record().kind == InclusionKind::kIncluded) order.push_back({tr.record().height, txid});
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace sedna::ledger
