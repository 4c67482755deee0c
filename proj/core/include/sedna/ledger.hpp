#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "sedna/protocol.hpp"

namespace sedna::ledger {

using protocol::Bundle;

/// B_i^t: the bundles lane i finalized at slot t, in intra-block order.
struct Block {
  std::uint32_t lane = 0;
  std::uint64_t slot = 0;
  std::vector<Bundle> bundles;
  bool operator==(const Block&) const = default;
};

/// verify_bundle with memos of bundles and headers (by digest of their
/// canonical bytes) that already passed, so mempool admission and block
/// validation share work and each header signature is checked once.
class BundleVerifier {
 public:
  explicit BundleVerifier(protocol::VerifyPolicy policy = {}) : policy_(policy) {}

  bool check(const Bundle& bundle);
  const protocol::VerifyPolicy& policy() const { return policy_; }

 private:
  protocol::VerifyPolicy policy_;
  std::unordered_set<crypto::Digest> verified_;
  std::unordered_set<crypto::Digest> headers_;
};

/// Append-only sequence of slot vectors (B_1^t, ..., B_n^t), t = 1..height().
class FinalizedLedger {
 public:
  explicit FinalizedLedger(std::uint32_t lanes);

  std::uint32_t lanes() const { return lanes_; }
  std::uint64_t height() const { return slots_.size(); }
  /// Slot vector at height t (1-based).
  const std::vector<Block>& slot(std::uint64_t t) const;

  /// Appends slot height()+1. Rejects (Errc::kMalformedInput) a vector whose
  /// size is not n, whose blocks are out of lane order, or that contains a
  /// bundle failing verification; the ledger is unchanged on rejection.
  void append(std::vector<Block> blocks, BundleVerifier& verifier);

  /// Self-describing binary form; parse() re-validates every slot.
  Bytes serialize() const;
  static FinalizedLedger parse(ByteView data, BundleVerifier& verifier);

  bool operator==(const FinalizedLedger&) const = default;

 private:
  std::uint32_t lanes_;
  std::vector<std::vector<Block>> slots_;
};

/// Per-lane queues of admitted bundles awaiting the next slot.
class Mempool {
 public:
  explicit Mempool(std::uint32_t lanes) : queues_(lanes) {}

  /// Admits the bundle to the queue of bundle.lane if it passes verification.
  bool enqueue(Bundle bundle, BundleVerifier& verifier);
  std::vector<Bundle>& queue(std::uint32_t lane) { return queues_.at(lane - 1); }
  std::uint32_t lanes() const { return static_cast<std::uint32_t>(queues_.size()); }

 private:
  std::vector<std::vector<Bundle>> queues_;
};

/// Static targeted-censorship adversary: censored lanes drop every monitored
/// bundle; when collects_symbols is set the adversary reads what they receive.
struct AdversaryModel {
  std::set<std::uint32_t> censored_lanes;
  bool collects_symbols = true;
};

AdversaryModel sample_adversary(std::uint32_t n, std::uint32_t censored, bool collects_symbols, Rng& rng);

/// Finalizes one slot: honest lanes publish their whole queue, censored lanes
/// drain theirs without publishing. Returns the new height.
std::uint64_t run_slot(FinalizedLedger& ledger, Mempool& pending, const AdversaryModel& adversary,
                       BundleVerifier& verifier);

/// Position of an occurrence in dedup scan order (height, lane, intra-block rank).
struct Occurrence {
  std::uint64_t slot = 0;
  std::uint32_t lane = 0;
  std::uint32_t position = 0;
  auto operator<=>(const Occurrence&) const = default;
};

struct DedupEntry {
  Bytes value;
  Occurrence first;
};

/// X_txID(h): index -> first-occurrence value.
using DedupView = std::map<std::uint64_t, DedupEntry>;

DedupView scan_dedup(const FinalizedLedger& ledger, const crypto::Digest& txid, std::uint64_t height);

enum class InclusionKind { kPending, kIncluded, kDiscardedInvalid };

struct InclusionRecord {
  crypto::Digest txid;
  InclusionKind kind = InclusionKind::kPending;
  std::uint64_t height = 0;  // ht_incl, or the height of the discarding decode
  Bytes payload;             // decoded payload when included
};

/// Incremental evaluation of the inclusion height for one txid. Feed finalized
/// slots in order; decoding is retried at every height that adds new distinct
/// indices while |X| >= threshold. A decode that succeeds but fails the
/// commitment opening, or an inconsistent rateless symbol set, discards the tx.
class InclusionTracker {
 public:
  InclusionTracker(const crypto::Digest& txid, protocol::CodingParams params,
                   std::optional<protocol::PublicHeader> header = std::nullopt);

  void observe(const std::vector<Block>& slot_blocks, std::uint64_t height);

  const InclusionRecord& record() const { return record_; }
  bool done() const { return record_.kind != InclusionKind::kPending; }
  const DedupView& view() const { return view_; }
  std::uint64_t decode_attempts() const { return attempts_; }

 private:
  void attempt_decode(std::uint64_t height);

  protocol::CodingParams params_;
  std::optional<protocol::PublicHeader> header_;
  InclusionRecord record_;
  DedupView view_;
  std::uint64_t attempts_ = 0;
};

InclusionRecord inclusion_height(const FinalizedLedger& ledger, const crypto::Digest& txid,
                                 const std::optional<protocol::PublicHeader>& header,
                                 const protocol::CodingParams& params);

struct ExecutionEntry {
  std::uint64_t height = 0;
  crypto::Digest txid;
  auto operator<=>(const ExecutionEntry&) const = default;
};

/// Included transactions sorted by (ht_incl, txid bytes).
std::vector<ExecutionEntry> execution_order(const FinalizedLedger& ledger,
                                            const std::map<crypto::Digest, protocol::CodingParams>& known);

}  // namespace sedna::ledger
