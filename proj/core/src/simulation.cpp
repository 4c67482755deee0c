#include "sedna/simulation.hpp"

#include <array>
#include <limits>
#include <unordered_set>

#include "sedna/error.hpp"

namespace sedna::sim {

void SimConfig::validate() const {
  if (n == 0) throw Error(Errc::kInvalidConfig, "n must be positive");
  if (censored > n) throw Error(Errc::kInvalidConfig, "c_e must not exceed n");
  if (payload_len == 0 && payload.empty()) throw Error(Errc::kInvalidConfig, "payload must be non-empty");
  if (max_slots == 0) throw Error(Errc::kInvalidConfig, "max_slots must be positive");
  strategy.validate(n);
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kIncluded: return "included";
    case Outcome::kCensored: return "censored";
    case Outcome::kDiscardedInvalid: return "discarded_invalid";
  }
  return "?";
}

SimResult simulate_inclusion(const SimConfig& config, const ledger::AdversaryModel& adversary, ByteView payload,
                             std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::array<std::uint8_t, 32> key_seed{};
  for (auto& byte : key_seed) byte = static_cast<std::uint8_t>(rng());
  const auto key = crypto::KeyPair::from_seed(key_seed);
  protocol::FeeFields fees;
  fees.fee_per_byte = config.fee_per_byte;
  fees.max_fee = std::numeric_limits<std::uint64_t>::max();
  fees.nonce = rng();
  auto state = protocol::build_transaction(payload, fees, key, rng);
  const auto params = protocol::coding_params(config.strategy, state.tx.message.size());

  SimResult out;
  out.seed = seed;
  out.decode_threshold = protocol::decode_threshold(params);

  ledger::FinalizedLedger chain(config.n);
  ledger::Mempool pending(config.n);
  ledger::BundleVerifier verifier(config.policy);
  ledger::InclusionTracker tracker(state.tx.txid, params, state.tx.header);
  std::unordered_set<std::uint64_t> seen_by_adversary;

  for (std::uint64_t t = 1; t <= config.max_slots; ++t) {
    const auto lanes = protocol::sample_lanes(config.n, config.strategy.lanes, rng);
    auto bundles = protocol::build_bundles(state, lanes, config.strategy);
    std::uint64_t slot_bytes = 0;
    for (auto& b : bundles) {
      const bool censored = adversary.censored_lanes.contains(b.lane);
      if (censored) {
        if (adversary.collects_symbols) seen_by_adversary.insert(b.indices.begin(), b.indices.end());
        // Dropped bundles never reach a block, so admission checks are moot.
        continue;
      }
      slot_bytes += b.wire_size();
      if (!pending.enqueue(std::move(b), verifier)) throw Error(Errc::kInvalidConfig, "honest bundle rejected");
    }
    if (!out.adversary_decode_slot && seen_by_adversary.size() >= out.decode_threshold) out.adversary_decode_slot = t;

    ledger::run_slot(chain, pending, adversary, verifier);
    tracker.observe(chain.slot(t), t);
    out.bytes_per_slot.push_back(slot_bytes);
    out.bytes_published += slot_bytes;
    out.slots_run = t;
    if (tracker.done()) break;
  }

  switch (tracker.record().kind) {
    case ledger::InclusionKind::kIncluded:
      out.outcome = Outcome::kIncluded;
      out.slots_to_inclusion = tracker.record().height;
      break;
    case ledger::InclusionKind::kDiscardedInvalid: out.outcome = Outcome::kDiscardedInvalid; break;
    case ledger::InclusionKind::kPending: out.outcome = Outcome::kCensored; break;
  }
  return out;
}

SimResult run_trial(const SimConfig& config, std::uint64_t seed, std::uint64_t trial) {
  const std::uint64_t trial_seed = derive_seed(seed, trial);
  Rng rng(trial_seed);
  auto adversary = ledger::sample_adversary(config.n, config.censored, config.adversary_collects, rng);
  Bytes payload = config.payload;
  if (payload.empty()) {
    payload.resize(config.payload_len);
    for (auto& byte : payload) byte = static_cast<std::uint8_t>(rng());
  }
  auto result = simulate_inclusion(config, adversary, payload, rng());
  result.trial = trial;
  result.seed = trial_seed;
  return result;
}

std::vector<SimResult> run_trials(const SimConfig& config, std::uint64_t trials, std::uint64_t seed) {
  config.validate();
  std::vector<SimResult> results(trials);
  parallel_for(trials, [&](std::size_t i) { results[i] = run_trial(config, seed, i); });
  return results;
}

std::optional<std::uint64_t> adversary_early_decode(std::span<const std::vector<std::uint64_t>> observed_per_slot,
                                                    std::uint64_t threshold) {
  std::unordered_set<std::uint64_t> held;
  for (std::size_t t = 0; t < observed_per_slot.size(); ++t) {
    held.insert(observed_per_slot[t].begin(), observed_per_slot[t].end());
    if (held.size() >= threshold) return t + 1;
  }
  return std::nullopt;
}

}  // namespace sedna::sim
