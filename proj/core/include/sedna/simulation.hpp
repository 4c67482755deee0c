#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sedna/ledger.hpp"
#include "sedna/protocol.hpp"

namespace sedna::sim {

struct SimConfig {
  std::uint32_t n = 256;
  std::uint32_t censored = 0;  // c_e
  protocol::StrategyConfig strategy;
  std::uint64_t payload_len = 1024;
  Bytes payload;  // when non-empty every trial sends this instead of payload_len random bytes
  bool adversary_collects = true;
  std::uint64_t max_slots = 10'000;
  protocol::VerifyPolicy policy;
  std::uint64_t fee_per_byte = 1;

  void validate() const;
};

enum class Outcome { kIncluded, kCensored, kDiscardedInvalid };

std::string_view to_string(Outcome o);

struct SimResult {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::kCensored;
  std::uint64_t slots_to_inclusion = 0;  // 0 unless included
  std::uint64_t slots_run = 0;
  std::uint64_t bytes_published = 0;     // every finalized bundle of the tx, duplicates included
  std::vector<std::uint64_t> bytes_per_slot;
  std::optional<std::uint64_t> adversary_decode_slot;
  std::uint64_t decode_threshold = 0;    // 1, k or K

  bool included() const { return outcome == Outcome::kIncluded; }
};

/// One sender, one transaction: each slot samples U, builds fresh bundles,
/// enqueues them, finalizes the slot and checks inclusion. Stops at inclusion,
/// discard, or max_slots (Censored).
SimResult simulate_inclusion(const SimConfig& config, const ledger::AdversaryModel& adversary, ByteView payload,
                             std::uint64_t seed);

/// Trial `trial` of a batch: adversary, payload and lane sampling all derive
/// from derive_seed(seed, trial).
SimResult run_trial(const SimConfig& config, std::uint64_t seed, std::uint64_t trial);

/// Independent trials on all cores; the result vector is ordered by trial and
/// does not depend on scheduling.
std::vector<SimResult> run_trials(const SimConfig& config, std::uint64_t trials, std::uint64_t seed);

/// Earliest slot (1-based) at which the union of indices observed on censored
/// lanes reaches `threshold` distinct values, or nullopt.
std::optional<std::uint64_t> adversary_early_decode(std::span<const std::vector<std::uint64_t>> observed_per_slot,
                                                    std::uint64_t threshold);

}  // namespace sedna::sim
