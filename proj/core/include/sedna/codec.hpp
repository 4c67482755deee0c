#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sedna/bytes.hpp"

namespace sedna::codec {

// sigma || payload. Codecs treat it as opaque bytes of length S.
using Message = Bytes;

/// Parameters of the dense random-linear fountain code over GF(256).
///
/// The message is split into source_blocks() zero-padded blocks of symbol_len
/// bytes. Symbol j is the GF(256) combination of those blocks with a
/// coefficient row expanded from hash("SEDNA/SYM" || symbol_len || blocks || j),
/// so coefficients depend only on public parameters and the index.
struct RatelessParams {
  std::uint64_t message_len = 0;
  std::uint32_t symbol_len = 0;
  double epsilon = 0.05;

  /// Validating constructor: S >= 1, symbol_len >= 1, epsilon > 0.
  static RatelessParams make(std::uint64_t message_len, std::uint32_t symbol_len, double epsilon);

  /// epsilon quantised to parts per million; all threshold arithmetic is exact
  /// integer arithmetic on this value.
  std::uint64_t epsilon_ppm() const;
  std::uint64_t source_blocks() const;
  /// K = ceil((1 + epsilon) * S / symbol_len).
  std::uint64_t decode_threshold() const;
};

std::uint64_t decode_threshold(std::uint64_t message_len, std::uint32_t symbol_len, double epsilon);
std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b);

struct Symbol {
  std::uint64_t index = 0;
  Bytes value;
  bool operator==(const Symbol&) const = default;
};

enum class DecodeStatus { kSuccess, kRankDeficient, kInconsistent };

struct DecodeOutcome {
  DecodeStatus status = DecodeStatus::kRankDeficient;
  std::size_t rank = 0;
  Message message;  // populated only on success

  bool ok() const { return status == DecodeStatus::kSuccess; }
};

Bytes coefficient_row(const RatelessParams& params, std::uint64_t index);

Symbol rateless_symbol(ByteView message, std::uint64_t index, const RatelessParams& params);

/// Gaussian elimination over GF(256) on every supplied symbol. Order of the
/// input does not matter. Throws Errc::kInvalidConfig on duplicate indices or
/// wrong symbol lengths.
DecodeOutcome rateless_decode(std::span<const Symbol> symbols, const RatelessParams& params);

/// Rank of the coefficient matrix of the given symbols (values are ignored).
std::size_t symbol_rank(std::span<const Symbol> symbols, const RatelessParams& params);
std::size_t coefficient_rank(std::span<const std::uint64_t> indices, const RatelessParams& params);

inline constexpr std::uint32_t kMaxMdsShares = 255;

/// Systematic Reed-Solomon code: shares 0..k-1 are the message blocks, share j
/// is the evaluation at field point j of the degree < k interpolant.
struct MdsParams {
  std::uint32_t shares_total = 1;
  std::uint32_t shares_needed = 1;
  std::uint64_t message_len = 0;

  static MdsParams make(std::uint32_t m, std::uint32_t k, std::uint64_t message_len);
  std::uint64_t share_len() const;
};

struct Share {
  std::uint32_t index = 0;
  Bytes value;
  bool operator==(const Share&) const = default;
};

std::vector<Share> mds_encode(ByteView message, const MdsParams& params);
// Any index below kMaxMdsShares, not only those below shares_total.
Share mds_share(ByteView message, std::uint32_t index, const MdsParams& params);
/// Reconstructs from the k lowest distinct indices supplied. Throws
/// Errc::kNeedMoreShares with fewer than k distinct shares.
Message mds_decode(std::span<const Share> shares, const MdsParams& params);

Bytes naive_package(ByteView message);

struct DeltaCodeEstimate {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double rate() const { return trials == 0 ? 0.0 : double(failures) / double(trials); }
};

/// Fraction of trials in which `symbols` random distinct indices yield a
/// coefficient matrix of rank below source_blocks(). Defaults to K symbols.
/// Deterministic for a fixed seed; each trial seeds itself from (seed, trial).
DeltaCodeEstimate estimate_delta_code(const RatelessParams& params, std::uint64_t trials,
                                      std::uint64_t seed,
                                      std::optional<std::uint64_t> symbols = std::nullopt);

/// Exact failure probability of a uniform random `symbols` x `blocks` matrix
/// over GF(256): 1 - prod_{i=0}^{blocks-1} (1 - 256^(i - symbols)).
double dense_code_failure_probability(std::uint64_t blocks, std::uint64_t symbols);

/// delta_code used by the planner for a parameterisation: the exact dense-code
/// value above, which the measured table validates.
double delta_code(const RatelessParams& params);

struct MeasuredDeltaCode {
  std::uint64_t message_len;
  std::uint32_t symbol_len;
  std::uint64_t symbols;
  std::uint64_t trials;
  std::uint64_t seed;
  std::uint64_t failures;
};

/// Monte Carlo measurements frozen from estimate_delta_code runs.
std::span<const MeasuredDeltaCode> measured_delta_code_table();

/// Measured failure rate for decoding from `symbols` symbols over `blocks`
/// source blocks: the table row of equal redundancy (symbols - blocks) with the
/// most trials, or the highest-redundancy row beyond the table. 1 when
/// symbols < blocks.
double measured_delta_code(std::uint64_t blocks, std::uint64_t symbols);

}  // namespace sedna::codec
