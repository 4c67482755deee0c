#include "sedna/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sedna/crypto.hpp"
#include "sedna/error.hpp"
#include "sedna/gf256.hpp"
#include "sedna/rng.hpp"

namespace sedna::codec {
namespace {

constexpr std::uint64_t kPpm = 1'000'000;

// Block c of the zero-padded message, copied into out (size block_len).
void load_block(ByteView message, std::uint64_t c, std::uint64_t block_len,
                std::span<std::uint8_t> out) {
  std::fill(out.begin(), out.end(), std::uint8_t{0});
  const std::uint64_t start = c * block_len;
  if (start >= message.size()) return;
  const std::uint64_t n = std::min<std::uint64_t>(block_len, message.size() - start);
  std::copy_n(message.begin() + start, n, out.begin());
}

void check_message(ByteView message, std::uint64_t expected) {
  if (message.size() != expected) {
    throw Error(Errc::kInvalidConfig, "message length " + std::to_string(message.size()) +
                                          " does not match parameters (" +
                                          std::to_string(expected) + ")");
  }
}

// Row-reduces `rows` (each `cols` coefficient bytes followed by payload bytes)
// to reduced row echelon form over the first `cols` columns. Returns the rank;
// pivot rows end up first, ordered by pivot column.
std::size_t row_reduce(std::vector<Bytes>& rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    auto& prow = rows[rank];
    gf256::scale(prow, gf256::inv(prow[col]));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][col] != 0) gf256::mul_add(rows[r], prow, rows[r][col]);
    }
    ++rank;
  }
  return rank;
}

void check_symbols(std::span<const Symbol> symbols, const RatelessParams& params,
                   bool check_values) {
  std::set<std::uint64_t> seen;
  for (const auto& s : symbols) {
    if (!seen.insert(s.index).second) {
      throw Error(Errc::kInvalidConfig, "duplicate symbol index " + std::to_string(s.index));
    }
    if (check_values && s.value.size() != params.symbol_len) {
      throw Error(Errc::kInvalidConfig, "symbol " + std::to_string(s.index) + " has length " +
                                            std::to_string(s.value.size()));
    }
  }
}

}  // namespace

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0 ? 1 : 0); }

RatelessParams RatelessParams::make(std::uint64_t message_len, std::uint32_t symbol_len,
                                    double epsilon) {
  if (message_len == 0) throw Error(Errc::kInvalidConfig, "message length must be >= 1");
  if (symbol_len == 0) throw Error(Errc::kInvalidConfig, "symbol length must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(Errc::kInvalidConfig, "epsilon must be > 0");
  }
  RatelessParams p{message_len, symbol_len, epsilon};
  if (p.epsilon_ppm() == 0) throw Error(Errc::kInvalidConfig, "epsilon below 1e-6 resolution");
  return p;
}

std::uint64_t RatelessParams::epsilon_ppm() const {
  return static_cast<std::uint64_t>(std::llround(epsilon * double(kPpm)));
}

std::uint64_t RatelessParams::source_blocks() const { return ceil_div(message_len, symbol_len); }

__extension__ using u128 = unsigned __int128;

std::uint64_t RatelessParams::decode_threshold() const {
  const u128 num = static_cast<u128>(kPpm + epsilon_ppm()) * message_len;
  const u128 den = static_cast<u128>(kPpm) * symbol_len;
  return static_cast<std::uint64_t>(num / den + (num % den != 0 ? 1 : 0));
}

std::uint64_t decode_threshold(std::uint64_t message_len, std::uint32_t symbol_len,
                               double epsilon) {
  return RatelessParams::make(message_len, symbol_len, epsilon).decode_threshold();
}

Bytes coefficient_row(const RatelessParams& params, std::uint64_t index) {
  const std::uint64_t blocks = params.source_blocks();
  Bytes seed_input;
  append(seed_input, crypto::kSymbolTag);
  put_u32(seed_input, params.symbol_len);
  put_u64(seed_input, blocks);
  put_u64(seed_input, index);
  const crypto::Digest seed = crypto::hash(seed_input);

  Bytes row;
  row.reserve(blocks + crypto::kDigestSize);
  append(row, seed.view());
  Bytes expand(seed.bytes.begin(), seed.bytes.end());
  expand.resize(crypto::kDigestSize + 4);
  for (std::uint32_t counter = 1; row.size() < blocks; ++counter) {
    for (int i = 0; i < 4; ++i) {
      expand[crypto::kDigestSize + i] = static_cast<std::uint8_t>(counter >> (24 - 8 * i));
    }
    append(row, crypto::hash(expand).view());
  }
  row.resize(blocks);
  return row;
}

Symbol rateless_symbol(ByteView message, std::uint64_t index, const RatelessParams& params) {
  check_message(message, params.message_len);
  const Bytes row = coefficient_row(params, index);
  Symbol out{index, Bytes(params.symbol_len, 0)};
  Bytes block(params.symbol_len);
  for (std::uint64_t c = 0; c < row.size(); ++c) {
    if (row[c] == 0) continue;
    load_block(message, c, params.symbol_len, block);
    gf256::mul_add(out.value, block, row[c]);
  }
  return out;
}

DecodeOutcome rateless_decode(std::span<const Symbol> symbols, const RatelessParams& params) {
  check_symbols(symbols, params, true);
  const std::size_t blocks = params.source_blocks();

  std::vector<const Symbol*> ordered;
  ordered.reserve(symbols.size());
  for (const auto& s : symbols) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const Symbol* a, const Symbol* b) { return a->index < b->index; });

  std::vector<Bytes> rows;
  rows.reserve(ordered.size());
  for (const Symbol* s : ordered) {
    Bytes row = coefficient_row(params, s->index);
    append(row, s->value);
    rows.push_back(std::move(row));
  }

  DecodeOutcome out;
  out.rank = row_reduce(rows, blocks);
  for (std::size_t r = out.rank; r < rows.size(); ++r) {
    // Coefficients are all zero past the rank; a nonzero payload means the
    // symbols cannot come from a single message.
    if (std::any_of(rows[r].begin() + blocks, rows[r].end(), [](auto b) { return b != 0; })) {
      out.status = DecodeStatus::kInconsistent;
      return out;
    }
  }
  if (out.rank < blocks) {
    out.status = DecodeStatus::kRankDeficient;
    return out;
  }
  out.status = DecodeStatus::kSuccess;
  out.message.reserve(blocks * params.symbol_len);
  for (std::size_t c = 0; c < blocks; ++c) {
    out.message.insert(out.message.end(), rows[c].begin() + blocks, rows[c].end());
  }
  out.message.resize(params.message_len);
  return out;
}

std::size_t coefficient_rank(std::span<const std::uint64_t> indices, const RatelessParams& params) {
  std::vector<Bytes> rows;
  rows.reserve(indices.size());
  for (auto j : indices) rows.push_back(coefficient_row(params, j));
  return row_reduce(rows, params.source_blocks());
}

std::size_t symbol_rank(std::span<const Symbol> symbols, const RatelessParams& params) {
  check_symbols(symbols, params, false);
  std::vector<std::uint64_t> indices;
  indices.reserve(symbols.size());
  for (const auto& s : symbols) indices.push_back(s.index);
  return coefficient_rank(indices, params);
}

MdsParams MdsParams::make(std::uint32_t m, std::uint32_t k, std::uint64_t message_len) {
  if (k < 1 || k > m) throw Error(Errc::kInvalidConfig, "MDS code requires 1 <= k <= m");
  if (m > kMaxMdsShares) {
    throw Error(Errc::kInvalidConfig, "MDS code over GF(256) supports at most 255 shares");
  }
  if (message_len == 0) throw Error(Errc::kInvalidConfig, "message length must be >= 1");
  return MdsParams{m, k, message_len};
}

std::uint64_t MdsParams::share_len() const { return ceil_div(message_len, shares_needed); }

namespace {

// Lagrange basis values L_c(x) for interpolation points `points`, evaluated at x.
Bytes lagrange_row(std::span<const std::uint8_t> points, std::uint8_t x) {
  Bytes row(points.size(), 0);
  for (std::size_t c = 0; c < points.size(); ++c) {
    if (points[c] == x) {
      std::fill(row.begin(), row.end(), std::uint8_t{0});
      row[c] = 1;
      return row;
    }
  }
  for (std::size_t c = 0; c < points.size(); ++c) {
    std::uint8_t num = 1;
    std::uint8_t den = 1;
    for (std::size_t d = 0; d < points.size(); ++d) {
      if (d == c) continue;
      num = gf256::mul(num, x ^ points[d]);
      den = gf256::mul(den, points[c] ^ points[d]);
    }
    row[c] = gf256::mul(num, gf256::inv(den));
  }
  return row;
}

}  // namespace

Share mds_share(ByteView message, std::uint32_t index, const MdsParams& params) {
  check_message(message, params.message_len);
  if (index >= kMaxMdsShares) {
    throw Error(Errc::kInvalidConfig, "MDS share index " + std::to_string(index) + " out of range");
  }
  const std::uint64_t len = params.share_len();
  Bytes points(params.shares_needed);
  std::iota(points.begin(), points.end(), std::uint8_t{0});
  const Bytes row = lagrange_row(points, static_cast<std::uint8_t>(index));
  Share out{index, Bytes(len, 0)};
  Bytes block(len);
  for (std::uint32_t c = 0; c < params.shares_needed; ++c) {
    if (row[c] == 0) continue;
    load_block(message, c, len, block);
    gf256::mul_add(out.value, block, row[c]);
  }
  return out;
}

std::vector<Share> mds_encode(ByteView message, const MdsParams& params) {
  std::vector<Share> shares;
  shares.reserve(params.shares_total);
  for (std::uint32_t j = 0; j < params.shares_total; ++j) {
    shares.push_back(mds_share(message, j, params));
  }
  return shares;
}

Message mds_decode(std::span<const Share> shares, const MdsParams& params) {
  const std::uint64_t len = params.share_len();
  std::vector<const Share*> chosen;
  std::set<std::uint32_t> seen;
  std::vector<const Share*> ordered;
  for (const auto& s : shares) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](const Share* a, const Share* b) { return a->index < b->index; });
  for (const Share* s : ordered) {
    if (chosen.size() == params.shares_needed) break;
    if (s->index >= kMaxMdsShares || s->value.size() != len) {
      throw Error(Errc::kInvalidConfig, "malformed MDS share " + std::to_string(s->index));
    }
    if (seen.insert(s->index).second) chosen.push_back(s);
  }
  if (chosen.size() < params.shares_needed) {
    throw Error(Errc::kNeedMoreShares, "have " + std::to_string(chosen.size()) + " distinct shares, need " +
                                           std::to_string(params.shares_needed));
  }
  Bytes points;
  for (const Share* s : chosen) points.push_back(static_cast<std::uint8_t>(s->index));

  Message out;
  out.reserve(params.shares_needed * len);
  Bytes block(len);
  for (std::uint32_t c = 0; c < params.shares_needed; ++c) {
    const Bytes row = lagrange_row(points, static_cast<std::uint8_t>(c));
    std::fill(block.begin(), block.end(), std::uint8_t{0});
    for (std::size_t j = 0; j < chosen.size(); ++j) gf256::mul_add(block, chosen[j]->value, row[j]);
    append(out, block);
  }
  out.resize(params.message_len);
  return out;
}

Bytes naive_package(ByteView message) { return Bytes(message.begin(), message.end()); }

DeltaCodeEstimate estimate_delta_code(const RatelessParams& params, std::uint64_t trials,
                                      std::uint64_t seed, std::optional<std::uint64_t> symbols) {
  if (trials == 0) throw Error(Errc::kInvalidConfig, "trials must be >= 1");
  const std::uint64_t count = symbols.value_or(params.decode_threshold());
  const std::uint64_t blocks = params.source_blocks();
  std::vector<std::uint8_t> failed(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::set<std::uint64_t> picked;
    while (picked.size() < count) picked.insert(rng());
    std::vector<std::uint64_t> indices(picked.begin(), picked.end());
    failed[t] = coefficient_rank(indices, params) < blocks ? 1 : 0;
  });
  return {trials, static_cast<std::uint64_t>(std::count(failed.begin(), failed.end(), 1))};
}

double dense_code_failure_probability(std::uint64_t blocks, std::uint64_t symbols) {
  if (symbols < blocks) return 1.0;
  double log_success = 0.0;
  for (std::uint64_t i = 0; i < blocks; ++i) {
    const double exponent = double(i) - double(symbols);
    log_success += std::log1p(-std::exp2(8.0 * exponent));
  }
  return -std::expm1(log_success);
}

double delta_code(const RatelessParams& params) {
  return dense_code_failure_probability(params.source_blocks(), params.decode_threshold());
}

std::span<const MeasuredDeltaCode> measured_delta_code_table() {
  // Each row is estimate_delta_code(make(message_len, symbol_len, 0.05), trials,
  // seed, symbols); tests re-run every row and require the same failure count.
  static constexpr MeasuredDeltaCode kTable[] = {
      // message_len, symbol_len, symbols, trials, seed, failures
      {4096, 256, 16, 100000, 2024, 407},
      {4096, 256, 17, 400000, 2024, 13},
      {4096, 256, 18, 50000, 2024, 0},
      {16384, 256, 64, 5000, 2024, 15},
      {16384, 256, 65, 10000, 2024, 0},
  };
  return kTable;
}

double measured_delta_code(std::uint64_t blocks, std::uint64_t symbols) {
  if (symbols < blocks) return 1.0;
  const std::uint64_t want = symbols - blocks;
  const MeasuredDeltaCode* best = nullptr;
  std::uint64_t best_r = 0;
  for (const auto& row : measured_delta_code_table()) {
    const std::uint64_t r = row.symbols - ceil_div(row.message_len, row.symbol_len);
    if (r > want) continue;
    if (!best || r > best_r || (r == best_r && row.trials > best->trials)) {
      best = &row;
      best_r = r;
    }
  }
  if (!best) return 1.0;
  return double(best->failures) / double(best->trials);
}

}  // namespace sedna::codec
