#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sedna/analysis.hpp"
#include "sedna/protocol.hpp"

namespace sedna::planner {

inline const std::vector<std::uint32_t> kDefaultSymbolGrid = {64, 128, 256, 512, 1024, 2048, 4096};

struct PlanInputs {
  std::uint32_t n = 256;
  std::uint32_t c_e = 32;
  double delta = 1e-9;
  /// Fixed delta_code for rateless plans; when unset the exact dense-code
  /// failure probability of each (symbol size, K) point is used.
  std::optional<double> delta_code;
  std::uint64_t S = 4096;
  std::uint64_t M_h = 200;
  std::uint64_t M_s = 8;
  double epsilon = 0.05;
  std::vector<std::uint32_t> ell_sym_grid = kDefaultSymbolGrid;
  std::uint32_t s_max = 64;

  /// Throws Errc::kInvalidConfig on out-of-range fields.
  void validate() const;
};

struct PlanResult {
  protocol::Variant variant = protocol::Variant::kNaive;
  std::uint32_t m = 0;
  std::uint32_t k = 0;        // MDS shares needed; 1 otherwise
  std::uint32_t s = 1;        // symbols per bundle (rateless)
  std::uint32_t ell_sym = 0;  // rateless symbol size
  std::uint64_t K = 1;        // distinct symbols needed to decode
  double m_closed_form = 0.0;
  analysis::CostBreakdown cost;
  double success_prob = 0.0;
  double early_decode_prob = 0.0;
  double delta_code = 0.0;
  bool clamp_binding = false;  // MDS: the m <= 255 field limit excluded a cheaper plan
};

/// Chernoff-style sufficient fanout ((b + sqrt(b^2 + 4 c_r k)) / (2 c_r))^2
/// with b = sqrt(2 c_r ln(1/delta_eff)).
double closed_form_m(double c_r, double delta_eff, std::uint64_t k);

/// Smallest m in [k, n] with Pr[H < k] <= delta_eff, H ~ Hypergeom(n, n - c_e, m).
std::uint32_t exact_min_m(std::uint32_t n, std::uint32_t c_e, double delta_eff, std::uint64_t k);

PlanResult plan_naive(const PlanInputs& in);
PlanResult plan_mds(const PlanInputs& in);
PlanResult plan_rateless(const PlanInputs& in);

struct Comparison {
  std::vector<PlanResult> rows;  // naive, mds, rateless
  protocol::Variant cheapest = protocol::Variant::kNaive;
};

Comparison compare_strategies(const PlanInputs& in);

std::string csv_header();
std::string csv_row(const PlanResult& plan, const PlanInputs& in);

}  // namespace sedna::planner
