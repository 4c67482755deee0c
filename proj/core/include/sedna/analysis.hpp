#pragma once

#include <cstdint>
#include <optional>

#include "sedna/protocol.hpp"

namespace sedna::analysis {

/// Hypergeometric draw: `draws` lanes without replacement from `population`,
/// of which `successes` are marked.
struct HypergeomSpec {
  std::uint64_t population = 0;
  std::uint64_t successes = 0;
  std::uint64_t draws = 0;

  void validate() const;
};

double hypergeom_pmf(const HypergeomSpec& spec, std::uint64_t x);
/// Pr[X >= threshold] and Pr[X < threshold]. Each tail is summed on the side
/// away from the mode so tiny probabilities keep their relative accuracy.
double hypergeom_tail_ge(const HypergeomSpec& spec, std::uint64_t threshold);
double hypergeom_tail_lt(const HypergeomSpec& spec, std::uint64_t threshold);

/// Lower bound on the probability that one slot includes the transaction:
/// (1 - delta_code) * Pr[H >= ceil(K/s)], H ~ Hypergeom(n, n - c_e, m).
double single_slot_success(std::uint32_t n, std::uint32_t c_e, std::uint32_t m, std::uint32_t s,
                           std::uint64_t K, double delta_code);

/// Geometric bound 1/p on the expected number of slots; nullopt when p = 0.
std::optional<double> expected_slots_upper(double p);

/// Pr[A >= ceil(K/s)] with A ~ Hypergeom(n, c_e, m); exactly 0 when m*s < K.
double early_decode_prob(std::uint32_t n, std::uint32_t c_e, std::uint32_t m, std::uint32_t s, std::uint64_t K);

struct CostBreakdown {
  std::uint64_t l_pub = 0;
  std::uint64_t l_min = 0;
  double overhead = 0.0;  // l_pub / S
};

/// Published and minimum bytes for one slot's worth of bundles. S/k and K/s
/// are rounded up. `k` is used by MDS only; `s`, `ell_sym` and `epsilon` by
/// rateless only.
CostBreakdown bandwidth_cost(protocol::Variant variant, std::uint64_t S, std::uint64_t M_h, std::uint64_t M_s,
                             std::uint32_t ell_sym, std::uint32_t m, std::uint32_t k, std::uint32_t s,
                             double epsilon = 0.05);

/// Asymptotic overhead floors: m_opt (naive), 1/(1 - c_e/n) (MDS),
/// (1 + epsilon)/(1 - c_e/n) (rateless).
double overhead_floor(protocol::Variant variant, std::uint32_t n, std::uint32_t c_e, double epsilon,
                      std::uint32_t m_opt);

/// n * S / (n - c_e): least total length any scheme tolerating c_e censors
/// can publish.
double it_lower_bound(std::uint32_t n, std::uint32_t c_e, double S);

/// Upper bound on payload bits revealed by r symbols of ell_sym bytes.
std::uint64_t leakage_bound(std::uint64_t r, std::uint32_t ell_sym);

}  // namespace sedna::analysis
