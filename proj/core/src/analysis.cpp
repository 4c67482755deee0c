#include "sedna/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "sedna/codec.hpp"
#include "sedna/error.hpp"

namespace sedna::analysis {

namespace {

double log_choose(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

struct Support {
  std::uint64_t lo;
  std::uint64_t hi;
  std::uint64_t mode;
};

Support support(const HypergeomSpec& h) {
  const std::uint64_t failures = h.population - h.successes;
  Support s;
  s.lo = h.draws > failures ? h.draws - failures : 0;
  s.hi = std::min(h.draws, h.successes);
  const auto mode = static_cast<std::uint64_t>(
      (static_cast<long double>(h.draws + 1) * (h.successes + 1)) / (h.population + 2));
  s.mode = std::clamp(mode, s.lo, s.hi);
  return s;
}

// Sum of pmf over [from, to] walking away from the mode via the term ratio.
double sum_down(const HypergeomSpec& h, std::uint64_t from, std::uint64_t to) {
  const double N = double(h.population), K = double(h.successes), n = double(h.draws);
  double term = hypergeom_pmf(h, from);
  double total = term;
  for (std::uint64_t x = from; x > to && term > 0.0; --x) {
    const double xd = double(x);
    term *= xd * (N - K - n + xd) / ((K - xd + 1) * (n - xd + 1));
    total += term;
    if (term < total * 1e-20) break;
  }
  return total;
}

double sum_up(const HypergeomSpec& h, std::uint64_t from, std::uint64_t to) {
  const double N = double(h.population), K = double(h.successes), n = double(h.draws);
  double term = hypergeom_pmf(h, from);
  double total = term;
  for (std::uint64_t x = from; x < to && term > 0.0; ++x) {
    const double xd = double(x);
    term *= (K - xd) * (n - xd) / ((xd + 1) * (N - K - n + xd + 1));
    total += term;
    if (term < total * 1e-20) break;
  }
  return total;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

std::uint64_t required(std::uint64_t K, std::uint32_t s) { return codec::ceil_div(K, s); }

}  // namespace

void HypergeomSpec::validate() const {
  if (successes > population || draws > population)
    throw Error(Errc::kInvalidConfig, "hypergeometric spec needs successes, draws <= population");
}

double hypergeom_pmf(const HypergeomSpec& h, std::uint64_t x) {
  h.validate();
  const auto sup = support(h);
  if (x < sup.lo || x > sup.hi) return 0.0;
  const double lp = log_choose(double(h.successes), double(x)) +
                    log_choose(double(h.population - h.successes), double(h.draws - x)) -
                    log_choose(double(h.population), double(h.draws));
  return std::exp(lp);
}

double hypergeom_tail_ge(const HypergeomSpec& h, std::uint64_t t) {
  h.validate();
  const auto sup = support(h);
  if (t <= sup.lo) return 1.0;
  if (t > sup.hi) return 0.0;
  if (t >= sup.mode) return clamp01(sum_up(h, t, sup.hi));
  return clamp01(1.0 - sum_down(h, t - 1, sup.lo));
}

double hypergeom_tail_lt(const HypergeomSpec& h, std::uint64_t t) {
  h.validate();
  const auto sup = support(h);
  if (t <= sup.lo) return 0.0;
  if (t > sup.hi) return 1.0;
  if (t - 1 <= sup.mode) return clamp01(sum_down(h, t - 1, sup.lo));
  return clamp01(1.0 - sum_up(h, t, sup.hi));
}

double single_slot_success(std::uint32_t n, std::uint32_t c_e, std::uint32_t m, std::uint32_t s, std::uint64_t K,
                           double delta_code) {
  if (c_e > n || m > n || s == 0) throw Error(Errc::kInvalidConfig, "single_slot_success needs c_e, m <= n and s >= 1");
  const HypergeomSpec honest{n, n - c_e, m};
  return (1.0 - delta_code) * hypergeom_tail_ge(honest, required(K, s));
}

std::optional<double> expected_slots_upper(double p) {
  if (!(p > 0.0)) return std::nullopt;
  return 1.0 / p;
}

double early_decode_prob(std::uint32_t n, std::uint32_t c_e, std::uint32_t m, std::uint32_t s, std::uint64_t K) {
  if (c_e > n || m > n || s == 0) throw Error(Errc::kInvalidConfig, "early_decode_prob needs c_e, m <= n and s >= 1");
  if (std::uint64_t(m) * s < K) return 0.0;
  const HypergeomSpec adversarial{n, c_e, m};
  return hypergeom_tail_ge(adversarial, required(K, s));
}

CostBreakdown bandwidth_cost(protocol::Variant variant, std::uint64_t S, std::uint64_t M_h, std::uint64_t M_s,
                             std::uint32_t ell_sym, std::uint32_t m, std::uint32_t k, std::uint32_t s,
                             double epsilon) {
  if (S == 0 || m == 0) throw Error(Errc::kInvalidConfig, "bandwidth_cost needs S >= 1 and m >= 1");
  CostBreakdown c;
  switch (variant) {
    case protocol::Variant::kNaive:
      c.l_pub = m * (M_h + S);
      c.l_min = M_h + S;
      break;
    case protocol::Variant::kMds: {
      if (k == 0) throw Error(Errc::kInvalidConfig, "MDS cost needs k >= 1");
      const std::uint64_t bundle = M_h + codec::ceil_div(S, k);
      c.l_pub = m * bundle;
      c.l_min = k * bundle;
      break;
    }
    case protocol::Variant::kRateless: {
      if (s == 0 || ell_sym == 0) throw Error(Errc::kInvalidConfig, "rateless cost needs s, ell_sym >= 1");
      const std::uint64_t bundle = M_h + std::uint64_t(s) * (M_s + ell_sym);
      const std::uint64_t K = codec::decode_threshold(S, ell_sym, epsilon);
      c.l_pub = m * bundle;
      c.l_min = required(K, s) * bundle;
      break;
    }
  }
  c.overhead = double(c.l_pub) / double(S);
  return c;
}

double overhead_floor(protocol::Variant variant, std::uint32_t n, std::uint32_t c_e, double epsilon,
                      std::uint32_t m_opt) {
  if (variant == protocol::Variant::kNaive) return double(m_opt);
  if (c_e >= n) throw Error(Errc::kInfeasible, "coded variants need at least one honest lane");
  const double honest = 1.0 - double(c_e) / double(n);
  return variant == protocol::Variant::kMds ? 1.0 / honest : (1.0 + epsilon) / honest;
}

double it_lower_bound(std::uint32_t n, std::uint32_t c_e, double S) {
  if (c_e >= n) throw Error(Errc::kInfeasible, "no scheme survives c_e >= n");
  return double(n) * S / double(n - c_e);
}

std::uint64_t leakage_bound(std::uint64_t r, std::uint32_t ell_sym) { return r * ell_sym * 8; }

}  // namespace sedna::analysis
