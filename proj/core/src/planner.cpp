#include "sedna/planner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sedna/codec.hpp"
#include "sedna/error.hpp"

namespace sedna::planner {

using protocol::Variant;

namespace {

double honest_ratio(const PlanInputs& in) { return 1.0 - double(in.c_e) / double(in.n); }

bool failure_within(std::uint32_t n, std::uint32_t c_e, std::uint32_t m, double delta_eff, std::uint64_t k) {
  return analysis::hypergeom_tail_lt({n, n - c_e, m}, k) <= delta_eff;
}

// exact_min_m with a known lower bound on the answer; Pr[H < k] is
// non-increasing in m, so gallop up from `from` and bisect.
std::uint32_t min_m_from(std::uint32_t n, std::uint32_t c_e, double delta_eff, std::uint64_t k, std::uint32_t from) {
  std::uint32_t lo = std::max<std::uint32_t>(from, static_cast<std::uint32_t>(k));
  if (failure_within(n, c_e, lo, delta_eff, k)) return lo;
  std::uint32_t step = 1;
  std::uint32_t hi = lo;
  while (true) {
    hi = static_cast<std::uint32_t>(std::min<std::uint64_t>(std::uint64_t(lo) + step, n));
    if (failure_within(n, c_e, hi, delta_eff, k)) break;
    lo = hi;
    step *= 2;
  }
  // lo fails, hi passes.
  while (hi - lo > 1) {
    const std::uint32_t mid = lo + (hi - lo) / 2;
    if (failure_within(n, c_e, mid, delta_eff, k))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

void check_delta_eff(double delta_eff) {
  if (!(delta_eff > 0.0)) throw Error(Errc::kInfeasibleReliability, "delta must exceed delta_code");
  if (!(delta_eff < 1.0)) throw Error(Errc::kInvalidConfig, "effective failure target must be below 1");
}

}  // namespace

void PlanInputs::validate() const {
  if (n == 0) throw Error(Errc::kInvalidConfig, "n must be positive");
  if (c_e >= n) throw Error(Errc::kInfeasible, "c_e must be below n");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::kInvalidConfig, "delta must lie in (0, 1)");
  if (delta_code && !(*delta_code >= 0.0 && *delta_code < 1.0))
    throw Error(Errc::kInvalidConfig, "delta_code must lie in [0, 1)");
  if (S == 0) throw Error(Errc::kInvalidConfig, "S must be positive");
  if (!(epsilon > 0.0)) throw Error(Errc::kInvalidConfig, "epsilon must be positive");
  if (ell_sym_grid.empty()) throw Error(Errc::kInvalidConfig, "symbol size grid is empty");
  for (auto ell : ell_sym_grid)
    if (ell == 0) throw Error(Errc::kInvalidConfig, "symbol sizes must be positive");
  if (s_max == 0) throw Error(Errc::kInvalidConfig, "s_max must be positive");
}

double closed_form_m(double c_r, double delta_eff, std::uint64_t k) {
  check_delta_eff(delta_eff);
  if (!(c_r > 0.0 && c_r <= 1.0)) throw Error(Errc::kInvalidConfig, "honest ratio must lie in (0, 1]");
  if (k == 0) throw Error(Errc::kInvalidConfig, "closed_form_m needs k >= 1");
  const double b = std::sqrt(2.0 * c_r * std::log(1.0 / delta_eff));
  const double root = (b + std::sqrt(b * b + 4.0 * c_r * double(k))) / (2.0 * c_r);
  return root * root;
}

std::uint32_t exact_min_m(std::uint32_t n, std::uint32_t c_e, double delta_eff, std::uint64_t k) {
  check_delta_eff(delta_eff);
  if (c_e > n) throw Error(Errc::kInvalidConfig, "c_e must not exceed n");
  if (k == 0) throw Error(Errc::kInvalidConfig, "exact_min_m needs k >= 1");
  if (k > n - c_e) throw Error(Errc::kInfeasible, "required honest lanes exceed n - c_e");
  return min_m_from(n, c_e, delta_eff, k, 1);
}

PlanResult plan_naive(const PlanInputs& in) {
  in.validate();
  PlanResult r;
  r.variant = Variant::kNaive;
  r.m = exact_min_m(in.n, in.c_e, in.delta, 1);
  r.k = 1;
  r.K = 1;
  r.m_closed_form = closed_form_m(honest_ratio(in), in.delta, 1);
  r.cost = analysis::bandwidth_cost(Variant::kNaive, in.S, in.M_h, in.M_s, 0, r.m, 1, 1);
  r.success_prob = analysis::single_slot_success(in.n, in.c_e, r.m, 1, 1, 0.0);
  r.early_decode_prob = analysis::early_decode_prob(in.n, in.c_e, r.m, 1, 1);
  return r;
}

PlanResult plan_mds(const PlanInputs& in) {
  in.validate();
  const std::uint32_t honest = in.n - in.c_e;
  std::optional<PlanResult> best;  // within the field limit
  std::uint64_t best_free = std::numeric_limits<std::uint64_t>::max();
  std::uint32_t m_prev = 1;
  for (std::uint32_t k = 1; k <= honest; ++k) {
    // m >= k, so k*M_h + S bounds every cost from here on; it grows with k.
    const std::uint64_t floor_cost = k * in.M_h + in.S;
    const std::uint64_t best_limited = best ? best->cost.l_pub : std::numeric_limits<std::uint64_t>::max();
    if (floor_cost >= best_free && floor_cost >= best_limited) break;
    const std::uint32_t m = min_m_from(in.n, in.c_e, in.delta, k, m_prev);
    m_prev = m;
    const auto cost = analysis::bandwidth_cost(Variant::kMds, in.S, in.M_h, in.M_s, 0, m, k, 1);
    best_free = std::min(best_free, cost.l_pub);
    if (m > codec::kMaxMdsShares) continue;
    if (!best || cost.l_pub < best->cost.l_pub) {
      PlanResult r;
      r.variant = Variant::kMds;
      r.m = m;
      r.k = k;
      r.K = k;
      r.cost = cost;
      best = r;
    }
  }
  if (!best) throw Error(Errc::kInfeasible, "no MDS plan fits within 255 shares");
  PlanResult r = *best;
  r.clamp_binding = best_free < r.cost.l_pub;
  r.m_closed_form = closed_form_m(honest_ratio(in), in.delta, r.k);
  r.success_prob = analysis::single_slot_success(in.n, in.c_e, r.m, 1, r.k, 0.0);
  r.early_decode_prob = analysis::early_decode_prob(in.n, in.c_e, r.m, 1, r.k);
  return r;
}

PlanResult plan_rateless(const PlanInputs& in) {
  in.validate();
  const std::uint32_t honest = in.n - in.c_e;
  std::optional<PlanResult> best;
  bool any_reliable = false;

  auto better = [](const PlanResult& a, const PlanResult& b) {
    if (a.cost.l_pub != b.cost.l_pub) return a.cost.l_pub < b.cost.l_pub;
    if (a.m != b.m) return a.m < b.m;
    if (a.s != b.s) return a.s < b.s;
    return a.ell_sym > b.ell_sym;
  };

  for (const std::uint32_t ell : in.ell_sym_grid) {
    const std::uint64_t K = codec::decode_threshold(in.S, ell, in.epsilon);
    const double dcode = in.delta_code.value_or(codec::dense_code_failure_probability(codec::ceil_div(in.S, ell), K));
    const double delta_eff = in.delta - dcode;
    if (!(delta_eff > 0.0)) continue;
    any_reliable = true;
    for (std::uint32_t s = 1; s <= in.s_max; ++s) {
      const std::uint64_t need = codec::ceil_div(K, s);
      if (need > honest) continue;
      const std::uint32_t m = exact_min_m(in.n, in.c_e, delta_eff, need);
      PlanResult r;
      r.variant = Variant::kRateless;
      r.m = m;
      r.k = 1;
      r.s = s;
      r.ell_sym = ell;
      r.K = K;
      r.delta_code = dcode;
      r.cost = analysis::bandwidth_cost(Variant::kRateless, in.S, in.M_h, in.M_s, ell, m, 1, s, in.epsilon);
      if (!best || better(r, *best)) best = r;
      if (need == 1) break;  // larger s only adds bytes
    }
  }
  if (!any_reliable) throw Error(Errc::kInfeasibleReliability, "delta <= delta_code for every symbol size");
  if (!best) throw Error(Errc::kInfeasible, "no rateless plan meets the failure target");
  PlanResult r = *best;
  r.m_closed_form = closed_form_m(honest_ratio(in), in.delta - r.delta_code, codec::ceil_div(r.K, r.s));
  r.success_prob = analysis::single_slot_success(in.n, in.c_e, r.m, r.s, r.K, r.delta_code);
  r.early_decode_prob = analysis::early_decode_prob(in.n, in.c_e, r.m, r.s, r.K);
  return r;
}

Comparison compare_strategies(const PlanInputs& in) {
  Comparison c;
  c.rows = {plan_naive(in), plan_mds(in), plan_rateless(in)};
  const PlanResult* cheapest = &c.rows.front();
  for (const auto& r : c.rows)
    if (r.cost.l_pub < cheapest->cost.l_pub) cheapest = &r;
  c.cheapest = cheapest->variant;
  return c;
}

std::string csv_header() {
  return "variant,n,c_e,delta,S,m,k,s,ell_sym,K,L_pub,L_min,overhead,success_prob,early_decode_prob,m_closed_form";
}

std::string csv_row(const PlanResult& p, const PlanInputs& in) {
  std::ostringstream o;
  o.precision(12);
  o << protocol::to_string(p.variant) << ',' << in.n << ',' << in.c_e << ',' << in.delta << ',' << in.S << ','
    << p.m << ',' << p.k << ',' << p.s << ',' << p.ell_sym << ',' << p.K << ',' << p.cost.l_pub << ','
    << p.cost.l_min << ',' << p.cost.overhead << ',' << p.success_prob << ',' << p.early_decode_prob << ','
    << p.m_closed_form;
  return o.str();
}

}  // namespace sedna::planner
