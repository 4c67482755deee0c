#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <type_traits>

#include "CLI11.hpp"
#include "sedna/analysis.hpp"
#include "sedna/codec.hpp"
#include "sedna/error.hpp"
#include "sedna/gf256.hpp"
#include "sedna/planner.hpp"
#include "sedna/simulation.hpp"
#include "sedna/version.hpp"

namespace sedna::cli {

namespace {

using protocol::Variant;

constexpr std::string_view kSpecBegin = "# --- spec ---";
constexpr std::string_view kSpecEnd = "# --- end spec ---";

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>)
    return v ? "true" : "false";
  else if constexpr (std::is_floating_point_v<T>)
    return fmt(v);
  else if constexpr (std::is_arithmetic_v<T>)
    return std::to_string(v);
  else
    return std::string(v);
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error(Errc::kInvalidConfig, "not a number: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw Error(Errc::kInvalidConfig, "not an integer: " + s);
  return v;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s)) out.push_back(parse_double(item));
  return out;
}

std::vector<std::uint64_t> parse_u64s(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(s)) out.push_back(parse_u64(item));
  return out;
}

std::vector<std::uint32_t> parse_u32s(const std::string& s) {
  std::vector<std::uint32_t> out;
  for (auto v : parse_u64s(s)) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

std::vector<Variant> parse_variants(const std::string& s) {
  if (s == "all") return {Variant::kNaive, Variant::kMds, Variant::kRateless};
  std::vector<Variant> out;
  for (const auto& item : split(s)) out.push_back(protocol::parse_variant(item));
  if (out.empty()) throw Error(Errc::kInvalidConfig, "no variant given");
  return out;
}

// Options registered through Spec are the reproducible parameter set of a
// command: every one of them, defaulted or not, is echoed into the CSV header.
class Spec {
 public:
  explicit Spec(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& desc) {
    auto* o = app_->add_option("--" + name, var, desc);
    o->default_str(fmt_value(var));
    params_.push_back(o);
    return o;
  }

  CLI::App* app() const { return app_; }

  std::vector<std::pair<std::string, std::string>> resolved() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto* o : params_) {
      const std::string value = o->count() > 0 ? o->results().back() : o->get_default_str();
      out.emplace_back(o->get_single_name(), value);
    }
    return out;
  }

 private:
  CLI::App* app_;
  std::vector<CLI::Option*> params_;
};

std::string metadata(const Spec& spec) {
  std::ostringstream o;
  o << "# sedna " << kVersion << '\n';
  o << "# command = " << spec.app()->get_name() << '\n';
  o << kSpecBegin << '\n';
  o << "# [" << spec.app()->get_name() << "]\n";
  for (const auto& [k, v] : spec.resolved()) o << "# " << k << " = " << v << '\n';
  o << kSpecEnd << '\n';
  return o.str();
}

struct Censors {
  std::uint32_t ce = 32;
  std::int64_t f = -1;
  std::int64_t c = -1;

  void add_to(Spec& spec) {
    spec.add("ce", ce, "effective censored lanes c_e");
    spec.add("f", f, "Byzantine bound f (default (n-1)/3); used with --c");
    spec.add("c", c, "censorship parameter c; when >= 0 c_e is derived from (n, f, c)");
  }

  std::uint32_t resolve(std::uint32_t n) const {
    if (c < 0) return ce;
    const std::int64_t fb = f >= 0 ? f : (std::int64_t(n) - 1) / 3;
    if (c >= n) throw Error(Errc::kInvalidConfig, "c must be below n");
    return protocol::effective_censors(n, static_cast<std::uint32_t>(fb), static_cast<std::uint32_t>(c));
  }
};

std::string join_u32(const std::vector<std::uint32_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// ---- plan ----

struct PlanArgs {
  std::string variant = "all";
  std::uint32_t n = 256;
  Censors censors;
  double delta = 1e-9;
  double delta_code = -1;
  std::uint64_t S = 4096;
  std::uint64_t M_h = 200;
  std::uint64_t M_s = 8;
  double epsilon = 0.05;
  std::string ell_grid = join_u32(planner::kDefaultSymbolGrid);
  std::uint32_t s_max = 64;

  void add_to(Spec& spec) {
    spec.add("variant", variant, "naive, mds, rateless, a comma list, or all");
    spec.add("n", n, "lane count");
    censors.add_to(spec);
    spec.add("delta", delta, "per-slot failure target");
    spec.add("delta-code", delta_code, "fixed rateless delta_code; negative uses the dense-code value");
    spec.add("S", S, "message length in bytes (sigma || payload)");
    spec.add("Mh", M_h, "per-bundle metadata bytes");
    spec.add("Ms", M_s, "per-symbol metadata bytes");
    spec.add("epsilon", epsilon, "rateless reception overhead");
    spec.add("ell-grid", ell_grid, "candidate symbol sizes");
    spec.add("s-max", s_max, "largest symbols-per-bundle considered");
  }

  planner::PlanInputs inputs() const {
    planner::PlanInputs in;
    in.n = n;
    in.c_e = censors.resolve(n);
    in.delta = delta;
    if (delta_code >= 0) in.delta_code = delta_code;
    in.S = S;
    in.M_h = M_h;
    in.M_s = M_s;
    in.epsilon = epsilon;
    in.ell_sym_grid = parse_u32s(ell_grid);
    in.s_max = s_max;
    return in;
  }
};

planner::PlanResult plan_one(Variant v, const planner::PlanInputs& in) {
  switch (v) {
    case Variant::kNaive: return planner::plan_naive(in);
    case Variant::kMds: return planner::plan_mds(in);
    case Variant::kRateless: return planner::plan_rateless(in);
  }
  throw Error(Errc::kInvalidConfig, "unknown variant");
}

std::string cmd_plan(const PlanArgs& a) {
  const auto in = a.inputs();
  std::ostringstream o;
  o << planner::csv_header() << '\n';
  for (const auto v : parse_variants(a.variant)) o << planner::csv_row(plan_one(v, in), in) << '\n';
  return o.str();
}

// ---- simulate ----

struct SimulateArgs {
  std::string variant = "rateless";
  std::uint32_t n = 256;
  Censors censors;
  std::uint32_t m = 20;
  std::uint32_t k = 1;
  std::uint32_t s = 1;
  std::uint32_t ell = 256;
  double epsilon = 0.05;
  std::uint64_t payload_len = 4064;
  std::string payload_file;
  bool collects = true;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::uint64_t max_slots = 10'000;
  std::uint64_t fee_floor = 1;

  void add_to(Spec& spec) {
    spec.add("variant", variant, "naive, mds or rateless");
    spec.add("n", n, "lane count");
    censors.add_to(spec);
    spec.add("m", m, "lanes contacted per slot");
    spec.add("k", k, "MDS shares needed");
    spec.add("s", s, "rateless symbols per bundle");
    spec.add("ell", ell, "rateless symbol size in bytes");
    spec.add("epsilon", epsilon, "rateless reception overhead");
    spec.add("payload-len", payload_len, "random payload length per trial");
    spec.add("payload-file", payload_file, "send this file as the payload of every trial");
    spec.add("adversary-collects", collects, "censored lanes hand their symbols to the adversary");
    spec.add("trials", trials, "independent trials");
    spec.add("seed", seed, "base seed");
    spec.add("max-slots", max_slots, "slots before a trial counts as censored");
    spec.add("fee-floor", fee_floor, "admission fee floor per byte");
  }

  sim::SimConfig config() const {
    sim::SimConfig c;
    c.n = n;
    c.censored = censors.resolve(n);
    c.strategy.variant = protocol::parse_variant(variant);
    c.strategy.lanes = m;
    c.strategy.shares_needed = k;
    c.strategy.symbols_per_bundle = s;
    c.strategy.symbol_len = ell;
    c.strategy.epsilon = epsilon;
    c.payload_len = payload_len;
    if (!payload_file.empty()) {
      std::ifstream f(payload_file, std::ios::binary);
      if (!f) throw std::runtime_error("cannot read payload file " + payload_file);
      c.payload.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    c.adversary_collects = collects;
    c.max_slots = max_slots;
    c.policy.fee_floor = fee_floor;
    c.fee_per_byte = std::max<std::uint64_t>(fee_floor, 1);
    return c;
  }
};

std::uint64_t sim_message_len(const sim::SimConfig& c) {
  return crypto::kRandomnessSize + (c.payload.empty() ? c.payload_len : c.payload.size());
}

std::string cmd_simulate(const SimulateArgs& a) {
  if (a.trials == 0) throw Error(Errc::kInvalidConfig, "trials must be positive");
  const auto config = a.config();
  config.validate();
  const auto params = protocol::coding_params(config.strategy, sim_message_len(config));
  const auto results = sim::run_trials(config, a.trials, a.seed);
  std::ostringstream o;
  o << "trial,seed,variant,n,c_e,m,s,ell_sym,K,slots_to_inclusion,included,outcome,bytes_published,"
       "adversary_decode_slot\n";
  const std::uint32_t s = config.strategy.variant == Variant::kRateless ? config.strategy.symbols_per_bundle : 1;
  for (const auto& r : results) {
    o << r.trial << ',' << r.seed << ',' << protocol::to_string(config.strategy.variant) << ',' << config.n << ','
      << config.censored << ',' << config.strategy.lanes << ',' << s << ',' << protocol::symbol_value_len(params)
      << ',' << r.decode_threshold << ',' << r.slots_to_inclusion << ',' << (r.included() ? "true" : "false") << ','
      << sim::to_string(r.outcome) << ',' << r.bytes_published << ','
      << (r.adversary_decode_slot ? std::to_string(*r.adversary_decode_slot) : "never") << '\n';
  }
  return o.str();
}

// ---- sweep ----

struct SweepArgs {
  std::string axis = "S";
  std::string values;
  std::string variant = "all";
  std::uint32_t n = 256;
  double ce_ratio = 0.125;
  double delta = 1e-9;
  double delta_code = -1;
  std::uint64_t S = 4096;
  std::uint64_t M_h = 200;
  std::uint64_t M_s = 8;
  double epsilon = 0.05;
  std::string ell_grid = join_u32(planner::kDefaultSymbolGrid);
  std::uint32_t s_max = 64;
  std::uint32_t m = 20;
  std::uint32_t k = 8;
  std::uint32_t s = 1;
  std::uint32_t ell = 256;
  std::uint64_t sim_trials = 0;
  std::uint64_t seed = 1;

  void add_to(Spec& spec) {
    spec.add("axis", axis, "S, m, s, ce_ratio, delta or n");
    spec.add("values", values, "comma list of axis values; empty uses the built-in grid");
    spec.add("variant", variant, "naive, mds, rateless, a comma list, or all");
    spec.add("n", n, "lane count");
    spec.add("ce-ratio", ce_ratio, "c_e / n; c_e is rounded to the nearest lane");
    spec.add("delta", delta, "per-slot failure target");
    spec.add("delta-code", delta_code, "fixed rateless delta_code; negative uses the dense-code value");
    spec.add("S", S, "message length in bytes");
    spec.add("Mh", M_h, "per-bundle metadata bytes");
    spec.add("Ms", M_s, "per-symbol metadata bytes");
    spec.add("epsilon", epsilon, "rateless reception overhead");
    spec.add("ell-grid", ell_grid, "planner symbol sizes");
    spec.add("s-max", s_max, "planner symbols-per-bundle limit");
    spec.add("m", m, "fanout for the s axis");
    spec.add("k", k, "MDS shares needed on the m axis");
    spec.add("s", s, "rateless symbols per bundle on the m axis");
    spec.add("ell", ell, "rateless symbol size on the m and s axes");
    spec.add("sim-trials", sim_trials, "single-slot ledger simulations per row (0 disables)");
    spec.add("seed", seed, "base seed for simulations");
  }
};

std::vector<double> default_grid(const std::string& axis) {
  std::vector<double> v;
  if (axis == "S") {
    for (int e = 8; e <= 22; ++e) v.push_back(std::ldexp(1.0, e));
  } else if (axis == "m" || axis == "s") {
    for (int i = 1; i <= 64; ++i) v.push_back(i);
  } else if (axis == "ce_ratio") {
    v = {0.05, 0.10, 0.20, 0.30, 0.40};
  } else if (axis == "delta") {
    for (int e = 1; e <= 12; ++e) v.push_back(std::pow(10.0, -e));
  } else if (axis == "n") {
    for (int e = 4; e <= 13; ++e) v.push_back(std::ldexp(1.0, e));
  } else {
    throw Error(Errc::kInvalidConfig, "unknown sweep axis '" + axis + "' (expected S, m, s, ce_ratio, delta or n)");
  }
  return v;
}

std::uint32_t round_censors(double ratio, std::uint32_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error(Errc::kInvalidConfig, "ce_ratio must lie in [0, 1]");
  return static_cast<std::uint32_t>(std::llround(ratio * n));
}

struct SweepRow {
  Variant variant;
  std::string status = "ok";
  planner::PlanInputs in;
  planner::PlanResult plan;
};

// Evaluates a fixed (m, k, s, ell_sym) point instead of planning.
planner::PlanResult evaluate_point(Variant v, const planner::PlanInputs& in, std::uint32_t m, std::uint32_t k,
                                   std::uint32_t s, std::uint32_t ell) {
  if (m == 0 || m > in.n) throw Error(Errc::kInfeasible, "m outside [1, n]");
  planner::PlanResult r;
  r.variant = v;
  r.m = m;
  const double c_r = 1.0 - double(in.c_e) / double(in.n);
  std::uint64_t need = 1;
  switch (v) {
    case Variant::kNaive:
      r.k = 1;
      r.K = 1;
      break;
    case Variant::kMds:
      if (k == 0 || k > m || m > codec::kMaxMdsShares) throw Error(Errc::kInfeasible, "MDS needs 1 <= k <= m <= 255");
      r.k = k;
      r.K = k;
      need = k;
      break;
    case Variant::kRateless:
      r.k = 1;
      r.s = s;
      r.ell_sym = ell;
      r.K = codec::decode_threshold(in.S, ell, in.epsilon);
      r.delta_code = in.delta_code.value_or(codec::dense_code_failure_probability(codec::ceil_div(in.S, ell), r.K));
      need = codec::ceil_div(r.K, s);
      break;
  }
  r.cost = analysis::bandwidth_cost(v, in.S, in.M_h, in.M_s, ell, m, r.k, r.s, in.epsilon);
  r.success_prob = analysis::single_slot_success(in.n, in.c_e, m, r.s, r.K, r.delta_code);
  r.early_decode_prob = analysis::early_decode_prob(in.n, in.c_e, m, r.s, r.K);
  const double delta_eff = in.delta - r.delta_code;
  r.m_closed_form = (c_r > 0.0 && delta_eff > 0.0) ? planner::closed_form_m(c_r, delta_eff, need) : NAN;
  return r;
}

std::string cmd_sweep(const SweepArgs& a) {
  const auto grid = a.values.empty() ? default_grid(a.axis) : parse_doubles(a.values);
  (void)default_grid(a.axis);  // rejects unknown axes even with explicit values
  auto variants = parse_variants(a.variant);
  if (a.axis == "s") variants = {Variant::kRateless};

  std::ostringstream o;
  o << "axis,value,variant,status,n,c_e,delta,S,m,k,s,ell_sym,K,L_pub,L_min,overhead,overhead_floor,it_overhead,"
       "success_prob,early_decode_prob,m_closed_form,clamp_binding,sim_trials,sim_success,sim_early_decode\n";
  std::uint64_t row_index = 0;
  for (const double value : grid) {
    planner::PlanInputs in;
    in.n = a.n;
    in.delta = a.delta;
    if (a.delta_code >= 0) in.delta_code = a.delta_code;
    in.S = a.S;
    in.M_h = a.M_h;
    in.M_s = a.M_s;
    in.epsilon = a.epsilon;
    in.ell_sym_grid = parse_u32s(a.ell_grid);
    in.s_max = a.s_max;
    double ratio = a.ce_ratio;
    std::uint32_t m = a.m, s = a.s;
    if (a.axis == "S") in.S = static_cast<std::uint64_t>(value);
    else if (a.axis == "n") in.n = static_cast<std::uint32_t>(value);
    else if (a.axis == "ce_ratio") ratio = value;
    else if (a.axis == "delta") in.delta = value;
    else if (a.axis == "m") m = static_cast<std::uint32_t>(value);
    else if (a.axis == "s") s = static_cast<std::uint32_t>(value);
    in.c_e = round_censors(ratio, in.n);

    for (const auto v : variants) {
      SweepRow row{v, "ok", in, {}};
      try {
        if (a.axis == "m" || a.axis == "s")
          row.plan = evaluate_point(v, in, m, a.k, s, a.ell);
        else
          row.plan = plan_one(v, in);
      } catch (const Error& e) {
        if (e.code() != Errc::kInfeasible && e.code() != Errc::kInfeasibleReliability) throw;
        row.status = e.code() == Errc::kInfeasible ? "infeasible" : "infeasible_reliability";
      }
      const std::uint64_t this_row = row_index++;

      o << a.axis << ',' << fmt(value) << ',' << protocol::to_string(v) << ',' << row.status << ',' << in.n << ','
        << in.c_e << ',' << fmt(in.delta) << ',' << in.S << ',';
      if (row.status != "ok") {
        o << ",,,,,,,,,,,,,,,,," << '\n';
        continue;
      }
      const auto& p = row.plan;
      const double floor =
          in.c_e < in.n ? analysis::overhead_floor(v, in.n, in.c_e, in.epsilon, p.m) : double(NAN);
      const double it = in.c_e < in.n ? double(in.n) / double(in.n - in.c_e) : double(NAN);
      o << p.m << ',' << p.k << ',' << p.s << ',' << p.ell_sym << ',' << p.K << ',' << p.cost.l_pub << ','
        << p.cost.l_min << ',' << fmt(p.cost.overhead) << ',' << fmt(floor) << ',' << fmt(it) << ','
        << fmt(p.success_prob) << ',' << fmt(p.early_decode_prob) << ',' << fmt(p.m_closed_form) << ','
        << (p.clamp_binding ? "true" : "false") << ',';

      if (a.sim_trials == 0 || in.S <= crypto::kRandomnessSize) {
        o << "0,,\n";
        continue;
      }
      sim::SimConfig sc;
      sc.n = in.n;
      sc.censored = in.c_e;
      sc.strategy.variant = v;
      sc.strategy.lanes = p.m;
      sc.strategy.shares_needed = p.k;
      sc.strategy.symbols_per_bundle = p.s;
      sc.strategy.symbol_len = v == Variant::kRateless ? p.ell_sym : 256;
      sc.strategy.epsilon = in.epsilon;
      sc.payload_len = in.S - crypto::kRandomnessSize;
      sc.max_slots = 1;
      const auto results = sim::run_trials(sc, a.sim_trials, derive_seed(a.seed, this_row));
      std::uint64_t ok = 0, early = 0;
      for (const auto& r : results) {
        ok += r.included();
        early += r.adversary_decode_slot == 1u;
      }
      o << a.sim_trials << ',' << fmt(double(ok) / double(a.sim_trials)) << ','
        << fmt(double(early) / double(a.sim_trials)) << '\n';
    }
  }
  return o.str();
}

// ---- codec-bench ----

struct CodecBenchArgs {
  std::string S = "4096";
  std::uint32_t ell = 256;
  double epsilon = 0.05;
  std::string extra = "0,1,2";
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;

  void add_to(Spec& spec) {
    spec.add("S", S, "comma list of message lengths");
    spec.add("ell", ell, "symbol size in bytes");
    spec.add("epsilon", epsilon, "reception overhead defining K");
    spec.add("extra", extra, "symbols beyond K to test, comma list");
    spec.add("trials", trials, "Monte Carlo trials per row");
    spec.add("seed", seed, "base seed");
  }
};

std::string cmd_codec_bench(const CodecBenchArgs& a) {
  if (a.trials == 0) throw Error(Errc::kInvalidConfig, "trials must be positive");
  std::ostringstream o;
  o << "S,ell_sym,blocks,K,symbols,trials,failures,rate,analytic,encode_ops,decode_ops\n";
  std::uint64_t row = 0;
  for (const auto S : parse_u64s(a.S)) {
    const auto params = codec::RatelessParams::make(S, a.ell, a.epsilon);
    const std::uint64_t K = params.decode_threshold();
    for (const auto extra : parse_u64s(a.extra)) {
      const std::uint64_t symbols = K + extra;
      const std::uint64_t row_seed = derive_seed(a.seed, row++);
      const auto est = codec::estimate_delta_code(params, a.trials, row_seed, symbols);
      const double analytic = codec::dense_code_failure_probability(params.source_blocks(), symbols);

      Rng rng(row_seed);
      codec::Message msg(S);
      for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
      gf256::reset_op_count();
      std::vector<codec::Symbol> coded;
      for (std::uint64_t j = 0; j < symbols; ++j) coded.push_back(codec::rateless_symbol(msg, j, params));
      const auto encode_ops = gf256::op_count();
      gf256::reset_op_count();
      (void)codec::rateless_decode(coded, params);
      const auto decode_ops = gf256::op_count();

      o << S << ',' << a.ell << ',' << params.source_blocks() << ',' << K << ',' << symbols << ',' << est.trials << ','
        << est.failures << ',' << fmt(est.rate()) << ',' << fmt(analytic) << ',' << encode_ops << ',' << decode_ops
        << '\n';
    }
  }
  return o.str();
}

// ---- output and rerun ----

std::filesystem::path output_path(const std::string& out, const std::string& command) {
  const char* dir = std::getenv("SEDNA_OUT_DIR");
  if (out.empty()) {
    if (!dir || !*dir) return {};
    return std::filesystem::path(dir) / (command + ".csv");
  }
  std::filesystem::path p(out);
  if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
  return p;
}

void emit(const std::string& text, const std::string& out, const std::string& command, std::ostream& stdout_stream) {
  const auto path = output_path(out, command);
  if (path.empty()) {
    stdout_stream << text;
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

// Rebuilds the argument list recorded in a CSV header.
std::vector<std::string> recorded_args(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> args;
  bool inside = false, seen = false;
  while (std::getline(in, line)) {
    if (line == kSpecBegin) {
      inside = seen = true;
      continue;
    }
    if (line == kSpecEnd) break;
    if (!inside) continue;
    if (line.rfind("# [", 0) == 0 && line.back() == ']') {
      args.push_back(line.substr(3, line.size() - 4));
      continue;
    }
    const auto eq = line.find(" = ");
    if (line.rfind("# ", 0) != 0 || eq == std::string::npos) throw Error(Errc::kMalformedInput, "bad spec line: " + line);
    args.push_back("--" + line.substr(2, eq - 2));
    args.push_back(line.substr(eq + 3));
  }
  if (!seen || args.empty()) throw Error(Errc::kMalformedInput, "no embedded spec found");
  return args;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::kInvalidConfig:
    case Errc::kInfeasible:
    case Errc::kInfeasibleReliability:
    case Errc::kMalformedInput:
    case Errc::kInvalidRandomness:
      return kBadInput;
    case Errc::kNeedMoreShares:
      return kRuntimeError;
  }
  return kRuntimeError;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::string* captured);

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::string* captured) {
  CLI::App app{"Sedna transaction dissemination: planner, ledger simulator and codec tools", "sedna"};
  app.set_version_flag("--version", std::string("sedna ") + kVersion);
  app.set_config("--config", "", "key = value file with one [command] section; flags override it");
  app.require_subcommand(1);
  std::string out_file;
  app.add_option("-o,--out", out_file, "output CSV path (relative paths resolve under SEDNA_OUT_DIR)");

  PlanArgs plan;
  Spec plan_spec(app.add_subcommand("plan", "optimal fanout and coding parameters per variant"));
  plan.add_to(plan_spec);

  SimulateArgs simulate;
  Spec sim_spec(app.add_subcommand("simulate", "ledger simulation, one CSV row per trial"));
  simulate.add_to(sim_spec);

  SweepArgs sweep;
  Spec sweep_spec(app.add_subcommand("sweep", "analytic (and optionally simulated) values over one axis"));
  sweep.add_to(sweep_spec);

  CodecBenchArgs bench;
  Spec bench_spec(app.add_subcommand("codec-bench", "measured delta_code and GF(256) operation counts"));
  bench.add_to(bench_spec);

  std::string rerun_file;
  bool rerun_check = false;
  auto* rerun = app.add_subcommand("rerun", "regenerate a CSV from its embedded spec");
  rerun->add_option("file", rerun_file, "CSV emitted by sedna")->required();
  rerun->add_flag("--check", rerun_check, "compare instead of printing; exit 1 on any difference");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  if (rerun->parsed()) {
    std::ifstream f(rerun_file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + rerun_file);
    const std::string original((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::string regenerated;
    std::ostringstream sink;
    const int code = dispatch(recorded_args(original), sink, err, &regenerated);
    if (code != kOk) return code;
    if (!rerun_check) {
      out << regenerated;
      return kOk;
    }
    if (regenerated == original) {
      out << "identical: " << rerun_file << '\n';
      return kOk;
    }
    err << "differs: " << rerun_file << '\n';
    return kRuntimeError;
  }

  std::string text;
  std::string command;
  if (plan_spec.app()->parsed()) {
    text = metadata(plan_spec) + cmd_plan(plan);
    command = "plan";
  } else if (sim_spec.app()->parsed()) {
    text = metadata(sim_spec) + cmd_simulate(simulate);
    command = "simulate";
  } else if (sweep_spec.app()->parsed()) {
    text = metadata(sweep_spec) + cmd_sweep(sweep);
    command = "sweep";
  } else if (bench_spec.app()->parsed()) {
    text = metadata(bench_spec) + cmd_codec_bench(bench);
    command = "codec-bench";
  }
  if (captured) {
    *captured = std::move(text);
    return kOk;
  }
  emit(text, out_file, command, out);
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::string* captured) {
  try {
    return run_impl(args, out, err, captured);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, nullptr);
}

}  // namespace sedna::cli
