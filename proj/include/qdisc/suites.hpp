#pragma once

// Named verification suites over seeded state batteries. Each case records its values
// and one residual per check; a check passes when its residual is within tolerance.

#include <map>

#include "qdisc/io.hpp"

namespace qdisc {

struct SuiteCheck {
  std::string name;
  double residual;
  double tolerance;
  bool passed() const { return residual <= tolerance; }
};

struct SuiteCase {
  Index index = 0;
  std::string label;
  std::vector<std::pair<std::string, double>> values;
  std::vector<SuiteCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed(); });
  }
  double residual() const {
    double r = 0.0;
    for (const auto& c : checks) r = std::max(r, c.residual);
    return r;
  }
};

struct SuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  Index count = 0;
  std::string dims;
  std::vector<SuiteCase> cases;
  bool pass = false;
  double worst_residual = 0.0;
  long failures = 0;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"koashi-winter",          "holevo-identity",
                                              "inequality-chain",       "norm-bounds",
                                              "linopt-equality",        "classicality-equivalence",
                                              "steering-completeness",  "reduction-soundness"};
  return names;
}

namespace suites {

/// Measures inside a case run single-threaded; cases run in parallel.
inline OptimizerConfig case_config(const OptimizerConfig& cfg, std::uint64_t seed) {
  OptimizerConfig c = cfg;
  c.threads = 1;
  c.seed = seed;
  return c;
}

inline double below(double lhs, double rhs) { return std::max(0.0, rhs - lhs); }  // violation of lhs >= rhs

inline BipartiteState random_two_qubit(Index rank, Rng& rng) {
  return BipartiteState(random_density_matrix(4, rank, rng), 2, 2);
}

/// |E_F(rho_AB) - D_P(rho_BC | C) - S(A) + S(AB)| with C of dimension rank(rho_AB).
inline SuiteCase koashi_winter_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const BipartiteState rho = random_two_qubit(2, rng);
  const OptimizerConfig c = case_config(cfg, seed);
  const double ef = eof(rho, 4, c).value;
  const DiscordInstance inst = eof_to_discord(EofInstance(rho, 0.0, 1.0), rank(rho.matrix()), MeasurementKind::Povm);
  const double d = discord(inst.state, MeasurementKind::Povm, c).value;
  const double s_a = von_neumann_entropy(partial_trace(rho, Subsystem::A));
  const double s_ab = von_neumann_entropy(rho.rho());
  SuiteCase sc{i, "rank2-2x2", {{"eof", ef}, {"discord_bc", d}, {"s_a", s_a}, {"s_ab", s_ab}}, {}};
  sc.checks.push_back({"koashi-winter", std::abs(ef - (d + s_a - s_ab)), 1e-3});
  return sc;
}

/// |E_F(sigma) - S(Phi(rho)) + chi_Phi(rho)| on the channel emitted by eof_to_holevo.
inline SuiteCase holevo_identity_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const BipartiteState sigma = random_two_qubit(2, rng);
  const OptimizerConfig c = case_config(cfg, seed);
  const double ef = eof(sigma, 4, c).value;
  const HolevoInstance inst = eof_to_holevo(EofInstance(sigma, 0.0, 1.0));
  const double chi = constrained_holevo(inst.channel, inst.input, 0, c).value;
  const double out = von_neumann_entropy(apply_channel(inst.channel, inst.input));
  const double completeness = [&] {
    Matrix s = Matrix::Zero(inst.channel.dim_in(), inst.channel.dim_in());
    for (const auto& k : inst.channel.kraus()) s += k.adjoint() * k;
    return (s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
  }();
  SuiteCase sc{i, "rank2-2x2", {{"eof", ef}, {"output_entropy", out}, {"chi", chi}}, {}};
  sc.checks.push_back({"channel-identity", std::abs(ef - (out - chi)), 1e-3});
  sc.checks.push_back({"kraus-completeness", completeness, 1e-9});
  return sc;
}

inline SuiteCase inequality_chain_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const Index r = 1 + static_cast<Index>(i % 4);
  const BipartiteState rho = random_two_qubit(r, rng);
  const OptimizerConfig c = case_config(cfg, seed);
  const double info = mutual_information(rho);
  const double jn = classical_correlation(rho, MeasurementKind::VonNeumann, c).value;
  const double jp = classical_correlation(rho, MeasurementKind::Povm, c).value;
  const double dn = info - jn, dp = info - jp;
  const double ef = eof(rho, 4, c).value;
  const double er = rel_ent_entanglement(rho, 4, c).value;
  SuiteCase sc{i, "rank" + std::to_string(r) + "-2x2",
               {{"I", info}, {"J_N", jn}, {"J_P", jp}, {"D_N", dn}, {"D_P", dp}, {"E_F", ef}, {"E_R", er}}, {}};
  sc.checks.push_back({"J_P>=J_N", below(jp, jn), 1e-6});
  sc.checks.push_back({"D_P<=D_N", below(dn, dp), 1e-6});
  sc.checks.push_back({"E_F>=E_R", below(ef, er), 1e-4});
  sc.checks.push_back({"J>=0", below(std::min(jn, jp), 0.0), 1e-7});
  sc.checks.push_back({"J<=I", below(info, std::max(jn, jp)), 1e-7});
  return sc;
}

inline SuiteCase norm_bounds_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const BipartiteState rho = random_two_qubit(1 + static_cast<Index>(i % 4), rng);
  const OptimizerConfig c = case_config(cfg, seed);
  const double m = 2.0, n = 2.0;
  const double er = rel_ent_entanglement(rho, 4, c).value;
  const double ef = eof(rho, 4, c).value;
  const double d1 = distance_to_separable(rho, NormKind::Trace, 4, c).value;
  const double d2 = distance_to_separable(rho, NormKind::Frobenius, 4, c).value;
  const double b1 = d1 * d1 / (2.0 * m * n * kLn2);
  const double b2 = d2 * d2 / (2448.0 * kLn2);
  SuiteCase sc{i, "2x2",
               {{"E_R", er}, {"E_F", ef}, {"dist_trace", d1}, {"dist_frobenius", d2}, {"trace_bound", b1},
                {"frobenius_bound", b2}, {"margin_trace", er - b1}, {"margin_frobenius", ef - b2}},
               {}};
  sc.checks.push_back({"E_R>=trace-bound", below(er, b1), 1e-3});
  sc.checks.push_back({"E_F>=frobenius-bound", below(ef, b2), 1e-3});
  return sc;
}

inline SuiteCase linopt_equality_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const Matrix op = random_hermitian(4, rng);
  const MeasureResult s = linopt_classical(op, 2, 2, case_config(cfg, seed));
  const double grid = linopt_grid_reference(op, 17, 12).best_value;
  const double cert = linopt_certificate_value(op, std::get<ProductCertificate>(s.certificate));
  SuiteCase sc{i, "2x2", {{"seesaw", s.value}, {"grid", grid}, {"cc_certificate", cert}}, {}};
  sc.checks.push_back({"seesaw=grid", std::abs(s.value - grid), 1e-4});
  sc.checks.push_back({"seesaw=cc", std::abs(s.value - cert), 1e-6});
  return sc;
}

/// Even cases: constructed QC states; odd cases: Haar-random mixed states.
inline SuiteCase classicality_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const bool qc = i % 2 == 0;
  const BipartiteState rho = qc ? random_qc_state(2, 2, rng).state : random_two_qubit(4, rng);
  const ClassicalityReport rep = is_quantum_classical(rho);
  const double dn = discord(rho, MeasurementKind::VonNeumann, case_config(cfg, seed)).value;
  const bool agree = rep.classical == (dn <= 1e-5);
  SuiteCase sc{i, qc ? "qc" : "haar",
               {{"classical", rep.classical ? 1.0 : 0.0}, {"commutator", rep.max_commutator_norm}, {"D_N", dn}}, {}};
  sc.checks.push_back({"verdict=zero-discord", agree ? 0.0 : 1.0, 0.0});
  return sc;
}

inline SuiteCase steering_case(Index i, std::uint64_t seed, const OptimizerConfig&) {
  Rng rng = make_rng(seed);
  const Index r = 1 + static_cast<Index>(i % 4);
  const BipartiteState rho = random_two_qubit(r, rng);
  const TripartitePureState psi = purify(rho, 4);
  const Index k = 4 + static_cast<Index>(i % 13);
  const POVM meas = povm_from_matrix(gaussian_matrix(k, 4, rng));
  const Ensemble e = steer_ensemble(psi, meas);
  const double err = e.mixture_error(rho.matrix());
  SuiteCase sc{i, "povm" + std::to_string(k), {{"members", static_cast<double>(e.size())}, {"mixture_error", err}}, {}};
  sc.checks.push_back({"sum p_i rho_i = rho_AB", err, 1e-8});
  return sc;
}

/// Even cases: separable yes-instances; odd cases: Werner no-instances with a known distance.
inline SuiteCase reduction_case(Index i, std::uint64_t seed, const OptimizerConfig& cfg) {
  Rng rng = make_rng(seed);
  const OptimizerConfig c = case_config(cfg, seed);
  const bool yes = i % 2 == 0;
  SuiteCase sc{i, yes ? "yes" : "no", {}, {}};
  if (yes) {
    const SeparableAnsatz an = random_separable_ansatz(2, 2, 2, rng);
    const SeparabilityInstance sep(an.state(), 0.1);
    const EofInstance ei = sep_to_eof(sep);
    const double ef = eof(ei.state, 4, c).value;
    const DiscordInstance di = eof_to_discord(ei, rank(ei.state.matrix()), MeasurementKind::Povm);
    const double d = discord(di.state, MeasurementKind::Povm, c).value;
    const HolevoInstance hi = eof_to_holevo(ei);
    const double chi = constrained_holevo(hi.channel, hi.input, 0, c).value;
    const KInstance ki = sep_to_k(sep, {2, 2});
    const double gap = cc_in_extension_gap(ki.state, {ki.ext_a, ki.ext_b}, c).value;
    const bool member = ki.contains(cc_extension_of(an, {2, 2}));
    sc.values = {{"eps", ei.gap}, {"E_F", ef}, {"a", ei.threshold}, {"D", d}, {"b", di.threshold},
                 {"chi", chi},    {"c", hi.threshold}, {"cc_gap", gap}, {"witness_in_K", member ? 1.0 : 0.0}};
    sc.checks.push_back({"E_F<=a", below(ei.threshold, ef), 1e-6});
    sc.checks.push_back({"D<=b", below(di.threshold, d), 1e-3});
    sc.checks.push_back({"chi>=c", below(chi, hi.threshold), 1e-3});
    sc.checks.push_back({"cc-gap<=0", gap, 1e-4});
    sc.checks.push_back({"witness-in-K", member ? 0.0 : 1.0, 0.0});
  } else {
    const double w = 0.8 + 0.2 * uniform01(rng);
    // The twirl-symmetric closest separable state is the w = 1/3 Werner state.
    const double dist = (w - 1.0 / 3.0) * std::sqrt(0.75);
    const SeparabilityInstance sep(werner_state(w), 0.9 * dist);
    const EofInstance ei = sep_to_eof(sep);
    const double ef = eof(ei.state, 4, c).value;
    const HolevoInstance hi = eof_to_holevo(ei);
    const double chi = constrained_holevo(hi.channel, hi.input, 0, c).value;
    sc.values = {{"w", w}, {"delta", sep.delta}, {"eps", ei.gap}, {"E_F", ef}, {"chi", chi}, {"c", hi.threshold}};
    sc.checks.push_back({"E_F>=a+eps", below(ef, ei.threshold + ei.gap), 0.0});
    sc.checks.push_back({"chi<=c-eps", below(hi.threshold - hi.gap, chi), 1e-3});
  }
  return sc;
}

}  // namespace suites

/// Runs a named suite on `count` seeded cases (count = 0 picks the suite default).
inline SuiteReport run_suite(const std::string& name, std::uint64_t seed, Index count, const OptimizerConfig& cfg) {
  using CaseFn = SuiteCase (*)(Index, std::uint64_t, const OptimizerConfig&);
  struct Entry {
    CaseFn fn;
    Index default_count;
    const char* dims;
  };
  static const std::map<std::string, Entry> table{
      {"koashi-winter", {suites::koashi_winter_case, 50, "2x2 rank 2; C of dimension rank"}},
      {"holevo-identity", {suites::holevo_identity_case, 50, "2x2 rank 2"}},
      {"inequality-chain", {suites::inequality_chain_case, 100, "2x2 ranks 1-4"}},
      {"norm-bounds", {suites::norm_bounds_case, 20, "2x2 ranks 1-4"}},
      {"linopt-equality", {suites::linopt_equality_case, 100, "2x2 Hermitian"}},
      {"classicality-equivalence", {suites::classicality_case, 200, "2x2 QC and Haar"}},
      {"steering-completeness", {suites::steering_case, 100, "2x2, C of dimension 4"}},
      {"reduction-soundness", {suites::reduction_case, 10, "2x2 separable and Werner"}},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw InvariantError("unknown suite '" + name + "'");
  cfg.validate();
  SuiteReport rep;
  rep.name = name;
  rep.seed = seed;
  rep.count = count > 0 ? count : it->second.default_count;
  rep.dims = it->second.dims;
  rep.cases.resize(static_cast<size_t>(rep.count));
  detail::parallel_for(static_cast<int>(rep.count), cfg.threads, [&](int i) {
    rep.cases[static_cast<size_t>(i)] = it->second.fn(i, split_seed(seed, static_cast<std::uint64_t>(i)), cfg);
  });
  rep.pass = true;
  for (const auto& c : rep.cases) {
    rep.worst_residual = std::max(rep.worst_residual, c.residual());
    if (!c.passed()) {
      rep.pass = false;
      ++rep.failures;
    }
  }
  return rep;
}

namespace io {

inline json to_json(const SuiteReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    json values = json::object();
    for (const auto& [k, v] : c.values) values[k] = v;
    json checks = json::array();
    for (const auto& ch : c.checks)
      checks.push_back({{"name", ch.name}, {"residual", ch.residual}, {"tolerance", ch.tolerance}, {"pass", ch.passed()}});
    cases.push_back({{"index", c.index}, {"label", c.label}, {"values", values}, {"checks", checks}, {"pass", c.passed()}});
  }
  return {{"schema", kSchema},
          {"kind", "suite-report"},
          {"suite", r.name},
          {"battery", {{"seed", r.seed}, {"count", r.count}, {"dims", r.dims}}},
          {"pass", r.pass},
          {"failures", r.failures},
          {"worst_residual", r.worst_residual},
          {"cases", cases}};
}

/// One row per case: index, label, values, then residual and pass for every check.
/// Columns are the union over cases in order of first appearance; missing cells stay empty.
inline std::string to_csv(const SuiteReport& r) {
  std::vector<std::string> value_cols, check_cols;
  auto add = [](std::vector<std::string>& cols, const std::string& k) {
    if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  };
  for (const auto& c : r.cases) {
    for (const auto& kv : c.values) add(value_cols, kv.first);
    for (const auto& ch : c.checks) add(check_cols, ch.name);
  }
  std::ostringstream os;
  os << "index,label";
  for (const auto& k : value_cols) os << ',' << k;
  for (const auto& k : check_cols) os << ",residual:" << k << ",pass:" << k;
  os << ",pass\n";
  for (const auto& c : r.cases) {
    os << c.index << ',' << c.label;
    for (const auto& k : value_cols) {
      os << ',';
      for (const auto& kv : c.values)
        if (kv.first == k) os << csv_number(kv.second);
    }
    for (const auto& k : check_cols) {
      const auto ch = std::find_if(c.checks.begin(), c.checks.end(), [&](const SuiteCheck& x) { return x.name == k; });
      if (ch == c.checks.end()) os << ",,";
      else os << ',' << csv_number(ch->residual) << ',' << (ch->passed() ? 1 : 0);
    }
    os << ',' << (c.passed() ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace io

}  // namespace qdisc
