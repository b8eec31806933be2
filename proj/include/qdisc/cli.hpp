#pragma once

// Command-line workflows: compute, classify, reduce, verify, random.
// Exit codes: 0 success, 1 suite failure, 2 parse or validation error,
// 3 optimizer infeasibility, 4 internal error.

#include <iostream>

#include <CLI11.hpp>

#include "qdisc/suites.hpp"

namespace qdisc::cli {

using io::json;

enum ExitCode : int { kOk = 0, kSuiteFailure = 1, kInvalid = 2, kInfeasible = 3, kInternal = 4 };

struct RunConfig {
  std::uint64_t seed = 1;
  int starts = 0;  // 0: 32 for problems from at most 2x2 states, 128 otherwise
  int max_iters = 2000;
  double tol_f = 1e-10;
  int threads = 0;
  std::string out;
  std::string format = "json";

  OptimizerConfig optimizer(Index total_dim) const {
    OptimizerConfig c = default_optimizer_config(total_dim);
    if (starts > 0) c.starts = starts;
    c.max_iters = max_iters;
    c.tol_f = tol_f;
    c.seed = seed;
    c.threads = threads;
    c.validate();
    return c;
  }

  json to_json() const {
    return {{"seed", seed}, {"starts", starts == 0 ? json("auto") : json(starts)}, {"max_iters", max_iters},
            {"tol_f", tol_f}, {"out", out}, {"format", format}};
  }
};

struct InputFile {
  std::string path;
  std::string text;
  json doc;

  static InputFile load(const std::string& path) {
    InputFile f{path, io::read_file(path), {}};
    f.doc = io::parse(f.text, path);
    return f;
  }
  std::string digest() const { return io::digest(text); }
  json descriptor() const { return {{"path", path}, {"digest", digest()}}; }
};

inline void emit(const RunConfig& rc, const std::string& contents) {
  if (rc.out.empty()) {
    std::cout << contents;
  } else {
    io::write_atomic(rc.out, contents);
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// compute

struct ComputeOptions {
  std::string measure;
  std::string input;
  std::string state_input;  // input state for constrained-holevo
  Index k = 0;
  Index dim_c = 2;
  Index kraus = 0;
  std::vector<Index> ext;
};

inline const std::vector<std::string>& measure_names() {
  static const std::vector<std::string> names{
      "mutual-information", "classical-correlation-vn", "classical-correlation-povm", "discord-vn", "discord-povm",
      "eof",                "rel-ent",                  "squashed",                   "squashed-classical",
      "constrained-holevo", "holevo-capacity",          "distance-trace",             "distance-frobenius",
      "cc-extension-gap",   "linopt"};
  return names;
}

inline MeasureResult compute_measure(const ComputeOptions& o, const RunConfig& rc, std::vector<InputFile>& inputs) {
  inputs.push_back(InputFile::load(o.input));
  const json& doc = inputs.back().doc;
  const std::string& m = o.measure;
  if (m == "holevo-capacity") {
    const QuantumChannel ch = io::channel_from_json(doc);
    return holevo_capacity(ch, rc.optimizer(ch.dim_in()), o.k);
  }
  if (m == "constrained-holevo") {
    const QuantumChannel ch = io::channel_from_json(doc);
    if (o.state_input.empty()) throw InvariantError("constrained-holevo needs --state with the input density matrix");
    inputs.push_back(InputFile::load(o.state_input));
    const DensityMatrix rho = io::density_from_json(inputs.back().doc, o.state_input);
    return constrained_holevo(ch, rho, o.k, rc.optimizer(ch.dim_in()));
  }
  if (m == "linopt") {
    const auto dims = io::dims_from_json(doc, "operator");
    if (dims.size() != 2) throw InvariantError("operator: needs dims [m, n]");
    const Matrix op = io::matrix_from_json(io::require(doc, "operator", "operator"));
    return linopt_classical(op, dims[0], dims[1], rc.optimizer(dims[0] * dims[1]));
  }
  const BipartiteState s = io::state_from_json(doc, o.input);
  const OptimizerConfig cfg = rc.optimizer(s.dim());
  if (m == "mutual-information") return mutual_information_result(s);
  if (m == "classical-correlation-vn") return classical_correlation(s, MeasurementKind::VonNeumann, cfg);
  if (m == "classical-correlation-povm") return classical_correlation(s, MeasurementKind::Povm, cfg);
  if (m == "discord-vn") return discord(s, MeasurementKind::VonNeumann, cfg);
  if (m == "discord-povm") return discord(s, MeasurementKind::Povm, cfg);
  if (m == "eof") return eof(s, o.k, cfg);
  if (m == "rel-ent") return rel_ent_entanglement(s, o.k, cfg);
  if (m == "squashed") return squashed_upper(s, o.dim_c, false, cfg, o.kraus);
  if (m == "squashed-classical") return squashed_upper(s, o.dim_c, true, cfg, o.kraus);
  if (m == "distance-trace") return distance_to_separable(s, NormKind::Trace, o.k, cfg);
  if (m == "distance-frobenius") return distance_to_separable(s, NormKind::Frobenius, o.k, cfg);
  if (m == "cc-extension-gap") {
    std::pair<Index, Index> ext = default_extension_dims(s.dim_a(), s.dim_b());
    if (!o.ext.empty()) {
      if (o.ext.size() != 2) throw InvariantError("--ext takes two values m' n'");
      ext = {o.ext[0], o.ext[1]};
    }
    return cc_in_extension_gap(s, ext, cfg);
  }
  throw InvariantError("unknown measure '" + m + "'");
}

inline int cmd_compute(const ComputeOptions& o, const RunConfig& rc) {
  std::vector<InputFile> inputs;
  const MeasureResult r = compute_measure(o, rc, inputs);
  json in = json::array();
  for (const auto& f : inputs) in.push_back(f.descriptor());
  if (rc.format == "csv") {
    std::ostringstream os;
    os << "measure,value,bound,converged,starts_within_tol,evaluations,input_digest,seed\n"
       << r.measure << ',' << io::csv_number(r.value) << ',' << to_string(r.bound) << ','
       << (r.optimizer.converged ? 1 : 0) << ',' << r.optimizer.starts_within_tol << ',' << r.optimizer.evaluations << ','
       << inputs.front().digest() << ',' << rc.seed << '\n';
    emit(rc, os.str());
  } else {
    json j = io::to_json(r);
    j["run_config"] = rc.to_json();
    j["inputs"] = in;
    emit(rc, dump(j));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// classify

inline int cmd_classify(const std::string& input, bool cc, double tol, const RunConfig& rc) {
  const InputFile f = InputFile::load(input);
  const BipartiteState s = io::state_from_json(f.doc, input);
  const ClassicalityReport rep = cc ? is_classical_classical(s, tol) : is_quantum_classical(s, tol);
  json j = io::to_json(rep);
  j["test"] = cc ? "classical-classical" : "quantum-classical";
  j["run_config"] = rc.to_json();
  j["inputs"] = json::array({f.descriptor()});
  emit(rc, dump(j));
  return kOk;
}

// ---------------------------------------------------------------------------
// reduce

struct ReduceOptions {
  std::string kind;
  std::string input;
  Index dim_c = 0;
  std::string measurement = "povm";
  std::vector<Index> ext;
};

inline int cmd_reduce(const ReduceOptions& o, const RunConfig& rc) {
  const InputFile f = InputFile::load(o.input);
  const std::string src_kind = io::instance_kind(f.doc);
  auto expect = [&](const char* k) {
    if (src_kind != k) throw InvariantError("reduce " + o.kind + ": expected a '" + k + "' instance, got '" + src_kind + "'");
  };
  json out;
  if (o.kind == "sep-to-eof") {
    expect("separability");
    EofInstance e = sep_to_eof(io::separability_from_json(f.doc));
    e.provenance = f.digest();
    out = io::to_json(e);
  } else if (o.kind == "eof-to-discord") {
    expect("eof");
    DiscordInstance d = eof_to_discord(io::eof_instance_from_json(f.doc), o.dim_c, io::measurement_kind_from_string(o.measurement));
    d.provenance = f.digest();
    out = io::to_json(d);
    out["dims"] = {d.state.dim_a(), d.state.dim_b()};
  } else if (o.kind == "eof-to-holevo") {
    expect("eof");
    HolevoInstance h = eof_to_holevo(io::eof_instance_from_json(f.doc));
    h.provenance = f.digest();
    out = io::to_json(h);
  } else if (o.kind == "sep-to-k") {
    expect("separability");
    const SeparabilityInstance s = io::separability_from_json(f.doc);
    std::pair<Index, Index> ext = default_extension_dims(s.state.dim_a(), s.state.dim_b());
    if (!o.ext.empty()) {
      if (o.ext.size() != 2) throw InvariantError("--ext takes two values m' n'");
      ext = {o.ext[0], o.ext[1]};
    }
    KInstance k = sep_to_k(s, ext);
    k.provenance = f.digest();
    out = io::to_json(k);
  } else {
    throw InvariantError("unknown reduction '" + o.kind + "'");
  }
  out["run_config"] = rc.to_json();
  emit(rc, dump(out));
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

inline int cmd_verify(const std::string& suite, Index count, const RunConfig& rc) {
  const SuiteReport rep = run_suite(suite, rc.seed, count, rc.optimizer(4));
  const std::string dir = rc.out.empty() ? "verify-" + suite : rc.out;
  json j = io::to_json(rep);
  j["run_config"] = rc.to_json();
  io::write_atomic(dir + "/report.json", dump(j));
  io::write_atomic(dir + "/cases.csv", io::to_csv(rep));
  std::cout << suite << ": " << (rep.pass ? "PASS" : "FAIL") << " (" << rep.count - rep.failures << "/" << rep.count
            << " cases, worst residual " << rep.worst_residual << ") -> " << dir << "\n";
  return rep.pass ? kOk : kSuiteFailure;
}

// ---------------------------------------------------------------------------
// random

struct RandomOptions {
  std::string kind;
  Index m = 2;
  Index n = 2;
  Index rank = 0;
  Index count = 1;
  Index terms = 0;
};

inline BipartiteState random_state(const RandomOptions& o, Rng& rng) {
  const Index d = o.m * o.n;
  if (o.kind == "haar-mixed") {
    const Index r = o.rank > 0 ? o.rank : d;
    return BipartiteState(random_density_matrix(d, r, rng), o.m, o.n);
  }
  if (o.kind == "pure") return BipartiteState(DensityMatrix::from_pure(random_pure_state(d, rng).amplitudes()), o.m, o.n);
  if (o.kind == "qc") return random_qc_state(o.m, o.n, rng).state;
  if (o.kind == "cc") return random_cc_state(o.m, o.n, rng).state;
  if (o.kind == "separable") {
    const Index t = o.terms > 0 ? o.terms : d;
    return random_separable_ansatz(o.m, o.n, t, rng).state();
  }
  if (o.kind == "product") return random_product_state(o.m, o.n, rng);
  throw InvariantError("unknown random kind '" + o.kind + "' (haar-mixed, pure, qc, cc, separable, product)");
}

inline int cmd_random(const RandomOptions& o, const RunConfig& rc) {
  if (o.m < 1 || o.n < 1 || o.m * o.n > 64) throw InvariantError("random: dims must be positive with m n <= 64");
  if (o.count < 1) throw InvariantError("random: count must be >= 1");
  const std::string dir = rc.out.empty() ? "random-" + o.kind : rc.out;
  for (Index i = 0; i < o.count; ++i) {
    Rng rng(split_seed(rc.seed, static_cast<std::uint64_t>(i)));
    const BipartiteState s = random_state(o, rng);
    json j = io::to_json(s);
    j["generator"] = {{"kind", o.kind}, {"index", i}, {"rank", o.rank}, {"terms", o.terms}};
    j["run_config"] = rc.to_json();
    std::ostringstream name;
    name << dir << "/" << o.kind << "-" << o.m << "x" << o.n << "-" << std::setw(4) << std::setfill('0') << i << ".json";
    io::write_atomic(name.str(), dump(j));
  }
  std::cout << "wrote " << o.count << " " << o.kind << " state(s) to " << dir << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, char** argv) {
  CLI::App app{"Quantum correlation measures, reductions, and verification suites"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig rc;
  app.add_option("--seed", rc.seed, "Master seed");
  app.add_option("--starts", rc.starts, "Optimizer starts (0 = automatic)")->check(CLI::NonNegativeNumber);
  app.add_option("--max-iters", rc.max_iters, "Iteration budget per local search")->check(CLI::PositiveNumber);
  app.add_option("--tol", rc.tol_f, "Objective tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", rc.threads, "Worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", rc.out, "Output file (compute, classify, reduce) or directory (verify, random)");
  app.add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  ComputeOptions co;
  auto* compute = app.add_subcommand("compute", "Evaluate a measure on a state, channel or operator file");
  compute->add_option("measure", co.measure, "Measure name")->required()->check(CLI::IsMember(measure_names()));
  compute->add_option("input", co.input, "Input JSON file")->required();
  compute->add_option("--state", co.state_input, "Input density matrix (constrained-holevo)");
  compute->add_option("--k", co.k, "Ensemble size or ansatz terms (0 = proven-sufficient default)");
  compute->add_option("--dc", co.dim_c, "Extension dimension for squashed bounds");
  compute->add_option("--kraus", co.kraus, "Kraus count for squashed extensions (0 = automatic)");
  compute->add_option("--ext", co.ext, "Extension dims m' n' for cc-extension-gap")->expected(2);

  std::string classify_input;
  bool classify_cc = false;
  double classify_tol = kClassicalityTolerance;
  auto* classify = app.add_subcommand("classify", "Zero-discord test of a state file");
  classify->add_option("input", classify_input, "State JSON file")->required();
  classify->add_flag("--cc", classify_cc, "Test classical-classical instead of quantum-classical");
  classify->add_option("--class-tol", classify_tol, "Commutator tolerance")->check(CLI::PositiveNumber);

  ReduceOptions ro;
  auto* reduce = app.add_subcommand("reduce", "Apply a reduction to an instance file");
  reduce->add_option("kind", ro.kind, "Reduction")
      ->required()
      ->check(CLI::IsMember({"sep-to-eof", "eof-to-discord", "eof-to-holevo", "sep-to-k"}));
  reduce->add_option("input", ro.input, "Instance JSON file")->required();
  reduce->add_option("--dimc", ro.dim_c, "Purifying dimension (0 = (mn)^2)");
  reduce->add_option("--measurement", ro.measurement, "vn or povm")->check(CLI::IsMember({"vn", "povm"}));
  reduce->add_option("--ext", ro.ext, "Extension dims m' n'")->expected(2);

  std::string suite;
  Index count = 0;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "Suite name")->required();
  verify->add_option("--count", count, "Battery size (0 = suite default)");

  RandomOptions rnd;
  auto* random = app.add_subcommand("random", "Write seeded random state files");
  random->add_option("kind", rnd.kind, "haar-mixed, pure, qc, cc, separable, product")->required();
  random->add_option("m", rnd.m, "Dimension of A")->required();
  random->add_option("n", rnd.n, "Dimension of B")->required();
  random->add_option("--rank", rnd.rank, "Rank for haar-mixed (0 = full)");
  random->add_option("--count", rnd.count, "Number of files");
  random->add_option("--terms", rnd.terms, "Product terms for separable (0 = m n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*compute) return cmd_compute(co, rc);
    if (*classify) return cmd_classify(classify_input, classify_cc, classify_tol, rc);
    if (*reduce) return cmd_reduce(ro, rc);
    if (*verify) return cmd_verify(suite, count, rc);
    if (*random) return cmd_random(rnd, rc);
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const io::json::exception& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInvalid;
}

}  // namespace qdisc::cli
