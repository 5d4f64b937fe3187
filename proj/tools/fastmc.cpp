// Command-line front end: generate synthetic problems, run the completion
// pipeline, and sweep benchmark points. Exit codes: 0 success, 2 bad flags,
// 3 I/O failure, 4 non-finite values during a run.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastmc/completion.hpp"
#include "fastmc/observed.hpp"
#include "fastmc/rng.hpp"
#include "fastmc/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kDmatVersion = "dmat v1";
constexpr const char* kOmegaVersion = "omega v1";
constexpr const char* kReportVersion = "report v1";

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json make_manifest(const std::string& command, const std::vector<std::string>& args,
                   std::uint64_t seed, const json& files) {
  json m;
  m["command"] = command;
  m["args"] = args;
  m["seed"] = seed;
  m["files"] = files;
  m["artifact_versions"] = {
      {"dmat", kDmatVersion}, {"omega", kOmegaVersion}, {"report", kReportVersion}};
  m["generated_at"] = timestamp_utc();
  return m;
}

json config_echo(const fastmc::CompletionConfig& cfg, std::size_t resolved_rounds) {
  json c;
  c["k"] = cfg.k;
  c["eps"] = cfg.eps;
  c["delta"] = cfg.delta;
  c["p"] = cfg.p;
  c["t_rounds"] = resolved_rounds;
  c["mu"] = cfg.mu;
  c["c_sample"] = cfg.c_sample;
  c["init_sweeps"] = cfg.init_sweeps;
  c["eps0_power"] = cfg.eps0_power;
  c["tau_denominator"] = std::string(1, cfg.tau_denominator);
  c["seed"] = cfg.seed;
  c["solver"] = {{"eps1", cfg.solver.eps1},
                 {"delta1", cfg.solver.delta1},
                 {"eps_ose", cfg.solver.eps_ose},
                 {"c_sk", cfg.solver.c_sk},
                 {"c_iter", cfg.solver.c_iter},
                 {"max_iter", cfg.solver.max_iter},
                 {"log_exponent", cfg.solver.log_exponent},
                 {"force_sketch", cfg.solver.force_sketch}};
  return c;
}

json report_to_json(const fastmc::ConvergenceReport& rep) {
  json rounds = json::array();
  for (const auto& r : rep.per_round) {
    json item;
    item["round"] = r.round;
    item["dist_u"] = r.dist_u ? json(*r.dist_u) : json(nullptr);
    item["dist_v"] = r.dist_v ? json(*r.dist_v) : json(nullptr);
    item["frob_error"] = r.frob_error ? json(*r.frob_error) : json(nullptr);
    item["residual_on_omega"] = r.residual_on_omega;
    item["wall_time_ms"] = r.wall_time_ms;
    rounds.push_back(item);
  }
  json out;
  out["rounds"] = rounds;
  out["omega_sizes"] = rep.omega_sizes;
  out["final_frob_error"] =
      rep.final_frob_error ? json(*rep.final_frob_error) : json(nullptr);
  out["init"] = {{"dist_u", rep.init_dist_u ? json(*rep.init_dist_u) : json(nullptr)},
                 {"kappa_hat", rep.kappa_hat},
                 {"subspace_residual", rep.init_subspace_residual},
                 {"rank_completed", rep.init_rank_completed}};
  out["warnings"] = rep.warnings;
  out["wall_time_ms_total"] = rep.wall_time_ms_total;
  out["wall_time_ms_multireg"] = rep.wall_time_ms_multireg;
  return out;
}

int write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) {
    std::cerr << "cannot open for writing: " << path << "\n";
    return 3;
  }
  os << content;
  return os ? 0 : 3;
}

struct SynthArgs {
  std::size_t m = 200, n = 300, k = 5;
  double kappa = 2.0, mu = 3.0;
  double p = 0.0;
  double nnz_target = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_synth(const SynthArgs& a, const std::vector<std::string>& raw_args) {
  double p = a.p;
  if (p == 0.0) {
    if (a.nnz_target <= 0.0) {
      std::cerr << "one of --p or --nnz-target is required\n";
      return 2;
    }
    p = std::min(1.0, a.nnz_target / (static_cast<double>(a.m) * a.n));
  }
  try {
    fastmc::GroundTruth gt =
        fastmc::gen_incoherent(a.m, a.n, a.k, a.kappa, a.mu, a.seed);
    fastmc::write_ground_truth(a.out_dir, gt, a.seed);
    auto omega =
        fastmc::sample_omega(a.m, a.n, p, fastmc::SplitMix64::split(a.seed, 1), gt);
    fastmc::write_omega_file((fs::path(a.out_dir) / "omega.txt").string(), omega);

    json files = {{"out_dir", a.out_dir},
                  {"omega", (fs::path(a.out_dir) / "omega.txt").string()}};
    json manifest = make_manifest("synth", raw_args, a.seed, files);
    manifest["p"] = p;
    manifest["nnz"] = omega.nnz();
    manifest["mu_actual"] = gt.mu_actual;
    return write_text_file((fs::path(a.out_dir) / "manifest.json").string(),
                           manifest.dump(2) + "\n");
  } catch (const fastmc::FormatError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

struct CompleteArgs {
  std::string omega_path;
  std::size_t k = 5;
  double eps = 1e-6;
  double delta = 0.01;
  std::size_t rounds = 0;
  std::uint64_t seed = 0;
  std::string ground_truth_dir;
  bool force_sketch = false;
  std::string tau_denominator = "n";
  double mu = 3.0;
  bool mu_given = false;
  std::size_t threads = 1;
  std::string out_path;
};

int run_complete(const CompleteArgs& a, const std::vector<std::string>& raw_args) {
  fastmc::ObservedEntries omega;
  fastmc::GroundTruth gt;
  bool have_gt = false;
  try {
    omega = fastmc::read_omega_file(a.omega_path);
    if (!a.ground_truth_dir.empty()) {
      gt = fastmc::read_ground_truth(a.ground_truth_dir);
      have_gt = true;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }

  fastmc::CompletionConfig cfg;
  cfg.k = a.k;
  cfg.eps = a.eps;
  cfg.delta = a.delta;
  cfg.t_rounds = a.rounds;
  cfg.seed = a.seed;
  cfg.mu = a.mu_given ? a.mu : (have_gt ? gt.mu_actual : a.mu);
  cfg.tau_denominator = a.tau_denominator == "m" ? 'm' : 'n';
  cfg.solver.force_sketch = a.force_sketch;
  cfg.p = std::min(1.0, static_cast<double>(omega.nnz()) /
                            (static_cast<double>(omega.rows()) * omega.cols()));
  if (cfg.p <= 0.0) cfg.p = 1e-9;

  try {
    auto res = fastmc::complete(omega, cfg, have_gt ? &gt : nullptr);
    json out;
    out["report_version"] = kReportVersion;
    json files = {{"omega", a.omega_path}, {"out", a.out_path}};
    if (have_gt) files["ground_truth"] = a.ground_truth_dir;
    out["manifest"] = make_manifest("complete", raw_args, a.seed, files);
    out["manifest"]["threads"] = a.threads;
    out["config"] = config_echo(cfg, res.report.per_round.size());
    out.update(report_to_json(res.report));
    return write_text_file(a.out_path, out.dump(2) + "\n");
  } catch (const fastmc::NonFinite& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

struct BenchArgs {
  std::size_t m = 200, n = 300;
  std::vector<std::size_t> k_list;
  std::vector<double> nnz_mults;
  std::size_t rounds = 4;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_bench(const BenchArgs& a) {
  std::string csv = "m,n,k,nnz,wall_ms_total,wall_ms_multireg,rounds,final_error\n";
  try {
    std::size_t point = 0;
    for (std::size_t k : a.k_list) {
      for (double mult : a.nnz_mults) {
        std::uint64_t seed = fastmc::SplitMix64::split(a.seed, point++);
        fastmc::GroundTruth gt = fastmc::gen_incoherent(a.m, a.n, k, 2.0, 3.0, seed);
        double budget = mult * static_cast<double>(a.n) * static_cast<double>(k) *
                        std::log(static_cast<double>(a.n));
        auto parts = fastmc::sample_round_sets(a.m, a.n, budget, a.rounds,
                                               fastmc::SplitMix64::split(seed, 1), gt);
        std::size_t nnz = 0;
        for (const auto& p : parts) nnz += p.nnz();

        fastmc::CompletionConfig cfg;
        cfg.k = k;
        cfg.eps = 1e-6;
        cfg.mu = gt.mu_actual;
        cfg.t_rounds = a.rounds;
        cfg.seed = fastmc::SplitMix64::split(seed, 2);
        auto res = fastmc::complete_with_parts(parts, cfg, &gt);

        csv += std::to_string(a.m) + "," + std::to_string(a.n) + "," +
               std::to_string(k) + "," + std::to_string(nnz) + "," +
               std::to_string(res.report.wall_time_ms_total) + "," +
               std::to_string(res.report.wall_time_ms_multireg) + "," +
               std::to_string(a.rounds) + "," +
               std::to_string(res.report.final_frob_error.value_or(-1.0)) + "\n";
      }
    }
  } catch (const fastmc::NonFinite& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return write_text_file(a.out_path, csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank matrix completion via sketched alternating minimization"};
  app.require_subcommand(1);

  std::vector<std::string> raw_args(argv + 1, argv + argc);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a planted problem and sample it");
  synth->add_option("--m", sa.m, "rows")->check(CLI::PositiveNumber);
  synth->add_option("--n", sa.n, "columns")->check(CLI::PositiveNumber);
  synth->add_option("--k", sa.k, "rank")->check(CLI::PositiveNumber);
  synth->add_option("--kappa", sa.kappa, "condition number")
      ->check(CLI::Range(1.0, 1e12));
  synth->add_option("--mu", sa.mu, "incoherence target")->check(CLI::Range(1.0, 1e6));
  synth->add_option("--p", sa.p, "observation probability in (0,1]")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  synth->add_option("--nnz-target", sa.nnz_target, "expected sample count");
  synth->add_option("--seed", sa.seed, "seed");
  synth->add_option("--out-dir", sa.out_dir, "output directory")->required();

  CompleteArgs ca;
  auto* complete = app.add_subcommand("complete", "run completion on an omega file");
  complete->add_option("--omega", ca.omega_path, "omega v1 file")->required();
  complete->add_option("--k", ca.k, "rank")->check(CLI::PositiveNumber)->required();
  complete->add_option("--eps", ca.eps, "target accuracy")->check(CLI::PositiveNumber);
  complete->add_option("--delta", ca.delta, "failure probability")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 0.999));
  complete->add_option("--rounds", ca.rounds, "round count (0 = auto)");
  complete->add_option("--seed", ca.seed, "seed");
  complete->add_option("--ground-truth", ca.ground_truth_dir,
                       "directory written by synth (diagnostics only)");
  complete->add_flag("--force-sketch", ca.force_sketch,
                     "always run the sketched solver path");
  complete->add_option("--tau-denominator", ca.tau_denominator, "n or m")
      ->check(CLI::IsMember({"n", "m"}));
  auto* muopt = complete->add_option("--mu", ca.mu, "incoherence bound for clipping");
  complete->add_option("--threads", ca.threads, "thread cap (library is serial)");
  complete->add_option("--out", ca.out_path, "report JSON path")->required();

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "sweep nnz multipliers and ranks");
  bench->add_option("--m", ba.m, "rows")->check(CLI::PositiveNumber);
  bench->add_option("--n", ba.n, "columns")->check(CLI::PositiveNumber);
  bench->add_option("--k-list", ba.k_list, "ranks to sweep")->required();
  bench->add_option("--nnz-mults", ba.nnz_mults, "budget multipliers of n k ln n")
      ->required();
  bench->add_option("--rounds", ba.rounds, "rounds per point")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "seed");
  bench->add_option("--out", ba.out_path, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ca.mu_given = muopt->count() > 0;

  if (synth->parsed()) return run_synth(sa, raw_args);
  if (complete->parsed()) return run_complete(ca, raw_args);
  if (bench->parsed()) {
    if (ba.k_list.empty() || ba.nnz_mults.empty()) {
      std::cerr << "empty sweep specification\n";
      return 2;
    }
    return run_bench(ba);
  }
  return 2;
}
