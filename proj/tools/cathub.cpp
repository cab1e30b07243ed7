// cathub: CSV sweeps for the cat-state hub and a brute-force self-check.
//
//   cathub fidelity-sweep --parity even --N 90 --beta 5.0
//   cathub prob-sweep --t 0.8,0.77 --out probs.csv
//   cathub oracle-check --k 1 --N 2
//
// Exit codes: 0 ok, 1 usage, 2 numeric/domain, 3 oracle-check failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cathub/error.hpp"
#include "cathub/sweeps.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitOracle = 3;

const std::vector<std::string> kCommands = {"fidelity-sweep", "prob-sweep", "meanphoton-sweep", "detector-report",
                                            "oracle-check"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* flag) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) {
        out.push_back(static_cast<T>(std::stod(item, &used)));
      } else {
        if (item.find('-') != std::string::npos) throw std::invalid_argument("negative");
        out.push_back(static_cast<T>(std::stoull(item, &used)));
      }
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
      throw cathub::usage_error(std::string("--") + flag + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty() && !s.empty()) throw cathub::usage_error(std::string("--") + flag + ": empty list");
  return out;
}

/// key=value lines become --key value, inserted right after the subcommand so
/// that flags given on the command line come later and win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") path = args[i + 1];
  }
  for (const auto& a : args) {
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw cathub::usage_error("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw cathub::usage_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto p = s.find_first_not_of(" \t\r");
      const auto q = s.find_last_not_of(" \t\r");
      return p == std::string::npos ? std::string() : s.substr(p, q - p + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") throw cathub::usage_error(path + ":" + std::to_string(lineno) + ": bad key");
    if (key == "all-partitions") {
      if (value == "true" || value == "1") injected.push_back("--all-partitions");
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  std::size_t at = 1;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (std::find(kCommands.begin(), kCommands.end(), args[i]) != kCommands.end()) {
      at = i + 1;
      break;
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
  return args;
}

struct Flags {
  std::string out;
  std::string config;
  int workers = 0;
  int precision = 12;
  std::string parity = "even";
  std::string n_list;
  std::optional<double> beta;
  double beta_min = 0.5;
  double beta_max = 6.0;
  double beta_step = 0.05;
  std::string t_list;
  std::string k_list;
  std::string s_list;
  double eta = 0.98;
  std::optional<double> mean_n;
  std::size_t cutoff = 60;
  double tolerance = 1e-9;
  bool all_partitions = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out, "Write CSV here instead of stdout");
  app->add_option("--config", f.config, "key=value file; command-line flags override it");
  app->add_option("--workers", f.workers, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  app->add_option("--precision", f.precision, "Significant digits in CSV output")->check(CLI::Range(1, 17));
}

void add_beta(CLI::App* app, Flags& f) {
  app->add_option("--beta", f.beta, "Single cat amplitude (overrides the range)");
  app->add_option("--beta-min", f.beta_min, "First beta of the grid");
  app->add_option("--beta-max", f.beta_max, "Last beta of the grid");
  app->add_option("--beta-step", f.beta_step, "Beta grid step");
}

cathub::SweepSpec to_spec(const std::string& command, const Flags& f) {
  cathub::SweepSpec spec;
  spec.command = command;
  try {
    spec.parity = cathub::parse_parity(f.parity);
  } catch (const std::exception&) {
    throw cathub::usage_error("--parity must be even or odd");
  }
  spec.n_list = parse_list<std::uint32_t>(f.n_list, "N");
  if (f.beta) {
    spec.beta = {*f.beta, *f.beta, 1.0};
  } else {
    spec.beta = {f.beta_min, f.beta_max, f.beta_step};
  }
  spec.t_list = parse_list<double>(f.t_list, "t");
  spec.k_list = parse_list<std::size_t>(f.k_list, "k");
  spec.s_list = parse_list<double>(f.s_list, "s");
  spec.eta = f.eta;
  spec.mean_n = f.mean_n;
  spec.cutoff = f.cutoff;
  spec.tolerance = f.tolerance;
  spec.all_partitions = f.all_partitions;
  spec.out = f.out;
  spec.precision = f.precision;
  spec.workers = f.workers > 0 ? f.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!(spec.tolerance > 0)) throw cathub::usage_error("--tol must be positive");
  if (!(spec.eta > 0 && spec.eta <= 1)) throw cathub::usage_error("--eta must lie in (0, 1]");
  return spec;
}

/// Buffers the CSV and writes it once the command succeeded.
void emit(const cathub::SweepSpec& spec, const std::string& text) {
  if (spec.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(spec.out, std::ios::binary);
  if (!out) throw cathub::usage_error("cannot write " + spec.out);
  out << text;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const cathub::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Cat-state hub sweeps and self-check"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  Flags f;

  auto* fid = app.add_subcommand("fidelity-sweep", "Optimal y and fidelity per (N, beta)");
  add_common(fid, f);
  fid->add_option("--parity", f.parity, "even or odd");
  fid->add_option("--N", f.n_list, "Comma-separated removed-photon counts");
  add_beta(fid, f);

  auto* mean = app.add_subcommand("meanphoton-sweep", "Mean photon number at the optimal y per (N, beta)");
  add_common(mean, f);
  mean->add_option("--parity", f.parity, "even or odd");
  mean->add_option("--N", f.n_list, "Comma-separated removed-photon counts");
  add_beta(mean, f);

  auto* prob = app.add_subcommand("prob-sweep", "Two-splitter outcome probabilities at the optimal y");
  add_common(prob, f);
  prob->add_option("--N", f.n_list, "Total detected photons");
  prob->add_option("--t", f.t_list, "Comma-separated transmittances");
  prob->add_flag("--all-partitions", f.all_partitions, "Include odd n1 for even totals");
  add_beta(prob, f);

  auto* det = app.add_subcommand("detector-report", "Inefficient-detector reduction factors and multipliers");
  add_common(det, f);
  det->add_option("--t", f.t_list, "Comma-separated transmittances");
  det->add_option("--k", f.k_list, "Comma-separated splitter counts");
  det->add_option("--eta", f.eta, "Detector efficiency");
  det->add_option("--mean-n", f.mean_n, "Mean photon number used for the multipliers");
  det->add_option("--N", f.n_list, "Removed photons for the exact comparison");
  det->add_option("--beta", f.beta, "Cat amplitude for the exact comparison");

  auto* orc = app.add_subcommand("oracle-check", "Closed forms against brute-force splitter simulation");
  add_common(orc, f);
  std::size_t max_k = 3;
  std::uint32_t max_total = 6;
  orc->add_option("--k", max_k, "Largest number of splitters")->check(CLI::PositiveNumber);
  orc->add_option("--N", max_total, "Largest total detected photons");
  orc->add_option("--t", f.t_list, "Comma-separated transmittances");
  orc->add_option("--s", f.s_list, "Comma-separated squeezing parameters");
  orc->add_option("--cutoff", f.cutoff, "Source index cutoff (2 * cutoff photons)");
  orc->add_option("--tol", f.tolerance, "Tolerance on fidelity deficit and probability error");

  try {
    std::vector<std::string> rest(args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    if (name == "prob-sweep") {
      if (!chosen->count("--beta-min")) f.beta_min = 2.2;
      if (!chosen->count("--beta-max")) f.beta_max = 3.0;
    }
    if (!chosen->count("--N")) f.n_list = name == "detector-report" ? "90" : "";
    cathub::SweepSpec spec = to_spec(name, f);
    std::ostringstream csv;
    if (name == "fidelity-sweep") {
      cathub::fidelity_sweep(spec, csv);
    } else if (name == "meanphoton-sweep") {
      cathub::meanphoton_sweep(spec, csv);
    } else if (name == "prob-sweep") {
      cathub::prob_sweep(spec, csv);
    } else if (name == "detector-report") {
      if (!f.beta) spec.beta = {6.0, 6.0, 1.0};
      std::ostringstream summary;
      cathub::detector_report(spec, csv, summary);
      std::cerr << summary.str();
    } else {
      spec.max_k = max_k;
      spec.max_total = max_total;
      const cathub::OracleReport rep = cathub::oracle_check(spec);
      std::ostringstream report;
      report << "cases " << rep.cases << "\n"
             << "worst fidelity deficit " << rep.worst_fidelity_deficit << "\n"
             << "worst probability relative error " << rep.worst_prob_rel_error << "\n";
      if (rep.worst) report << "worst case " << cathub::describe(*rep.worst) << "\n";
      for (const auto& c : rep.failures) report << "FAIL " << cathub::describe(c) << "\n";
      report << (rep.passed() ? "PASS" : "FAIL") << " (tolerance " << spec.tolerance << ")\n";
      emit(spec, report.str());
      return rep.passed() ? 0 : kExitOracle;
    }
    emit(spec, csv.str());
  } catch (const cathub::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
