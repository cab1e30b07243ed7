#pragma once

// Parameter sweeps behind the command-line tool. Each sweep evaluates its grid
// in parallel and writes CSV rows in grid order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cathub/detector.hpp"
#include "cathub/fock.hpp"
#include "cathub/hub.hpp"
#include "cathub/optimize.hpp"
#include "cathub/oracle.hpp"
#include "cathub/probabilities.hpp"
#include "cathub/scs.hpp"

namespace cathub {

/// Bad grid or flag combination; maps to the usage exit code.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BetaGrid {
  double min = 0.5;
  double max = 6.0;
  double step = 0.05;

  /// min, min + step, ... up to max inclusive (to within step/1000).
  std::vector<double> values() const {
    if (!(step > 0) || !(min > 0) || !(max >= min)) throw usage_error("beta grid needs 0 < min <= max and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-3)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = min + static_cast<double>(i) * step;
    return out;
  }
};

struct SweepSpec {
  std::string command;
  Parity parity = Parity::even;
  std::vector<std::uint32_t> n_list;
  BetaGrid beta;
  std::vector<double> t_list;
  std::vector<std::size_t> k_list;
  std::vector<double> s_list;
  double eta = 0.98;
  std::optional<double> mean_n;
  std::uint32_t max_total = 6;
  std::size_t max_k = 3;
  std::size_t cutoff = 60;
  double tolerance = 1e-9;
  bool all_partitions = false;
  std::string out;
  int precision = 12;
  int workers = 1;
};

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads and returns
/// the results in index order. The first exception thrown is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, workers));
  if (n == 1 || count < 2) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n, count); ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Fixed-precision CSV line builder.
class CsvRow {
 public:
  explicit CsvRow(int precision) : precision_(precision) {}

  CsvRow& operator<<(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision_, v);
    return add(buf);
  }
  CsvRow& operator<<(std::uint32_t v) { return add(std::to_string(v)); }
  CsvRow& operator<<(std::size_t v) { return add(std::to_string(v)); }
  CsvRow& operator<<(int v) { return add(std::to_string(v)); }
  CsvRow& operator<<(std::string_view v) { return add(std::string(v)); }
  CsvRow& operator<<(const char* v) { return add(v); }

  std::string str() const { return line_ + "\n"; }

 private:
  CsvRow& add(const std::string& field) {
    if (!first_) line_ += ',';
    line_ += field;
    first_ = false;
    return *this;
  }

  int precision_;
  std::string line_;
  bool first_ = true;
};

namespace detail {

inline void check_parities(Parity parity, const std::vector<std::uint32_t>& n_list) {
  if (n_list.empty()) throw usage_error("N list is empty");
  for (auto n : n_list) {
    if (parity_of(n) != parity) {
      throw usage_error("N = " + std::to_string(n) + " does not match parity " + std::string(to_string(parity)));
    }
  }
}

inline std::vector<std::uint32_t> default_n_list(Parity parity) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t n = 0; n <= 90; n += 10) out.push_back(n + (parity == Parity::odd ? 1 : 0));
  return out;
}

}  // namespace detail

/// parity,N,beta,y_star,fidelity,evaluations,scan_maxima
inline void fidelity_sweep(const SweepSpec& spec, std::ostream& csv) {
  const auto ns = spec.n_list.empty() ? detail::default_n_list(spec.parity) : spec.n_list;
  detail::check_parities(spec.parity, ns);
  const auto betas = spec.beta.values();
  const std::size_t nb = betas.size();
  const auto rows = parallel_map(ns.size() * nb, spec.workers, [&](std::size_t i) {
    const std::uint32_t n = ns[i / nb];
    const double beta = betas[i % nb];
    const OptResult r = optimal_y(spec.parity, n, beta);
    return (CsvRow(spec.precision) << to_string(spec.parity) << n << beta << r.y_star << r.fidelity << r.evaluations << r.scan_local_maxima)
        .str();
  });
  csv << "parity,N,beta,y_star,fidelity,evaluations,scan_maxima\n";
  for (const auto& r : rows) csv << r;
}

/// parity,N,beta,y_star,mean_n,beta_sq
inline void meanphoton_sweep(const SweepSpec& spec, std::ostream& csv) {
  const auto ns = spec.n_list.empty() ? detail::default_n_list(spec.parity) : spec.n_list;
  detail::check_parities(spec.parity, ns);
  const auto betas = spec.beta.values();
  const std::size_t nb = betas.size();
  const auto rows = parallel_map(ns.size() * nb, spec.workers, [&](std::size_t i) {
    const std::uint32_t n = ns[i / nb];
    const double beta = betas[i % nb];
    const OptResult r = optimal_y(spec.parity, n, beta);
    return (CsvRow(spec.precision) << to_string(spec.parity) << n << beta << r.y_star
                                   << mean_photon(spec.parity, n, r.y_star) << beta * beta)
        .str();
  });
  csv << "parity,N,beta,y_star,mean_n,beta_sq\n";
  for (const auto& r : rows) csv << r;
}

/// t,beta,n1,n2,y2,s_backsolved,probability
///
/// Two identical splitters, total N detected photons (default 20), y_2 pinned
/// to the optimal y for the even cat of amplitude beta. Rows whose y_2 would
/// need y_0 >= 1/2 are kept and marked `infeasible`.
inline void prob_sweep(const SweepSpec& spec, std::ostream& csv) {
  const std::uint32_t total = spec.n_list.empty() ? 20 : spec.n_list.front();
  if (spec.n_list.size() > 1) throw usage_error("prob-sweep takes a single total N");
  const Parity parity = parity_of(total);
  const auto ts = spec.t_list.empty() ? std::vector<double>{0.8, 0.77} : spec.t_list;
  for (double t : ts) {
    if (!(t > 0 && t < 1)) throw usage_error("transmittance outside (0, 1)");
  }
  const auto betas = spec.beta.values();
  std::vector<std::uint32_t> splits;
  for (std::uint32_t n1 = 0; n1 <= total; ++n1) {
    if (spec.all_partitions || (n1 % 2 == 0 && (total - n1) % 2 == 0) || parity == Parity::odd) splits.push_back(n1);
  }
  // One optimization per beta, shared by all t and partitions.
  const auto ys = parallel_map(betas.size(), spec.workers,
                               [&](std::size_t i) { return optimal_y(parity, total, betas[i]).y_star; });
  csv << "t,beta,n1,n2,y2,s_backsolved,probability\n";
  for (double t : ts) {
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const double y2 = ys[b];
      std::optional<HubConfig> cfg;
      try {
        cfg = HubConfig::for_final_y(y2, {t, t});
      } catch (const domain_error&) {
      }
      for (std::uint32_t n1 : splits) {
        CsvRow row(spec.precision);
        row << t << betas[b] << n1 << (total - n1) << y2;
        if (cfg) {
          row << cfg->squeezing() << joint_success_prob(*cfg, Outcome{n1, total - n1}).to_double();
        } else {
          row << "infeasible" << "infeasible";
        }
        csv << row.str();
      }
    }
  }
}

/// Reduction factors, first-order multipliers and trade-off coefficients for
/// each (k, t); with --N/--beta also the exact single-splitter multiplier at the
/// optimal y. CSV columns:
/// k,t,T,mean_n,reduction_factor,eta,fidelity_multiplier,probability_multiplier,
/// tradeoff_coefficient,N,beta,y_star,computed_mean_n,firstorder_multiplier,exact_multiplier
inline void detector_report(const SweepSpec& spec, std::ostream& csv, std::ostream& summary) {
  const auto ts = spec.t_list.empty() ? std::vector<double>{0.9, 0.95, 0.98} : spec.t_list;
  const auto ks = spec.k_list.empty() ? std::vector<std::size_t>{1, 2} : spec.k_list;
  const double mean_n = spec.mean_n.value_or(35.0);
  const std::uint32_t n_removed = spec.n_list.empty() ? 90 : spec.n_list.front();
  const Parity parity = parity_of(n_removed);
  const double beta = spec.beta.min;
  const DetectorSpec det(spec.eta);

  const OptResult opt = optimal_y(parity, n_removed, beta);
  const double computed_n = mean_photon(parity, n_removed, opt.y_star);
  const double ideal_f = opt.fidelity;

  struct Row {
    std::size_t k;
    double t;
  };
  std::vector<Row> grid;
  for (std::size_t k : ks) {
    if (k == 0) throw usage_error("k must be at least 1");
    for (double t : ts) {
      if (!(t > 0 && t <= 1)) throw usage_error("transmittance outside (0, 1]");
      grid.push_back({k, t});
    }
  }
  const auto lines = parallel_map(grid.size(), spec.workers, [&](std::size_t i) {
    const auto [k, t] = grid[i];
    const double big_t = std::pow(t * t, static_cast<double>(k));
    const double rf = reduction_factor(big_t, mean_n);
    const double fm = fidelity_multiplier(big_t, mean_n, det.eta);
    const double pm = probability_multiplier(big_t, mean_n, det.eta);
    const double d = 1 - det.eta;
    const double first_computed = fidelity_multiplier(big_t, computed_n, det.eta);
    CsvRow row(spec.precision);
    row << k << t << big_t << mean_n << rf << det.eta << fm << pm << d * d * rf * rf << n_removed << beta
        << opt.y_star << computed_n << first_computed;
    if (k == 1 && 2 * opt.y_star / big_t < 1) {
      const HubConfig cfg = HubConfig::for_final_y(opt.y_star, {t});
      row << lossy_fidelity_exact(cfg, n_removed, det.eta, beta) / ideal_f;
    } else {
      row << "na";
    }
    return std::pair{row.str(), rf};
  });
  csv << "k,t,T,mean_n,reduction_factor,eta,fidelity_multiplier,probability_multiplier,tradeoff_coefficient,N,beta,"
         "y_star,computed_mean_n,firstorder_multiplier,exact_multiplier\n";
  for (const auto& l : lines) csv << l.first;

  char buf[256];
  summary << "detector efficiency eta = " << det.eta << ", <n> = " << mean_n << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double big_t = std::pow(grid[i].t * grid[i].t, static_cast<double>(grid[i].k));
    std::snprintf(buf, sizeof buf, "  k=%zu t=%.4g: reduction factor %.2f, fidelity x %.4f, probability x %.4f\n",
                  grid[i].k, grid[i].t, lines[i].second, fidelity_multiplier(big_t, mean_n, det.eta),
                  probability_multiplier(big_t, mean_n, det.eta));
    summary << buf;
  }
  std::snprintf(buf, sizeof buf, "  N=%u beta=%.4g: y* = %.6g, ideal fidelity %.6f, computed <n> = %.4f\n", n_removed,
                beta, opt.y_star, ideal_f, computed_n);
  summary << buf;
}

struct OracleCase {
  std::vector<double> t;
  double s;
  std::vector<std::uint32_t> counts;
  double fidelity_deficit;
  double prob_rel_error;
};

struct OracleReport {
  std::size_t cases = 0;
  double worst_fidelity_deficit = 0;
  double worst_prob_rel_error = 0;
  std::vector<OracleCase> failures;
  std::optional<OracleCase> worst;

  bool passed() const noexcept { return failures.empty(); }
};

inline std::string describe(const OracleCase& c) {
  std::ostringstream os;
  os << "t=(";
  for (std::size_t i = 0; i < c.t.size(); ++i) os << (i ? "," : "") << c.t[i];
  os << ") s=" << c.s << " outcome=(";
  for (std::size_t i = 0; i < c.counts.size(); ++i) os << (i ? "," : "") << c.counts[i];
  os << ") deficit=" << c.fidelity_deficit << " prob_rel=" << c.prob_rel_error;
  return os.str();
}

/// Compares the brute-force splitter simulation against the closed-form
/// heralded states and probabilities for every k <= max_k, every t tuple from
/// t_list, every s and every outcome with total <= max_total.
inline OracleReport oracle_check(const SweepSpec& spec) {
  const auto ts = spec.t_list.empty() ? std::vector<double>{0.7, 0.8, 0.9} : spec.t_list;
  const auto ss = spec.s_list.empty() ? std::vector<double>{0.3, 0.6, 1.0} : spec.s_list;
  if (spec.max_k == 0) throw usage_error("k must be at least 1");
  struct Job {
    std::vector<double> t;
    double s;
    std::vector<std::uint32_t> counts;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 1; k <= spec.max_k; ++k) {
    std::vector<std::size_t> idx(k, 0);
    while (true) {
      std::vector<double> t(k);
      for (std::size_t i = 0; i < k; ++i) t[i] = ts[idx[i]];
      for (double s : ss) {
        for_each_outcome(k, spec.max_total, [&](const Outcome& o) {
          jobs.push_back({t, s, std::vector<std::uint32_t>(o.counts().begin(), o.counts().end())});
        });
      }
      std::size_t pos = 0;
      while (pos < k && ++idx[pos] == ts.size()) idx[pos++] = 0;
      if (pos == k) break;
    }
  }
  const auto results = parallel_map(jobs.size(), spec.workers, [&](std::size_t i) {
    const Job& j = jobs[i];
    const HubConfig cfg(j.s, j.t);
    const Outcome outcome(j.counts);
    const auto sim = oracle::simulate_hub(cfg, outcome, spec.cutoff);
    const FockVector analytic = heralded_state(outcome.parity(), outcome.m_n(), cfg.y_final());
    const double ov = inner_product(sim.state, analytic);
    const double p_analytic = joint_success_prob(cfg, outcome).to_double();
    const double p_oracle = sim.probability.to_double();
    return OracleCase{j.t, j.s, j.counts, 1 - ov * ov, std::abs(p_oracle - p_analytic) / p_analytic};
  });
  OracleReport rep;
  rep.cases = results.size();
  for (const auto& c : results) {
    if (!rep.worst || std::max(c.fidelity_deficit / spec.tolerance, c.prob_rel_error / spec.tolerance) >
                          std::max(rep.worst->fidelity_deficit / spec.tolerance, rep.worst->prob_rel_error / spec.tolerance)) {
      rep.worst = c;
    }
    rep.worst_fidelity_deficit = std::max(rep.worst_fidelity_deficit, c.fidelity_deficit);
    rep.worst_prob_rel_error = std::max(rep.worst_prob_rel_error, c.prob_rel_error);
    if (!(c.fidelity_deficit <= spec.tolerance) || !(c.prob_rel_error <= spec.tolerance)) rep.failures.push_back(c);
  }
  return rep;
}

}  // namespace cathub
