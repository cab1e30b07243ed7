// Acceptance suite. Each criterion prints its measurements followed by one
// PASS/FAIL line. Run with no argument for all criteria or with a criterion
// number (1..10) for one; the exit status is nonzero if any run criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "cathub/detector.hpp"
#include "cathub/optimize.hpp"
#include "cathub/oracle.hpp"
#include "cathub/probabilities.hpp"
#include "cathub/sweeps.hpp"

using namespace cathub;

namespace {

struct Check {
  bool ok = true;

  void note(const char* fmt, auto... args) {
    std::printf("    ");
    if constexpr (sizeof...(args) == 0) {
      std::fputs(fmt, stdout);
    } else {
      std::printf(fmt, args...);
    }
    std::printf("\n");
  }
  /// Records one sub-check and prints it.
  void expect(bool cond, const std::string& what) {
    std::printf("    %s %s\n", cond ? "ok  " : "FAIL", what.c_str());
    ok = ok && cond;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> figure_grid() { return BetaGrid{0.5, 7.0, 0.05}.values(); }

// 1. fidelity above 0.99 for the largest cats at beta = 5
void large_cat_fidelity(Check& c) {
  for (auto [parity, n] : {std::pair{Parity::even, 90u}, std::pair{Parity::odd, 91u}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const OptResult r = optimal_y(parity, n, 5.0);
    const double dt = seconds_since(t0);
    c.expect(r.fidelity > 0.99, fmt("%s N=%u beta=5: F* = %.6f at y* = %.6f (> 0.99)", std::string(to_string(parity)).c_str(),
                                    n, r.fidelity, r.y_star));
    c.expect(dt <= 120, fmt("runtime %.3f s (<= 120 s)", dt));
    c.note("scan local maxima: %d", r.scan_local_maxima);
  }
}

// 2. mean photon number at the fidelity-maximizing beta, and <n> ~ beta^2 on the plateau
void mean_photon_ceiling(Check& c) {
  const auto grid = figure_grid();
  const auto opts = parallel_map(grid.size(), 4, [&](std::size_t i) { return optimal_y(Parity::even, 90, grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (opts[i].fidelity > opts[best].fidelity) best = i;
  }
  const double n_at_best = mean_photon(Parity::even, 90, opts[best].y_star);
  c.expect(std::abs(n_at_best - 35) <= 2,
           fmt("N=90: F* is largest at beta=%.2f (F*=%.9f), where <n> = %.4f (want 35 +- 2)", grid[best],
               opts[best].fidelity, n_at_best));
  bool monotone = true;
  for (std::size_t i = 1; i < grid.size(); ++i) monotone = monotone && opts[i].fidelity <= opts[i - 1].fidelity;
  c.note("N=90: F* %s nonincreasing in beta over [%.2f, %.2f]", monotone ? "is" : "is not", grid.front(), grid.back());
  for (double b : {5.0, 5.5, 6.0, 6.5, 7.0}) {
    const std::size_t i = static_cast<std::size_t>(std::lround((b - 0.5) / 0.05));
    c.note("N=90 beta=%.2f: F*=%.6f <n>=%.4f", b, opts[i].fidelity, mean_photon(Parity::even, 90, opts[i].y_star));
  }

  for (std::uint32_t n : {10u, 20u, 40u, 90u}) {
    const auto rs = parallel_map(grid.size(), 4, [&](std::size_t i) { return optimal_y(Parity::even, n, grid[i]); });
    double worst = 0, worst_beta = 0, lo = 0, hi = 0;
    int points = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] < 1.5 - 1e-9 || rs[i].fidelity < 0.99) continue;
      if (points++ == 0) lo = grid[i];
      hi = grid[i];
      const double b2 = grid[i] * grid[i];
      const double dev = std::abs(mean_photon(Parity::even, n, rs[i].y_star) - b2) / b2;
      if (dev > worst) {
        worst = dev;
        worst_beta = grid[i];
      }
    }
    c.expect(points > 0 && worst <= 0.1,
             fmt("N=%u plateau (beta >= 1.5, F* >= 0.99): %d points in [%.2f, %.2f], max |<n>-beta^2|/beta^2 = %.4f at "
                 "beta=%.2f (<= 0.1)",
                 n, points, lo, hi, worst, worst_beta));
  }
}

// 3. reduction factors with <n> = 35
void reduction_factors(Check& c) {
  struct Case {
    std::size_t k;
    double t, quoted;
  };
  for (const Case& q : {Case{1, 0.9, 8.21}, Case{1, 0.95, 3.78}, Case{1, 0.98, 1.44}, Case{2, 0.9, 18.35},
                        Case{2, 0.95, 7.97}, Case{2, 0.98, 2.94}}) {
    const double big_t = std::pow(q.t * q.t, static_cast<double>(q.k));
    const double rf = reduction_factor(big_t, 35);
    const double rel = std::abs(rf - q.quoted) / q.quoted;
    c.expect(rel <= 0.005, fmt("k=%zu t=%.2f: %.4f vs %.2f (rel %.2e <= 5e-3)", q.k, q.t, rf, q.quoted, rel));
  }
}

// 4. first-order fidelity multipliers at eta = 0.98
void fidelity_multipliers(Check& c) {
  const double eta = 0.98;
  struct Case {
    std::size_t k;
    double t, quoted;
  };
  for (const Case& q : {Case{1, 0.9, 0.8358}, Case{1, 0.95, 0.9244}, Case{1, 0.98, 0.9712}, Case{2, 0.95, 0.8406}}) {
    const double m = fidelity_multiplier(std::pow(q.t * q.t, static_cast<double>(q.k)), 35, eta);
    c.expect(std::abs(m - q.quoted) <= 1e-3,
             fmt("<n>=35 k=%zu t=%.2f: %.5f vs %.4f (|diff| %.1e <= 1e-3)", q.k, q.t, m, q.quoted, std::abs(m - q.quoted)));
  }
  struct Computed {
    std::uint32_t n;
    double beta, t, quoted;
  };
  for (const Computed& q : {Computed{20, 3.0, 0.9, 0.9162}, Computed{10, 2.5, 0.95, 0.9727}}) {
    const OptResult r = optimal_y(Parity::even, q.n, q.beta);
    const double mean_n = mean_photon(Parity::even, q.n, r.y_star);
    const double m = lossy_fidelity_firstorder(std::pow(q.t, 4), q.n, Parity::even, eta, r.y_star);
    c.expect(std::abs(m - q.quoted) <= 5e-3,
             fmt("N=%u beta=%.1f t=%.2f pair: computed <n>=%.4f, multiplier %.5f vs %.4f (|diff| %.1e <= 5e-3)", q.n,
                 q.beta, q.t, mean_n, m, q.quoted, std::abs(m - q.quoted)));
  }
}

// 5. orders of magnitude of two-detector success probabilities
void probability_orders(Check& c) {
  struct Case {
    std::uint32_t n;
    double beta, t;
    std::uint32_t n1, n2;
    double quoted;
  };
  for (const Case& q : {Case{20, 3.0, 0.9, 10, 10, 1e-9}, Case{10, 2.5, 0.95, 5, 5, 1e-7}}) {
    const OptResult r = optimal_y(Parity::even, q.n, q.beta);
    const HubConfig cfg = HubConfig::for_final_y(r.y_star, {q.t, q.t});
    const LogReal p = joint_success_prob(cfg, Outcome{q.n1, q.n2});
    const double orders = static_cast<double>(p.log10_mag()) - std::log10(q.quoted);
    c.expect(std::abs(orders) <= 1, fmt("(%u,%u) t=%.2f pair beta=%.1f: y2=%.6f s=%.4f P=%.3e vs ~%.0e (%.2f orders, <= 1)",
                                        q.n1, q.n2, q.t, q.beta, r.y_star, cfg.squeezing(), p.to_double(), q.quoted, orders));
  }
}

// 6. demultiplexing ratio
void demux(Check& c) {
  double worst = 0;
  std::size_t cases = 0;
  for (double t : {0.7, 0.8, 0.9}) {
    for (double s : {0.3, 0.6, 1.0}) {
      for (std::size_t k = 1; k <= 3; ++k) {
        const HubConfig multi(s, std::vector<double>(k, t));
        const HubConfig single = HubConfig::for_final_y(multi.y_final(), {t});
        const long double prefactor = std::log(std::cosh(static_cast<long double>(single.squeezing()))) -
                                      std::log(std::cosh(static_cast<long double>(multi.squeezing())));
        for_each_outcome(k, 6, [&](const Outcome& o) {
          const LogReal gain =
              joint_success_prob(multi, o) / success_prob_single(o.m_n(), o.parity(), t, single.squeezing());
          const LogReal expect = demux_ratio(o, t) * LogReal::from_log(prefactor);
          worst = std::max(worst, std::abs(static_cast<double>(std::expm1(gain.log_mag() - expect.log_mag()))));
          ++cases;
        });
      }
    }
  }
  c.expect(worst <= 1e-10, fmt("%zu outcomes (k <= 3, N <= 6, t in {0.7,0.8,0.9}, s in {0.3,0.6,1}): worst relative "
                               "error %.2e (<= 1e-10)",
                               cases, worst));
  c.note("the single-splitter side is rescaled by cosh s_single / cosh s_multi so both carry the same prefactor");
  const double multinomial = demux_ratio(Outcome{10, 10}, 1.0).to_double();
  c.expect(std::llround(multinomial) == 184756 && std::abs(multinomial - 184756) < 1e-8 * 184756,
           fmt("20!/(10!10!) = %.6f (exact 184756)", multinomial));
}

// 7. brute-force oracle equivalence
void oracle_equivalence(Check& c) {
  SweepSpec spec;
  spec.workers = 4;
  const auto t0 = std::chrono::steady_clock::now();
  const OracleReport rep = oracle_check(spec);
  const double dt = seconds_since(t0);
  c.expect(rep.worst_fidelity_deficit <= 1e-9, fmt("%zu cases: worst fidelity deficit %.2e (<= 1e-9)", rep.cases,
                                                   rep.worst_fidelity_deficit));
  c.expect(rep.worst_prob_rel_error <= 1e-9, fmt("worst probability relative error %.2e (<= 1e-9)", rep.worst_prob_rel_error));
  c.expect(dt <= 300, fmt("runtime %.1f s (<= 300 s)", dt));
  if (rep.worst) c.note("worst case %s", describe(*rep.worst).c_str());
}

// 8. normalization suites
void normalization(Check& c) {
  double worst_norm = 0;
  for (Parity p : {Parity::even, Parity::odd}) {
    for (std::uint32_t m = 0; m <= 45; ++m) {
      for (int i = 1; i <= 9; ++i) {
        worst_norm = std::max(worst_norm, std::abs(heralded_state(p, m, 0.05 * i).norm_squared() - 1));
      }
    }
  }
  c.expect(worst_norm <= 1e-10, fmt("heralded norms, both parities, m <= 45, y in {0.05..0.45}: max |norm-1| = %.2e", worst_norm));

  double worst_sum = 1;
  for (double s : {0.2, 0.4, 0.6, 0.8}) {
    for (const std::vector<double>& ts : {std::vector<double>{0.7}, std::vector<double>{0.9}, std::vector<double>{0.8, 0.9},
                                          std::vector<double>{0.7, 0.7}}) {
      const HubConfig cfg(s, ts);
      LogReal total;
      for_each_outcome(ts.size(), 120, [&](const Outcome& o) { total += joint_success_prob(cfg, o); });
      worst_sum = std::min(worst_sum, total.to_double());
    }
  }
  c.expect(worst_sum >= 1 - 1e-8, fmt("outcome sums (k <= 2, s <= 0.8, N <= 120): min %.12f (>= 1 - 1e-8)", worst_sum));

  double worst_povm = 0;
  for (double eta : {0.5, 0.9, 0.98, 1.0}) {
    std::vector<double> sums(101, 0.0);
    for (std::uint32_t m = 0; m <= 100; ++m) {
      const PovmElement e = povm_element(m, eta, 100);
      for (std::size_t j = 0; j <= 100; ++j) sums[j] += e.weight(j);
    }
    for (double s : sums) worst_povm = std::max(worst_povm, std::abs(s - 1));
  }
  c.expect(worst_povm <= 1e-12, fmt("POVM completeness, eta in {0.5,0.9,0.98,1}, j <= 100: max |sum-1| = %.2e", worst_povm));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// 9. exact lossy results against the first-order expansion
void perturbative(Check& c) {
  const std::vector<double> etas{0.9, 0.95, 0.975, 0.9875};
  struct Case {
    std::uint32_t n;
    double beta, t;
  };
  for (const Case& q : {Case{20, 3.0, 0.95}, Case{10, 2.5, 0.9}, Case{90, 5.0, 0.98}}) {
    const OptResult r = optimal_y(Parity::even, q.n, q.beta);
    const HubConfig cfg = HubConfig::for_final_y(r.y_star, {q.t});
    const double f1 = lossy_fidelity_exact(cfg, q.n, 1.0, q.beta);
    const double p1 = lossy_prob(cfg, q.n, 1.0).to_double();
    std::vector<double> ds, gaps, trade_err;
    for (double eta : etas) {
      const double exact = lossy_fidelity_exact(cfg, q.n, eta, q.beta);
      const double first = f1 * lossy_fidelity_firstorder(q.t * q.t, q.n, Parity::even, eta, r.y_star);
      ds.push_back(1 - eta);
      gaps.push_back(std::abs(exact - first));
      const double dp = lossy_prob(cfg, q.n, eta).to_double() / std::pow(eta, q.n) - p1;
      const Tradeoff tr = tradeoff_product(q.t * q.t, q.n, Parity::even, eta, r.y_star, f1, p1);
      trade_err.push_back(std::abs((f1 - exact) * dp / tr.closed_form - 1));
    }
    const double slope = loglog_slope(ds, gaps);
    c.expect(std::abs(slope - 2) <= 0.1,
             fmt("N=%u beta=%.1f t=%.2f: |F_exact - F_first| = %.2e..%.2e, log-log slope %.3f (2.0 +- 0.1)", q.n, q.beta,
                 q.t, gaps.front(), gaps.back(), slope));
    const double tslope = loglog_slope(ds, trade_err);
    c.expect(std::abs(tslope - 1) <= 0.1 && trade_err.back() < trade_err.front(),
             fmt("  dF*dP / closed form - 1 = %.3e..%.3e, slope %.3f (first-order agreement: slope 1 +- 0.1)",
                 trade_err.front(), trade_err.back(), tslope));
  }
}

// 10. structure of the two-detector probabilities over beta in [2.2, 3]
LogReal cfg_prob(const HubConfig& cfg, std::uint32_t n1) { return joint_success_prob(cfg, Outcome{n1, 20 - n1}); }

void balanced_split(Check& c) {
  const auto betas = BetaGrid{2.2, 3.0, 0.05}.values();
  const auto ys = parallel_map(betas.size(), 4, [&](std::size_t i) { return optimal_y(Parity::even, 20, betas[i]).y_star; });
  for (double t : {0.8, 0.77}) {
    int balanced_wins = 0;
    std::string losers;
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const HubConfig cfg = HubConfig::for_final_y(ys[b], {t, t});
      std::uint32_t arg = 0, even_arg = 0;
      LogReal best, even_best;
      for (std::uint32_t n1 = 0; n1 <= 20; ++n1) {
        const LogReal p = joint_success_prob(cfg, Outcome{n1, 20 - n1});
        if (p > best) {
          best = p;
          arg = n1;
        }
        if (n1 % 2 == 0 && p > even_best) {
          even_best = p;
          even_arg = n1;
        }
      }
      if (arg == 10) {
        ++balanced_wins;
      } else if (b % 4 == 0) {
        losers += fmt(" beta=%.2f->(%u,%u) even:(%u,%u) P(10,10)/max=%.3g", betas[b], arg, 20 - arg, even_arg,
                      20 - even_arg, (cfg_prob(cfg, 10) / best).to_double());
      }
    }
    c.expect(balanced_wins == static_cast<int>(betas.size()),
             fmt("t=%.2f: (10,10) is the most probable partition of 20 at %d of %zu beta", t, balanced_wins, betas.size()));
    if (!losers.empty()) c.note("t=%.2f maxima elsewhere:%s", t, losers.c_str());
  }
  double lo = 1e300, hi = 0;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double a = joint_success_prob(HubConfig::for_final_y(ys[b], {0.77, 0.77}), Outcome{10, 10}).to_double();
    const double d = joint_success_prob(HubConfig::for_final_y(ys[b], {0.8, 0.8}), Outcome{10, 10}).to_double();
    lo = std::min(lo, a / d);
    hi = std::max(hi, a / d);
  }
  c.expect(lo >= 30 && hi <= 300, fmt("P(10,10) at t=0.77 over t=0.8: factor %.1f..%.1f (within [30, 300])", lo, hi));
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Check&)> run;
};

const std::vector<Criterion> kCriteria = {
    {1, "large-cat fidelity", large_cat_fidelity},
    {2, "mean-photon ceiling", mean_photon_ceiling},
    {3, "detector reduction factors", reduction_factors},
    {4, "fidelity multipliers", fidelity_multipliers},
    {5, "success-probability orders", probability_orders},
    {6, "demultiplexing ratio", demux},
    {7, "oracle equivalence", oracle_equivalence},
    {8, "normalization suites", normalization},
    {9, "perturbative consistency", perturbative},
    {10, "two-detector probability structure", balanced_split},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool all_ok = true;
  int ran = 0;
  for (const auto& crit : kCriteria) {
    if (only != 0 && crit.id != only) continue;
    ++ran;
    std::printf("criterion %d: %s\n", crit.id, crit.title);
    Check c;
    try {
      crit.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s\n", c.ok ? "PASS" : "FAIL", crit.id, crit.title);
    std::fflush(stdout);
    all_ok = all_ok && c.ok;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %s\n", argv[1]);
    return 2;
  }
  return all_ok ? 0 : 1;
}
