#include "sudas/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "monotone_search.hpp"
#include "sudas/errors.hpp"

namespace sudas {

std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo, double hi,
                                     double tol) {
  if (!(lo < hi)) throw InvalidInput("golden_max: lo must be < hi");
  if (!(tol > 0.0)) throw InvalidInput("golden_max: tol must be > 0");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  const double width = tol * (hi - lo);
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > width) {
    const double before = b - a;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
    // Stop once the bracket is at floating-point resolution.
    if (!(b - a < before)) break;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

double reference_energy_efficiency(const AllocationPolicy& p, const EffectiveChannels& eff,
                                   const SystemConfig& cfg, RateMode mode) {
  double bits = 0.0;
  double watts = cfg.p_circuit_bs + cfg.p_antenna_bs * static_cast<double>(cfg.n_antennas) +
                 cfg.p_circuit_sudac * static_cast<double>(cfg.n_sudacs) +
                 cfg.p_circuit_ue * static_cast<double>(cfg.n_ues);
  for (std::size_t i = 0; i < eff.n_f(); ++i)
    for (std::size_t k = 0; k < eff.n_k(); ++k)
      for (std::size_t n = 0; n < eff.n_s; ++n) {
        const double sd = p.s_dl(i, k), su = p.s_ul(i, k);
        if (sd > 0.0) {
          const double a = eff.g_bs(i, n) * p.e_bs(i, k, n) / sd;
          const double b = eff.g_sue(i, k, n) * p.e_sue(i, k, n) / sd;
          const double snr = mode == RateMode::exact ? a * b / (1.0 + a + b)
                             : (a + b > 0.0 ? a * b / (a + b) : 0.0);
          bits += sd * cfg.subcarrier_bandwidth_hz * std::log2(1.0 + snr);
        }
        if (su > 0.0) {
          const double a = eff.g_ues(i, k, n) * p.e_ues(i, k, n) / su;
          const double b = eff.g_sb(i, n) * p.e_sb(i, k, n) / su;
          const double snr = mode == RateMode::exact ? a * b / (1.0 + a + b)
                             : (a + b > 0.0 ? a * b / (a + b) : 0.0);
          bits += su * cfg.subcarrier_bandwidth_hz * std::log2(1.0 + snr);
        }
        watts += cfg.eps_bs * p.e_bs(i, k, n) + cfg.eps_sudas * p.e_sue(i, k, n) +
                 cfg.eps_ue[k] * p.e_ues(i, k, n) + cfg.eps_sudas * p.e_sb(i, k, n);
      }
  return bits / watts;
}

namespace {

constexpr std::size_t kMaxUes = 2;
constexpr std::size_t kMaxSubcarriers = 16;
constexpr std::size_t kMaxStreams = 2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One direction as two hops: hop a carries per-UE budget groups, hop b one
// shared budget. DL: a = BS, b = SUDAS -> UE. UL: a = UE, b = SUDAS -> BS.
struct Direction {
  std::size_t nf = 0, nk = 0, ns = 0, na = 0, nb = 0;
  double bw = 0.0;
  std::vector<std::size_t> group;  // UE -> hop-a budget group
  std::vector<double> budget_a;
  double budget_b = 0.0;
  std::vector<double> eps_a;       // per UE
  double eps_b = 0.0;
  std::vector<double> floors;
  std::vector<std::vector<double>> grid_a;  // per UE
  std::vector<double> grid_b;
  std::vector<double> rate;  // [i][k][n][ja][jb] bit/s/Hz

  double r(std::size_t i, std::size_t k, std::size_t n, std::size_t ja, std::size_t jb) const {
    return rate[(((i * nk + k) * ns + n) * na + ja) * nb + jb];
  }
};

struct Choice {
  std::vector<std::size_t> win;  // per subcarrier
  std::vector<std::size_t> ja;   // [i][n] for the winner
  std::vector<std::size_t> jb;
};

struct Outcome {
  bool feasible = false;
  double u = 0.0;     // bit/s
  double cost = 0.0;  // W, eps-weighted
  Choice choice;
};

std::vector<double> power_grid(double budget, const OracleGrids& g) {
  std::vector<double> out{0.0};
  const double top = budget / g.alpha_step;
  const std::size_t n = g.power_points;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = n > 1 ? static_cast<double>(n - 1 - j) / static_cast<double>(n - 1) : 0.0;
    out.push_back(top * std::pow(g.power_span, t));
  }
  return out;
}

Direction make_direction(bool downlink, const EffectiveChannels& eff, const SystemConfig& cfg,
                         const OracleGrids& grids) {
  Direction d;
  d.nf = eff.n_f();
  d.nk = eff.n_k();
  d.ns = eff.n_s;
  d.bw = cfg.subcarrier_bandwidth_hz;
  d.group.resize(d.nk);
  if (downlink) {
    d.budget_a = {cfg.p_bs_max};
    d.budget_b = cfg.p_sudac_dl_max;
    d.eps_a.assign(d.nk, cfg.eps_bs);
    d.floors = cfg.r_min_dl;
  } else {
    d.budget_a = cfg.p_ue_max;
    d.budget_b = cfg.p_sudas_ul_max;
    d.eps_a = cfg.eps_ue;
    d.floors = cfg.r_min_ul;
  }
  d.eps_b = cfg.eps_sudas;
  for (std::size_t k = 0; k < d.nk; ++k) {
    d.group[k] = downlink ? 0 : k;
    d.grid_a.push_back(power_grid(d.budget_a[d.group[k]], grids));
  }
  d.grid_b = power_grid(d.budget_b, grids);
  d.na = d.grid_a[0].size();
  d.nb = d.grid_b.size();
  d.rate.resize(d.nf * d.nk * d.ns * d.na * d.nb);
  for (std::size_t i = 0; i < d.nf; ++i)
    for (std::size_t k = 0; k < d.nk; ++k)
      for (std::size_t n = 0; n < d.ns; ++n) {
        const double ga = downlink ? eff.g_bs(i, n) : eff.g_ues(i, k, n);
        const double gb = downlink ? eff.g_sue(i, k, n) : eff.g_sb(i, n);
        for (std::size_t ja = 0; ja < d.na; ++ja)
          for (std::size_t jb = 0; jb < d.nb; ++jb)
            d.rate[(((i * d.nk + k) * d.ns + n) * d.na + ja) * d.nb + jb] =
                std::log2(1.0 + sinr(grids.mode, ga * d.grid_a[k][ja], gb * d.grid_b[jb]));
      }
  return d;
}

// Lagrangian-priced choice at share x: per tuple the grid point maximizing
// (1 + w) B R - price_a P_a - price_b P_b, per subcarrier the best UE.
class PricedDirection {
 public:
  PricedDirection(const Direction& d, double x, double eta)
      : d_(d), x_(x), eta_(eta), mu_a_(d.budget_a.size(), 0.0), w_(d.nk, 0.0) {
    choice_.win.assign(d.nf, 0);
    choice_.ja.assign(d.nf * d.ns, 0);
    choice_.jb.assign(d.nf * d.ns, 0);
    assign();
  }

  void warm(const std::vector<double>& mu_a, double mu_b, const std::vector<double>& w) {
    mu_a_ = mu_a;
    mu_b_ = mu_b;
    w_ = w;
    assign();
  }

  Outcome solve() {
    for (std::size_t round = 0; round < 30; ++round) {
      const auto mu_a_old = mu_a_;
      const double mu_b_old = mu_b_;
      const auto w_old = w_;
      for (std::size_t g = 0; g < mu_a_.size(); ++g) search_a(g);
      search_b();
      for (std::size_t k = 0; k < d_.nk; ++k)
        if (d_.floors[k] > 0.0) search_w(k);
      if (close(mu_a_, mu_a_old) && close({mu_b_}, {mu_b_old}) && close(w_, w_old)) break;
    }
    // Hops substitute for each other on the grid, so exact raises can
    // ping-pong; geometric raises of the violated prices always terminate.
    for (std::size_t pass = 0; pass < 10 && !budgets_ok(); ++pass) {
      for (std::size_t g = 0; g < mu_a_.size(); ++g)
        if (energy_a(g) > d_.budget_a[g]) search_a(g, mu_a_[g]);
      if (energy_b() > d_.budget_b) search_b(mu_b_);
    }
    for (std::size_t pass = 0; pass < 5000 && !budgets_ok(); ++pass) {
      for (std::size_t g = 0; g < mu_a_.size(); ++g)
        if (energy_a(g) > d_.budget_a[g])
          mu_a_[g] = std::max(mu_a_[g] * 1.01, price_guess(d_.budget_a[g]) * 1e-6);
      if (energy_b() > d_.budget_b) mu_b_ = std::max(mu_b_ * 1.01, price_guess(d_.budget_b) * 1e-6);
      assign();
    }
    Outcome out;
    out.feasible = budgets_ok();
    for (std::size_t k = 0; k < d_.nk; ++k)
      if (ue_rate(k) < d_.floors[k]) out.feasible = false;
    for (std::size_t k = 0; k < d_.nk; ++k) out.u += ue_rate(k);
    out.cost = cost();
    out.choice = choice_;
    return out;
  }

  const std::vector<double>& mu_a() const { return mu_a_; }
  double mu_b() const { return mu_b_; }
  const std::vector<double>& w() const { return w_; }

 private:
  static bool close(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t j = 0; j < a.size(); ++j)
      if (std::abs(a[j] - b[j]) > 1e-9 * std::max(std::abs(a[j]), std::abs(b[j]))) return false;
    return true;
  }

  void assign() {
    const double pb = mu_b_ + eta_ * d_.eps_b;
    for (std::size_t i = 0; i < d_.nf; ++i) {
      double best_v = kNegInf;
      for (std::size_t k = 0; k < d_.nk; ++k) {
        const double pa = mu_a_[d_.group[k]] + eta_ * d_.eps_a[k];
        const double wk = (1.0 + w_[k]) * d_.bw;
        double v = 0.0;
        std::size_t sel_a[kMaxStreams] = {0, 0}, sel_b[kMaxStreams] = {0, 0};
        for (std::size_t n = 0; n < d_.ns; ++n) {
          double bv = kNegInf;
          for (std::size_t ja = 0; ja < d_.na; ++ja) {
            const double ca = pa * d_.grid_a[k][ja];
            for (std::size_t jb = 0; jb < d_.nb; ++jb) {
              const double val = wk * d_.r(i, k, n, ja, jb) - ca - pb * d_.grid_b[jb];
              if (val > bv) {
                bv = val;
                sel_a[n] = ja;
                sel_b[n] = jb;
              }
            }
          }
          v += bv;
        }
        if (v > best_v) {
          best_v = v;
          choice_.win[i] = k;
          for (std::size_t n = 0; n < d_.ns; ++n) {
            choice_.ja[i * d_.ns + n] = sel_a[n];
            choice_.jb[i * d_.ns + n] = sel_b[n];
          }
        }
      }
    }
  }

  double energy_a(std::size_t g) const {
    double e = 0.0;
    for (std::size_t i = 0; i < d_.nf; ++i) {
      const std::size_t k = choice_.win[i];
      if (d_.group[k] != g) continue;
      for (std::size_t n = 0; n < d_.ns; ++n) e += d_.grid_a[k][choice_.ja[i * d_.ns + n]];
    }
    return x_ * e;
  }

  double energy_b() const {
    double e = 0.0;
    for (std::size_t j = 0; j < d_.nf * d_.ns; ++j) e += d_.grid_b[choice_.jb[j]];
    return x_ * e;
  }

  double ue_rate(std::size_t k) const {
    double r = 0.0;
    for (std::size_t i = 0; i < d_.nf; ++i)
      if (choice_.win[i] == k)
        for (std::size_t n = 0; n < d_.ns; ++n)
          r += d_.r(i, k, n, choice_.ja[i * d_.ns + n], choice_.jb[i * d_.ns + n]);
    return x_ * d_.bw * r;
  }

  double cost() const {
    double c = 0.0;
    for (std::size_t i = 0; i < d_.nf; ++i) {
      const std::size_t k = choice_.win[i];
      for (std::size_t n = 0; n < d_.ns; ++n)
        c += d_.eps_a[k] * d_.grid_a[k][choice_.ja[i * d_.ns + n]] +
             d_.eps_b * d_.grid_b[choice_.jb[i * d_.ns + n]];
    }
    return x_ * c;
  }

  bool budgets_ok() const {
    for (std::size_t g = 0; g < mu_a_.size(); ++g)
      if (energy_a(g) > d_.budget_a[g]) return false;
    return energy_b() <= d_.budget_b;
  }

  // Price scale at which one unit of budget buys about one bit/s/Hz per subcarrier.
  double price_guess(double budget) const {
    return static_cast<double>(d_.nf) * x_ * d_.bw / budget;
  }

  // Smallest multiplier >= floor meeting the budget.
  template <class Energy>
  double search_price(double& mu, double budget, double floor, Energy&& energy) {
    auto f = [&](double t) {
      mu = floor + t;
      assign();
      return energy();
    };
    const double s = price_guess(budget);
    const double guess = mu > floor ? mu - floor : s;
    const auto [t, ok] = detail::smallest_feasible(f, budget, guess, 200, 0.0, 1e-9, 1e-12 * s);
    if (!ok) throw NumericalError("oracle budget multiplier bracket expansion failed");
    f(t);
    return mu;
  }

  void search_a(std::size_t g, double floor = 0.0) {
    search_price(mu_a_[g], d_.budget_a[g], floor, [&] { return energy_a(g); });
  }

  void search_b(double floor = 0.0) {
    search_price(mu_b_, d_.budget_b, floor, [&] { return energy_b(); });
  }

  void search_w(std::size_t k) {
    auto f = [&](double wk) {
      w_[k] = wk;
      assign();
      return -ue_rate(k);
    };
    const auto [wk, ok] =
        detail::smallest_feasible(f, -d_.floors[k], w_[k] > 0.0 ? w_[k] : 1.0, 40, 0.0, 1e-9);
    f(ok ? wk : w_[k]);
  }

  const Direction& d_;
  double x_;
  double eta_;
  std::vector<double> mu_a_;
  double mu_b_ = 0.0;
  std::vector<double> w_;
  Choice choice_;
};

// Exact maximization of U - eta * cost over every grid point of a
// single-tuple direction.
Outcome enumerate_single(const Direction& d, double x, double eta) {
  Outcome best;
  double best_f = kNegInf;
  for (std::size_t ja = 0; ja < d.na; ++ja) {
    const double pa = d.grid_a[0][ja];
    if (x * pa > d.budget_a[0]) continue;
    for (std::size_t jb = 0; jb < d.nb; ++jb) {
      const double pb = d.grid_b[jb];
      if (x * pb > d.budget_b) continue;
      const double u = x * d.bw * d.r(0, 0, 0, ja, jb);
      if (u < d.floors[0]) continue;
      const double c = x * (d.eps_a[0] * pa + d.eps_b * pb);
      if (u - eta * c > best_f) {
        best_f = u - eta * c;
        best.feasible = true;
        best.u = u;
        best.cost = c;
        best.choice = Choice{{0}, {ja}, {jb}};
      }
    }
  }
  return best;
}

Outcome idle(const Direction& d) {
  Outcome o;
  o.feasible = std::none_of(d.floors.begin(), d.floors.end(), [](double f) { return f > 0.0; });
  return o;
}

struct Warm {
  std::vector<double> mu_a;
  double mu_b = 0.0;
  std::vector<double> w;
  bool set = false;
};

void write_direction(AllocationPolicy& p, const Direction& d, const Outcome& o, double x,
                     bool downlink) {
  if (!(x > 0.0)) return;
  for (std::size_t i = 0; i < d.nf; ++i) {
    const std::size_t k = o.choice.win[i];
    (downlink ? p.s_dl : p.s_ul)(i, k) = x;
    for (std::size_t n = 0; n < d.ns; ++n) {
      const double ea = x * d.grid_a[k][o.choice.ja[i * d.ns + n]];
      const double eb = x * d.grid_b[o.choice.jb[i * d.ns + n]];
      if (downlink) {
        p.e_bs(i, k, n) = ea;
        p.e_sue(i, k, n) = eb;
      } else {
        p.e_ues(i, k, n) = ea;
        p.e_sb(i, k, n) = eb;
      }
    }
  }
}

}  // namespace

OracleResult exhaustive_small(const EffectiveChannels& eff, const SystemConfig& cfg,
                              const OracleGrids& grids) {
  cfg.validate();
  if (eff.n_k() > kMaxUes || eff.n_f() > kMaxSubcarriers || eff.n_s > kMaxStreams)
    throw InvalidInput("exhaustive_small: instance exceeds K <= 2, n_F <= 16, N_S <= 2");
  if (eff.n_k() != cfg.n_ues) throw InvalidInput("exhaustive_small: UE count mismatch");
  if (grids.power_points < 1 || !(grids.power_span > 0.0 && grids.power_span < 1.0))
    throw InvalidInput("exhaustive_small: power grid needs >= 1 point and span in (0, 1)");
  const double steps_d = 1.0 / grids.alpha_step;
  const auto steps = static_cast<std::size_t>(std::llround(steps_d));
  if (!(grids.alpha_step > 0.0) || std::abs(steps_d - static_cast<double>(steps)) > 1e-9)
    throw InvalidInput("exhaustive_small: alpha_step must divide 1");

  const Direction dl = make_direction(true, eff, cfg, grids);
  const Direction ul = make_direction(false, eff, cfg, grids);
  const bool single = eff.n_f() * eff.n_k() * eff.n_s == 1;
  const double static_power = cfg.static_power();
  auto share = [&](std::size_t j) { return static_cast<double>(j) / static_cast<double>(steps); };

  std::vector<Warm> warm_dl(steps + 1), warm_ul(steps + 1);
  auto solve_dir = [&](const Direction& d, std::vector<Warm>& warm, std::size_t j, double eta) {
    const double x = share(j);
    if (j == 0) return idle(d);
    if (single) return enumerate_single(d, x, eta);
    PricedDirection pd(d, x, eta);
    if (warm[j].set) pd.warm(warm[j].mu_a, warm[j].mu_b, warm[j].w);
    Outcome o = pd.solve();
    warm[j] = Warm{pd.mu_a(), pd.mu_b(), pd.w(), true};
    return o;
  };

  OracleResult best;
  best.policy = AllocationPolicy::zeros(eff.n_f(), eff.n_k(), eff.n_s);
  double eta = 0.0;
  bool found = false;
  std::vector<Outcome> od(steps + 1), ou(steps + 1);
  for (std::size_t iter = 0; iter < 100; ++iter) {
    for (std::size_t j = 0; j <= steps; ++j) {
      od[j] = solve_dir(dl, warm_dl, j, eta);
      ou[j] = solve_dir(ul, warm_ul, j, eta);
    }
    double it_best = kNegInf;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a <= steps; ++a)
      for (std::size_t b = 0; a + b <= steps; ++b) {
        if (!od[a].feasible || !ou[b].feasible) continue;
        const double ee = (od[a].u + ou[b].u) / (static_power + od[a].cost + ou[b].cost);
        if (ee > it_best) {
          it_best = ee;
          ba = a;
          bb = b;
        }
      }
    if (!(it_best > kNegInf)) break;
    if (found && it_best <= eta * (1.0 + 1e-12)) break;
    found = true;
    eta = it_best;
    AllocationPolicy p = AllocationPolicy::zeros(eff.n_f(), eff.n_k(), eff.n_s);
    p.alpha = share(ba);
    p.beta = share(bb);
    write_direction(p, dl, od[ba], p.alpha, true);
    write_direction(p, ul, ou[bb], p.beta, false);
    best.policy = std::move(p);
    best.eta = eta;
  }
  if (!found) throw InfeasibleError("exhaustive_small: no grid point meets the rate floors");
  return best;
}

}  // namespace sudas
