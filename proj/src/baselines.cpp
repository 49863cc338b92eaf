#include "sudas/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "compensated_sum.hpp"
#include "monotone_search.hpp"
#include "sudas/errors.hpp"

namespace sudas {

const char* to_string(SystemKind s) {
  return s == SystemKind::mimo_benchmark ? "mimo_benchmark" : "no_sudas";
}

const char* to_string(Objective o) { return o == Objective::ee_max ? "ee_max" : "tp_max"; }

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kShortfallPenalty = 1e3;
constexpr double kUnreachableWeight = 1e6;
constexpr double kSearchLogTol = 1e-10;
constexpr int kSplitBits = 20;
constexpr double kShareTol = 1e-12;
constexpr double kFloorSlack = 1e-9;

struct DirectionOutcome {
  double value = 0.0;      // bit/s - eta * W over the active share
  double rate_sum = 0.0;   // bit/s
  double cost = 0.0;       // W, eps-weighted transmit power
  double shortfall = 0.0;  // bit/s summed over UEs
  std::vector<double> rate;
};

// Multiplier search for one direction at a fixed share and energy price.
// Water-filling with level L gives a tuple the streams with g > 1 / L, so with
// gains sorted per tuple the rate and energy follow from prefix sums.
class Direction {
 public:
  Direction(const SingleHopLink& link, double bw)
      : link_(link),
        bw_(bw),
        nf_(link.g.n_f),
        nk_(link.g.n_k),
        ns_(link.g.n_s),
        mu_(link.budgets.size(), 0.0),
        scale_(link.budgets.size(), 1.0),
        w_(nk_, 0.0),
        level_(nk_, 0.0),
        gs_(nf_ * nk_ * ns_),
        order_(nf_ * nk_ * ns_),
        lg_sum_(nf_ * nk_ * (ns_ + 1), 0.0),
        inv_sum_(nf_ * nk_ * (ns_ + 1), 0.0),
        active_(nf_ * nk_, 0),
        e_(nf_ * nk_, 0.0),
        v_(nf_ * nk_, 0.0),
        r_(nf_ * nk_, 0.0),
        win_(nf_, 0) {
    for (std::size_t t = 0; t < nf_ * nk_; ++t) {
      const std::size_t i = t / nk_, k = t % nk_;
      std::size_t* ord = &order_[t * ns_];
      for (std::size_t n = 0; n < ns_; ++n) ord[n] = n;
      std::stable_sort(ord, ord + ns_,
                       [&](std::size_t a, std::size_t b) { return link.g(i, k, a) > link.g(i, k, b); });
      for (std::size_t j = 0; j < ns_; ++j) {
        const double g = link.g(i, k, ord[j]);
        gs_[t * ns_ + j] = g;
        const bool pos = g > 0.0;
        lg_sum_[t * (ns_ + 1) + j + 1] = lg_sum_[t * (ns_ + 1) + j] + (pos ? std::log2(g) : 0.0);
        inv_sum_[t * (ns_ + 1) + j + 1] = inv_sum_[t * (ns_ + 1) + j] + (pos ? 1.0 / g : 0.0);
      }
    }
  }

  DirectionOutcome solve(double share, double eta) {
    share_ = share;
    eta_ = eta;
    std::fill(scale_.begin(), scale_.end(), 1.0);
    DirectionOutcome out;
    out.rate.assign(nk_, 0.0);
    if (!(share > 0.0) || nf_ == 0 || nk_ == 0) {
      for (double f : link_.floors) out.shortfall += f;
      std::fill(level_.begin(), level_.end(), 0.0);
      std::fill(active_.begin(), active_.end(), 0);
      return out;
    }
    for (std::size_t k = 0; k < nk_; ++k) update_ue(k);
    pick_winners();

    const auto n_floors = std::count_if(link_.floors.begin(), link_.floors.end(),
                                        [](double f) { return f > 0.0; });
    // A floor search re-solves its own group, so one pass is exact here.
    const bool one_pass = link_.budgets.size() == 1 && n_floors <= 1;
    for (std::size_t round = 0; round < 40; ++round) {
      const auto mu_old = mu_;
      const auto w_old = w_;
      if (!one_pass || n_floors == 0)
        for (std::size_t g = 0; g < mu_.size(); ++g) search_mu(g);
      for (std::size_t k = 0; k < nk_; ++k)
        if (link_.floors[k] > 0.0) search_w(k);
      if (one_pass || (close_all(mu_, mu_old) && close_all(w_, w_old))) break;
    }
    enforce_budgets();

    detail::CompensatedSum val, rate, cost;
    for (std::size_t i = 0; i < nf_; ++i) {
      const std::size_t k = win_[i];
      const double rk = share_ * bw_ * r_[i * nk_ + k];
      const double c = share_ * link_.eps[k] * e_[i * nk_ + k];
      rate.add(rk);
      cost.add(c);
      val.add(rk - eta_ * c);
      out.rate[k] += rk;
    }
    out.value = val.value();
    out.rate_sum = rate.value();
    out.cost = cost.value();
    for (std::size_t k = 0; k < nk_; ++k)
      out.shortfall += std::max(0.0, link_.floors[k] - out.rate[k]);
    return out;
  }

  // Per-time powers restricted to winners.
  Tensor3 winner_powers() const {
    Tensor3 p(nf_, nk_, ns_);
    for (std::size_t i = 0; i < nf_; ++i) {
      const std::size_t k = win_[i];
      const std::size_t t = i * nk_ + k;
      for (std::size_t j = 0; j < active_[t]; ++j)
        p(i, k, order_[t * ns_ + j]) = scale_[link_.group[k]] * (level_[k] - 1.0 / gs_[t * ns_ + j]);
    }
    return p;
  }
  const std::vector<std::size_t>& winners() const { return win_; }

 private:
  static bool close_all(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t j = 0; j < a.size(); ++j)
      if (std::abs(a[j] - b[j]) > 1e-9 * std::max(std::abs(a[j]), std::abs(b[j]))) return false;
    return true;
  }

  void update_ue(std::size_t k) {
    const double c = (mu_[link_.group[k]] + eta_ * link_.eps[k]) / bw_;
    const double wk = 1.0 + w_[k];
    if (!(c > 0.0)) {
      level_[k] = kInf;
      for (std::size_t i = 0; i < nf_; ++i) {
        const std::size_t t = i * nk_ + k;
        std::size_t n = 0;
        while (n < ns_ && gs_[t * ns_ + n] > 0.0) ++n;
        active_[t] = n;
        const double x = n > 0 ? kInf : 0.0;
        e_[t] = v_[t] = r_[t] = x;
      }
      return;
    }
    const double level = wk / (kLn2 * c);
    const double inv_level = 1.0 / level;
    const double lg_level = std::log2(level);
    level_[k] = level;
    for (std::size_t i = 0; i < nf_; ++i) {
      const std::size_t t = i * nk_ + k;
      const double* g = &gs_[t * ns_];
      std::size_t n = 0;
      while (n < ns_ && g[n] > inv_level) ++n;
      active_[t] = n;
      const double nd = static_cast<double>(n);
      const double r = n > 0 ? lg_sum_[t * (ns_ + 1) + n] + nd * lg_level : 0.0;
      const double e = n > 0 ? nd * level - inv_sum_[t * (ns_ + 1) + n] : 0.0;
      r_[t] = r;
      e_[t] = std::max(0.0, e);
      v_[t] = wk * r - c * e_[t];
    }
  }

  void pick_winners() {
    for (std::size_t i = 0; i < nf_; ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < nk_; ++k)
        if (v_[i * nk_ + k] > v_[i * nk_ + best]) best = k;
      win_[i] = best;
    }
  }

  double group_energy(std::size_t g) const {
    double e = 0.0;
    for (std::size_t i = 0; i < nf_; ++i) {
      const std::size_t k = win_[i];
      if (link_.group[k] == g) e += e_[i * nk_ + k];
    }
    return share_ * e;
  }

  double ue_rate(std::size_t k) const {
    double r = 0.0;
    for (std::size_t i = 0; i < nf_; ++i)
      if (win_[i] == k) r += r_[i * nk_ + k];
    return share_ * bw_ * r;
  }

  void set_mu(std::size_t g, double m) {
    mu_[g] = m;
    for (std::size_t k = 0; k < nk_; ++k)
      if (link_.group[k] == g) update_ue(k);
    pick_winners();
  }

  void search_mu(std::size_t g) {
    const double budget = link_.budgets[g];
    auto f = [&](double m) {
      set_mu(g, m);
      return group_energy(g);
    };
    // Multiplier at which every subcarrier spends budget / n_F.
    const double scale = static_cast<double>(nf_) * share_ * bw_ / (kLn2 * budget);
    const double guess = mu_[g] > 1e-6 * scale ? mu_[g] : scale;
    const auto [m, ok] = detail::smallest_feasible(f, budget, guess, 200, 1e-12 * budget,
                                                   kSearchLogTol, 1e-9 * scale);
    if (!ok) throw NumericalError("single-hop budget multiplier bracket expansion failed");
    set_mu(g, m);
  }

  void search_w(std::size_t k) {
    const std::size_t g = link_.group[k];
    auto f = [&](double wk) {
      w_[k] = wk;
      update_ue(k);
      pick_winners();
      search_mu(g);
      return -ue_rate(k);
    };
    if (max_rate(k) <= link_.floors[k] * (1.0 + 1e-9)) {
      // Unattainable at this share: maximize the UE's rate instead.
      f(kUnreachableWeight);
      return;
    }
    const double guess = std::min(w_[k], kUnreachableWeight);
    const auto [wk, ok] = detail::smallest_feasible(f, -link_.floors[k], guess, 60,
                                                    1e-12 * link_.floors[k], kSearchLogTol);
    f(ok ? wk : kUnreachableWeight);
  }

  // Rate of UE k holding every subcarrier and its whole group budget.
  double max_rate(std::size_t k) const {
    std::vector<double> gains;
    gains.reserve(nf_ * ns_);
    for (std::size_t i = 0; i < nf_; ++i)
      for (std::size_t n = 0; n < ns_; ++n) gains.push_back(link_.g(i, k, n));
    const auto p = waterfill(gains, link_.budgets[link_.group[k]] / share_);
    double r = 0.0;
    for (std::size_t j = 0; j < gains.size(); ++j) r += std::log2(1.0 + gains[j] * p[j]);
    return share_ * bw_ * r;
  }

  // Budgets hold exactly on return; cross-group winner shifts can need a few passes.
  void enforce_budgets() {
    for (std::size_t pass = 0; pass < 20; ++pass) {
      bool all_ok = true;
      for (std::size_t g = 0; g < mu_.size(); ++g)
        if (group_energy(g) > link_.budgets[g] * (1.0 + 1e-12)) {
          all_ok = false;
          search_mu(g);
        }
      if (all_ok) return;
    }
    for (std::size_t g = 0; g < mu_.size(); ++g) {
      const double e = group_energy(g);
      if (e <= link_.budgets[g]) continue;
      scale_[g] = link_.budgets[g] / e;
      for (std::size_t i = 0; i < nf_; ++i) {
        const std::size_t k = win_[i];
        if (link_.group[k] != g) continue;
        const std::size_t t = i * nk_ + k;
        double r = 0.0;
        for (std::size_t j = 0; j < active_[t]; ++j) {
          const double gj = gs_[t * ns_ + j];
          r += std::log2(1.0 + gj * scale_[g] * (level_[k] - 1.0 / gj));
        }
        r_[t] = r;
        e_[t] *= scale_[g];
      }
    }
  }

  const SingleHopLink& link_;
  double bw_;
  std::size_t nf_, nk_, ns_;
  double share_ = 0.0;
  double eta_ = 0.0;
  std::vector<double> mu_, scale_, w_, level_;
  std::vector<double> gs_;            // gains sorted descending per tuple
  std::vector<std::size_t> order_;    // sorted position -> stream index
  std::vector<double> lg_sum_, inv_sum_;  // prefix sums of log2 g and 1 / g
  std::vector<std::size_t> active_;   // streams above the water line per tuple
  std::vector<double> e_, v_, r_;     // per tuple: power, Lagrangian, bit/s/Hz
  std::vector<std::size_t> win_;
};

struct InnerResult {
  double alpha = 0.0;
  DirectionOutcome dl, ul;
};

double penalized(const DirectionOutcome& o) { return o.value - kShortfallPenalty * o.shortfall; }

// Smallest share at which every rate floor of the direction is met; above 1
// when no share suffices.
double min_share(Direction& d, const std::vector<double>& floors) {
  double need = 0.0;
  for (double f : floors) need += f;
  if (need <= 0.0) return 0.0;
  auto met = [&](double x) { return d.solve(x, 0.0).shortfall <= kFloorSlack * need; };
  if (!met(1.0)) return 2.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > kShareTol) {
    const double mid = 0.5 * (lo + hi);
    (met(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Best alpha in [a_lo, a_hi] with beta = 1 - alpha; both directions leave
// their state at the returned split.
InnerResult best_split(Direction& dl, Direction& ul, double eta, double a_lo, double a_hi) {
  auto total = [&](double a) { return penalized(dl.solve(a, eta)) + penalized(ul.solve(1.0 - a, eta)); };
  double best_a = a_lo, best_v = total(a_lo);
  if (a_hi > a_lo) {
    auto neg = [&](double a) { return -total(a); };
    std::uintmax_t iters = 200;
    const auto [a_star, f_star] =
        boost::math::tools::brent_find_minima(neg, a_lo, a_hi, kSplitBits, iters);
    if (-f_star > best_v) {
      best_v = -f_star;
      best_a = a_star;
    }
    const double v = total(a_hi);
    if (v > best_v) {
      best_v = v;
      best_a = a_hi;
    }
  }
  InnerResult r;
  r.alpha = best_a;
  r.dl = dl.solve(best_a, eta);
  r.ul = ul.solve(1.0 - best_a, eta);
  return r;
}

void validate_link(const SingleHopLink& l, const char* name) {
  const std::size_t nk = l.g.n_k;
  if (l.group.size() != nk || l.eps.size() != nk || l.floors.size() != nk)
    throw InvalidInput(std::string(name) + ": per-UE vectors must match the UE count");
  for (std::size_t g : l.group)
    if (g >= l.budgets.size()) throw InvalidInput(std::string(name) + ": budget group out of range");
  for (double b : l.budgets)
    if (!(b > 0.0)) throw InvalidInput(std::string(name) + ": budgets must be > 0");
}

}  // namespace

SingleHopSolution solve_single_hop(const SingleHopProblem& prob, Objective objective,
                                   const SolverOptions& opts) {
  validate_link(prob.dl, "dl");
  validate_link(prob.ul, "ul");
  if (!(prob.bandwidth > 0.0)) throw InvalidInput("bandwidth must be > 0");

  Direction dl(prob.dl, prob.bandwidth);
  Direction ul(prob.ul, prob.bandwidth);
  SingleHopSolution sol;
  double eta = 0.0;
  sol.eta_trajectory.push_back(eta);
  const double a_lo = min_share(dl, prob.dl.floors);
  const double b_lo = min_share(ul, prob.ul.floors);
  if (a_lo + b_lo > 1.0) {
    std::ostringstream os;
    os << "C5/C6 (rate floors) unattainable: downlink needs alpha >= " << a_lo
       << ", uplink needs beta >= " << b_lo << " (values above 1: unattainable at any split)";
    throw InfeasibleError(os.str());
  }
  auto capture = [&](const InnerResult& in) {
    sol.alpha = in.alpha;
    sol.beta = 1.0 - in.alpha;
    sol.p_dl = dl.winner_powers();
    sol.p_ul = ul.winner_powers();
    sol.win_dl = dl.winners();
    sol.win_ul = ul.winners();
    sol.rate_dl = in.dl.rate;
    sol.rate_ul = in.ul.rate;
    sol.throughput = in.dl.rate_sum + in.ul.rate_sum;
    sol.power = prob.static_power + in.dl.cost + in.ul.cost;
    sol.ee = sol.throughput / sol.power;
  };
  const std::size_t max_outer =
      objective == Objective::tp_max ? 1 : std::max<std::size_t>(1, opts.max_outer);
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    const InnerResult in = best_split(dl, ul, eta, a_lo, 1.0 - b_lo);
    ++sol.outer_iterations;
    const double u = in.dl.rate_sum + in.ul.rate_sum;
    const double p = prob.static_power + in.dl.cost + in.ul.cost;
    const double next = u / p;
    // The split search is local, so a later price can return a worse point;
    // the iterate that attained eta is kept.
    if (outer > 0 && next < eta) {
      sol.converged = true;
      break;
    }
    capture(in);
    if (objective == Objective::tp_max) {
      sol.converged = true;
      break;
    }
    if (std::abs(u - eta * p) < opts.eta_tolerance || next <= eta * (1.0 + 1e-13)) {
      sol.converged = true;
      if (next > eta) sol.eta_trajectory.push_back(next);
      break;
    }
    eta = next;
    sol.eta_trajectory.push_back(eta);
  }

  for (std::size_t k = 0; k < prob.dl.g.n_k; ++k)
    if (sol.rate_dl[k] < prob.dl.floors[k] * (1.0 - 1e-6)) {
      std::ostringstream os;
      os << "C5 (UE " << k << " DL rate floor) unattainable: best split gives " << sol.rate_dl[k]
         << " of " << prob.dl.floors[k] << " bit/s";
      throw InfeasibleError(os.str());
    }
  for (std::size_t k = 0; k < prob.ul.g.n_k; ++k)
    if (sol.rate_ul[k] < prob.ul.floors[k] * (1.0 - 1e-6)) {
      std::ostringstream os;
      os << "C6 (UE " << k << " UL rate floor) unattainable: best split gives " << sol.rate_ul[k]
         << " of " << prob.ul.floors[k] << " bit/s";
      throw InfeasibleError(os.str());
    }
  return sol;
}

SingleHopProblem baseline_problem(SystemKind tag, const ChannelRealization& ch,
                                  const SystemConfig& cfg) {
  const std::size_t nf = ch.h_direct.size();
  const std::size_t nk = cfg.n_ues;
  const std::size_t ns = tag == SystemKind::mimo_benchmark ? cfg.n_antennas : 1;
  SingleHopProblem prob;
  prob.bandwidth = cfg.subcarrier_bandwidth_hz;
  prob.static_power = cfg.p_circuit_bs + static_cast<double>(cfg.n_antennas) * cfg.p_antenna_bs +
                      static_cast<double>(nk) * cfg.p_circuit_ue;
  Tensor3 g(nf, nk, ns);
  for (std::size_t i = 0; i < nf; ++i) {
    if (ch.h_direct[i].size() != nk) throw InvalidInput("channel realization UE count mismatch");
    for (std::size_t k = 0; k < nk; ++k) {
      const ComplexMatrix& h = ch.h_direct[i][k];
      if (tag == SystemKind::mimo_benchmark) {
        const auto sig = svd(h).sigma;
        for (std::size_t n = 0; n < ns && n < sig.size(); ++n) g(i, k, n) = sig[n] * sig[n];
      } else {
        // Single receive antenna: first row, matched filtering at the BS.
        double e = 0.0;
        for (std::size_t c = 0; c < h.cols(); ++c) e += std::norm(h(0, c));
        g(i, k, 0) = e;
      }
    }
  }
  prob.dl.g = g;
  prob.ul.g = g;  // reciprocity
  prob.dl.budgets = {cfg.p_bs_max};
  prob.dl.group.assign(nk, 0);
  prob.dl.eps.assign(nk, cfg.eps_bs);
  prob.dl.floors = cfg.r_min_dl;
  prob.ul.budgets = cfg.p_ue_max;
  prob.ul.group.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) prob.ul.group[k] = k;
  prob.ul.eps = cfg.eps_ue;
  prob.ul.floors = cfg.r_min_ul;
  return prob;
}

SolveReport solve_baseline(const BaselineKind& kind, const ChannelRealization& ch,
                           const SystemConfig& cfg, const SolverOptions& opts) {
  cfg.validate();
  const SingleHopProblem prob = baseline_problem(kind.tag, ch, cfg);
  const SingleHopSolution sol = solve_single_hop(prob, kind.objective, opts);

  const std::size_t nf = prob.dl.g.n_f, nk = prob.dl.g.n_k, ns = prob.dl.g.n_s;
  SolveReport rep;
  rep.rate_mode = RateMode::exact;
  rep.eta_trajectory = sol.eta_trajectory;
  rep.iterations_used = sol.outer_iterations;
  rep.outer_iterations = sol.outer_iterations;
  rep.converged = sol.converged;
  rep.throughput = rep.throughput_exact = sol.throughput;
  rep.power = sol.power;
  rep.ee = rep.ee_exact = sol.ee;
  rep.ee_per_iteration.assign(sol.eta_trajectory.begin() + 1, sol.eta_trajectory.end());
  rep.final_gap = sol.throughput - sol.eta_trajectory.back() * sol.power;

  AllocationPolicy& pol = rep.final_policy;
  pol = AllocationPolicy::zeros(nf, nk, ns);
  pol.alpha = sol.alpha;
  pol.beta = sol.beta;
  std::vector<double> ue_energy(nk, 0.0);
  double bs_energy = 0.0;
  for (std::size_t i = 0; i < nf; ++i) {
    pol.s_dl(i, sol.win_dl[i]) = sol.alpha;
    pol.s_ul(i, sol.win_ul[i]) = sol.beta;
    for (std::size_t n = 0; n < ns; ++n) {
      pol.e_bs(i, sol.win_dl[i], n) = sol.alpha * sol.p_dl(i, sol.win_dl[i], n);
      pol.e_ues(i, sol.win_ul[i], n) = sol.beta * sol.p_ul(i, sol.win_ul[i], n);
      bs_energy += pol.e_bs(i, sol.win_dl[i], n);
      ue_energy[sol.win_ul[i]] += pol.e_ues(i, sol.win_ul[i], n);
    }
  }

  FeasibilityReport& r = rep.constraint_residuals;
  r.c1 = bs_energy - cfg.p_bs_max;
  r.c2 = -cfg.p_sudac_dl_max;
  r.c4 = -cfg.p_sudas_ul_max;
  r.c3.resize(nk);
  r.c5.resize(nk);
  r.c6.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    r.c3[k] = ue_energy[k] - cfg.p_ue_max[k];
    r.c5[k] = cfg.r_min_dl[k] - sol.rate_dl[k];
    r.c6[k] = cfg.r_min_ul[k] - sol.rate_ul[k];
  }
  r.c7.assign(nf, 0.0);
  r.c8.assign(nf, 0.0);
  r.c9 = 0.0;
  r.c10 = 0.0;
  r.c11 = sol.alpha + sol.beta - 1.0;
  r.c12 = std::max(-sol.alpha, -sol.beta);
  return rep;
}

SingleHopSolution noise_free_bound_solution(const EffectiveChannels& eff, const SystemConfig& cfg,
                                            const SolverOptions& opts) {
  const std::size_t nf = eff.n_f(), ns = eff.n_s;
  SingleHopProblem prob;
  prob.bandwidth = cfg.subcarrier_bandwidth_hz;
  prob.static_power = cfg.static_power();
  // The UEs are interchangeable on the licensed hop, so one aggregate UE
  // carries the summed floors.
  prob.dl.g = Tensor3(nf, 1, ns);
  prob.ul.g = Tensor3(nf, 1, ns);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t n = 0; n < ns; ++n) {
      prob.dl.g(i, 0, n) = eff.g_bs(i, n);
      prob.ul.g(i, 0, n) = eff.g_sb(i, n);
    }
  prob.dl.budgets = {cfg.p_bs_max};
  prob.ul.budgets = {cfg.p_sudas_ul_max};
  prob.dl.group = prob.ul.group = {0};
  prob.dl.eps = {cfg.eps_bs};
  prob.ul.eps = {cfg.eps_sudas};
  double f_dl = 0.0, f_ul = 0.0;
  for (double f : cfg.r_min_dl) f_dl += f;
  for (double f : cfg.r_min_ul) f_ul += f;
  prob.dl.floors = {f_dl};
  prob.ul.floors = {f_ul};
  try {
    return solve_single_hop(prob, Objective::ee_max, opts);
  } catch (const InfeasibleError&) {
    // Dropping the floors only enlarges the feasible set.
    prob.dl.floors = {0.0};
    prob.ul.floors = {0.0};
    return solve_single_hop(prob, Objective::ee_max, opts);
  }
}

double noise_free_upper_bound(const EffectiveChannels& eff, const SystemConfig& cfg,
                              const SolverOptions& opts) {
  return noise_free_bound_solution(eff, cfg, opts).ee;
}

}  // namespace sudas
