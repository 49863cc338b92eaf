#include "sudas/solver.hpp"

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

const char* to_string(Variant v) { return v == Variant::optimal ? "optimal" : "suboptimal"; }

RateMode rate_mode(Variant v) { return v == Variant::optimal ? RateMode::approx : RateMode::exact; }

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Floor weight used when a rate floor is out of reach within one group.
constexpr double kMaxFloorWeight = 1e6;

#ifdef SUDAS_METRIC_LN2
constexpr double kMetricScale = 1.0 / kLn2;
#else
constexpr double kMetricScale = 1.0;
#endif

// High-SNR form: g is the gain of the hop being updated, b the partner hop's SNR.
// p = [b (Omega - b - 2) / (2 g (1 + b))]^+ with
// Omega = sqrt(b^2 + 4 (1 + w) g (1 + b) / (price ln2)).
double optimal_form(double g, double b, double w, double price) {
  if (!(g > 0.0) || !(b > 0.0)) return 0.0;
  if (!(price > 0.0)) return kInf;
  const double x = 4.0 * (1.0 + w) * g * (1.0 + b) / (price * kLn2);
  if (!std::isfinite(x)) return kInf;
  const double omega = std::sqrt(b * b + x);
  const double bracket = x / (omega + b) - 2.0;  // Omega - b - 2 without cancellation
  if (!(bracket > 0.0)) return 0.0;
  return b * bracket / (2.0 * g * (1.0 + b));
}

// Exact-SINR form: p = (1/g) [(b/2)(sqrt(1 + 4 g (1 + w) / (b ln2 price)) - 1) - 1]^+.
double suboptimal_form(double g, double b, double w, double price) {
  if (!(g > 0.0) || !(b > 0.0)) return 0.0;
  if (!(price > 0.0)) return kInf;
  const double y = 4.0 * g * (1.0 + w) / (b * kLn2 * price);
  if (!std::isfinite(y)) return kInf;
  const double root_minus_one = y / (std::sqrt(1.0 + y) + 1.0);
  const double bracket = 0.5 * b * root_minus_one - 1.0;
  return bracket > 0.0 ? bracket / g : 0.0;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

enum class Hop { bs, sue, ues, sb };

bool is_dl(Hop h) { return h == Hop::bs || h == Hop::sue; }

// Tuples of one budget group with flattened gains: g is the updated hop's CNR,
// b the partner hop's SNR at its current power.
struct Group {
  std::vector<std::size_t> ue;  // per tuple
  std::vector<double> g, b;     // per tuple and stream
  double weight = 1.0;
};

struct Score {
  bool feasible = true;
  double obj = 0.0;
};

// True when `a` is worse than `b` beyond rounding.
bool worse(const Score& a, const Score& b) {
  if (a.feasible != b.feasible) return b.feasible;
  return a.obj < b.obj - 1e-13 * std::abs(b.obj);
}

class Engine {
 public:
  Engine(const EffectiveChannels& eff, const SystemConfig& cfg, const SolverOptions& opts,
         Variant variant, double eta)
      : eff_(eff),
        cfg_(cfg),
        opts_(opts),
        variant_(variant),
        mode_(rate_mode(variant)),
        eta_(eta),
        bw_(cfg.subcarrier_bandwidth_hz),
        nf_(eff.n_f()),
        nk_(eff.n_k()),
        ns_(eff.n_s) {}

  void prepare(SolverState& st) const {
    st.mult.psi.resize(nk_, 0.0);
    st.mult.w_dl.resize(nk_, 0.0);
    st.mult.w_ul.resize(nk_, 0.0);
  }

  double power(double g, double b, double w, double price_hat) const {
    return variant_ == Variant::optimal ? optimal_form(g, b, w, price_hat)
                                        : suboptimal_form(g, b, w, price_hat);
  }

  double price_hat(double mult, double eps) const { return (mult + eta_ * eps) / bw_; }

  double objective(const SolverState& st) const {
    const ObjectiveParts p = evaluate_state(st, eff_, cfg_, mode_);
    return p.u - eta_ * p.u_tp;
  }

  bool floors_met(const SolverState& st) const {
    std::vector<double> dl(nk_, 0.0), ul(nk_, 0.0);
    for (std::size_t i = 0; i < nf_; ++i) {
      const std::size_t kd = st.win_dl[i], ku = st.win_ul[i];
      for (std::size_t n = 0; n < ns_; ++n) {
        dl[kd] += std::log2(1.0 + sinr(mode_, eff_.g_bs(i, n) * st.p_bs(i, kd, n),
                                       eff_.g_sue(i, kd, n) * st.p_sue(i, kd, n)));
        ul[ku] += std::log2(1.0 + sinr(mode_, eff_.g_sb(i, n) * st.p_sb(i, ku, n),
                                       eff_.g_ues(i, ku, n) * st.p_ues(i, ku, n)));
      }
    }
    for (std::size_t k = 0; k < nk_; ++k) {
      if (cfg_.r_min_dl[k] > 0.0 && st.alpha * bw_ * dl[k] < cfg_.r_min_dl[k] * (1.0 - 1e-9))
        return false;
      if (cfg_.r_min_ul[k] > 0.0 && st.beta * bw_ * ul[k] < cfg_.r_min_ul[k] * (1.0 - 1e-9))
        return false;
    }
    return true;
  }

  Score score(const SolverState& st) const { return {floors_met(st), objective(st)}; }

  bool apply_split(SolverState& st) const {
    try {
      const auto [a, b] = solve_time_split(time_split_problem(st, eff_, cfg_, eta_, mode_));
      st.alpha = a;
      st.beta = b;
      return true;
    } catch (const InfeasibleError&) {
      return false;
    }
  }

  std::vector<std::size_t> select(const SolverState& st, bool dl) const {
    Tensor2 metric(nf_, nk_);
    std::vector<double> s(ns_);
    for (std::size_t i = 0; i < nf_; ++i)
      for (std::size_t k = 0; k < nk_; ++k) {
        for (std::size_t n = 0; n < ns_; ++n)
          s[n] = dl ? sinr(mode_, eff_.g_bs(i, n) * st.p_bs(i, k, n),
                           eff_.g_sue(i, k, n) * st.p_sue(i, k, n))
                    : sinr(mode_, eff_.g_sb(i, n) * st.p_sb(i, k, n),
                           eff_.g_ues(i, k, n) * st.p_ues(i, k, n));
        metric(i, k) = selection_metric(s, dl ? st.mult.w_dl[k] : st.mult.w_ul[k]);
      }
    return subcarrier_winners(metric);
  }

  // Power step for one hop: closed forms with multipliers found so the hop's
  // budgets and (where present) rate floors hold. Reverted if it would lower the score.
  void guarded_step(SolverState& st, Hop hop) const {
    const SolverState prev = st;
    const Score before = score(st);
    power_step(st, hop);
    if (worse(score(st), before)) st = prev;
  }

  void power_step(SolverState& st, Hop hop) const {
    const bool dl = is_dl(hop);
    const auto& win = dl ? st.win_dl : st.win_ul;
    const double share = dl ? st.alpha : st.beta;
    const double weight = share > 0.0 ? share : 1.0;
    std::vector<double>& w = dl ? st.mult.w_dl : st.mult.w_ul;
    const std::vector<double>& floors = dl ? cfg_.r_min_dl : cfg_.r_min_ul;

    if (hop == Hop::ues) {
      for (std::size_t k = 0; k < nk_; ++k) {
        std::vector<std::pair<std::size_t, std::size_t>> tuples;
        for (std::size_t i = 0; i < nf_; ++i)
          if (win[i] == k) tuples.emplace_back(i, k);
        const bool has_own = !tuples.empty();
        if (!has_own)
          for (std::size_t i = 0; i < nf_; ++i) tuples.emplace_back(i, k);
        Group grp = gather(st, hop, tuples, weight);
        std::vector<std::size_t> floor_ues;
        if (has_own && floors[k] > 0.0) floor_ues.push_back(k);
        solve_group(grp, cfg_.p_ue_max[k], cfg_.eps_ue[k], st.mult.psi[k], w, floor_ues, floors);
      }
    } else {
      std::vector<std::pair<std::size_t, std::size_t>> tuples;
      std::vector<bool> present(nk_, false);
      for (std::size_t i = 0; i < nf_; ++i) {
        tuples.emplace_back(i, win[i]);
        present[win[i]] = true;
      }
      Group grp = gather(st, hop, tuples, weight);
      std::vector<std::size_t> floor_ues;
      for (std::size_t k = 0; k < nk_; ++k)
        if (present[k] && floors[k] > 0.0) floor_ues.push_back(k);
      solve_group(grp, budget(hop), eps(hop, 0), mult_ref(st.mult, hop, 0), w, floor_ues, floors);
    }

    // Every tuple gets the closed form at the final multipliers, winners or not.
    Tensor3& own = own_tensor(st, hop);
    for (std::size_t i = 0; i < nf_; ++i)
      for (std::size_t k = 0; k < nk_; ++k) {
        const double ph = price_hat(mult_ref(st.mult, hop, k), eps(hop, k));
        for (std::size_t n = 0; n < ns_; ++n)
          own(i, k, n) = power(gain(hop, i, k, n), partner_snr(st, hop, i, k, n), w[k], ph);
      }
  }

  bool sweep(SolverState& st) const {
    const SolverState before = st;
    guarded_step(st, Hop::bs);
    guarded_step(st, Hop::sue);
    const auto new_dl = select(st, true);
    guarded_step(st, Hop::ues);
    guarded_step(st, Hop::sb);
    const auto new_ul = select(st, false);

    SolverState best = st;
    apply_split(best);
    Score best_score = score(best);
    const bool dl_changed = new_dl != st.win_dl;
    const bool ul_changed = new_ul != st.win_ul;
    auto consider = [&](bool take_dl, bool take_ul) {
      SolverState cand = st;
      if (take_dl) cand.win_dl = new_dl;
      if (take_ul) cand.win_ul = new_ul;
      if (!apply_split(cand)) return;
      const Score s = score(cand);
      if (worse(best_score, s) || (!worse(s, best_score) && s.obj > best_score.obj)) {
        best = std::move(cand);
        best_score = s;
      }
    };
    if (dl_changed && ul_changed) consider(true, true);
    if (dl_changed) consider(true, false);
    if (ul_changed) consider(false, true);
    time_shift(best, best_score);
    st = std::move(best);
    return unchanged(before, st);
  }

  // Moves time between DL and UL with every energy held fixed (powers scale
  // inversely with the share). The rate sum is concave along this line, so it
  // escapes the corner where budgets pin the LP split.
  void time_shift(SolverState& st, Score& current) const {
    if (!(st.alpha > 0.0) || !(st.beta > 0.0) || !current.feasible) return;
    struct Link {
      std::size_t ue;
      double a, b;  // SNR numerators at unit share: g * energy
    };
    std::vector<Link> dl, ul;
    for (std::size_t i = 0; i < nf_; ++i) {
      const std::size_t kd = st.win_dl[i], ku = st.win_ul[i];
      for (std::size_t n = 0; n < ns_; ++n) {
        dl.push_back({kd, eff_.g_bs(i, n) * st.p_bs(i, kd, n) * st.alpha,
                      eff_.g_sue(i, kd, n) * st.p_sue(i, kd, n) * st.alpha});
        ul.push_back({ku, eff_.g_sb(i, n) * st.p_sb(i, ku, n) * st.beta,
                      eff_.g_ues(i, ku, n) * st.p_ues(i, ku, n) * st.beta});
      }
    }
    const double total = st.alpha + st.beta;
    auto rates = [&](const std::vector<Link>& links, double x) {
      std::vector<double> r(nk_, 0.0);
      if (!(x > 0.0)) return r;
      for (const Link& l : links) r[l.ue] += std::log2(1.0 + sinr(mode_, l.a / x, l.b / x));
      for (double& v : r) v *= x * bw_;
      return r;
    };
    auto sum_rate = [&](double a) {
      double u = 0.0;
      for (double v : rates(dl, a)) u += v;
      for (double v : rates(ul, total - a)) u += v;
      return u;
    };
    auto dl_ok = [&](double a) {
      const auto r = rates(dl, a);
      for (std::size_t k = 0; k < nk_; ++k)
        if (cfg_.r_min_dl[k] > 0.0 && r[k] < cfg_.r_min_dl[k]) return false;
      return true;
    };
    auto ul_ok = [&](double a) {
      const auto r = rates(ul, total - a);
      for (std::size_t k = 0; k < nk_; ++k)
        if (cfg_.r_min_ul[k] > 0.0 && r[k] < cfg_.r_min_ul[k]) return false;
      return true;
    };
    // DL rates grow with a and UL rates shrink, so the floor-feasible set is an interval.
    double lo = st.alpha, hi = st.alpha;
    if (dl_ok(0.0)) {
      lo = 0.0;
    } else if (dl_ok(st.alpha)) {
      double l = 0.0;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (l + lo);
        (dl_ok(m) ? lo : l) = m;
      }
    }
    if (ul_ok(total)) {
      hi = total;
    } else if (ul_ok(st.alpha)) {
      double h = total;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (hi + h);
        (ul_ok(m) ? hi : h) = m;
      }
    }
    if (!(hi > lo)) return;
    std::uintmax_t iters = 100;
    const auto [a_star, neg_u] = boost::math::tools::brent_find_minima(
        [&](double a) { return -sum_rate(a); }, lo, hi, 40, iters);
    (void)neg_u;
    if (!(a_star > 0.0) || !(a_star < total)) return;

    SolverState cand = st;
    const double sd = st.alpha / a_star, su = st.beta / (total - a_star);
    for (double& v : cand.p_bs.v) v *= sd;
    for (double& v : cand.p_sue.v) v *= sd;
    for (double& v : cand.p_ues.v) v *= su;
    for (double& v : cand.p_sb.v) v *= su;
    cand.alpha = a_star;
    cand.beta = total - a_star;
    const Score s = score(cand);
    if (s.feasible && s.obj > current.obj + 1e-12 * std::abs(current.obj)) {
      st = std::move(cand);
      current = s;
    }
  }

 private:
  double gain(Hop hop, std::size_t i, std::size_t k, std::size_t n) const {
    switch (hop) {
      case Hop::bs: return eff_.g_bs(i, n);
      case Hop::sue: return eff_.g_sue(i, k, n);
      case Hop::ues: return eff_.g_ues(i, k, n);
      case Hop::sb: return eff_.g_sb(i, n);
    }
    return 0.0;
  }

  double partner_snr(const SolverState& st, Hop hop, std::size_t i, std::size_t k,
                     std::size_t n) const {
    switch (hop) {
      case Hop::bs: return eff_.g_sue(i, k, n) * st.p_sue(i, k, n);
      case Hop::sue: return eff_.g_bs(i, n) * st.p_bs(i, k, n);
      case Hop::ues: return eff_.g_sb(i, n) * st.p_sb(i, k, n);
      case Hop::sb: return eff_.g_ues(i, k, n) * st.p_ues(i, k, n);
    }
    return 0.0;
  }

  static Tensor3& own_tensor(SolverState& st, Hop hop) {
    switch (hop) {
      case Hop::bs: return st.p_bs;
      case Hop::sue: return st.p_sue;
      case Hop::ues: return st.p_ues;
      case Hop::sb: return st.p_sb;
    }
    return st.p_bs;
  }

  double budget(Hop hop) const {
    switch (hop) {
      case Hop::bs: return cfg_.p_bs_max;
      case Hop::sue: return cfg_.p_sudac_dl_max;
      case Hop::sb: return cfg_.p_sudas_ul_max;
      case Hop::ues: break;
    }
    return 0.0;
  }

  double eps(Hop hop, std::size_t k) const {
    switch (hop) {
      case Hop::bs: return cfg_.eps_bs;
      case Hop::ues: return cfg_.eps_ue[k];
      default: return cfg_.eps_sudas;
    }
  }

  static double& mult_ref(Multipliers& m, Hop hop, std::size_t k) {
    switch (hop) {
      case Hop::bs: return m.lambda;
      case Hop::sue: return m.delta;
      case Hop::ues: return m.psi[k];
      case Hop::sb: return m.phi;
    }
    return m.lambda;
  }

  Group gather(const SolverState& st, Hop hop,
               const std::vector<std::pair<std::size_t, std::size_t>>& tuples, double weight) const {
    Group grp;
    grp.weight = weight;
    grp.ue.reserve(tuples.size());
    grp.g.reserve(tuples.size() * ns_);
    grp.b.reserve(tuples.size() * ns_);
    for (const auto& [i, k] : tuples) {
      grp.ue.push_back(k);
      for (std::size_t n = 0; n < ns_; ++n) {
        grp.g.push_back(gain(hop, i, k, n));
        grp.b.push_back(partner_snr(st, hop, i, k, n));
      }
    }
    return grp;
  }

  double group_energy(const Group& grp, double ph, const std::vector<double>& w) const {
    double e = 0.0;
    for (std::size_t t = 0; t < grp.ue.size(); ++t) {
      const double wk = w[grp.ue[t]];
      for (std::size_t n = 0; n < ns_; ++n) {
        const std::size_t j = t * ns_ + n;
        e += power(grp.g[j], grp.b[j], wk, ph);
      }
    }
    return grp.weight * e;
  }

  double group_rate(const Group& grp, std::size_t k, double ph, const std::vector<double>& w) const {
    double r = 0.0;
    for (std::size_t t = 0; t < grp.ue.size(); ++t) {
      if (grp.ue[t] != k) continue;
      for (std::size_t n = 0; n < ns_; ++n) {
        const std::size_t j = t * ns_ + n;
        const double p = power(grp.g[j], grp.b[j], w[k], ph);
        r += std::log2(1.0 + sinr(mode_, grp.g[j] * p, grp.b[j]));
      }
    }
    return bw_ * grp.weight * r;
  }

  // Budget multiplier for fixed w, then (if floors are present) cyclic
  // bisection on each floor UE's w with the budget multiplier re-solved inside.
  void solve_group(const Group& grp, double budget, double eps, double& mult, std::vector<double>& w,
                   const std::vector<std::size_t>& floor_ues,
                   const std::vector<double>& floors) const {
    double warm = mult;
    auto mult_for = [&](const std::vector<double>& wv) {
      auto energy = [&](double m) { return group_energy(grp, price_hat(m, eps), wv); };
      const auto [m, ok] =
          detail::smallest_feasible(energy, budget, warm, opts_.max_bracket_steps, 1e-14 * budget);
      if (!ok) throw NumericalError("budget multiplier bracket expansion failed");
      warm = m > 0.0 ? m : warm;
      return m;
    };

    for (std::size_t round = 0; round < 50 && !floor_ues.empty(); ++round) {
      double max_change = 0.0;
      for (std::size_t k : floor_ues) {
        std::vector<double> wv = w;
        auto short_fall = [&](double wk) {
          wv[k] = wk;
          const double m = mult_for(wv);
          return -group_rate(grp, k, price_hat(m, eps), wv);
        };
        double wk = kMaxFloorWeight;
        if (short_fall(kMaxFloorWeight) <= -floors[k])
          wk = detail::smallest_feasible(short_fall, -floors[k], std::min(w[k], kMaxFloorWeight), 60,
                                         1e-13 * floors[k])
                   .first;
        max_change = std::max(max_change, std::abs(wk - w[k]) / std::max(1.0, wk));
        w[k] = wk;
      }
      if (max_change < 1e-12) break;
    }
    mult = mult_for(w);
  }

  bool unchanged(const SolverState& a, const SolverState& b) const {
    const double tol = opts_.inner_tolerance;
    if (a.win_dl != b.win_dl || a.win_ul != b.win_ul) return false;
    if (std::abs(a.alpha - b.alpha) > tol || std::abs(a.beta - b.beta) > tol) return false;
    const Tensor3* ta[] = {&a.p_bs, &a.p_sue, &a.p_ues, &a.p_sb};
    const Tensor3* tb[] = {&b.p_bs, &b.p_sue, &b.p_ues, &b.p_sb};
    for (int h = 0; h < 4; ++h)
      for (std::size_t j = 0; j < ta[h]->v.size(); ++j)
        if (!close_rel(ta[h]->v[j], tb[h]->v[j], tol)) return false;
    return true;
  }

  const EffectiveChannels& eff_;
  const SystemConfig& cfg_;
  const SolverOptions& opts_;
  Variant variant_;
  RateMode mode_;
  double eta_;
  double bw_;
  std::size_t nf_, nk_, ns_;
};

void check_shapes(const EffectiveChannels& eff, const SystemConfig& cfg) {
  if (eff.n_k() != cfg.n_ues && eff.n_f() > 0)
    throw InvalidInput("effective channels and config disagree on the UE count");
  if (eff.g_sue.n_f != eff.n_f() || eff.g_ues.n_f != eff.n_f() || eff.g_sb.n_r != eff.n_f())
    throw InvalidInput("effective channel tensors disagree on the subcarrier count");
}

}  // namespace

double dl_power_bs(double g_bs, double g_sue, double p_sue, double w_dl, double lambda, double eta,
                   double eps_b) {
  return optimal_form(g_bs, g_sue * p_sue, w_dl, lambda + eta * eps_b);
}

double dl_power_sudas(double g_bs, double g_sue, double p_bs, double w_dl, double delta, double eta,
                      double eps_s) {
  return optimal_form(g_sue, g_bs * p_bs, w_dl, delta + eta * eps_s);
}

double ul_power_ue(double g_sb, double g_ues, double p_sb, double w_ul, double psi, double eta,
                   double eps_k) {
  return optimal_form(g_ues, g_sb * p_sb, w_ul, psi + eta * eps_k);
}

double ul_power_sudas(double g_sb, double g_ues, double p_ues, double w_ul, double phi, double eta,
                      double eps_s) {
  return optimal_form(g_sb, g_ues * p_ues, w_ul, phi + eta * eps_s);
}

double sub_dl_power_bs(double g_bs, double g_sue, double p_sue, double w_dl, double lambda,
                       double eta, double eps_b) {
  return suboptimal_form(g_bs, g_sue * p_sue, w_dl, lambda + eta * eps_b);
}

double sub_dl_power_sudas(double g_bs, double g_sue, double p_bs, double w_dl, double delta,
                          double eta, double eps_s) {
  return suboptimal_form(g_sue, g_bs * p_bs, w_dl, delta + eta * eps_s);
}

double sub_ul_power_ue(double g_sb, double g_ues, double p_sb, double w_ul, double psi, double eta,
                       double eps_k) {
  return suboptimal_form(g_ues, g_sb * p_sb, w_ul, psi + eta * eps_k);
}

double sub_ul_power_sudas(double g_sb, double g_ues, double p_ues, double w_ul, double phi,
                          double eta, double eps_s) {
  return suboptimal_form(g_sb, g_ues * p_ues, w_ul, phi + eta * eps_s);
}

double selection_metric(const std::vector<double>& sinrs, double w) {
  double acc = 0.0;
  for (double s : sinrs) acc += std::log2(1.0 + s) - kMetricScale * s / (1.0 + s);
  return (1.0 + w) * acc;
}

std::vector<std::size_t> subcarrier_winners(const Tensor2& metric) {
  std::vector<std::size_t> win(metric.n_r, 0);
  for (std::size_t i = 0; i < metric.n_r; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < metric.n_c; ++k)
      if (metric(i, k) > metric(i, best)) best = k;
    win[i] = best;
  }
  return win;
}

namespace {

Tensor2 assign(const Tensor2& metric, double share) {
  Tensor2 s(metric.n_r, metric.n_c);
  const auto win = subcarrier_winners(metric);
  for (std::size_t i = 0; i < metric.n_r; ++i)
    if (metric.n_c > 0) s(i, win[i]) = share;
  return s;
}

}  // namespace

Tensor2 assign_subcarriers_dl(const Tensor2& metric, double alpha) { return assign(metric, alpha); }
Tensor2 assign_subcarriers_ul(const Tensor2& metric, double beta) { return assign(metric, beta); }

std::pair<double, double> solve_time_split(const TimeSplitProblem& lp) {
  constexpr double slack = 1e-12;
  const double a_lo = std::max(0.0, lp.alpha_lo), a_hi = std::min(1.0, lp.alpha_hi);
  const double b_lo = std::max(0.0, lp.beta_lo), b_hi = std::min(1.0, lp.beta_hi);
  if (!(a_lo <= a_hi + slack) || !(b_lo <= b_hi + slack) || !(a_lo + b_lo <= 1.0 + slack)) {
    std::ostringstream os;
    os << "time split infeasible: alpha in [" << a_lo << ", " << a_hi << "], beta in [" << b_lo
       << ", " << b_hi << "], alpha + beta <= 1";
    throw InfeasibleError(os.str());
  }
  const double ah = std::max(a_lo, a_hi), bh = std::max(b_lo, b_hi);

  std::vector<std::pair<double, double>> v;
  auto add = [&](double a, double b) {
    if (a >= a_lo - slack && a <= ah + slack && b >= b_lo - slack && b <= bh + slack &&
        a + b <= 1.0 + slack)
      v.emplace_back(std::clamp(a, a_lo, ah), std::clamp(b, b_lo, bh));
  };
  add(a_lo, b_lo);
  add(ah, b_lo);
  add(a_lo, bh);
  add(ah, bh);
  add(a_lo, 1.0 - a_lo);
  add(ah, 1.0 - ah);
  add(1.0 - b_lo, b_lo);
  add(1.0 - bh, bh);

  auto value = [&](const std::pair<double, double>& p) {
    return lp.c_alpha * p.first + lp.c_beta * p.second;
  };
  double best = -kInf;
  for (const auto& p : v) best = std::max(best, value(p));
  const double tol = 1e-12 * (std::abs(lp.c_alpha) + std::abs(lp.c_beta));
  std::vector<std::pair<double, double>> tied;
  double best_sum = -kInf;
  for (const auto& p : v)
    if (value(p) >= best - tol) {
      tied.push_back(p);
      best_sum = std::max(best_sum, p.first + p.second);
    }
  std::pair<double, double> lo_pt{kInf, 0.0}, hi_pt{-kInf, 0.0};
  for (const auto& p : tied) {
    if (p.first + p.second < best_sum - slack) continue;
    if (p.first < lo_pt.first) lo_pt = p;
    if (p.first > hi_pt.first) hi_pt = p;
  }
  double a = 0.5 * (lo_pt.first + hi_pt.first);
  double b = 0.5 * (lo_pt.second + hi_pt.second);
  if (a + b > 1.0) b = 1.0 - a;
  return {a, b};
}

SolverState SolverState::initial(const EffectiveChannels& eff, const SystemConfig& cfg) {
  const std::size_t nf = eff.n_f(), nk = eff.n_k(), ns = eff.n_s;
  SolverState st;
  st.alpha = 0.5;
  st.beta = 0.5;
  st.win_dl.resize(nf);
  st.win_ul.resize(nf);
  std::vector<std::size_t> count(nk, 0);
  for (std::size_t i = 0; i < nf; ++i) {
    st.win_dl[i] = st.win_ul[i] = nk > 0 ? i % nk : 0;
    if (nk > 0) ++count[i % nk];
  }
  const double slots = static_cast<double>(std::max<std::size_t>(1, nf * ns));
  st.p_bs = Tensor3(nf, nk, ns, 0.5 * cfg.p_bs_max / (st.alpha * slots));
  st.p_sue = Tensor3(nf, nk, ns, 0.5 * cfg.p_sudac_dl_max / (st.alpha * slots));
  st.p_sb = Tensor3(nf, nk, ns, 0.5 * cfg.p_sudas_ul_max / (st.beta * slots));
  st.p_ues = Tensor3(nf, nk, ns);
  for (std::size_t k = 0; k < nk; ++k) {
    const double c = static_cast<double>(std::max<std::size_t>(1, (count[k] > 0 ? count[k] : nf) * ns));
    const double p = 0.5 * cfg.p_ue_max[k] / (st.beta * c);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t n = 0; n < ns; ++n) st.p_ues(i, k, n) = p;
  }
  st.mult.psi.assign(nk, 0.0);
  st.mult.w_dl.assign(nk, 0.0);
  st.mult.w_ul.assign(nk, 0.0);
  return st;
}

AllocationPolicy SolverState::to_policy() const {
  const std::size_t nf = p_bs.n_f, nk = p_bs.n_k, ns = p_bs.n_s;
  AllocationPolicy pol = AllocationPolicy::zeros(nf, nk, ns);
  pol.alpha = alpha;
  pol.beta = beta;
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t kd = win_dl[i], ku = win_ul[i];
    pol.s_dl(i, kd) = alpha;
    pol.s_ul(i, ku) = beta;
    for (std::size_t n = 0; n < ns; ++n) {
      pol.e_bs(i, kd, n) = alpha * p_bs(i, kd, n);
      pol.e_sue(i, kd, n) = alpha * p_sue(i, kd, n);
      pol.e_ues(i, ku, n) = beta * p_ues(i, ku, n);
      pol.e_sb(i, ku, n) = beta * p_sb(i, ku, n);
    }
  }
  return pol;
}

ObjectiveParts evaluate_state(const SolverState& st, const EffectiveChannels& eff,
                              const SystemConfig& cfg, RateMode mode) {
  detail::CompensatedSum rate, pw;
  pw.add(cfg.static_power());
  for (std::size_t i = 0; i < eff.n_f(); ++i) {
    const std::size_t kd = st.win_dl[i], ku = st.win_ul[i];
    for (std::size_t n = 0; n < eff.n_s; ++n) {
      if (st.alpha > 0.0) {
        rate.add(st.alpha * std::log2(1.0 + sinr(mode, eff.g_bs(i, n) * st.p_bs(i, kd, n),
                                                  eff.g_sue(i, kd, n) * st.p_sue(i, kd, n))));
        pw.add(st.alpha * (cfg.eps_bs * st.p_bs(i, kd, n) + cfg.eps_sudas * st.p_sue(i, kd, n)));
      }
      if (st.beta > 0.0) {
        rate.add(st.beta * std::log2(1.0 + sinr(mode, eff.g_sb(i, n) * st.p_sb(i, ku, n),
                                                 eff.g_ues(i, ku, n) * st.p_ues(i, ku, n))));
        pw.add(st.beta * (cfg.eps_ue[ku] * st.p_ues(i, ku, n) + cfg.eps_sudas * st.p_sb(i, ku, n)));
      }
    }
  }
  return {cfg.subcarrier_bandwidth_hz * rate.value(), pw.value()};
}

TimeSplitProblem time_split_problem(const SolverState& st, const EffectiveChannels& eff,
                                    const SystemConfig& cfg, double eta, RateMode mode) {
  const std::size_t nf = eff.n_f(), nk = eff.n_k(), ns = eff.n_s;
  const double bw = cfg.subcarrier_bandwidth_hz;
  detail::CompensatedSum val_dl, val_ul, a_bs, a_sue, a_sb;
  std::vector<double> a_ues(nk, 0.0), r_dl(nk, 0.0), r_ul(nk, 0.0);
  for (std::size_t i = 0; i < nf; ++i) {
    const std::size_t kd = st.win_dl[i], ku = st.win_ul[i];
    for (std::size_t n = 0; n < ns; ++n) {
      const double rd = std::log2(1.0 + sinr(mode, eff.g_bs(i, n) * st.p_bs(i, kd, n),
                                             eff.g_sue(i, kd, n) * st.p_sue(i, kd, n)));
      const double ru = std::log2(1.0 + sinr(mode, eff.g_sb(i, n) * st.p_sb(i, ku, n),
                                             eff.g_ues(i, ku, n) * st.p_ues(i, ku, n)));
      val_dl.add(bw * rd - eta * (cfg.eps_bs * st.p_bs(i, kd, n) + cfg.eps_sudas * st.p_sue(i, kd, n)));
      val_ul.add(bw * ru - eta * (cfg.eps_ue[ku] * st.p_ues(i, ku, n) + cfg.eps_sudas * st.p_sb(i, ku, n)));
      a_bs.add(st.p_bs(i, kd, n));
      a_sue.add(st.p_sue(i, kd, n));
      a_sb.add(st.p_sb(i, ku, n));
      a_ues[ku] += st.p_ues(i, ku, n);
      r_dl[kd] += bw * rd;
      r_ul[ku] += bw * ru;
    }
  }
  auto cap = [](double budget, double used) { return used > 0.0 ? budget / used : kInf; };
  auto need = [](double floor, double rate) {
    if (!(floor > 0.0)) return 0.0;
    return rate > 0.0 ? floor / rate : kInf;
  };
  TimeSplitProblem lp;
  lp.c_alpha = val_dl.value();
  lp.c_beta = val_ul.value();
  lp.alpha_hi = std::min({1.0, cap(cfg.p_bs_max, a_bs.value()), cap(cfg.p_sudac_dl_max, a_sue.value())});
  lp.beta_hi = std::min(1.0, cap(cfg.p_sudas_ul_max, a_sb.value()));
  lp.alpha_lo = 0.0;
  lp.beta_lo = 0.0;
  for (std::size_t k = 0; k < nk; ++k) {
    lp.beta_hi = std::min(lp.beta_hi, cap(cfg.p_ue_max[k], a_ues[k]));
    lp.alpha_lo = std::max(lp.alpha_lo, need(cfg.r_min_dl[k], r_dl[k]));
    lp.beta_lo = std::max(lp.beta_lo, need(cfg.r_min_ul[k], r_ul[k]));
  }
  return lp;
}

std::pair<double, double> update_time_split(const SolverState& st, const EffectiveChannels& eff,
                                            const SystemConfig& cfg, double eta, RateMode mode) {
  return solve_time_split(time_split_problem(st, eff, cfg, eta, mode));
}

Multipliers search_multipliers(const SolverState& st, const EffectiveChannels& eff,
                               const SystemConfig& cfg, double eta, Variant variant,
                               const SolverOptions& opts) {
  Engine e(eff, cfg, opts, variant, eta);
  SolverState work = st;
  e.prepare(work);
  e.power_step(work, Hop::bs);
  e.power_step(work, Hop::sue);
  e.power_step(work, Hop::ues);
  e.power_step(work, Hop::sb);
  return work.mult;
}

bool inner_sweep(SolverState& st, double eta, const EffectiveChannels& eff,
                 const SystemConfig& cfg, const SolverOptions& opts, Variant variant) {
  Engine e(eff, cfg, opts, variant, eta);
  e.prepare(st);
  return e.sweep(st);
}

InnerTrace inner_solve(SolverState& st, double eta, const EffectiveChannels& eff,
                       const SystemConfig& cfg, const SolverOptions& opts, Variant variant,
                       std::size_t sweep_budget,
                       const std::function<void(const SolverState&)>& on_sweep) {
  if (!(eta >= 0.0)) throw InvalidInput("eta must be >= 0");
  check_shapes(eff, cfg);
  Engine e(eff, cfg, opts, variant, eta);
  e.prepare(st);
  InnerTrace tr;
  tr.objective.push_back(e.objective(st));
  std::size_t limit = opts.max_inner;
  if (sweep_budget > 0) limit = std::min(limit, sweep_budget);
  for (std::size_t s = 0; s < limit; ++s) {
    const bool done = e.sweep(st);
    ++tr.sweeps;
    tr.objective.push_back(e.objective(st));
    if (on_sweep) on_sweep(st);
    if (done) {
      tr.converged = true;
      break;
    }
  }
  return tr;
}

AllocationPolicy inner_solve(double eta, const EffectiveChannels& eff, const SystemConfig& cfg,
                             const SolverOptions& opts, Variant variant) {
  SolverState st = SolverState::initial(eff, cfg);
  inner_solve(st, eta, eff, cfg, opts, variant);
  return st.to_policy();
}

std::vector<double> waterfill(const std::vector<double>& gains, double budget) {
  std::vector<double> p(gains.size(), 0.0);
  if (!(budget > 0.0)) return p;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < gains.size(); ++j)
    if (gains[j] > 0.0) idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
  // Level mu with p_j = mu - 1/g_j over the strongest m channels.
  double inv_sum = 0.0;
  double mu = 0.0;
  std::size_t m = 0;
  for (std::size_t c = 0; c < idx.size(); ++c) {
    inv_sum += 1.0 / gains[idx[c]];
    const double level = (budget + inv_sum) / static_cast<double>(c + 1);
    if (level <= 1.0 / gains[idx[c]]) break;
    mu = level;
    m = c + 1;
  }
  for (std::size_t c = 0; c < m; ++c) p[idx[c]] = std::max(0.0, mu - 1.0 / gains[idx[c]]);
  return p;
}

void check_rate_floors(const EffectiveChannels& eff, const SystemConfig& cfg) {
  const std::size_t nf = eff.n_f(), nk = eff.n_k(), ns = eff.n_s;
  const double bw = cfg.subcarrier_bandwidth_hz;
  auto capacity = [&](const std::vector<double>& g, double budget) {
    const auto p = waterfill(g, budget);
    double r = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) r += std::log2(1.0 + g[j] * p[j]);
    return bw * r;
  };
  std::vector<double> g_bs, g_sb;
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t n = 0; n < ns; ++n) {
      g_bs.push_back(eff.g_bs(i, n));
      g_sb.push_back(eff.g_sb(i, n));
    }
  const double cap_bs = capacity(g_bs, cfg.p_bs_max);
  const double cap_sb = capacity(g_sb, cfg.p_sudas_ul_max);
  for (std::size_t k = 0; k < nk; ++k) {
    if (cfg.r_min_dl[k] <= 0.0 && cfg.r_min_ul[k] <= 0.0) continue;
    std::vector<double> g_sue, g_ues;
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t n = 0; n < ns; ++n) {
        g_sue.push_back(eff.g_sue(i, k, n));
        g_ues.push_back(eff.g_ues(i, k, n));
      }
    const double dl = std::min(cap_bs, capacity(g_sue, cfg.p_sudac_dl_max));
    const double ul = std::min(cap_sb, capacity(g_ues, cfg.p_ue_max[k]));
    std::ostringstream os;
    if (cfg.r_min_dl[k] > dl) {
      os << "C5 (UE " << k << " DL rate floor) unattainable: needs " << cfg.r_min_dl[k]
         << " bit/s, full-budget bound " << dl << " bit/s";
      throw InfeasibleError(os.str());
    }
    if (cfg.r_min_ul[k] > ul) {
      os << "C6 (UE " << k << " UL rate floor) unattainable: needs " << cfg.r_min_ul[k]
         << " bit/s, full-budget bound " << ul << " bit/s";
      throw InfeasibleError(os.str());
    }
  }
}

namespace {

void finish_report(SolveReport& rep, const SolverState& st, const EffectiveChannels& eff,
                   const SystemConfig& cfg, RateMode mode) {
  rep.final_policy = st.to_policy();
  rep.throughput = throughput(rep.final_policy, eff, cfg, mode);
  rep.power = power_consumption(rep.final_policy, eff, cfg);
  rep.ee = rep.throughput / rep.power;
  rep.throughput_exact = throughput(rep.final_policy, eff, cfg, RateMode::exact);
  rep.ee_exact = rep.throughput_exact / rep.power;
  rep.constraint_residuals = feasibility(rep.final_policy, eff, cfg, mode);
}

void check_solve_inputs(const EffectiveChannels& eff, const SystemConfig& cfg,
                        const SolverOptions& opts) {
  cfg.validate();
  check_shapes(eff, cfg);
  if (!(opts.eta_tolerance > 0.0) || !(opts.inner_tolerance > 0.0))
    throw InvalidInput("solver tolerances must be > 0");
  check_rate_floors(eff, cfg);
}

}  // namespace

SolveReport dinkelbach_solve(const EffectiveChannels& eff, const SystemConfig& cfg,
                             const SolverOptions& opts, Variant variant) {
  check_solve_inputs(eff, cfg, opts);

  const RateMode mode = rate_mode(variant);
  SolveReport rep;
  rep.rate_mode = mode;
  SolverState st = SolverState::initial(eff, cfg);
  SolverState best = st;
  double eta = 0.0;
  rep.eta_trajectory.push_back(eta);
  std::size_t used = 0;
  double gap = 0.0;

  for (std::size_t outer = 0; outer < opts.max_outer; ++outer) {
    std::size_t budget = 0;
    if (opts.max_iterations > 0) {
      if (used >= opts.max_iterations) break;
      budget = opts.max_iterations - used;
    }
    const InnerTrace tr = inner_solve(st, eta, eff, cfg, opts, variant, budget);
    used += tr.sweeps;
    ++rep.outer_iterations;
    const ObjectiveParts p = evaluate_state(st, eff, cfg, mode);
    const double next = p.u_tp > 0.0 ? p.u / p.u_tp : 0.0;
    if (next < eta) {
      // Rounding-level regression: keep the iterate that attained eta.
      rep.ee_per_iteration.push_back(eta);
      const double g = p.u - eta * p.u_tp;
      if (std::abs(g) < opts.eta_tolerance) {
        gap = g;
        rep.converged = true;
      }
      break;
    }
    best = st;
    rep.ee_per_iteration.push_back(next);
    gap = p.u - eta * p.u_tp;
    if (std::abs(gap) < opts.eta_tolerance) {
      rep.converged = true;
      if (next > eta) rep.eta_trajectory.push_back(next);
      break;
    }
    eta = next;
    rep.eta_trajectory.push_back(eta);
  }

  rep.iterations_used = used;
  rep.final_gap = gap;
  finish_report(rep, best, eff, cfg, mode);
  return rep;
}

SolveReport throughput_solve(const EffectiveChannels& eff, const SystemConfig& cfg,
                             const SolverOptions& opts, Variant variant) {
  check_solve_inputs(eff, cfg, opts);
  const RateMode mode = rate_mode(variant);
  SolveReport rep;
  rep.rate_mode = mode;
  SolverState st = SolverState::initial(eff, cfg);
  const InnerTrace tr = inner_solve(st, 0.0, eff, cfg, opts, variant, opts.max_iterations);
  rep.iterations_used = tr.sweeps;
  rep.outer_iterations = 1;
  rep.converged = tr.converged;
  finish_report(rep, st, eff, cfg, mode);
  rep.eta_trajectory = {0.0};
  rep.ee_per_iteration = {rep.ee};
  rep.final_gap = rep.throughput;
  return rep;
}

}  // namespace sudas
