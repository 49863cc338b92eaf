#include "sudas/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "compensated_sum.hpp"
#include "sudas/errors.hpp"

namespace sudas {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

SystemConfig SystemConfig::defaults() {
  SystemConfig c;
  c.p_bs_max = dbm_to_watt(46.0);
  c.p_sudac_dl_max = dbm_to_watt(23.0);
  c.p_sudas_ul_max = dbm_to_watt(23.0);
  c.p_ue_max.assign(c.n_ues, dbm_to_watt(23.0));
  c.r_min_dl.assign(c.n_ues, 0.0);
  c.r_min_ul.assign(c.n_ues, 0.0);
  c.r_min_dl[0] = 20e6;
  c.r_min_ul[0] = 20e6;
  c.eps_ue.assign(c.n_ues, 4.0);
  return c;
}

void SystemConfig::resize_ues(std::size_t k) {
  auto fill = [k](std::vector<double>& v, double def) {
    const double f = v.empty() ? def : v.front();
    v.resize(k, f);
  };
  fill(p_ue_max, dbm_to_watt(23.0));
  fill(eps_ue, 4.0);
  r_min_dl.resize(k, 0.0);
  r_min_ul.resize(k, 0.0);
  n_ues = k;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (n_antennas == 0) fail("system.n_antennas must be >= 1");
  if (n_sudacs == 0) fail("system.n_sudacs must be >= 1");
  if (n_ues == 0) fail("system.n_ues must be >= 1");
  if (n_subcarriers == 0) fail("system.n_subcarriers must be >= 1");
  if (n_streams_cap > std::min(n_antennas, n_sudacs)) fail("system.n_streams_cap exceeds min(N, M)");
  if (p_ue_max.size() != n_ues || r_min_dl.size() != n_ues || r_min_ul.size() != n_ues ||
      eps_ue.size() != n_ues)
    fail("per-UE parameter vectors must have n_ues entries");
  if (!(p_bs_max > 0.0)) fail("power.p_bs_max must be > 0");
  if (!(p_sudac_dl_max > 0.0)) fail("power.p_sudac_dl_max must be > 0");
  if (!(p_sudas_ul_max > 0.0)) fail("power.p_sudas_ul_max must be > 0");
  for (double p : p_ue_max)
    if (!(p > 0.0)) fail("power.p_ue_max must be > 0");
  for (double r : r_min_dl)
    if (!(r >= 0.0)) fail("rates.r_min_dl must be >= 0");
  for (double r : r_min_ul)
    if (!(r >= 0.0)) fail("rates.r_min_ul must be >= 0");
  if (!(p_circuit_bs > 0.0) || !(p_antenna_bs > 0.0) || !(p_circuit_sudac > 0.0) ||
      !(p_circuit_ue > 0.0))
    fail("circuit powers must be > 0");
  if (!(eps_bs >= 1.0) || !(eps_sudas >= 1.0)) fail("amplifier factors must be >= 1");
  for (double e : eps_ue)
    if (!(e >= 1.0)) fail("amplifier.eps_ue must be >= 1");
  if (!(subcarrier_bandwidth_hz > 0.0)) fail("system.subcarrier_bandwidth_hz must be > 0");
  if (!(channel.freq_correlation >= 0.0 && channel.freq_correlation < 1.0))
    fail("channel.freq_correlation must be in [0, 1)");
  if (!(channel.bs_distance_m > 0.0) || !(channel.sudac_distance_m > 0.0))
    fail("channel distances must be > 0");
}

double SystemConfig::static_power() const {
  return p_circuit_bs + static_cast<double>(n_antennas) * p_antenna_bs +
         static_cast<double>(n_sudacs) * p_circuit_sudac + static_cast<double>(n_ues) * p_circuit_ue;
}

AllocationPolicy AllocationPolicy::zeros(std::size_t n_f, std::size_t n_k, std::size_t n_s) {
  AllocationPolicy p;
  p.e_bs = p.e_sue = p.e_ues = p.e_sb = Tensor3(n_f, n_k, n_s);
  p.s_dl = p.s_ul = Tensor2(n_f, n_k);
  return p;
}

const char* to_string(RateMode m) { return m == RateMode::exact ? "exact" : "approx"; }

double sinr_exact(double a, double b) { return a * b / (1.0 + a + b); }

double sinr_approx(double a, double b) {
  const double d = a + b;
  return d > 0.0 ? a * b / d : 0.0;
}

double sinr(RateMode mode, double a, double b) {
  return mode == RateMode::exact ? sinr_exact(a, b) : sinr_approx(a, b);
}

namespace {

void require_nonneg(double g1, double g2, double p1, double p2) {
  if (!(g1 >= 0.0) || !(g2 >= 0.0) || !(p1 >= 0.0) || !(p2 >= 0.0))
    throw InvalidInput("rate inputs must be non-negative");
}

// s * log2(1 + SINR(e1/s, e2/s)) with the s = 0 limit taken as 0.
double shared_rate(RateMode mode, double g1, double g2, double e1, double e2, double s) {
  if (!(s > 0.0)) return 0.0;
  return s * std::log2(1.0 + sinr(mode, g1 * e1 / s, g2 * e2 / s));
}

}  // namespace

double rate_exact_dl(double g_bs, double g_sue, double p_bs, double p_sue) {
  require_nonneg(g_bs, g_sue, p_bs, p_sue);
  return std::log2(1.0 + sinr_exact(g_bs * p_bs, g_sue * p_sue));
}

double rate_approx_dl(double g_bs, double g_sue, double p_bs, double p_sue) {
  require_nonneg(g_bs, g_sue, p_bs, p_sue);
  return std::log2(1.0 + sinr_approx(g_bs * p_bs, g_sue * p_sue));
}

double rate_exact_ul(double g_sb, double g_ues, double p_sb, double p_ues) {
  require_nonneg(g_sb, g_ues, p_sb, p_ues);
  return std::log2(1.0 + sinr_exact(g_sb * p_sb, g_ues * p_ues));
}

double rate_approx_ul(double g_sb, double g_ues, double p_sb, double p_ues) {
  require_nonneg(g_sb, g_ues, p_sb, p_ues);
  return std::log2(1.0 + sinr_approx(g_sb * p_sb, g_ues * p_ues));
}

UeRates ue_rates(const AllocationPolicy& p, const EffectiveChannels& eff, const SystemConfig& cfg,
                 RateMode mode) {
  const std::size_t nf = eff.n_f();
  const std::size_t nk = eff.n_k();
  const std::size_t ns = eff.n_s;
  std::vector<detail::CompensatedSum> dl(nk), ul(nk);
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t k = 0; k < nk; ++k)
      for (std::size_t n = 0; n < ns; ++n) {
        dl[k].add(shared_rate(mode, eff.g_bs(i, n), eff.g_sue(i, k, n), p.e_bs(i, k, n),
                              p.e_sue(i, k, n), p.s_dl(i, k)));
        ul[k].add(shared_rate(mode, eff.g_sb(i, n), eff.g_ues(i, k, n), p.e_sb(i, k, n),
                              p.e_ues(i, k, n), p.s_ul(i, k)));
      }
  UeRates r;
  r.dl.resize(nk);
  r.ul.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    r.dl[k] = cfg.subcarrier_bandwidth_hz * dl[k].value();
    r.ul[k] = cfg.subcarrier_bandwidth_hz * ul[k].value();
  }
  return r;
}

double throughput(const AllocationPolicy& p, const EffectiveChannels& eff, const SystemConfig& cfg,
                  RateMode mode) {
  detail::CompensatedSum acc;
  const std::size_t nf = eff.n_f();
  const std::size_t nk = eff.n_k();
  const std::size_t ns = eff.n_s;
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t k = 0; k < nk; ++k)
      for (std::size_t n = 0; n < ns; ++n) {
        acc.add(shared_rate(mode, eff.g_bs(i, n), eff.g_sue(i, k, n), p.e_bs(i, k, n),
                            p.e_sue(i, k, n), p.s_dl(i, k)));
        acc.add(shared_rate(mode, eff.g_sb(i, n), eff.g_ues(i, k, n), p.e_sb(i, k, n),
                            p.e_ues(i, k, n), p.s_ul(i, k)));
      }
  return cfg.subcarrier_bandwidth_hz * acc.value();
}

double power_consumption(const AllocationPolicy& p, const EffectiveChannels& eff,
                         const SystemConfig& cfg) {
  detail::CompensatedSum acc;
  acc.add(cfg.static_power());
  const std::size_t nf = eff.n_f();
  const std::size_t nk = eff.n_k();
  const std::size_t ns = eff.n_s;
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t k = 0; k < nk; ++k)
      for (std::size_t n = 0; n < ns; ++n) {
        acc.add(cfg.eps_bs * p.e_bs(i, k, n));
        acc.add(cfg.eps_sudas * p.e_sue(i, k, n));
        acc.add(cfg.eps_ue[k] * p.e_ues(i, k, n));
        acc.add(cfg.eps_sudas * p.e_sb(i, k, n));
      }
  return acc.value();
}

double energy_efficiency(const AllocationPolicy& p, const EffectiveChannels& eff,
                         const SystemConfig& cfg, RateMode mode) {
  return throughput(p, eff, cfg, mode) / power_consumption(p, eff, cfg);
}

FeasibilityReport feasibility(const AllocationPolicy& p, const EffectiveChannels& eff,
                              const SystemConfig& cfg, RateMode mode) {
  const std::size_t nf = eff.n_f();
  const std::size_t nk = eff.n_k();
  const std::size_t ns = eff.n_s;
  FeasibilityReport r;
  detail::CompensatedSum bs, sue, sb;
  std::vector<detail::CompensatedSum> ues(nk);
  double min_e = 0.0;
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t k = 0; k < nk; ++k)
      for (std::size_t n = 0; n < ns; ++n) {
        bs.add(p.e_bs(i, k, n));
        sue.add(p.e_sue(i, k, n));
        ues[k].add(p.e_ues(i, k, n));
        sb.add(p.e_sb(i, k, n));
        min_e = std::min({min_e, p.e_bs(i, k, n), p.e_sue(i, k, n), p.e_ues(i, k, n),
                          p.e_sb(i, k, n)});
      }
  r.c1 = bs.value() - cfg.p_bs_max;
  r.c2 = sue.value() - cfg.p_sudac_dl_max;
  r.c4 = sb.value() - cfg.p_sudas_ul_max;
  r.c3.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) r.c3[k] = ues[k].value() - cfg.p_ue_max[k];
  r.min_energy = -min_e;

  const UeRates rates = ue_rates(p, eff, cfg, mode);
  r.c5.resize(nk);
  r.c6.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    r.c5[k] = cfg.r_min_dl[k] - rates.dl[k];
    r.c6[k] = cfg.r_min_ul[k] - rates.ul[k];
  }

  r.c7.assign(nf, 0.0);
  r.c8.assign(nf, 0.0);
  r.c9 = -std::numeric_limits<double>::infinity();
  r.c10 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nf; ++i) {
    double sd = 0.0, su = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
      sd += p.s_dl(i, k);
      su += p.s_ul(i, k);
      r.c9 = std::max({r.c9, p.s_dl(i, k) - p.alpha, -p.s_dl(i, k)});
      r.c10 = std::max({r.c10, p.s_ul(i, k) - p.beta, -p.s_ul(i, k)});
    }
    r.c7[i] = sd - p.alpha;
    r.c8[i] = su - p.beta;
  }
  r.c11 = p.alpha + p.beta - 1.0;
  r.c12 = std::max(-p.alpha, -p.beta);
  return r;
}

bool FeasibilityReport::budgets_ok(const SystemConfig& cfg, double rel_tol) const {
  if (c1 > rel_tol * cfg.p_bs_max) return false;
  if (c2 > rel_tol * cfg.p_sudac_dl_max) return false;
  if (c4 > rel_tol * cfg.p_sudas_ul_max) return false;
  for (std::size_t k = 0; k < c3.size(); ++k)
    if (c3[k] > rel_tol * cfg.p_ue_max[k]) return false;
  return min_energy <= 0.0;
}

bool FeasibilityReport::rates_ok(const SystemConfig& cfg, double rel_tol) const {
  for (std::size_t k = 0; k < c5.size(); ++k) {
    if (c5[k] > rel_tol * cfg.r_min_dl[k]) return false;
    if (c6[k] > rel_tol * cfg.r_min_ul[k]) return false;
  }
  return true;
}

bool FeasibilityReport::time_ok(double abs_tol) const {
  for (double x : c7)
    if (x > abs_tol) return false;
  for (double x : c8)
    if (x > abs_tol) return false;
  return c9 <= abs_tol && c10 <= abs_tol && c11 <= abs_tol && c12 <= abs_tol;
}

std::string FeasibilityReport::first_violation(const SystemConfig& cfg, double rel_tol) const {
  std::ostringstream os;
  if (c1 > rel_tol * cfg.p_bs_max) os << "C1 (BS power) exceeded by " << c1 << " W";
  else if (c2 > rel_tol * cfg.p_sudac_dl_max) os << "C2 (SUDAS DL power) exceeded by " << c2 << " W";
  else if (c4 > rel_tol * cfg.p_sudas_ul_max) os << "C4 (SUDAS UL power) exceeded by " << c4 << " W";
  else {
    for (std::size_t k = 0; k < c3.size() && os.tellp() == 0; ++k)
      if (c3[k] > rel_tol * cfg.p_ue_max[k]) os << "C3 (UE " << k << " power) exceeded by " << c3[k] << " W";
    for (std::size_t k = 0; k < c5.size() && os.tellp() == 0; ++k) {
      if (c5[k] > rel_tol * cfg.r_min_dl[k]) os << "C5 (UE " << k << " DL rate floor) short by " << c5[k] << " bit/s";
      else if (c6[k] > rel_tol * cfg.r_min_ul[k]) os << "C6 (UE " << k << " UL rate floor) short by " << c6[k] << " bit/s";
    }
  }
  return os.str();
}

bool binary_pattern(const AllocationPolicy& p) {
  for (double s : p.s_dl.v)
    if (s != 0.0 && s != p.alpha) return false;
  for (double s : p.s_ul.v)
    if (s != 0.0 && s != p.beta) return false;
  return true;
}

}  // namespace sudas
