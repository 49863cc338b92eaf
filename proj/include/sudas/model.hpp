#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sudas {

// Dense [subcarrier][ue][stream] array of reals.
struct Tensor3 {
  std::size_t n_f = 0;
  std::size_t n_k = 0;
  std::size_t n_s = 0;
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(std::size_t f, std::size_t k, std::size_t s, double fill = 0.0)
      : n_f(f), n_k(k), n_s(s), v(f * k * s, fill) {}
  double& operator()(std::size_t i, std::size_t k, std::size_t n) { return v[(i * n_k + k) * n_s + n]; }
  double operator()(std::size_t i, std::size_t k, std::size_t n) const { return v[(i * n_k + k) * n_s + n]; }
  bool operator==(const Tensor3&) const = default;
};

// Dense [row][col] array of reals.
struct Tensor2 {
  std::size_t n_r = 0;
  std::size_t n_c = 0;
  std::vector<double> v;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c, double fill = 0.0) : n_r(r), n_c(c), v(r * c, fill) {}
  double& operator()(std::size_t r, std::size_t c) { return v[r * n_c + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * n_c + c]; }
  bool operator==(const Tensor2&) const = default;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

struct ChannelModel {
  double noise_psd_dbm_hz = -174.0;
  double licensed_noise_figure_db = 7.0;
  double unlicensed_noise_figure_db = 10.0;
  double bs_distance_m = 100.0;
  double bs_pathloss_ref_db = 30.5;  // at 1 m
  double bs_pathloss_exponent = 3.5;
  double bs_extra_loss_db = 15.0;    // building penetration
  double sudac_distance_m = 4.0;
  double sudac_pathloss_ref_db = 68.0;
  double sudac_pathloss_exponent = 2.0;
  double sudac_antenna_gain_db = 0.0;
  double rician_k_db = 6.0;
  double freq_correlation = 0.0;  // adjacent-subcarrier correlation of the scattered part
  bool fading = true;             // false: path loss only, random phases
};

struct SystemConfig {
  std::size_t n_antennas = 8;       // N
  std::size_t n_sudacs = 8;         // M
  std::size_t n_ues = 4;            // K
  std::size_t n_subcarriers = 1200; // n_F
  std::size_t n_streams_cap = 0;    // 0: no cap beyond min(N, M, ranks)

  double p_bs_max = 0.0;            // W, total BS transmit budget
  double p_sudac_dl_max = 0.0;      // W, total SUDAS DL budget (M * P_max)
  double p_sudas_ul_max = 0.0;      // W, total SUDAS UL budget
  std::vector<double> p_ue_max;     // W, per UE
  std::vector<double> r_min_dl;     // bit/s, 0 for delay-tolerant UEs
  std::vector<double> r_min_ul;     // bit/s

  double p_circuit_bs = 15.0;
  double p_antenna_bs = 0.975;
  double p_circuit_sudac = 0.1;
  double p_circuit_ue = 1.0;
  double eps_bs = 4.0;
  double eps_sudas = 4.0;
  std::vector<double> eps_ue;

  double subcarrier_bandwidth_hz = 15e3;
  ChannelModel channel;

  // Scenario defaults: N = M = 8, K = 4, 46 dBm BS budget, 23 dBm SUDAS/UE
  // budgets, one delay-sensitive UE with 20 Mbit/s floors in both directions.
  static SystemConfig defaults();

  // Resize the per-UE vectors to K, filling new entries from entry 0
  // (rate floors of new entries are zero).
  void resize_ues(std::size_t k);

  // Throws ConfigError on violated invariants.
  void validate() const;

  double static_power() const;
  bool delay_sensitive_dl(std::size_t k) const { return r_min_dl[k] > 0.0; }
  bool delay_sensitive_ul(std::size_t k) const { return r_min_ul[k] > 0.0; }
};

// CNRs per subcarrier and spatial channel, noise-normalized, sorted descending in n.
struct EffectiveChannels {
  std::size_t n_s = 0;
  Tensor2 g_bs;   // [i][n]
  Tensor3 g_sue;  // [i][k][n]
  Tensor2 g_sb;   // [i][n]
  Tensor3 g_ues;  // [i][k][n]

  std::size_t n_f() const { return g_bs.n_r; }
  std::size_t n_k() const { return g_sue.n_k; }
};

struct AllocationPolicy {
  Tensor3 e_bs, e_sue, e_ues, e_sb;  // energies per slot
  Tensor2 s_dl, s_ul;                // [i][k] time shares
  double alpha = 0.0;
  double beta = 0.0;

  static AllocationPolicy zeros(std::size_t n_f, std::size_t n_k, std::size_t n_s);
};

enum class RateMode { exact, approx };

const char* to_string(RateMode m);

double sinr_exact(double a, double b);
double sinr_approx(double a, double b);
double sinr(RateMode mode, double a, double b);

// Per-stream rates in bit/s/Hz. a = g1 * p1, b = g2 * p2.
double rate_exact_dl(double g_bs, double g_sue, double p_bs, double p_sue);
double rate_approx_dl(double g_bs, double g_sue, double p_bs, double p_sue);
double rate_exact_ul(double g_sb, double g_ues, double p_sb, double p_ues);
double rate_approx_ul(double g_sb, double g_ues, double p_sb, double p_ues);

struct UeRates {
  std::vector<double> dl;  // bit/s
  std::vector<double> ul;  // bit/s
};

UeRates ue_rates(const AllocationPolicy& p, const EffectiveChannels& eff, const SystemConfig& cfg,
                 RateMode mode);
double throughput(const AllocationPolicy& p, const EffectiveChannels& eff, const SystemConfig& cfg,
                  RateMode mode);
double power_consumption(const AllocationPolicy& p, const EffectiveChannels& eff,
                         const SystemConfig& cfg);
double energy_efficiency(const AllocationPolicy& p, const EffectiveChannels& eff,
                         const SystemConfig& cfg, RateMode mode);

// Residuals are <= 0 when satisfied.
struct FeasibilityReport {
  double c1 = 0.0;             // sum e_bs - P_T
  double c2 = 0.0;             // sum e_sue - M P_max
  std::vector<double> c3;      // per UE: sum e_ues - P_max_k
  double c4 = 0.0;             // sum e_sb - P_max^UL
  std::vector<double> c5;      // per UE: R_min_dl - R_dl (0 floor -> <= 0)
  std::vector<double> c6;      // per UE: R_min_ul - R_ul
  std::vector<double> c7;      // per subcarrier: sum_k s_dl - alpha
  std::vector<double> c8;      // per subcarrier: sum_k s_ul - beta
  double c9 = 0.0;             // max over (i,k) of s_dl outside [0, alpha]
  double c10 = 0.0;            // max over (i,k) of s_ul outside [0, beta]
  double c11 = 0.0;            // alpha + beta - 1
  double c12 = 0.0;            // max(-alpha, -beta)
  double min_energy = 0.0;     // most negative energy (<= 0 expected, reported as -min)

  // Budget residuals relative to budgets, rate residuals relative to floors.
  bool budgets_ok(const SystemConfig& cfg, double rel_tol) const;
  bool rates_ok(const SystemConfig& cfg, double rel_tol) const;
  bool time_ok(double abs_tol) const;
  std::string first_violation(const SystemConfig& cfg, double rel_tol) const;
};

FeasibilityReport feasibility(const AllocationPolicy& p, const EffectiveChannels& eff,
                              const SystemConfig& cfg, RateMode mode);

// True when every s_dl entry is 0 or alpha, every s_ul entry is 0 or beta.
bool binary_pattern(const AllocationPolicy& p);

struct SolveReport {
  std::vector<double> eta_trajectory;   // Dinkelbach iterates, bit/J
  std::vector<double> ee_per_iteration; // EE after each Dinkelbach iteration, bit/J
  AllocationPolicy final_policy;
  RateMode rate_mode = RateMode::approx;
  double throughput = 0.0;        // bit/s, in rate_mode
  double power = 0.0;             // W
  double ee = 0.0;                // bit/J, in rate_mode
  double throughput_exact = 0.0;  // bit/s, exact SINR
  double ee_exact = 0.0;          // bit/J, exact SINR
  double final_gap = 0.0;         // U - eta * U_TP at termination
  FeasibilityReport constraint_residuals;
  std::size_t iterations_used = 0;  // aggregate inner sweeps
  std::size_t outer_iterations = 0;
  bool converged = false;
};

}  // namespace sudas
