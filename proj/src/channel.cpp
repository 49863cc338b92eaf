#include "sudas/channel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace sudas {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return master_seed ^ splitmix64(trial_index);
}

namespace {

double noise_power_w(const SystemConfig& cfg, double noise_figure_db) {
  const double dbm = cfg.channel.noise_psd_dbm_hz + 10.0 * std::log10(cfg.subcarrier_bandwidth_hz) +
                     noise_figure_db;
  return dbm_to_watt(dbm);
}

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

// Circularly-symmetric unit-variance complex Gaussian draws, optionally
// AR(1)-correlated along the subcarrier axis.
class ScatterSource {
 public:
  ScatterSource(std::uint64_t seed, double rho) : rng_(seed), rho_(rho) {}

  cplx draw() {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    const double re = nd(rng_);
    const double im = nd(rng_);
    return {re, im};
  }

  // Next value in a correlated sequence seeded by prev (nullptr: fresh draw).
  cplx next(const cplx* prev) {
    const cplx w = draw();
    if (prev == nullptr || rho_ == 0.0) return w;
    return rho_ * (*prev) + std::sqrt(1.0 - rho_ * rho_) * w;
  }

  double phase() {
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    return ud(rng_);
  }

 private:
  std::mt19937_64 rng_;
  double rho_;
};

}  // namespace

double mean_gain_bs(const SystemConfig& cfg) {
  const auto& c = cfg.channel;
  const double pl_db = c.bs_pathloss_ref_db + 10.0 * c.bs_pathloss_exponent * std::log10(c.bs_distance_m) +
                       c.bs_extra_loss_db;
  return db_to_lin(-pl_db) / noise_power_w(cfg, c.licensed_noise_figure_db);
}

double mean_gain_sudac(const SystemConfig& cfg) {
  const auto& c = cfg.channel;
  const double pl_db = c.sudac_pathloss_ref_db +
                       10.0 * c.sudac_pathloss_exponent * std::log10(c.sudac_distance_m) -
                       c.sudac_antenna_gain_db;
  return db_to_lin(-pl_db) / noise_power_w(cfg, c.unlicensed_noise_figure_db);
}

ChannelRealization generate(const SystemConfig& cfg, std::uint64_t seed) {
  const std::size_t nf = cfg.n_subcarriers;
  const std::size_t nk = cfg.n_ues;
  const std::size_t n = cfg.n_antennas;
  const std::size_t m = cfg.n_sudacs;
  const auto& cm = cfg.channel;
  const double rho = cm.freq_correlation;

  const double amp_bs = std::sqrt(mean_gain_bs(cfg));
  const double amp_sudac = std::sqrt(mean_gain_sudac(cfg));
  const double kf = db_to_lin(cm.rician_k_db);
  const double los_w = std::sqrt(kf / (kf + 1.0));
  const double nlos_w = std::sqrt(1.0 / (kf + 1.0));

  ScatterSource src_bs(splitmix64(seed ^ 0x1ULL), rho);
  ScatterSource src_sue(splitmix64(seed ^ 0x2ULL), rho);
  ScatterSource src_dir(splitmix64(seed ^ 0x3ULL), rho);

  ChannelRealization ch;
  ch.h_bs.reserve(nf);
  ch.h_sue.assign(nf, {});
  ch.h_direct.assign(nf, {});

  // Rician LoS phases are fixed across subcarriers for each (k, SUDAC).
  std::vector<double> los_phase(nk * m);
  for (auto& p : los_phase) p = src_sue.phase();

  // Path-loss-only phases, fixed across subcarriers.
  std::vector<double> bs_phase(m * n), dir_phase(nk * n * n);
  if (!cm.fading) {
    for (auto& p : bs_phase) p = src_bs.phase();
    for (auto& p : dir_phase) p = src_dir.phase();
  }

  std::vector<cplx> prev_bs(m * n), prev_sue(nk * m), prev_dir(nk * n * n);
  for (std::size_t i = 0; i < nf; ++i) {
    ComplexMatrix hb(m, n);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        cplx& prev = prev_bs[r * n + c];
        if (cm.fading) {
          prev = src_bs.next(i == 0 ? nullptr : &prev);
          hb(r, c) = amp_bs * prev;
        } else {
          hb(r, c) = std::polar(amp_bs, bs_phase[r * n + c]);
        }
      }
    ch.h_bs.push_back(std::move(hb));

    ch.h_sue[i].reserve(nk);
    ch.h_direct[i].reserve(nk);
    for (std::size_t k = 0; k < nk; ++k) {
      ComplexMatrix hs(m, m);
      for (std::size_t d = 0; d < m; ++d) {
        const cplx los = std::polar(1.0, los_phase[k * m + d]);
        if (cm.fading) {
          cplx& prev = prev_sue[k * m + d];
          prev = src_sue.next(i == 0 ? nullptr : &prev);
          hs(d, d) = amp_sudac * (los_w * los + nlos_w * prev);
        } else {
          hs(d, d) = amp_sudac * los;
        }
      }
      ch.h_sue[i].push_back(std::move(hs));

      ComplexMatrix hd(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          const std::size_t idx = (k * n + r) * n + c;
          if (cm.fading) {
            prev_dir[idx] = src_dir.next(i == 0 ? nullptr : &prev_dir[idx]);
            hd(r, c) = amp_bs * prev_dir[idx];
          } else {
            hd(r, c) = std::polar(amp_bs, dir_phase[idx]);
          }
        }
      ch.h_direct[i].push_back(std::move(hd));
    }
  }
  return ch;
}

namespace {

std::vector<double> sorted_diag_power(const ComplexMatrix& d) {
  std::vector<double> g(d.rows());
  for (std::size_t j = 0; j < d.rows(); ++j) g[j] = std::norm(d(j, j));
  std::stable_sort(g.begin(), g.end(), std::greater<>());
  return g;
}

}  // namespace

std::size_t stream_count(const ChannelRealization& ch, const SystemConfig& cfg) {
  std::size_t ns = std::min(cfg.n_antennas, cfg.n_sudacs);
  if (cfg.n_streams_cap > 0) ns = std::min(ns, cfg.n_streams_cap);
  for (const auto& h : ch.h_bs) ns = std::min(ns, numerical_rank(svd(h).sigma));
  for (const auto& row : ch.h_sue)
    for (const auto& h : row) {
      std::vector<double> mag(h.rows());
      for (std::size_t j = 0; j < h.rows(); ++j) mag[j] = std::abs(h(j, j));
      ns = std::min(ns, numerical_rank(mag));
    }
  return ns;
}

EffectiveChannels effective_cnrs(const ChannelRealization& ch, const SystemConfig& cfg) {
  const std::size_t nf = ch.h_bs.size();
  const std::size_t nk = nf > 0 ? ch.h_sue[0].size() : cfg.n_ues;

  std::vector<std::vector<double>> bs_sigma(nf);
  std::size_t ns = std::min(cfg.n_antennas, cfg.n_sudacs);
  if (cfg.n_streams_cap > 0) ns = std::min(ns, cfg.n_streams_cap);
  for (std::size_t i = 0; i < nf; ++i) {
    bs_sigma[i] = svd(ch.h_bs[i]).sigma;
    ns = std::min(ns, numerical_rank(bs_sigma[i]));
  }
  std::vector<std::vector<std::vector<double>>> sue_g(nf, std::vector<std::vector<double>>(nk));
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t k = 0; k < nk; ++k) {
      sue_g[i][k] = sorted_diag_power(ch.h_sue[i][k]);
      std::vector<double> mag(sue_g[i][k].size());
      for (std::size_t j = 0; j < mag.size(); ++j) mag[j] = std::sqrt(sue_g[i][k][j]);
      ns = std::min(ns, numerical_rank(mag));
    }

  EffectiveChannels eff;
  eff.n_s = ns;
  eff.g_bs = Tensor2(nf, ns);
  eff.g_sue = Tensor3(nf, nk, ns);
  for (std::size_t i = 0; i < nf; ++i) {
    for (std::size_t n = 0; n < ns; ++n) eff.g_bs(i, n) = bs_sigma[i][n] * bs_sigma[i][n];
    for (std::size_t k = 0; k < nk; ++k)
      for (std::size_t n = 0; n < ns; ++n) eff.g_sue(i, k, n) = sue_g[i][k][n];
  }
  // Reciprocity: the conjugate-transposed hops have the same singular values.
  eff.g_sb = eff.g_bs;
  eff.g_ues = eff.g_sue;
  return eff;
}

}  // namespace sudas
