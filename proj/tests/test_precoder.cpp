#include <random>

#include "doctest.h"
#include "sudas/channel.hpp"
#include "sudas/errors.hpp"
#include "sudas/model.hpp"
#include "sudas/precoder.hpp"
#include "test_util.hpp"

using namespace sudas;
using sudas::test::rel_close;

namespace {

struct Draw {
  ComplexMatrix h_bs, h_sue;
  StreamPowers pw;
};

Draw random_draw(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t ns) {
  std::uniform_real_distribution<double> u(0.01, 10.0);
  Draw d;
  d.h_bs = test::random_matrix(rng, m, n, 3.0);
  std::vector<cplx> diag(m);
  for (auto& x : diag) x = test::random_matrix(rng, 1, 1, 3.0)(0, 0);
  d.h_sue = ComplexMatrix::diagonal(diag);
  for (auto* v : {&d.pw.p_bs, &d.pw.p_sue, &d.pw.p_ues, &d.pw.p_sb}) {
    v->resize(ns);
    for (double& x : *v) x = u(rng);
  }
  return d;
}

}  // namespace

TEST_CASE("precoders diagonalize the downlink and uplink MSE matrices") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const Draw d = random_draw(rng, 4, 4, 2);
    const LinkFactors f = factorize(d.h_bs, d.h_sue);
    const PrecoderSet set = build(f, 2, d.pw);

    const GammaTheta dl = downlink_gamma_theta(d.h_bs, d.h_sue, set);
    const ComplexMatrix e_dl = mse_matrix(dl.gamma, dl.theta);
    CHECK(offdiag_ratio(e_dl) <= 1e-9);
    double sum_dl = 0.0;
    for (std::size_t n = 0; n < 2; ++n) {
      const double g1 = f.bs.sigma[n] * f.bs.sigma[n], g2 = f.sue.sigma[n] * f.sue.sigma[n];
      const double r = rate_exact_dl(g1, g2, d.pw.p_bs[n], d.pw.p_sue[n]);
      CHECK(rel_close(-std::log2(e_dl(n, n).real()), r, 1e-9));
      sum_dl += r;
    }
    CHECK(rel_close(-logdet_hpd(e_dl), sum_dl, 1e-9));

    const GammaTheta ul = uplink_gamma_theta(d.h_bs, d.h_sue, set);
    const ComplexMatrix e_ul = mse_matrix(ul.gamma, ul.theta);
    CHECK(offdiag_ratio(e_ul) <= 1e-9);
    double sum_ul = 0.0;
    for (std::size_t n = 0; n < 2; ++n) {
      const double g_sb = f.bs.sigma[n] * f.bs.sigma[n], g_ues = f.sue.sigma[n] * f.sue.sigma[n];
      sum_ul += rate_exact_ul(g_sb, g_ues, d.pw.p_sb[n], d.pw.p_ues[n]);
    }
    CHECK(rel_close(-logdet_hpd(e_ul), sum_ul, 1e-9));
  }
}

TEST_CASE("transmit powers match the stream powers") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; ++t) {
    const Draw d = random_draw(rng, 3, 5, 3);
    const PrecoderSet set = build(factorize(d.h_bs, d.h_sue), 3, d.pw);
    auto total = [](const std::vector<double>& v) { return v[0] + v[1] + v[2]; };
    CHECK(rel_close((set.p_dl * set.p_dl.adjoint()).trace().real(), total(d.pw.p_bs), 1e-10));
    CHECK(rel_close((set.p_ul * set.p_ul.adjoint()).trace().real(), total(d.pw.p_ues), 1e-10));
    CHECK(rel_close(sudas_forward_power(set.f_dl, d.h_bs, set.p_dl), total(d.pw.p_sue), 1e-10));
    CHECK(rel_close(sudas_forward_power(set.f_ul, d.h_sue.adjoint(), set.p_ul), total(d.pw.p_sb), 1e-10));
  }
}

TEST_CASE("MMSE receiver attains the MSE matrix") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    const Draw d = random_draw(rng, 4, 4, 2);
    const PrecoderSet set = build(factorize(d.h_bs, d.h_sue), 2, d.pw);
    const GammaTheta gt = downlink_gamma_theta(d.h_bs, d.h_sue, set);
    const ComplexMatrix w = mmse_receiver(gt.gamma, gt.theta);
    // E = I - W^H Gamma for the MMSE receiver.
    const ComplexMatrix e = ComplexMatrix::identity(2) - w.adjoint() * gt.gamma;
    CHECK((e - mse_matrix(gt.gamma, gt.theta)).max_abs() <= 1e-10);
  }
}

TEST_CASE("zero stream power gives a unit MSE entry") {
  std::mt19937_64 rng(43);
  Draw d = random_draw(rng, 4, 4, 2);
  d.pw.p_bs[1] = 0.0;
  const PrecoderSet set = build(factorize(d.h_bs, d.h_sue), 2, d.pw);
  const GammaTheta gt = downlink_gamma_theta(d.h_bs, d.h_sue, set);
  CHECK(mse_matrix(gt.gamma, gt.theta)(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("precoder construction errors") {
  std::mt19937_64 rng(47);
  Draw d = random_draw(rng, 4, 4, 2);
  const ComplexMatrix rank1 = test::random_matrix(rng, 4, 1) * test::random_matrix(rng, 1, 4);
  CHECK_THROWS_AS(build(factorize(rank1, d.h_sue), 2, d.pw), ConfigError);
  d.pw.p_sue.pop_back();
  CHECK_THROWS_AS(build(factorize(d.h_bs, d.h_sue), 2, d.pw), InvalidInput);
  d = random_draw(rng, 4, 4, 2);
  d.pw.p_bs[0] = -1.0;
  CHECK_THROWS_AS(build(factorize(d.h_bs, d.h_sue), 2, d.pw), InvalidInput);
  const ComplexMatrix bad = ComplexMatrix::diagonal(std::vector<double>{1.0, -1.0});
  CHECK_THROWS_AS(mse_matrix(ComplexMatrix::identity(2), bad), DomainError);
}

TEST_CASE("generated channels satisfy the diagonalization invariant") {
  SystemConfig c = SystemConfig::defaults();
  c.n_antennas = 4;
  c.n_sudacs = 4;
  c.resize_ues(1);
  c.n_subcarriers = 4;
  const ChannelRealization ch = generate(c, 5);
  const EffectiveChannels eff = effective_cnrs(ch, c);
  StreamPowers pw{{0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}};
  for (std::size_t i = 0; i < 4; ++i) {
    const PrecoderSet set = build(factorize(ch.h_bs[i], ch.h_sue[i][0]), 2, pw);
    const GammaTheta gt = downlink_gamma_theta(ch.h_bs[i], ch.h_sue[i][0], set);
    const ComplexMatrix e = mse_matrix(gt.gamma, gt.theta);
    CHECK(offdiag_ratio(e) <= 1e-9);
    double sum = 0.0;
    for (std::size_t n = 0; n < 2; ++n) sum += rate_exact_dl(eff.g_bs(i, n), eff.g_sue(i, 0, n), 0.1, 0.1);
    CHECK(rel_close(-logdet_hpd(e), sum, 1e-9));
  }
}

TEST_CASE("trivial precoder cases") {
  const ComplexMatrix id = ComplexMatrix::identity(3);
  const LinkFactors f = factorize(id, id);
  const PrecoderSet zero = build(f, 2, StreamPowers{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  CHECK(zero.p_dl.max_abs() == 0.0);
  CHECK(zero.f_dl.max_abs() == 0.0);
  CHECK(zero.p_ul.max_abs() == 0.0);
  CHECK(zero.f_ul.max_abs() == 0.0);
  const PrecoderSet unit = build(f, 2, StreamPowers{{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
  CHECK((unit.p_dl - id.left_columns(2)).max_abs() <= 1e-15);
}

TEST_CASE("effective downlink channel is diagonal with the amplify-and-forward gains") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 100; ++t) {
    const Draw d = random_draw(rng, 4, 4, 2);
    const LinkFactors f = factorize(d.h_bs, d.h_sue);
    const GammaTheta gt = downlink_gamma_theta(d.h_bs, d.h_sue, build(f, 2, d.pw));
    // Seen through the left singular vectors of the SUDAS-to-UE hop.
    const ComplexMatrix g = f.sue.u.adjoint() * gt.gamma;
    const double scale = g.max_abs();
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < 2; ++c) {
        if (r != c) {
          CHECK(std::abs(g(r, c)) <= 1e-9 * scale);
          continue;
        }
        // The forwarding gain normalizes the SUDAS transmit power, so the
        // relay input noise enters the denominator.
        const double a = f.bs.sigma[r] * f.bs.sigma[r] * d.pw.p_bs[r];
        const double b = f.sue.sigma[r] * f.sue.sigma[r] * d.pw.p_sue[r];
        CHECK(rel_close(std::abs(g(r, r)), std::sqrt(a * b / (1.0 + a)), 1e-9));
      }
  }
}

TEST_CASE("MSE matrix and MMSE receiver scalar cases") {
  const ComplexMatrix one(1, 1, {1.0});
  CHECK((mse_matrix(ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2)) - ComplexMatrix::identity(2)).max_abs() == 0.0);
  CHECK(mse_matrix(ComplexMatrix(1, 1, {2.0}), one)(0, 0).real() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(mmse_receiver(ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2)).max_abs() == 0.0);
  CHECK(mmse_receiver(one, one)(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("MMSE receiver minimizes the trace MSE against perturbed receivers") {
  std::mt19937_64 rng(59);
  auto trace_mse = [](const ComplexMatrix& w, const GammaTheta& gt) {
    const ComplexMatrix err = w.adjoint() * gt.gamma - ComplexMatrix::identity(gt.gamma.cols());
    return (err * err.adjoint() + w.adjoint() * gt.theta * w).trace().real();
  };
  for (int t = 0; t < 20; ++t) {
    const Draw d = random_draw(rng, 4, 4, 2);
    const GammaTheta gt = downlink_gamma_theta(d.h_bs, d.h_sue, build(factorize(d.h_bs, d.h_sue), 2, d.pw));
    const ComplexMatrix w = mmse_receiver(gt.gamma, gt.theta);
    const double best = trace_mse(w, gt);
    CHECK(rel_close(best, mse_matrix(gt.gamma, gt.theta).trace().real(), 1e-10));
    for (int j = 0; j < 100; ++j) {
      const ComplexMatrix pert = w + test::random_matrix(rng, w.rows(), w.cols(), 1e-3 * (1.0 + w.max_abs()));
      CHECK(trace_mse(pert, gt) >= best);
    }
  }
}

TEST_CASE("forward power scalar cases") {
  std::mt19937_64 rng(61);
  const ComplexMatrix h = test::random_matrix(rng, 3, 2), p = test::random_matrix(rng, 2, 2);
  CHECK(sudas_forward_power(ComplexMatrix::zeros(3, 3), h, p) == 0.0);
  // gamma_1 P_1 = 3, |F|^2 = 2.
  const ComplexMatrix h1(1, 1, {std::sqrt(3.0)}), p1(1, 1, {1.0}), f1(1, 1, {std::sqrt(2.0)});
  CHECK(sudas_forward_power(f1, h1, p1) == doctest::Approx(8.0).epsilon(1e-14));
}
