#include "sudas/precoder.hpp"

#include <cmath>

#include "sudas/errors.hpp"

namespace sudas {

LinkFactors factorize(const ComplexMatrix& h_bs, const ComplexMatrix& h_sue) {
  return LinkFactors{svd(h_bs), svd(h_sue)};
}

namespace {

std::vector<double> sqrt_all(const std::vector<double>& p) {
  std::vector<double> out(p.size());
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (!(p[n] >= 0.0)) throw InvalidInput("stream powers must be non-negative");
    out[n] = std::sqrt(p[n]);
  }
  return out;
}

// Amplitude gain giving transmit power p_fwd when the input stream power is g * p_in + 1.
std::vector<double> forward_gains(const std::vector<double>& p_fwd, const std::vector<double>& sigma,
                                  const std::vector<double>& p_in) {
  std::vector<double> out(p_fwd.size());
  for (std::size_t n = 0; n < p_fwd.size(); ++n) {
    if (!(p_fwd[n] >= 0.0)) throw InvalidInput("stream powers must be non-negative");
    out[n] = std::sqrt(p_fwd[n] / (sigma[n] * sigma[n] * p_in[n] + 1.0));
  }
  return out;
}

ComplexMatrix scale_columns(const ComplexMatrix& a, const std::vector<double>& d) {
  ComplexMatrix out = a;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) *= d[c];
  return out;
}

}  // namespace

PrecoderSet build(const LinkFactors& f, std::size_t n_s, const StreamPowers& pw) {
  if (n_s > numerical_rank(f.bs.sigma) || n_s > numerical_rank(f.sue.sigma))
    throw ConfigError("stream count exceeds channel rank");
  if (pw.p_bs.size() != n_s || pw.p_sue.size() != n_s || pw.p_ues.size() != n_s ||
      pw.p_sb.size() != n_s)
    throw InvalidInput("stream power vectors must have n_s entries");

  PrecoderSet s;
  s.lambda_b_dl = sqrt_all(pw.p_bs);
  s.lambda_ue_ul = sqrt_all(pw.p_ues);
  s.lambda_f_dl = forward_gains(pw.p_sue, f.bs.sigma, pw.p_bs);
  s.lambda_f_ul = forward_gains(pw.p_sb, f.sue.sigma, pw.p_ues);

  const ComplexMatrix v_bs = f.bs.v.left_columns(n_s);
  const ComplexMatrix u_bs = f.bs.u.left_columns(n_s);
  const ComplexMatrix v_sue = f.sue.v.left_columns(n_s);
  const ComplexMatrix u_sue = f.sue.u.left_columns(n_s);

  s.p_dl = scale_columns(v_bs, s.lambda_b_dl);
  s.f_dl = scale_columns(v_sue, s.lambda_f_dl) * u_bs.adjoint();
  s.p_ul = scale_columns(u_sue, s.lambda_ue_ul);
  s.f_ul = scale_columns(u_bs, s.lambda_f_ul) * v_sue.adjoint();
  return s;
}

GammaTheta downlink_gamma_theta(const ComplexMatrix& h_bs, const ComplexMatrix& h_sue,
                                const PrecoderSet& set) {
  const ComplexMatrix hf = h_sue * set.f_dl;
  GammaTheta gt;
  gt.gamma = hf * h_bs * set.p_dl;
  gt.theta = hf * hf.adjoint() + ComplexMatrix::identity(hf.rows());
  return gt;
}

GammaTheta uplink_gamma_theta(const ComplexMatrix& h_bs, const ComplexMatrix& h_sue,
                              const PrecoderSet& set) {
  const ComplexMatrix h_sb = h_bs.adjoint();
  const ComplexMatrix h_ues = h_sue.adjoint();
  const ComplexMatrix hf = h_sb * set.f_ul;
  GammaTheta gt;
  gt.gamma = hf * h_ues * set.p_ul;
  gt.theta = hf * hf.adjoint() + ComplexMatrix::identity(hf.rows());
  return gt;
}

ComplexMatrix mse_matrix(const ComplexMatrix& gamma, const ComplexMatrix& theta) {
  if (theta.rows() != gamma.rows()) throw InvalidInput("mse_matrix: shape mismatch");
  ComplexMatrix x = gamma.adjoint() * solve_hpd(theta, gamma);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    x(r, r) = x(r, r).real() + 1.0;
    for (std::size_t c = r + 1; c < x.cols(); ++c) {
      const cplx m = 0.5 * (x(r, c) + std::conj(x(c, r)));
      x(r, c) = m;
      x(c, r) = std::conj(m);
    }
  }
  return inverse_hpd(x);
}

ComplexMatrix mmse_receiver(const ComplexMatrix& gamma, const ComplexMatrix& theta) {
  if (theta.rows() != gamma.rows()) throw InvalidInput("mmse_receiver: shape mismatch");
  cholesky(theta);  // domain check on theta itself
  ComplexMatrix a = gamma * gamma.adjoint() + theta;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r + 1; c < a.cols(); ++c) {
      const cplx m = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = m;
      a(c, r) = std::conj(m);
    }
  return solve_hpd(a, gamma);
}

double sudas_forward_power(const ComplexMatrix& f, const ComplexMatrix& h_in,
                           const ComplexMatrix& p_in) {
  const ComplexMatrix x = h_in * p_in;
  const ComplexMatrix cov = x * x.adjoint() + ComplexMatrix::identity(x.rows());
  return (f * cov * f.adjoint()).trace().real();
}

}  // namespace sudas
