#pragma once

#include <cstddef>
#include <vector>

#include "sudas/numerics.hpp"

namespace sudas {

// SVD factors of one subcarrier's BS -> SUDAS and SUDAS -> UE hops.
struct LinkFactors {
  SvdResult bs;   // of H_bs (M x N)
  SvdResult sue;  // of H_sue (M x M)
};

LinkFactors factorize(const ComplexMatrix& h_bs, const ComplexMatrix& h_sue);

// Scalar stream powers. p_sue and p_sb are SUDAS transmit powers per stream.
struct StreamPowers {
  std::vector<double> p_bs, p_sue, p_ues, p_sb;
};

struct PrecoderSet {
  ComplexMatrix p_dl;  // N x N_S
  ComplexMatrix f_dl;  // M x M
  ComplexMatrix p_ul;  // M x N_S
  ComplexMatrix f_ul;  // M x M
  // Diagonal amplitudes. The forwarding entries are per-stream amplitude
  // gains chosen so each stream's SUDAS transmit power equals p_sue / p_sb.
  std::vector<double> lambda_b_dl, lambda_f_dl, lambda_ue_ul, lambda_f_ul;
};

// Throws ConfigError if n_s exceeds the rank of either hop.
PrecoderSet build(const LinkFactors& f, std::size_t n_s, const StreamPowers& powers);

struct GammaTheta {
  ComplexMatrix gamma;
  ComplexMatrix theta;
};

// Effective channel and noise covariance at the UE (downlink) or BS (uplink).
GammaTheta downlink_gamma_theta(const ComplexMatrix& h_bs, const ComplexMatrix& h_sue,
                                const PrecoderSet& set);
GammaTheta uplink_gamma_theta(const ComplexMatrix& h_bs, const ComplexMatrix& h_sue,
                              const PrecoderSet& set);

// E = [I + G^H T^{-1} G]^{-1}. Throws DomainError if theta is not HPD.
ComplexMatrix mse_matrix(const ComplexMatrix& gamma, const ComplexMatrix& theta);

// W = (G G^H + T)^{-1} G.
ComplexMatrix mmse_receiver(const ComplexMatrix& gamma, const ComplexMatrix& theta);

// Tr(F (H P P^H H^H + I) F^H).
double sudas_forward_power(const ComplexMatrix& f, const ComplexMatrix& h_in,
                           const ComplexMatrix& p_in);

}  // namespace sudas
