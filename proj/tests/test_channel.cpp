#include <random>

#include "doctest.h"
#include "sudas/channel.hpp"
#include "test_util.hpp"

using namespace sudas;

namespace {

SystemConfig tiny(std::size_t n, std::size_t m, std::size_t k, std::size_t nf) {
  SystemConfig c = SystemConfig::defaults();
  c.n_antennas = n;
  c.n_sudacs = m;
  c.resize_ues(k);
  c.n_subcarriers = nf;
  return c;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference first output") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(trial_seed(5, 3) == (5ULL ^ splitmix64(3)));
}

TEST_CASE("generation is deterministic per seed") {
  const SystemConfig c = tiny(4, 4, 2, 8);
  const ChannelRealization a = generate(c, 42), b = generate(c, 42), d = generate(c, 43);
  CHECK(a.h_bs == b.h_bs);
  CHECK(a.h_sue == b.h_sue);
  CHECK(a.h_direct == b.h_direct);
  CHECK_FALSE(a.h_bs == d.h_bs);
}

TEST_CASE("shapes and diagonal SUDAS-to-UE hops") {
  const SystemConfig c = tiny(3, 5, 2, 4);
  const ChannelRealization ch = generate(c, 1);
  REQUIRE(ch.h_bs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ch.h_bs[i].rows() == 5);
    CHECK(ch.h_bs[i].cols() == 3);
    REQUIRE(ch.h_sue[i].size() == 2);
    for (const auto& h : ch.h_sue[i]) {
      REQUIRE(h.rows() == 5);
      for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t col = 0; col < 5; ++col)
          if (r != col) CHECK(h(r, col) == cplx{0.0, 0.0});
    }
    for (const auto& h : ch.h_direct[i]) CHECK(h.rows() == 3);
  }
}

TEST_CASE("path-loss-only mode gives deterministic magnitudes") {
  SystemConfig c = tiny(4, 4, 2, 6);
  c.channel.fading = false;
  const ChannelRealization ch = generate(c, 9);
  const double a_bs = std::sqrt(mean_gain_bs(c)), a_s = std::sqrt(mean_gain_sudac(c));
  for (std::size_t i = 0; i < 6; ++i) {
    for (const cplx& v : ch.h_bs[i].entries()) CHECK(sudas::test::rel_close(std::abs(v), a_bs, 1e-12));
    for (const auto& h : ch.h_sue[i])
      for (std::size_t d = 0; d < 4; ++d) CHECK(sudas::test::rel_close(std::abs(h(d, d)), a_s, 1e-12));
  }
}

TEST_CASE("mean channel gains match the path-loss law") {
  // 1e5 draws per hop: 25 seeds x 1000 subcarriers x 4 entries.
  SystemConfig c = tiny(2, 2, 1, 1000);
  double sum_bs = 0.0, sum_sue = 0.0;
  std::size_t n_bs = 0, n_sue = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ChannelRealization ch = generate(c, seed);
    for (std::size_t i = 0; i < 1000; ++i) {
      for (const cplx& v : ch.h_bs[i].entries()) {
        sum_bs += std::norm(v);
        ++n_bs;
      }
      for (std::size_t d = 0; d < 2; ++d) {
        sum_sue += std::norm(ch.h_sue[i][0](d, d));
        ++n_sue;
      }
    }
  }
  REQUIRE(n_bs >= 100000);
  REQUIRE(n_sue >= 100000);
  CHECK(std::abs(sum_bs / static_cast<double>(n_bs) / mean_gain_bs(c) - 1.0) <= 0.02);
  CHECK(std::abs(sum_sue / static_cast<double>(n_sue) / mean_gain_sudac(c) - 1.0) <= 0.02);
}

TEST_CASE("frequency correlation knob sets the adjacent-subcarrier correlation") {
  SystemConfig c = tiny(1, 1, 1, 20000);
  c.channel.freq_correlation = 0.8;
  const ChannelRealization ch = generate(c, 3);
  cplx num{0.0, 0.0};
  double den = 0.0;
  for (std::size_t i = 1; i < 20000; ++i) {
    num += ch.h_bs[i](0, 0) * std::conj(ch.h_bs[i - 1](0, 0));
    den += std::norm(ch.h_bs[i - 1](0, 0));
  }
  CHECK(std::abs(num.real() / den - 0.8) <= 0.02);
}

TEST_CASE("effective CNRs of hand-built channels") {
  SystemConfig c = tiny(2, 2, 1, 1);
  ChannelRealization ch;
  ch.h_bs = {ComplexMatrix::identity(2)};
  ch.h_sue = {{ComplexMatrix::diagonal(std::vector<cplx>{{0.0, 1.0}, {2.0, 0.0}})}};
  ch.h_direct = {{ComplexMatrix::identity(2)}};
  const EffectiveChannels eff = effective_cnrs(ch, c);
  REQUIRE(eff.n_s == 2);
  CHECK(eff.g_bs(0, 0) == doctest::Approx(1.0));
  CHECK(eff.g_bs(0, 1) == doctest::Approx(1.0));
  CHECK(eff.g_sue(0, 0, 0) == doctest::Approx(4.0));
  CHECK(eff.g_sue(0, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("effective CNRs against the Gram eigenvalues, reciprocity and rotation invariance") {
  const SystemConfig c = tiny(4, 4, 2, 8);
  const ChannelRealization ch = generate(c, 77);
  const EffectiveChannels eff = effective_cnrs(ch, c);
  REQUIRE(eff.n_s == 4);
  std::mt19937_64 rng(5);
  ChannelRealization rot = ch;
  for (std::size_t i = 0; i < 8; ++i) {
    const auto ev = sudas::test::gram_eigenvalues(ch.h_bs[i]);
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(sudas::test::rel_close(eff.g_bs(i, n), ev[n], 1e-9));
      if (n > 0) CHECK(eff.g_bs(i, n) <= eff.g_bs(i, n - 1));
    }
    rot.h_bs[i] = sudas::test::random_unitary(rng, 4) * ch.h_bs[i] * sudas::test::random_unitary(rng, 4);
  }
  CHECK(eff.g_sb == eff.g_bs);
  CHECK(eff.g_ues == eff.g_sue);
  const EffectiveChannels er = effective_cnrs(rot, c);
  for (std::size_t j = 0; j < eff.g_bs.v.size(); ++j)
    CHECK(sudas::test::rel_close(er.g_bs.v[j], eff.g_bs.v[j], 1e-9));
}

TEST_CASE("stream count follows min(N, M) and the cap") {
  SystemConfig c = tiny(3, 5, 1, 2);
  CHECK(effective_cnrs(generate(c, 1), c).n_s == 3);
  CHECK(stream_count(generate(c, 1), c) == 3);
  c.n_streams_cap = 2;
  CHECK(effective_cnrs(generate(c, 1), c).n_s == 2);
}
