#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "salsa/checks.hpp"
#include "salsa/problems.hpp"

using namespace salsa;

namespace {

NoisyQuadratic ten_d() {
  Vec lambda(10), x_star(10, 0.0);
  for (int i = 0; i < 10; ++i) lambda[static_cast<std::size_t>(i)] = 0.1 + 0.1 * i;
  return NoisyQuadratic(lambda, x_star, 0.5, 1000);
}

}  // namespace

TEST_CASE("identity (17) holds to rounding error on heavy-ball runs") {
  const auto prob = ten_d();
  for (double beta : {0.0, 0.5, 0.9}) {
    const auto chain = collect_shb_chain(prob, Vec(10, 2.0), beta, 0.05, 0,
                                         100, 123, 100);
    REQUIRE(chain.xs.size() == 101);
    REQUIRE(chain.ds.size() == 100);
    const auto rep = verify_shb_identity(chain.xs, chain.ds, 0.05, beta);
    CHECK(rep.terms == 99);
    CHECK(rep.relative_residual < 1e-9);
    CHECK(rep.relative_residual < 1e-12);  // in practice it is far smaller
  }
}

TEST_CASE("identity check detects a corrupted trajectory") {
  const auto prob = ten_d();
  auto chain = collect_shb_chain(prob, Vec(10, 2.0), 0.9, 0.05, 0, 100, 7, 100);
  chain.ds[50][3] += 1e-3;
  const auto rep = verify_shb_identity(chain.xs, chain.ds, 0.05, 0.9);
  CHECK(rep.max_abs_residual > 1e-4);
}

TEST_CASE("identity check input validation") {
  const auto prob = ten_d();
  const auto chain = collect_shb_chain(prob, Vec(10, 1.0), 0.5, 0.05, 0, 10, 1, 10);
  CHECK_THROWS_AS(verify_shb_identity(chain.xs, chain.ds, 0.05, 1.0),
                  ConfigError);
  std::vector<Vec> xs_short(chain.xs.begin(), chain.xs.end() - 1);
  CHECK_THROWS_AS(verify_shb_identity(xs_short, chain.ds, 0.05, 0.5),
                  DimensionError);
}

TEST_CASE("stationary chain: Delta, Yaida, and drift means vanish") {
  NoisyQuadratic prob({1.0}, {0.0}, 1.0, 1000);
  const auto chain =
      collect_shb_chain(prob, {0.0}, 0.9, 0.1, 10000, 200000, 202);
  const auto rep = stationary_means_report(chain.deltas, chain.yaidas, chain.dsqs);
  CHECK(rep.n == 200000);
  CHECK(rep.within(3.0));
  CHECK(rep.delta_se > 0.0);
  CHECK(rep.yaida_se > 0.0);
}

TEST_CASE("transient chain is rejected loudly") {
  // No burn-in and a tiny step size: over the whole window the iterate drifts
  // toward the optimum at a nearly constant rate, so every Delta sample shares
  // the same systematic sign and the mean sits hundreds of standard errors
  // from zero. (A fast transient would instead decay within a few samples and
  // merely fatten the tail of an otherwise stationary window.)
  NoisyQuadratic prob({1.0}, {0.0}, 1.0, 1000);
  const auto chain = collect_shb_chain(prob, {10.0}, 0.9, 1e-5, 0, 2000, 17);
  const auto rep = stationary_means_report(chain.deltas, chain.yaidas, chain.dsqs);
  CHECK(std::fabs(rep.delta_mean) > 5.0 * rep.delta_se);
}

TEST_CASE("noise-free chain at the optimum is identically zero") {
  NoisyQuadratic prob({1.0, 2.0}, {0.0, 0.0}, 0.0, 1000);
  const auto chain =
      collect_shb_chain(prob, {0.0, 0.0}, 0.9, 0.1, 0, 500, 3);
  for (double v : chain.deltas) CHECK(v == 0.0);
  for (double v : chain.yaidas) CHECK(v == 0.0);
  for (double v : chain.dsqs) CHECK(v == 0.0);
  const auto rep = stationary_means_report(chain.deltas, chain.yaidas, chain.dsqs);
  CHECK(rep.within(3.0));
}

TEST_CASE("collect_shb_chain is seed-deterministic and clamps keep") {
  NoisyQuadratic prob({1.0}, {0.0}, 1.0, 1000);
  const auto a = collect_shb_chain(prob, {1.0}, 0.5, 0.1, 10, 50, 99, 500);
  const auto b = collect_shb_chain(prob, {1.0}, 0.5, 0.1, 10, 50, 99, 500);
  CHECK(a.deltas == b.deltas);
  CHECK(a.xs.size() == 51);  // keep clamped to `samples`
  CHECK(a.ds.size() == 50);

  const auto c = collect_shb_chain(prob, {1.0}, 0.5, 0.1, 10, 50, 100, 500);
  bool same = (a.deltas == c.deltas);
  CHECK_FALSE(same);  // different seed, different chain
}

TEST_CASE("stationary_means_report uses OLBM standard errors") {
  // An autocorrelated, mean-zero AR(1) stream: the naive iid SE would be
  // ~4.4x too small at phi = 0.8; the reported SE must reflect the
  // correlation, i.e. come out well above the iid value.
  Rng rng(55);
  const auto z = oracle::ar1_chain(0.8, 1.0, 50000, rng);
  std::vector<double> flat(z.size(), 0.0);
  const auto rep = stationary_means_report(z, flat, flat);
  const double iid_se =
      std::sqrt(oracle::sample_variance(z) / double(z.size()));
  CHECK(rep.delta_se > 2.5 * iid_se);
}
