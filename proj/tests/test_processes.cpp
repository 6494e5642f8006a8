#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "markov/model_io.hpp"
#include "markov/processes.hpp"

using namespace markov;

namespace {

MarkovChainModel chain_07_02() {
  Matrix t(2, 2);
  t << 0.7, 0.3, 0.2, 0.8;
  return MarkovChainModel(Alphabet(2), 1, t);
}

GeometricBinaryGModel gmodel() { return GeometricBinaryGModel(0.3, 0.2, 0.5); }

}  // namespace

TEST_CASE("markov_stationary examples") {
  const MarkovChainModel chain = chain_07_02();
  CHECK(chain.stationary()[0] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(chain.stationary()[1] == doctest::Approx(0.6).epsilon(1e-9));

  Matrix doubly(4, 2);  // order-2 chain with uniform rows
  doubly << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  const Vector pi = markov_stationary(doubly, Alphabet(2), 2);
  for (Index i = 0; i < 4; ++i) CHECK(pi[i] == doctest::Approx(0.25).epsilon(1e-9));

  CHECK(MarkovChainModel::iid(Vector::Constant(2, 0.5)).stationary().size() == 1);

  Matrix bad(2, 2);
  bad << 0.7, 0.2, 0.2, 0.8;
  CHECK_THROWS_AS(MarkovChainModel(Alphabet(2), 1, bad), std::invalid_argument);
}

TEST_CASE("stationarity is preserved under the shift") {
  const MarkovChainModel chain = chain_07_02();
  // pi T = pi for the induced state chain
  Vector next = Vector::Zero(2);
  for (Index c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a) next[a] += chain.stationary()[c] * chain.transition()(c, a);
  CHECK((next - chain.stationary()).cwiseAbs().sum() <= 1e-10);
}

TEST_CASE("sample_path determinism and marginals") {
  const ProcessModel iid = MarkovChainModel::iid(Vector::Constant(2, 0.5));
  const Sample a = sample_path(iid, 1000, SeedSpec{42});
  const Sample b = sample_path(iid, 1000, SeedSpec{42});
  CHECK(a.data == b.data);

  const Sample u = sample_path(iid, 1 << 16, SeedSpec{7});
  const double freq0 =
      static_cast<double>(std::count(u.data.begin(), u.data.end(), 0)) / u.size();
  CHECK(std::abs(freq0 - 0.5) <= 0.01);

  const ProcessModel chain = chain_07_02();
  const Sample m = sample_path(chain, 1 << 16, SeedSpec{11});
  const double freq1 =
      static_cast<double>(std::count(m.data.begin(), m.data.end(), 1)) / m.size();
  CHECK(std::abs(freq1 - 0.6) <= 0.02);

  const ProcessModel g = gmodel();
  const Sample gpates = sample_path(g, 1 << 16, SeedSpec{5});
  const Sample gp2 = sample_path(g, 1 << 16, SeedSpec{5});
  CHECK(gpates.data == gp2.data);
  // stationary P(1) lies in [theta0, theta0 + c rho/(1-rho)]
  const double gfreq1 =
      static_cast<double>(std::count(gpates.data.begin(), gpates.data.end(), 1)) / gpates.size();
  CHECK(gfreq1 >= 0.3 - 0.02);
  CHECK(gfreq1 <= 0.5 + 0.02);
}

TEST_CASE("true_entropies of Markov chains are exact") {
  const ProcessModel chain = chain_07_02();
  const ProcessQuantities q = true_entropies(chain, 4);
  CHECK(q.h_provenance == Provenance::Exact);
  CHECK(q.h[0] == doctest::Approx(0.970951).epsilon(1e-6));
  CHECK(q.h[1] == doctest::Approx(0.785673).epsilon(1e-6));
  for (int k = 1; k <= 4; ++k) CHECK(q.h[k] == doctest::Approx(q.h[1]).epsilon(1e-12));

  const ProcessQuantities u = true_entropies(MarkovChainModel::iid(Vector::Constant(2, 0.5)), 3);
  for (int k = 0; k <= 3; ++k) CHECK(u.h[k] == doctest::Approx(1.0));

  // h_k nonincreasing, nonnegative, <= log2 |A|
  for (int k = 0; k <= 4; ++k) {
    CHECK(q.h[k] >= 0.0);
    CHECK(q.h[k] <= 1.0 + 1e-12);
    if (k > 0) CHECK(q.h[k] <= q.h[k - 1] + 1e-12);
  }
}

TEST_CASE("g-model entropies are Monte Carlo with standard errors") {
  McParams mc;
  mc.path_len = 1 << 16;
  mc.replicas = 4;
  const ProcessQuantities q = true_entropies(gmodel(), 4, mc);
  CHECK(q.h_provenance == Provenance::MonteCarlo);
  for (int k = 0; k <= 4; ++k) {
    CHECK(q.h[k] > 0.0);
    CHECK(q.h[k] < 1.0);
    CHECK(q.h_se[k] > 0.0);
  }
  // nonincreasing within Monte Carlo noise
  for (int k = 1; k <= 4; ++k) CHECK(q.h[k] <= q.h[k - 1] + 3 * (q.h_se[k] + q.h_se[k - 1]));
}

TEST_CASE("continuity_rates examples") {
  const ProcessQuantities mq = continuity_rates(chain_07_02(), 3);
  CHECK(mq.gamma_upper[1] == 0.0);
  CHECK(mq.gamma_upper[2] == 0.0);
  CHECK(mq.gamma_upper[0] > 0.0);          // order-1 chain has memory at k=0
  CHECK((*mq.gamma_lower)[0] <= mq.gamma_upper[0]);

  McParams mc;
  mc.path_len = 1 << 14;
  mc.replicas = 2;
  const ProcessQuantities gq = continuity_rates(gmodel(), 4, mc);
  CHECK(gq.gamma_upper_provenance == Provenance::Bound);
  CHECK(gq.gamma_upper[3] == doctest::Approx(0.05).epsilon(1e-12));
  for (int k = 1; k <= 4; ++k)
    CHECK(gq.gamma_upper[k] == doctest::Approx(0.5 * gq.gamma_upper[k - 1]).epsilon(1e-12));
  REQUIRE(gq.gamma_lower.has_value());
  for (int k = 0; k <= 4; ++k) CHECK((*gq.gamma_lower)[k] <= gq.gamma_upper[k] + 1e-12);
}

TEST_CASE("nonnullness constants") {
  const ProcessQuantities mq = nonnullness_constants(chain_07_02());
  CHECK(mq.p_inf == doctest::Approx(0.2));
  CHECK(mq.alpha0 == doctest::Approx(0.5));  // min(0.7,0.2) + min(0.3,0.8)
  CHECK(mq.alpha == doctest::Approx(0.5));
  CHECK_FALSE(mq.nonnull_warning);

  const ProcessQuantities uq = nonnullness_constants(MarkovChainModel::iid(Vector::Constant(2, 0.5)));
  CHECK(uq.alpha0 == doctest::Approx(1.0));
  CHECK(uq.alpha == doctest::Approx(0.0));

  const ProcessQuantities gq = nonnullness_constants(gmodel());
  CHECK(gq.p_inf == doctest::Approx(0.3));  // min(0.3, 0.5)
  CHECK(gq.nonnull_provenance == Provenance::Bound);

  Matrix zero_row(2, 2);
  zero_row << 1.0, 0.0, 0.5, 0.5;
  const ProcessQuantities zq = nonnullness_constants(MarkovChainModel(Alphabet(2), 1, zero_row));
  CHECK(zq.p_inf == 0.0);
  CHECK(zq.nonnull_warning);
}

TEST_CASE("Remark-2 chain between alpha_k and gamma_upper holds exactly for the zoo") {
  Matrix t2(4, 2);  // order-2 chain
  t2 << 0.9, 0.1, 0.3, 0.7, 0.6, 0.4, 0.2, 0.8;
  const MarkovChainModel chain(Alphabet(2), 2, t2);
  const ProcessQuantities nn = nonnullness_constants(chain);
  const ProcessQuantities cr = continuity_rates(chain, 2);
  // recompute alpha_k the slow way and compare against |A| gamma_upper(k)
  for (int k = 0; k < 2; ++k) {
    const Index suffixes = checked_pow(2, k);
    const Index exts = checked_pow(2, 2 - k);
    double alpha_k = 1e9;
    for (Index y = 0; y < suffixes; ++y) {
      double total = 0.0;
      for (int a = 0; a < 2; ++a) {
        double worst = 1e9;
        for (Index z = 0; z < exts; ++z) worst = std::min(worst, chain.transition()(z * suffixes + y, a));
        total += worst;
      }
      alpha_k = std::min(alpha_k, total);
    }
    CHECK(1.0 - alpha_k <= 2.0 * cr.gamma_upper[k] + 1e-12);
  }
  CHECK(nn.alpha >= 0.0);
}

TEST_CASE("empirical conditional entropies track exact values on a long path") {
  const ProcessModel chain = chain_07_02();
  const ProcessQuantities q = true_entropies(chain, 3);
  const int replicas = 6;
  Matrix est(replicas, 4);
  for (int r = 0; r < replicas; ++r) {
    const Sample path = sample_path(chain, 1 << 16, SeedSpec{static_cast<std::uint64_t>(100 + r)});
    const CountStack stack(path, 4);
    for (int k = 0; k <= 3; ++k) est(r, k) = empirical_cond_entropy(stack, k);
  }
  for (int k = 0; k <= 3; ++k) {
    const double mean = est.col(k).mean();
    const double se = std::sqrt((est.col(k).array() - mean).square().sum() /
                                (replicas - 1) / replicas);
    CHECK(std::abs(mean - q.h[k]) <= std::max(3 * se, 5e-4));
  }
}

TEST_CASE("model config round trip") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "mk_model.json").string();
  write_model(chain_07_02(), path);
  const ProcessModel back = read_model(path);
  const auto& chain = std::get<MarkovChainModel>(back);
  CHECK(chain.order() == 1);
  CHECK(chain.transition()(1, 1) == doctest::Approx(0.8));

  write_model(gmodel(), path);
  const ProcessModel gback = read_model(path);
  CHECK(std::get<GeometricBinaryGModel>(gback).rho == doctest::Approx(0.5));
  std::filesystem::remove(path);
}
