#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "markov/core.hpp"
#include "markov/sample_io.hpp"

using namespace markov;

TEST_CASE("xlog2x convention and examples") {
  CHECK(xlog2x(0.0) == 0.0);
  CHECK(xlog2x(1.0) == 0.0);
  CHECK(xlog2x(0.5) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(xlog2x(-0.1), std::domain_error);
  CHECK_THROWS_AS(xlog2x(1.1), std::domain_error);
}

TEST_CASE("xlog2x is continuous at 0") {
  for (double eps = 0.1; eps > 1e-12; eps /= 2.0)
    CHECK(std::abs(xlog2x(eps)) <= eps * std::abs(std::log2(eps)) + 1e-15);
}

TEST_CASE("penalty variants") {
  CHECK(PenaltySpec::bic()(4) == doctest::Approx(1.0));
  CHECK(PenaltySpec::aic()(1 << 20) == 1.0);
  CHECK(PenaltySpec::power(0.5)(256) == doctest::Approx(16.0));
  CHECK(PenaltySpec::constant(3.0)(17) == 3.0);
  CHECK_THROWS(PenaltySpec::power(1.5));
  CHECK_THROWS(PenaltySpec::constant(-1.0));
  // nondecreasing in n, nonnegative
  for (const auto& pen : {PenaltySpec::bic(), PenaltySpec::aic(), PenaltySpec::power(0.3),
                          PenaltySpec::constant(0.0)}) {
    double prev = -1.0;
    for (std::int64_t n = 1; n <= 4096; n *= 2) {
      CHECK(pen(n) >= 0.0);
      CHECK(pen(n) >= prev);
      prev = pen(n);
    }
  }
}

TEST_CASE("alphabet and sample validation") {
  CHECK_THROWS(Alphabet(1));
  CHECK_THROWS(Sample(Alphabet(2), {0, 2, 1}));
  CHECK_THROWS(Sample(Alphabet(2), {}));
  CHECK(Sample(Alphabet(3), {0, 1, 2}).size() == 3);
}

TEST_CASE("checked_pow names the largest representable k") {
  CHECK(checked_pow(2, 10) == 1024);
  CHECK_THROWS_WITH_AS(checked_pow(2, 64), doctest::Contains("largest k: 63"),
                       std::overflow_error);
}

TEST_CASE("seed derivation is deterministic and stream-separated") {
  SeedSpec spec{12345};
  CHECK(spec.derive(7) == spec.derive(7));
  CHECK(spec.derive(7) != spec.derive(8));
  CHECK(spec.derive({1, 2}) != spec.derive({2, 1}));
  Rng a(spec.derive(7)), b(spec.derive(7));
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("rng draw matches cdf inversion") {
  Vector probs(3);
  probs << 0.2, 0.5, 0.3;
  Rng rng(99);
  std::array<int, 3> hits{0, 0, 0};
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) hits[static_cast<std::size_t>(rng.draw(probs))]++;
  for (int a = 0; a < 3; ++a)
    CHECK(std::abs(hits[a] / double(trials) - probs[a]) < 0.01);
}

TEST_CASE("sample text/binary round trip") {
  const auto dir = std::filesystem::temp_directory_path();
  const Sample sample = sample_from_string("0120012", 3);
  const auto text_path = (dir / "mk_sample.txt").string();
  const auto bin_path = (dir / "mk_sample.bin").string();
  write_sample_text(sample, text_path);
  write_sample_binary(sample, bin_path);
  const Sample t = read_sample(text_path, 3);
  const Sample b = read_sample(bin_path);
  CHECK(t.data == sample.data);
  CHECK(b.data == sample.data);
  CHECK(b.alphabet.size == 3);
  CHECK_THROWS(sample_from_string("01!0"));
  // symbols outside the declared alphabet are rejected
  CHECK_THROWS(sample_from_string("012", 2));
  std::filesystem::remove(text_path);
  std::filesystem::remove(bin_path);
}
