#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

// Shared conventions used by every module: symbols are dense indices
// 0..|A|-1, strings are base-|A| integer codes (lexicographic order),
// all entropies and code lengths are in bits (log base 2), and
// 0*log 0 = 0.

namespace markov {

using Index = Eigen::Index;

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using CountVector = VectorX<std::int64_t>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// thrown when an exact path would exceed its enumeration/storage budget
class capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// thrown by bound evaluators when a theorem hypothesis is violated
class hypothesis_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct Alphabet {
  int size = 2;

  explicit Alphabet(int size_in = 2) : size(size_in) {
    if (size < 2) throw std::invalid_argument("Alphabet: size must be >= 2");
  }
  bool contains(int symbol) const { return symbol >= 0 && symbol < size; }
};

inline bool operator==(const Alphabet& a, const Alphabet& b) { return a.size == b.size; }
inline bool operator!=(const Alphabet& a, const Alphabet& b) { return !(a == b); }

// |A|^k in a checked 64-bit integer; names the largest representable k on failure
inline std::int64_t checked_pow(int base, int exp) {
  if (exp < 0) throw std::invalid_argument("checked_pow: negative exponent");
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / base) {
      const int max_k = static_cast<int>(63.0 / std::log2(static_cast<double>(base)));
      throw std::overflow_error("checked_pow: " + std::to_string(base) + "^" +
                                std::to_string(exp) + " exceeds 64-bit range (largest k: " +
                                std::to_string(max_k) + ")");
    }
    r *= base;
  }
  return r;
}

struct Sample {
  Alphabet alphabet;
  std::vector<int> data;  // x_1..x_n as symbol indices

  Sample(Alphabet alphabet_in, std::vector<int> data_in)
      : alphabet(alphabet_in), data(std::move(data_in)) {
    if (data.empty()) throw std::invalid_argument("Sample: length must be >= 1");
    for (int s : data)
      if (!alphabet.contains(s))
        throw std::invalid_argument("Sample: symbol " + std::to_string(s) +
                                    " outside alphabet of size " + std::to_string(alphabet.size));
  }
  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
};

// Penalty function pen(n) of the PML criterion; nondecreasing in n for
// every variant.
struct PenaltySpec {
  enum class Kind { Bic, Aic, Power, Constant };

  Kind kind = Kind::Bic;
  double param = 0.0;  // kappa for Power, c for Constant

  static PenaltySpec bic() { return {Kind::Bic, 0.0}; }
  static PenaltySpec aic() { return {Kind::Aic, 0.0}; }
  static PenaltySpec power(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
      throw std::invalid_argument("PenaltySpec: power exponent must be in (0,1)");
    return {Kind::Power, kappa};
  }
  static PenaltySpec constant(double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("PenaltySpec: constant must be >= 0");
    return {Kind::Constant, c};
  }

  double operator()(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("PenaltySpec: n must be >= 1");
    switch (kind) {
      case Kind::Bic:
        return 0.5 * std::log2(static_cast<double>(n));
      case Kind::Aic:
        return 1.0;
      case Kind::Power:
        return std::pow(static_cast<double>(n), param);
      case Kind::Constant:
        return param;
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::Bic:
        return "bic";
      case Kind::Aic:
        return "aic";
      case Kind::Power:
        return "power:" + std::to_string(param);
      case Kind::Constant:
        return "const:" + std::to_string(param);
    }
    return "?";
  }
};

/// p*log2(p) with the 0*log 0 = 0 convention; domain error outside [0,1].
inline double xlog2x(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("xlog2x: p outside [0,1]");
  return p == 0.0 ? 0.0 : p * std::log2(p);
}

/// Entropy in bits of a probability vector (entries may be 0).
inline double entropy_bits(const Vector& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i) h -= xlog2x(p[i]);
  return h;
}

inline double binary_entropy(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

// --- deterministic seeding -------------------------------------------------
//
// Seeds derive from the master seed by folding stream identifiers through
// the SplitMix64 finalizer; identical (master_seed, ids...) give identical
// generators on every platform.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SeedSpec {
  std::uint64_t master_seed = 0;

  std::uint64_t derive(std::initializer_list<std::uint64_t> ids) const {
    std::uint64_t s = splitmix64(master_seed);
    for (std::uint64_t id : ids) s = splitmix64(s ^ id);
    return s;
  }
  std::uint64_t derive(std::uint64_t id) const { return derive({id}); }
};

// mt19937_64 engine with pinned uniform/discrete draws (the standard does
// not pin distribution output, so those are implemented here)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// uniform double in [0,1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// index drawn from a probability vector by CDF inversion
  int draw(const Vector& probs) {
    const double u = uniform();
    double cum = 0.0;
    for (Index i = 0; i + 1 < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace markov
