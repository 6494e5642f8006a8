#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "markov/core.hpp"
#include "markov/counting.hpp"

// Generative process models: finite-order Markov chains (i.i.d. = order 0)
// and an infinite-memory binary g-model whose conditional law is linear in
// the past with geometric coefficients,
//   P(1 | x_{-1}, x_{-2}, ...) = theta0 + c * sum_j rho^j x_{-j}.
// The g-model's continuity-rate upper bound, non-nullness margin and decay
// exponent are closed-form; its entropies and lower continuity rate are
// Monte Carlo estimates with reported standard errors.

namespace markov {

enum class Provenance { Exact, Bound, MonteCarlo };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact:
      return "exact";
    case Provenance::Bound:
      return "bound";
    case Provenance::MonteCarlo:
      return "monte-carlo";
  }
  return "?";
}

/// Stationary distribution of the context chain induced by a transition
/// matrix (rows indexed by base-|A| context codes, columns by symbols).
/// Power iteration from the uniform distribution, iteration cap 1e6,
/// total-variation residual 1e-12; non-uniqueness resolves to the limit
/// this procedure finds.
inline Vector markov_stationary(const Matrix& transition, const Alphabet& alphabet, int order,
                                double residual_tol = 1e-12, std::int64_t max_iters = 1000000) {
  const Index states = transition.rows();
  if (states != checked_pow(alphabet.size, order))
    throw std::invalid_argument("markov_stationary: row count must be |A|^order");
  for (Index c = 0; c < states; ++c)
    if (std::abs(transition.row(c).sum() - 1.0) > 1e-12)
      throw std::invalid_argument("markov_stationary: row " + std::to_string(c) +
                                  " does not sum to 1");
  if (order == 0) return Vector::Ones(1);

  const int base = alphabet.size;
  const Index ctx_mod = states / base;
  Vector pi = Vector::Constant(states, 1.0 / static_cast<double>(states));
  Vector next(states);
  double residual = 0.0;
  for (std::int64_t it = 0; it < max_iters; ++it) {
    next.setZero();
    for (Index c = 0; c < states; ++c) {
      const double mass = pi[c];
      if (mass == 0.0) continue;
      const Index shifted = (c % ctx_mod) * base;
      for (int a = 0; a < base; ++a) next[shifted + a] += mass * transition(c, a);
    }
    residual = 0.5 * (next - pi).cwiseAbs().sum();
    pi.swap(next);
    if (residual <= residual_tol) return pi;
  }
  throw convergence_error("markov_stationary: no convergence after iteration cap", residual);
}

class MarkovChainModel {
 public:
  MarkovChainModel(Alphabet alphabet, int order, Matrix transition)
      : alphabet_(alphabet), order_(order), transition_(std::move(transition)) {
    if (order < 0) throw std::invalid_argument("MarkovChainModel: order must be >= 0");
    stationary_ = markov_stationary(transition_, alphabet_, order_);
  }

  static MarkovChainModel iid(const Vector& dist) {
    Matrix t(1, dist.size());
    t.row(0) = dist;
    return MarkovChainModel(Alphabet(static_cast<int>(dist.size())), 0, std::move(t));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  int order() const { return order_; }
  const Matrix& transition() const { return transition_; }
  const Vector& stationary() const { return stationary_; }

  /// Exact law of (X_1..X_m) for m <= order, by marginalizing the
  /// stationary context law over a suffix.
  Vector prefix_marginal(int m) const {
    if (m < 0 || m > order_) throw std::invalid_argument("prefix_marginal: need 0 <= m <= order");
    const Index tail = checked_pow(alphabet_.size, order_ - m);
    Vector out = Vector::Zero(checked_pow(alphabet_.size, m));
    for (Index c = 0; c < stationary_.size(); ++c) out[c / tail] += stationary_[c];
    return out;
  }

 private:
  Alphabet alphabet_;
  int order_;
  Matrix transition_;
  Vector stationary_;
};

struct GeometricBinaryGModel {
  double theta0 = 0.3;
  double c = 0.2;
  double rho = 0.5;

  GeometricBinaryGModel(double theta0_in, double c_in, double rho_in)
      : theta0(theta0_in), c(c_in), rho(rho_in) {
    if (!(theta0 > 0.0 && theta0 < 1.0)) throw std::invalid_argument("g-model: theta0 in (0,1)");
    if (!(c > 0.0)) throw std::invalid_argument("g-model: c must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("g-model: rho in (0,1)");
    if (!(theta0 + c * rho / (1.0 - rho) < 1.0))
      throw std::invalid_argument("g-model: infeasible, theta0 + c rho/(1-rho) >= 1");
  }

  Alphabet alphabet() const { return Alphabet(2); }
  double max_prob_one() const { return theta0 + c * rho / (1.0 - rho); }
  double feasibility_margin() const { return std::min(theta0, 1.0 - max_prob_one()); }
  /// certified upper continuity rate 2 c rho^{k+1}/(1-rho)
  double gamma_upper(int k) const {
    return 2.0 * c * std::pow(rho, k + 1) / (1.0 - rho);
  }
  /// depth at which rho^depth < 2^-60
  int effective_depth() const {
    return static_cast<int>(std::ceil(60.0 / std::log2(1.0 / rho)));
  }
  int default_burn_in() const { return 64 * effective_depth() + 4096; }
};

using ProcessModel = std::variant<MarkovChainModel, GeometricBinaryGModel>;

inline Alphabet alphabet_of(const ProcessModel& model) {
  return std::visit([](const auto& m) { return m.alphabet(); }, model);
}

// --- sampling ----------------------------------------------------------------

/// Simulate a length-n path. Markov chains start from an exact stationary
/// block (burn_in unused); the g-model starts from an all-zero past and
/// discards burn_in steps (< 0 picks the model default), with
/// initialization bias at most gamma_upper(burn_in). Deterministic given
/// the seed.
inline Sample sample_path(const ProcessModel& model, std::int64_t n, SeedSpec seed,
                          std::int64_t burn_in = -1) {
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  Rng rng(seed.derive(0x5a6d70ULL));
  if (const auto* chain = std::get_if<MarkovChainModel>(&model)) {
    const int base = chain->alphabet().size;
    const int k0 = chain->order();
    std::vector<int> data;
    data.reserve(n + k0);
    std::uint64_t ctx = 0;
    if (k0 > 0) {
      ctx = static_cast<std::uint64_t>(rng.draw(chain->stationary()));
      std::uint64_t rest = ctx;
      std::vector<int> block(k0);
      for (int i = k0 - 1; i >= 0; --i) {
        block[i] = static_cast<int>(rest % base);
        rest /= base;
      }
      data.insert(data.end(), block.begin(), block.end());
    }
    const std::uint64_t ctx_mod = static_cast<std::uint64_t>(chain->stationary().size());
    while (static_cast<std::int64_t>(data.size()) < n) {
      const double u = rng.uniform();
      int symbol = base - 1;
      double cum = 0.0;
      for (int a = 0; a + 1 < base; ++a) {
        cum += chain->transition()(static_cast<Index>(ctx), a);
        if (u < cum) {
          symbol = a;
          break;
        }
      }
      data.push_back(symbol);
      if (k0 > 0) ctx = (ctx * base + static_cast<std::uint64_t>(symbol)) % ctx_mod;
    }
    data.resize(n);
    return Sample(chain->alphabet(), std::move(data));
  }
  const auto& g = std::get<GeometricBinaryGModel>(model);
  const std::int64_t burn = burn_in >= 0 ? burn_in : g.default_burn_in();
  std::vector<int> data;
  data.reserve(n);
  double s = 0.0;  // sum_j rho^j x_{t-j}, updated as s <- rho (x_t + s)
  for (std::int64_t t = 0; t < burn + n; ++t) {
    const double p1 = g.theta0 + g.c * s;
    const int x = rng.uniform() < p1 ? 1 : 0;
    if (t >= burn) data.push_back(x);
    s = g.rho * (x + s);
  }
  return Sample(g.alphabet(), std::move(data));
}

// --- process quantities ------------------------------------------------------

struct McParams {
  std::int64_t path_len = std::int64_t{1} << 20;
  int replicas = 8;
  SeedSpec seed{0x6d63};
};

struct ProcessQuantities {
  Vector h;  // h_0..h_{k_max}, bits
  Vector h_se;
  Provenance h_provenance = Provenance::Exact;

  Vector gamma_upper;  // k = 0..k_max
  Provenance gamma_upper_provenance = Provenance::Exact;
  std::optional<Vector> gamma_lower;
  Vector gamma_lower_se;
  Provenance gamma_lower_provenance = Provenance::Exact;

  double alpha0 = 0.0;
  double alpha = 0.0;
  double p_inf = 0.0;
  Provenance nonnull_provenance = Provenance::Exact;
  bool nonnull_warning = false;  // set when a Markov row contains a zero
};

namespace detail {

// entropies H_1..H_{k0} of a Markov chain from stationary prefix marginals
inline Vector markov_block_entropies(const MarkovChainModel& chain) {
  Vector H(chain.order() + 1);
  H[0] = 0.0;
  for (int m = 1; m <= chain.order(); ++m) H[m] = entropy_bits(chain.prefix_marginal(m));
  return H;
}

inline double markov_h_at_order(const MarkovChainModel& chain) {
  double h = 0.0;
  for (Index c = 0; c < chain.stationary().size(); ++c) {
    double row_entropy = 0.0;
    for (int a = 0; a < chain.alphabet().size; ++a)
      row_entropy -= xlog2x(chain.transition()(c, a));
    h += chain.stationary()[c] * row_entropy;
  }
  return h;
}

}  // namespace detail

/// h_0..h_{k_max}: exact for Markov chains, Monte Carlo (empirical
/// conditional entropies over independent long paths) for the g-model.
inline ProcessQuantities true_entropies(const ProcessModel& model, int k_max,
                                        const McParams& mc = {}) {
  ProcessQuantities q;
  q.h.resize(k_max + 1);
  q.h_se = Vector::Zero(k_max + 1);
  if (const auto* chain = std::get_if<MarkovChainModel>(&model)) {
    const int k0 = chain->order();
    const Vector H = detail::markov_block_entropies(*chain);
    const double h_tail = detail::markov_h_at_order(*chain);
    for (int k = 0; k <= k_max; ++k) q.h[k] = k >= k0 ? h_tail : H[k + 1] - H[k];
    q.h_provenance = Provenance::Exact;
    return q;
  }
  const auto& g = std::get<GeometricBinaryGModel>(model);
  Matrix per_replica(mc.replicas, k_max + 1);
  for (int r = 0; r < mc.replicas; ++r) {
    const Sample path =
        sample_path(model, mc.path_len, SeedSpec{mc.seed.derive({0x68, static_cast<std::uint64_t>(r)})});
    const CountStack stack(path, k_max + 1);
    for (int k = 0; k <= k_max; ++k) per_replica(r, k) = empirical_cond_entropy(stack, k);
  }
  for (int k = 0; k <= k_max; ++k) {
    const double mean = per_replica.col(k).mean();
    q.h[k] = mean;
    const double var =
        (per_replica.col(k).array() - mean).square().sum() / std::max(1, mc.replicas - 1);
    q.h_se[k] = std::sqrt(var / mc.replicas);
  }
  q.h_provenance = Provenance::MonteCarlo;
  (void)g;
  return q;
}

namespace detail {

// Exact continuity rates of a Markov chain for k < k0: the conditional
// law given a length-k suffix y is the stationary mixture over the
// unseen k0-k symbols, and the extremization runs over the finitely many
// (extension, suffix) pairs with positive probability.
inline void markov_continuity(const MarkovChainModel& chain, int k_max, Vector& upper,
                              Vector& lower) {
  const int base = chain.alphabet().size;
  const int k0 = chain.order();
  upper = Vector::Zero(k_max + 1);
  lower = Vector::Zero(k_max + 1);
  for (int k = 0; k < std::min(k0, k_max + 1); ++k) {
    const Index suffixes = checked_pow(base, k);
    const Index exts = checked_pow(base, k0 - k);
    double up = 0.0, low = std::numeric_limits<double>::infinity();
    for (Index y = 0; y < suffixes; ++y) {
      Vector mix = Vector::Zero(base);
      double mass = 0.0;
      for (Index z = 0; z < exts; ++z) {
        const Index ctx = z * suffixes + y;
        const double w = chain.stationary()[ctx];
        mass += w;
        mix += w * chain.transition().row(ctx).transpose();
      }
      if (mass <= 0.0) continue;
      mix /= mass;
      for (Index z = 0; z < exts; ++z) {
        const Index ctx = z * suffixes + y;
        if (chain.stationary()[ctx] <= 0.0) continue;
        const double dist =
            (chain.transition().row(ctx).transpose() - mix).cwiseAbs().sum();
        up = std::max(up, dist);
        low = std::min(low, dist);
      }
    }
    upper[k] = up;
    lower[k] = std::isfinite(low) ? low : 0.0;
  }
}

}  // namespace detail

/// Continuity rates gamma_upper / gamma_lower for k = 0..k_max.
/// Markov: exact (zero from the order on). G-model: certified upper bound
/// 2 c rho^{k+1}/(1-rho); the lower rate is a Monte Carlo estimate taken
/// over pasts visited by simulated paths (the conditional law given the
/// full past is available in closed form during simulation).
inline ProcessQuantities continuity_rates(const ProcessModel& model, int k_max,
                                          const McParams& mc = {}) {
  ProcessQuantities q;
  if (const auto* chain = std::get_if<MarkovChainModel>(&model)) {
    Vector upper, lower;
    detail::markov_continuity(*chain, k_max, upper, lower);
    q.gamma_upper = upper;
    q.gamma_lower = lower;
    q.gamma_lower_se = Vector::Zero(k_max + 1);
    q.gamma_upper_provenance = Provenance::Exact;
    q.gamma_lower_provenance = Provenance::Exact;
    return q;
  }
  const auto& g = std::get<GeometricBinaryGModel>(model);
  q.gamma_upper.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k) q.gamma_upper[k] = g.gamma_upper(k);
  q.gamma_upper_provenance = Provenance::Bound;

  // per replica: estimate P(1|y) by conditioning on length-k suffixes of a
  // simulated path, then take the extremes of 2|P(1|past) - P(1|y)|
  Matrix lows(mc.replicas, k_max + 1);
  const int depth = g.effective_depth();
  for (int r = 0; r < mc.replicas; ++r) {
    Rng rng(mc.seed.derive({0x67, static_cast<std::uint64_t>(r)}));
    const std::int64_t len = mc.path_len;
    std::vector<int> x(len);
    std::vector<double> p1(len);  // P(1 | full past) at each step
    double s = 0.0;
    const std::int64_t burn = g.default_burn_in();
    for (std::int64_t t = 0; t < burn + len; ++t) {
      const double p = g.theta0 + g.c * s;
      const int sym = rng.uniform() < p ? 1 : 0;
      if (t >= burn) {
        x[t - burn] = sym;
        p1[t - burn] = p;
      }
      s = g.rho * (sym + s);
    }
    for (int k = 0; k <= k_max; ++k) {
      const std::int64_t ctx_size = checked_pow(2, k);
      Vector sum = Vector::Zero(ctx_size);
      CountVector hits = CountVector::Zero(ctx_size);
      std::uint64_t code = 0;
      const std::uint64_t mod = static_cast<std::uint64_t>(ctx_size);
      for (std::int64_t t = 0; t < len; ++t) {
        if (t >= k) {
          sum[static_cast<Index>(code)] += p1[t];
          hits[static_cast<Index>(code)] += 1;
        }
        if (k > 0) code = (code * 2 + static_cast<std::uint64_t>(x[t])) % mod;
      }
      double low = std::numeric_limits<double>::infinity();
      code = 0;
      for (std::int64_t t = 0; t < len; ++t) {
        if (t >= k && hits[static_cast<Index>(code)] > 0)
          low = std::min(low, 2.0 * std::abs(p1[t] - sum[static_cast<Index>(code)] /
                                                        static_cast<double>(hits[static_cast<Index>(code)])));
        if (k > 0) code = (code * 2 + static_cast<std::uint64_t>(x[t])) % mod;
      }
      lows(r, k) = std::isfinite(low) ? low : 0.0;
    }
  }
  Vector lower(k_max + 1), lower_se(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    const double mean = lows.col(k).mean();
    lower[k] = mean;
    const double var = (lows.col(k).array() - mean).square().sum() / std::max(1, mc.replicas - 1);
    lower_se[k] = std::sqrt(var / mc.replicas);
  }
  q.gamma_lower = lower;
  q.gamma_lower_se = lower_se;
  q.gamma_lower_provenance = Provenance::MonteCarlo;
  (void)depth;
  return q;
}

/// Weak/strict non-nullness constants (alpha0, alpha, p_inf).
inline ProcessQuantities nonnullness_constants(const ProcessModel& model) {
  ProcessQuantities q;
  if (const auto* chain = std::get_if<MarkovChainModel>(&model)) {
    const int base = chain->alphabet().size;
    const int k0 = chain->order();
    q.p_inf = chain->transition().minCoeff();
    if (q.p_inf <= 0.0) {
      q.p_inf = 0.0;
      q.nonnull_warning = true;
    }
    // alpha_k = min over length-k suffixes y of sum_a min over extensions
    // of Q(a|zy); equals 1 from the order on, so the sum is finite
    q.alpha = 0.0;
    for (int k = 0; k < k0; ++k) {
      const Index suffixes = checked_pow(base, k);
      const Index exts = checked_pow(base, k0 - k);
      double alpha_k = std::numeric_limits<double>::infinity();
      for (Index y = 0; y < suffixes; ++y) {
        double total = 0.0;
        for (int a = 0; a < base; ++a) {
          double worst = std::numeric_limits<double>::infinity();
          for (Index z = 0; z < exts; ++z) worst = std::min(worst, chain->transition()(z * suffixes + y, a));
          total += worst;
        }
        alpha_k = std::min(alpha_k, total);
      }
      if (k == 0) q.alpha0 = alpha_k;
      q.alpha += 1.0 - alpha_k;
    }
    if (k0 == 0) q.alpha0 = 1.0;
    q.nonnull_provenance = Provenance::Exact;
    return q;
  }
  const auto& g = std::get<GeometricBinaryGModel>(model);
  q.p_inf = g.feasibility_margin();
  q.alpha0 = 1.0 - g.c * g.rho / (1.0 - g.rho);
  // 1 - alpha_k <= |A| gamma_upper(k), summed over k >= 0
  q.alpha = 0.0;
  for (int k = 0;; ++k) {
    const double term = 2.0 * g.gamma_upper(k);
    if (term < 1e-18) break;
    q.alpha += std::min(1.0, term);
  }
  q.nonnull_provenance = Provenance::Bound;
  return q;
}

}  // namespace markov
