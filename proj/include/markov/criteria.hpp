#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "markov/core.hpp"
#include "markov/counting.hpp"

// The three information criteria and the arg-min order estimators.
//
//   PML_k = (n-k) h-hat_k + (|A|-1) |A|^k pen(n)
//   NML_k = (n-k) h-hat_k + log2 Sigma(n,k),  Sigma(n,k) = sum_x ML_k(x)
//   KT_k  = -log2 P_KT,k(x_1^n)
//
// KT is evaluated by the sequential add-1/2 recursion over positions
// k+1..n with a uniform 1/|A|^k factor for the initial block; this equals
// the closed-form product over contexts (the exact-rational closed form
// lives in the test oracles). NML normalization is exact: a composition
// sum at k=0 and full enumeration otherwise, behind a hard budget --
// an approximate normalizer would change the estimator's arg min.

namespace markov {

inline constexpr std::int64_t kDefaultNmlBudget = std::int64_t{1} << 22;
inline constexpr double kTieToleranceBits = 1e-9;

enum class CriterionKind { Pml, Nml, Kt };

struct Criterion {
  CriterionKind kind = CriterionKind::Pml;
  PenaltySpec penalty = PenaltySpec::bic();
  std::int64_t nml_budget = kDefaultNmlBudget;

  static Criterion pml(PenaltySpec pen) { return {CriterionKind::Pml, pen, kDefaultNmlBudget}; }
  static Criterion nml(std::int64_t budget = kDefaultNmlBudget) {
    return {CriterionKind::Nml, PenaltySpec::bic(), budget};
  }
  static Criterion kt() { return {CriterionKind::Kt, PenaltySpec::bic(), kDefaultNmlBudget}; }

  std::string name() const {
    switch (kind) {
      case CriterionKind::Pml:
        return "pml[" + penalty.name() + "]";
      case CriterionKind::Nml:
        return "nml";
      case CriterionKind::Kt:
        return "kt";
    }
    return "?";
  }
};

/// PML criterion value in bits.
inline double pml_score(const CountStack& stack, int k, const PenaltySpec& pen) {
  const double model_cost = static_cast<double>(stack.alphabet_size() - 1) *
                            static_cast<double>(checked_pow(stack.alphabet_size(), k)) *
                            pen(stack.sample_len());
  return static_cast<double>(stack.sample_len() - k) * empirical_cond_entropy(stack, k) +
         model_cost;
}

inline double pml_score(const Sample& sample, int k, const PenaltySpec& pen,
                        std::int64_t budget = kDefaultTableBudget) {
  if (k < 0 || k > sample.size() - 1)
    throw std::invalid_argument("pml_score: need 0 <= k <= n-1");
  return pml_score(CountStack(sample, k + 1, budget), k, pen);
}

/// log2 of the k-order KT-probability of the sample (sequential recursion).
inline double kt_log_prob(const Sample& sample, int k,
                          std::int64_t budget = kDefaultTableBudget) {
  const std::int64_t n = sample.size();
  if (k < 0 || k > n - 1) throw std::invalid_argument("kt_log_prob: need 0 <= k <= n-1");
  const int base = sample.alphabet.size;
  const std::int64_t ctx_size = detail::table_size_checked(sample.alphabet, k, budget);
  detail::table_size_checked(sample.alphabet, k + 1, budget);
  CountVector ctx_counts = CountVector::Zero(ctx_size);
  CountVector sym_counts = CountVector::Zero(ctx_size * base);
  const double half_alpha = 0.5 * base;

  double log_p = -static_cast<double>(k) * std::log2(static_cast<double>(base));
  std::uint64_t ctx = 0;
  for (std::int64_t i = 0; i < k; ++i)
    ctx = ctx * base + static_cast<std::uint64_t>(sample.data[i]);
  const std::uint64_t ctx_mod = static_cast<std::uint64_t>(ctx_size);
  for (std::int64_t i = k; i < n; ++i) {
    const int symbol = sample.data[i];
    const Index joint = static_cast<Index>(ctx) * base + symbol;
    log_p += std::log2((static_cast<double>(sym_counts[joint]) + 0.5) /
                       (static_cast<double>(ctx_counts[static_cast<Index>(ctx)]) + half_alpha));
    sym_counts[joint] += 1;
    ctx_counts[static_cast<Index>(ctx)] += 1;
    if (k > 0) ctx = (ctx * base + static_cast<std::uint64_t>(symbol)) % ctx_mod;
  }
  return log_p;
}

/// KT criterion value in bits.
inline double kt_score(const Sample& sample, int k, std::int64_t budget = kDefaultTableBudget) {
  return -kt_log_prob(sample, k, budget);
}

namespace detail {

// log2 multinomial(n; parts), exact in integers when it fits
inline double log2_multinomial(std::int64_t n, const std::vector<std::int64_t>& parts) {
  unsigned __int128 value = 1;
  bool exact = true;
  std::int64_t consumed = 0;
  for (std::int64_t part : parts) {
    for (std::int64_t j = 1; j <= part && exact; ++j) {
      ++consumed;
      // value *= consumed / j, keeping integrality: C(m, j) built row-wise
      const unsigned __int128 next = value * static_cast<unsigned __int128>(consumed);
      if (next / static_cast<unsigned __int128>(consumed) != value) {
        exact = false;
        break;
      }
      value = next / static_cast<unsigned __int128>(j);
    }
    if (!exact) break;
  }
  if (exact && consumed == n) {
    const double hi = static_cast<double>(static_cast<std::uint64_t>(value >> 64));
    const double lo = static_cast<double>(static_cast<std::uint64_t>(value));
    return std::log2(hi * 0x1.0p64 + lo);
  }
  double log2v = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::int64_t part : parts) log2v -= std::lgamma(static_cast<double>(part) + 1.0);
  return log2v / std::numbers::ln2;
}

}  // namespace detail

/// log2 Sigma(n,0) via the exact composition sum
/// Sigma(n,0) = sum over (n_a) of multinomial(n;(n_a)) prod (n_a/n)^{n_a}.
inline double nml_log_normalizer_iid(const Alphabet& alphabet, std::int64_t n,
                                     std::int64_t budget = kDefaultNmlBudget) {
  if (n < 1) throw std::invalid_argument("nml_log_normalizer_iid: n must be >= 1");
  const int parts = alphabet.size;
  // composition count C(n+|A|-1, |A|-1) guards runtime
  double comp_count = 1.0;
  for (int i = 1; i < parts; ++i)
    comp_count *= static_cast<double>(n + i) / static_cast<double>(i);
  if (comp_count > static_cast<double>(budget))
    throw capacity_error("nml_log_normalizer_iid: composition count exceeds budget");

  std::vector<std::int64_t> split(parts, 0);
  split[0] = n;
  const double log2n = std::log2(static_cast<double>(n));
  double sum = 0.0;
  while (true) {
    double log2_term = detail::log2_multinomial(n, split);
    for (std::int64_t part : split)
      if (part > 0) log2_term += static_cast<double>(part) * (std::log2(static_cast<double>(part)) - log2n);
    sum += std::exp2(log2_term);
    // next composition in colex order
    int i = 0;
    while (i < parts - 1 && split[i] == 0) ++i;
    if (i == parts - 1) break;
    const std::int64_t head = split[i];
    split[i] = 0;
    split[0] = head - 1;
    split[i + 1] += 1;
  }
  return std::log2(sum);
}

/// log2 Sigma(n,k) by exact enumeration of all |A|^n sequences.
inline double nml_log_normalizer_enum(const Alphabet& alphabet, std::int64_t n, int k,
                                      std::int64_t budget = kDefaultNmlBudget) {
  if (n < 1 || k < 0 || k > n - 1)
    throw std::invalid_argument("nml_log_normalizer_enum: need 0 <= k <= n-1");
  const int base = alphabet.size;
  double seq_count = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    seq_count *= base;
    if (seq_count > static_cast<double>(budget))
      throw capacity_error("nml_log_normalizer_enum: |A|^n exceeds budget " +
                           std::to_string(budget) + "; use the KT criterion instead");
  }
  const std::int64_t total = checked_pow(base, static_cast<int>(n));

  std::vector<int> symbols(n, 0);
  std::vector<std::int64_t> sym_counts(checked_pow(base, k + 1), 0);
  std::vector<std::int64_t> ctx_counts(checked_pow(base, k), 0);
  std::vector<Index> touched_sym, touched_ctx;
  double sum = 0.0;
  for (std::int64_t seq = 0; seq < total; ++seq) {
    std::int64_t rest = seq;
    for (std::int64_t i = n - 1; i >= 0; --i) {
      symbols[i] = static_cast<int>(rest % base);
      rest /= base;
    }
    touched_sym.clear();
    touched_ctx.clear();
    std::uint64_t ctx = 0;
    for (std::int64_t i = 0; i < k; ++i) ctx = ctx * base + static_cast<std::uint64_t>(symbols[i]);
    const std::uint64_t ctx_mod = static_cast<std::uint64_t>(ctx_counts.size());
    for (std::int64_t i = k; i < n; ++i) {
      const Index joint = static_cast<Index>(ctx) * base + symbols[i];
      if (sym_counts[joint] == 0) touched_sym.push_back(joint);
      sym_counts[joint] += 1;
      if (ctx_counts[ctx] == 0) touched_ctx.push_back(static_cast<Index>(ctx));
      ctx_counts[ctx] += 1;
      if (k > 0) ctx = (ctx * base + static_cast<std::uint64_t>(symbols[i])) % ctx_mod;
    }
    double log_ml_k = 0.0;
    for (Index joint : touched_sym)
      log_ml_k += static_cast<double>(sym_counts[joint]) *
                  std::log2(static_cast<double>(sym_counts[joint]) /
                            static_cast<double>(ctx_counts[joint / base]));
    sum += std::exp2(log_ml_k);
    for (Index joint : touched_sym) sym_counts[joint] = 0;
    for (Index c : touched_ctx) ctx_counts[c] = 0;
  }
  return std::log2(sum);
}

/// log2 Sigma(n,k): closed form at k=0, enumeration otherwise.
inline double nml_log_normalizer(const Alphabet& alphabet, std::int64_t n, int k,
                                 std::int64_t budget = kDefaultNmlBudget) {
  if (n < 1 || k < 0 || k > n - 1)
    throw std::invalid_argument("nml_log_normalizer: need 0 <= k <= n-1");
  if (k == 0) return nml_log_normalizer_iid(alphabet, n, budget);
  return nml_log_normalizer_enum(alphabet, n, k, budget);
}

/// NML criterion value in bits.
inline double nml_score(const Sample& sample, int k, std::int64_t budget = kDefaultNmlBudget) {
  if (k < 0 || k > sample.size() - 1)
    throw std::invalid_argument("nml_score: need 0 <= k <= n-1");
  return static_cast<double>(sample.size() - k) * empirical_cond_entropy(sample, k) +
         nml_log_normalizer(sample.alphabet, sample.size(), k, budget);
}

struct OrderEstimate {
  int chosen_k = 0;
  std::vector<double> scores;  // index k = 0..bound_used, in bits
  int bound_used = 0;
  Criterion criterion;
};

/// Evaluate the criterion at every k in 0..r and return the smallest
/// minimizer (ties within 1e-9 bits resolve to the smaller k).
inline OrderEstimate estimate_order(const Sample& sample, const Criterion& criterion, int r,
                                    std::int64_t table_budget = kDefaultTableBudget) {
  if (r < 0 || r > sample.size() - 1)
    throw std::invalid_argument("estimate_order: need 0 <= r <= n-1");
  OrderEstimate result;
  result.bound_used = r;
  result.criterion = criterion;
  result.scores.resize(r + 1);
  switch (criterion.kind) {
    case CriterionKind::Pml: {
      const CountStack stack(sample, r + 1, table_budget);
      for (int k = 0; k <= r; ++k) result.scores[k] = pml_score(stack, k, criterion.penalty);
      break;
    }
    case CriterionKind::Nml: {
      const CountStack stack(sample, r + 1, table_budget);
      for (int k = 0; k <= r; ++k)
        result.scores[k] =
            static_cast<double>(sample.size() - k) * empirical_cond_entropy(stack, k) +
            nml_log_normalizer(sample.alphabet, sample.size(), k, criterion.nml_budget);
      break;
    }
    case CriterionKind::Kt: {
      for (int k = 0; k <= r; ++k) result.scores[k] = kt_score(sample, k, table_budget);
      break;
    }
  }
  double best = result.scores[0];
  for (int k = 1; k <= r; ++k) best = std::min(best, result.scores[k]);
  for (int k = 0; k <= r; ++k) {
    if (result.scores[k] <= best + kTieToleranceBits) {
      result.chosen_k = k;
      break;
    }
  }
  return result;
}

}  // namespace markov
