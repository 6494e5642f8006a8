#pragma once

#include <cstdint>
#include <vector>

#include "markov/core.hpp"

// Sliding-window string counts and the empirical quantities of a sample:
// N_m(a_1^d), P-hat, H-hat_k, h-hat_k and log ML_k. Strings are indexed by
// their base-|A| code; a depth-d table is a dense length-|A|^d vector.
//
// Window conventions (they matter):
//   N_m(a_1^d) counts starts 1..m-d+1, so sum of a depth-d table over
//   window m is m-d+1. The depth-0 (empty string) count is m+1, which is
//   exactly the N_{n-1}(empty)=n convention the KT criterion needs.
//   Conditional probabilities divide depth-(k+1) counts over window n by
//   depth-k counts over window n-1; the marginal inside h-hat_k uses the
//   divisor n-k.

namespace markov {

inline constexpr std::int64_t kDefaultTableBudget = std::int64_t{1} << 22;

struct CountTable {
  int depth = 0;
  std::int64_t window_len = 0;
  Alphabet alphabet;
  CountVector counts;  // size |A|^depth

  std::int64_t total() const { return window_len - depth + 1; }
};

namespace detail {

inline std::int64_t table_size_checked(const Alphabet& a, int depth, std::int64_t budget) {
  const std::int64_t size = checked_pow(a.size, depth);
  if (size > budget)
    throw capacity_error("count table of depth " + std::to_string(depth) + " needs " +
                         std::to_string(size) + " entries, over budget " + std::to_string(budget));
  return size;
}

}  // namespace detail

/// N_m(a_1^d) for all depth-d strings over the window x_1^m.
inline CountTable count_table(const Sample& sample, int depth, std::int64_t window_len,
                              std::int64_t budget = kDefaultTableBudget) {
  if (depth < 0) throw std::invalid_argument("count_table: depth must be >= 0");
  if (window_len > sample.size())
    throw std::invalid_argument("count_table: window exceeds sample length");
  if (depth > window_len)
    throw std::invalid_argument("count_table: empty window (depth " + std::to_string(depth) +
                                " > window " + std::to_string(window_len) + ")");
  const std::int64_t size = detail::table_size_checked(sample.alphabet, depth, budget);
  CountTable table{depth, window_len, sample.alphabet, CountVector::Zero(size)};
  if (depth == 0) {
    table.counts[0] = window_len + 1;
    return table;
  }
  const std::int64_t base = sample.alphabet.size;
  std::uint64_t code = 0;
  const std::uint64_t mod = static_cast<std::uint64_t>(size);
  for (std::int64_t i = 0; i < window_len; ++i) {
    code = (code * base + static_cast<std::uint64_t>(sample.data[i])) % mod;
    if (i + 1 >= depth) table.counts[static_cast<Index>(code)] += 1;
  }
  return table;
}

// Tables for every depth 0..max_depth over both windows (n and n-1),
// built from one pass: the deepest table is counted directly, shallower
// ones derive from the child-sum identity
//   sum_a N_n(a_1^{d+1}) = N_{n-1}(a_1^d)
// and N_n(a_1^d) = N_{n-1}(a_1^d) + [a_1^d is the sample suffix].
class CountStack {
 public:
  CountStack(const Sample& sample, int max_depth, std::int64_t budget = kDefaultTableBudget)
      : n_(sample.size()), max_depth_(max_depth) {
    if (max_depth < 0) throw std::invalid_argument("CountStack: max_depth must be >= 0");
    if (max_depth > n_) throw std::invalid_argument("CountStack: max_depth exceeds sample length");
    detail::table_size_checked(sample.alphabet, max_depth, budget);
    tables_n_.resize(max_depth + 1);
    tables_n1_.resize(max_depth + 1);
    tables_n_[max_depth] = count_table(sample, max_depth, n_, budget);
    const int base = sample.alphabet.size;
    for (int d = max_depth; d >= 0; --d) {
      if (d < max_depth) {
        const CountVector& child = tables_n_[d + 1].counts;
        CountVector sums(child.size() / base);
        for (Index c = 0; c < sums.size(); ++c) {
          std::int64_t acc = 0;
          for (int a = 0; a < base; ++a) acc += child[c * base + a];
          sums[c] = acc;
        }
        tables_n1_[d] = CountTable{d, n_ - 1, sample.alphabet, std::move(sums)};
        tables_n_[d] = tables_n1_[d];
        tables_n_[d].window_len = n_;
        tables_n_[d].counts[static_cast<Index>(suffix_code(sample, d))] += 1;
      } else {
        tables_n1_[d] = tables_n_[d];
        tables_n1_[d].window_len = n_ - 1;
        if (d > 0) tables_n1_[d].counts[static_cast<Index>(suffix_code(sample, d))] -= 1;
        else tables_n1_[d].counts[0] -= 1;
      }
    }
  }

  std::int64_t sample_len() const { return n_; }
  int max_depth() const { return max_depth_; }
  int alphabet_size() const { return tables_n_[0].alphabet.size; }

  /// counts over the full window x_1^n
  const CountTable& full(int depth) const { return tables_n_.at(depth); }
  /// counts over the context window x_1^{n-1}
  const CountTable& context(int depth) const { return tables_n1_.at(depth); }

 private:
  static std::uint64_t suffix_code(const Sample& sample, int d) {
    std::uint64_t code = 0;
    const std::int64_t n = sample.size();
    for (std::int64_t i = n - d; i < n; ++i)
      code = code * sample.alphabet.size + static_cast<std::uint64_t>(sample.data[i]);
    return code;
  }

  std::int64_t n_;
  int max_depth_;
  std::vector<CountTable> tables_n_;
  std::vector<CountTable> tables_n1_;
};

/// P-hat(a_1^k) = N_n(a_1^k)/(n-k+1) as a dense vector over codes.
inline Vector empirical_prob(const Sample& sample, int k,
                             std::int64_t budget = kDefaultTableBudget) {
  if (k < 1 || k > sample.size())
    throw std::invalid_argument("empirical_prob: need 1 <= k <= n");
  const CountTable table = count_table(sample, k, sample.size(), budget);
  return table.counts.cast<double>() / static_cast<double>(table.total());
}

struct CondProb {
  Matrix probs;                // |A|^k x |A|; row c is P-hat(.|context c)
  CountVector context_counts;  // N_{n-1}(context); row defined iff > 0
};

/// Empirical conditional probabilities P-hat(a|a_1^k); rows for unseen
/// contexts are zero and flagged by context_counts.
inline CondProb empirical_cond_prob(const Sample& sample, int k,
                                    std::int64_t budget = kDefaultTableBudget) {
  if (k < 0 || k > sample.size() - 1)
    throw std::invalid_argument("empirical_cond_prob: need 0 <= k <= n-1");
  const CountStack stack(sample, k + 1, budget);
  const int base = sample.alphabet.size;
  const CountVector& joint = stack.full(k + 1).counts;
  const CountVector& ctx = stack.context(k).counts;
  CondProb result;
  result.context_counts = ctx;
  result.probs = Matrix::Zero(ctx.size(), base);
  for (Index c = 0; c < ctx.size(); ++c) {
    if (ctx[c] <= 0) continue;
    for (int a = 0; a < base; ++a)
      result.probs(c, a) =
          static_cast<double>(joint[c * base + a]) / static_cast<double>(ctx[c]);
  }
  return result;
}

/// k-order empirical entropy H-hat_k in bits.
inline double empirical_entropy(const Sample& sample, int k,
                                std::int64_t budget = kDefaultTableBudget) {
  return entropy_bits(empirical_prob(sample, k, budget));
}

namespace detail {

inline double cond_entropy_from(const CountTable& joint, const CountTable& ctx,
                                std::int64_t n, int k) {
  const int base = joint.alphabet.size;
  double h = 0.0;
  for (Index c = 0; c < joint.counts.size(); ++c) {
    const std::int64_t count = joint.counts[c];
    if (count <= 0) continue;
    const double marginal = static_cast<double>(count) / static_cast<double>(n - k);
    const double cond =
        static_cast<double>(count) / static_cast<double>(ctx.counts[c / base]);
    h -= marginal * std::log2(cond);
  }
  return h;
}

}  // namespace detail

/// k-order empirical conditional entropy h-hat_k in bits.
inline double empirical_cond_entropy(const Sample& sample, int k,
                                     std::int64_t budget = kDefaultTableBudget) {
  if (k < 0 || k > sample.size() - 1)
    throw std::invalid_argument("empirical_cond_entropy: need 0 <= k <= n-1");
  const CountStack stack(sample, k + 1, budget);
  return detail::cond_entropy_from(stack.full(k + 1), stack.context(k), sample.size(), k);
}

inline double empirical_cond_entropy(const CountStack& stack, int k) {
  if (k < 0 || k + 1 > stack.max_depth())
    throw std::invalid_argument("empirical_cond_entropy: k+1 exceeds stack depth");
  return detail::cond_entropy_from(stack.full(k + 1), stack.context(k), stack.sample_len(), k);
}

/// log2 ML_k(x_1^n) = sum N_n(a_1^{k+1}) log2 P-hat(a_{k+1}|a_1^k);
/// equals -(n-k) h-hat_k.
inline double log_ml(const Sample& sample, int k, std::int64_t budget = kDefaultTableBudget) {
  if (k < 0 || k > sample.size() - 1)
    throw std::invalid_argument("log_ml: need 0 <= k <= n-1");
  const CountStack stack(sample, k + 1, budget);
  const CountTable& joint = stack.full(k + 1);
  const CountTable& ctx = stack.context(k);
  const int base = sample.alphabet.size;
  double log_p = 0.0;
  for (Index c = 0; c < joint.counts.size(); ++c) {
    const std::int64_t count = joint.counts[c];
    if (count <= 0) continue;
    log_p += static_cast<double>(count) *
             std::log2(static_cast<double>(count) / static_cast<double>(ctx.counts[c / base]));
  }
  return log_p;
}

}  // namespace markov
