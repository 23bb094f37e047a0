#pragma once

// Backward-greedy subset selection maximizing the weighted normalized MI.
//
// Both selectors start from the full candidate set and repeatedly drop the
// chain whose removal costs the least. Removing chain j changes the objective
// by exactly
//
//   score_j = w_c log2(c_j) + (w_s / N_s) sum_n log2(s_{n,j}),
//
// where c_j = 1 - gamma alpha_j = delta_j and s_{n,j} = 1 - gamma T beta_{n,j}
// = epsilon_{n,j} are determinant ratios. GesSelector obtains them from
// quadratic forms with (I + gamma H H^H)^{-1} and with the eigen-factor
// inverses (I + gamma T G^H G)^{-1}; GcsSelector reads them off the diagonal
// of (I + gamma H^H H)^{-1} and (I + gamma T R)^{-1}. Both keep their inverses
// current with O(n^2) updates instead of re-inverting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/metrics.hpp"
#include "isac/problem.hpp"
#include "isac/rng.hpp"
#include "isac/scene.hpp"
#include "isac/selection_set.hpp"

namespace isac {

struct GreedyOptions {
  // Recompute the inverse state from scratch every this many removals
  // (0 disables). Long update chains accumulate rounding.
  std::size_t refresh_period = 8;
};

namespace detail {

// log2 of a determinant ratio known to lie in (0, 1]; rounding can push it
// marginally outside.
inline double log2_ratio(double x) {
  return std::log2(std::clamp(x, std::numeric_limits<double>::min(), 1.0));
}

// Index into `scores` of the maximum; the first (smallest candidate) wins ties.
inline std::size_t argmax_first(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return best;
}

inline std::vector<std::size_t> iota_positions(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline void check_target(std::size_t k, std::size_t universe, const char* who) {
  if (k < 1 || k > universe)
    throw ModelError(std::string(who) + ": subset size must lie in [1, " + std::to_string(universe) + "]");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Eigen-based selector

struct GesState {
  CMatrix a;                               // (I + gamma H(rem) H(rem)^H)^{-1}
  std::vector<double> alpha;               // h_j^H A h_j, indexed by candidate
  std::vector<CMatrix> b;                  // (I_r + gamma T G(rem)^H G(rem))^{-1}, per antenna
  std::vector<std::vector<double>> beta;   // g_{n,j}^H B_n g_{n,j}, [n][candidate]
};

class GesSelector {
 public:
  GesSelector(SelectionProblem problem, const LinkParams& p, GreedyOptions opt = {})
      : prob_(std::move(problem)), link_(p), opt_(opt), remaining_(detail::iota_positions(prob_.candidates())) {
    prob_.validate();
    link_.validate();
    factors_.reserve(prob_.sensing.size());
    for (const auto& r : prob_.sensing) factors_.push_back(eigen_factor(r));
    state_ = recompute();
  }

  // G = P Lambda^{1/2} over the eigenvalues above 1e-10 lambda_max, so R = G G^H.
  static CMatrix eigen_factor(const CMatrix& r) {
    EigenPair evd = hermitian_evd(r);
    clamp_psd_eigenvalues(evd.values);
    const double lmax = evd.values.empty() ? 0.0 : evd.values.front();
    std::size_t rank = 0;
    while (rank < evd.values.size() && lmax > 0.0 && evd.values[rank] > kPsdTolerance * lmax) ++rank;
    CMatrix g(r.rows(), rank);
    for (std::size_t k = 0; k < rank; ++k) {
      const double s = std::sqrt(evd.values[k]);
      for (std::size_t i = 0; i < r.rows(); ++i) g(i, k) = evd.vectors(i, k) * s;
    }
    return g;
  }

  const SelectionProblem& problem() const { return prob_; }
  const LinkParams& link() const { return link_; }
  const std::vector<std::size_t>& remaining() const { return remaining_; }
  const GesState& state() const { return state_; }
  const std::vector<CMatrix>& factors() const { return factors_; }
  std::size_t updates_since_refresh() const { return since_refresh_; }

  // Determinant ratio 1 - gamma alpha_j for remaining candidate j. At high
  // SNR the ratio is tiny and the subtraction eats the digits of alpha, so
  // alpha gets one residual correction here.
  double comm_ratio(std::size_t j) const { return 1.0 - link_.gamma * refined_alpha(j); }
  double sensing_ratio(std::size_t n, std::size_t j) const {
    return factors_[n].cols() == 0 ? 1.0 : 1.0 - link_.gamma * link_.slots * state_.beta[n][j];
  }

  double score(std::size_t j) const {
    double s = 0.0;
    if (link_.omega_c > 0.0) s += link_.omega_c * detail::log2_ratio(comm_ratio(j));
    if (link_.omega_s > 0.0) {
      double sense = 0.0;
      for (std::size_t n = 0; n < factors_.size(); ++n) sense += detail::log2_ratio(sensing_ratio(n, j));
      s += link_.omega_s / static_cast<double>(prob_.sensing_norm) * sense;
    }
    return s;
  }

  // Aligned with remaining().
  std::vector<double> scores() const {
    std::vector<double> out;
    out.reserve(remaining_.size());
    for (std::size_t j : remaining_) out.push_back(score(j));
    return out;
  }

  std::size_t best_removal() const { return remaining_[detail::argmax_first(scores())]; }

  // Drop candidate j and update A, alpha, B_n, beta by rank-one steps.
  void remove(std::size_t j) {
    auto it = std::find(remaining_.begin(), remaining_.end(), j);
    if (it == remaining_.end()) throw ModelError("GesSelector: candidate is not in the remaining set");
    remaining_.erase(it);
    try {
      update_after_removal(j);
    } catch (const SingularUpdateError&) {
      refresh();
      return;
    }
    if (opt_.refresh_period > 0 && ++since_refresh_ >= opt_.refresh_period) refresh();
  }

  void refresh() {
    state_ = recompute();
    since_refresh_ = 0;
  }

  // From-scratch state for the current remaining set.
  GesState recompute() const {
    const std::size_t nc = prob_.candidates();
    GesState s;
    const CMatrix h = submatrix(prob_.channel, detail::iota_positions(prob_.channel.rows()), remaining_);
    s.a = inverse_hermitian(identity_plus(gram_rows(h), link_.gamma));
    s.alpha.assign(nc, 0.0);
    for (std::size_t j : remaining_) s.alpha[j] = quadratic_form(s.a, prob_.channel.col(j));

    s.b.resize(factors_.size());
    s.beta.assign(factors_.size(), std::vector<double>(nc, 0.0));
    for (std::size_t n = 0; n < factors_.size(); ++n) {
      const CMatrix& g = factors_[n];
      if (g.cols() == 0) continue;
      const CMatrix g_rem = submatrix(g, remaining_, detail::iota_positions(g.cols()));
      s.b[n] = inverse_hermitian(identity_plus(gram_cols(g_rem), link_.gamma * link_.slots));
      for (std::size_t j : remaining_) s.beta[n][j] = quadratic_form(s.b[n], factor_row(n, j));
    }
    return s;
  }

  // Test hook: overwrite the maintained inverse.
  void inject_state(GesState s) { state_ = std::move(s); }

 private:
  // g_{n,j} = conj(row j of G_n) = column j of G_n^H.
  CVector factor_row(std::size_t n, std::size_t j) const {
    const CMatrix& g = factors_[n];
    CVector v(g.cols());
    for (std::size_t k = 0; k < g.cols(); ++k) v[k] = std::conj(g(j, k));
    return v;
  }

  // h - (I + gamma H H^H) u over the remaining columns plus `extra`.
  CVector comm_residual(const CVector& h, const CVector& u, std::optional<std::size_t> extra) const {
    CVector residual = h;
    auto subtract = [&](std::size_t k) {
      const CVector hk = prob_.channel.col(k);
      const cplx c = link_.gamma * inner(hk, u);
      for (std::size_t i = 0; i < hk.size(); ++i) residual[i] -= hk[i] * c;
    };
    for (std::size_t i = 0; i < u.size(); ++i) residual[i] -= u[i];
    for (std::size_t k : remaining_) subtract(k);
    if (extra) subtract(*extra);
    return residual;
  }

  double refined_alpha(std::size_t j) const {
    const CVector h = prob_.channel.col(j);
    const CVector u = state_.a * std::span<const cplx>(h);
    return (inner(h, u) + inner(u, comm_residual(h, u, std::nullopt))).real();
  }

  // A h with one step of iterative refinement against I + gamma H H^H, where
  // H still includes the chain being removed.
  CVector refined_solve(const CVector& h, std::size_t removed) const {
    CVector u = state_.a * std::span<const cplx>(h);
    const CVector du = state_.a * std::span<const cplx>(comm_residual(h, u, removed));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += du[i];
    return u;
  }

  void update_after_removal(std::size_t removed) {
    const double gamma = link_.gamma;
    const CVector h_removed = prob_.channel.col(removed);
    CVector a = refined_solve(h_removed, removed);
    // alpha_J is re-evaluated from the refined solve rather than taken from
    // the incremental value; 1 - gamma alpha_J can be tiny at high SNR and
    // would amplify any error in it.
    const double comm_denom = 1.0 - gamma * inner(h_removed, a).real();
    if (comm_denom < kSingularThreshold) throw SingularUpdateError("GES: communication update denominator");
    const double scale = std::sqrt(gamma / comm_denom);
    for (auto& x : a) x *= scale;
    add_outer(state_.a, a);
    for (std::size_t j : remaining_) {
      const CVector hj = prob_.channel.col(j);
      state_.alpha[j] += std::norm(inner(hj, a));
    }

    const double gt = gamma * link_.slots;
    for (std::size_t n = 0; n < factors_.size(); ++n) {
      if (factors_[n].cols() == 0) continue;
      const CVector g_removed = factor_row(n, removed);
      CVector b = state_.b[n] * std::span<const cplx>(g_removed);
      const double sense_denom = 1.0 - gt * inner(g_removed, b).real();
      if (sense_denom < kSingularThreshold) throw SingularUpdateError("GES: sensing update denominator");
      const double s = std::sqrt(gt / sense_denom);
      for (auto& x : b) x *= s;
      add_outer(state_.b[n], b);
      for (std::size_t j : remaining_) state_.beta[n][j] += std::norm(inner(factor_row(n, j), b));
    }
  }

  static void add_outer(CMatrix& m, const CVector& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t k = 0; k < v.size(); ++k) m(i, k) += v[i] * std::conj(v[k]);
  }

  SelectionProblem prob_;
  LinkParams link_;
  GreedyOptions opt_;
  std::vector<std::size_t> remaining_;
  std::vector<CMatrix> factors_;
  GesState state_;
  std::size_t since_refresh_ = 0;
};

// ---------------------------------------------------------------------------
// Cofactor-based selector

struct GcsState {
  CMatrix d_inv;               // (I + gamma H(rem)^H H(rem))^{-1}, rows ordered as remaining()
  std::vector<CMatrix> e_inv;  // (I + gamma T R_n(rem))^{-1}
};

class GcsSelector {
 public:
  GcsSelector(SelectionProblem problem, const LinkParams& p, GreedyOptions opt = {})
      : prob_(std::move(problem)), link_(p), opt_(opt), remaining_(detail::iota_positions(prob_.candidates())) {
    prob_.validate();
    link_.validate();
    state_ = recompute();
  }

  const SelectionProblem& problem() const { return prob_; }
  const LinkParams& link() const { return link_; }
  const std::vector<std::size_t>& remaining() const { return remaining_; }
  const GcsState& state() const { return state_; }

  // delta and epsilon for the k-th remaining candidate (position in remaining()).
  double delta_at(std::size_t k) const { return state_.d_inv(k, k).real(); }
  double epsilon_at(std::size_t n, std::size_t k) const { return state_.e_inv[n](k, k).real(); }

  double score_at(std::size_t k) const {
    double s = 0.0;
    if (link_.omega_c > 0.0) s += link_.omega_c * detail::log2_ratio(delta_at(k));
    if (link_.omega_s > 0.0) {
      double sense = 0.0;
      for (std::size_t n = 0; n < state_.e_inv.size(); ++n) sense += detail::log2_ratio(epsilon_at(n, k));
      s += link_.omega_s / static_cast<double>(prob_.sensing_norm) * sense;
    }
    return s;
  }

  std::vector<double> scores() const {
    std::vector<double> out(remaining_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = score_at(k);
    return out;
  }

  std::size_t best_removal() const { return remaining_[detail::argmax_first(scores())]; }

  // Drop candidate j; every inverse loses the matching row and column through
  // its Schur complement.
  void remove(std::size_t j) {
    auto it = std::find(remaining_.begin(), remaining_.end(), j);
    if (it == remaining_.end()) throw ModelError("GcsSelector: candidate is not in the remaining set");
    const auto k = static_cast<std::size_t>(it - remaining_.begin());
    remaining_.erase(it);
    try {
      GcsState next;
      next.d_inv = remove_rowcol_inverse(state_.d_inv, k);
      for (const auto& e : state_.e_inv) next.e_inv.push_back(remove_rowcol_inverse(e, k));
      state_ = std::move(next);
    } catch (const SingularUpdateError&) {
      refresh();
      return;
    }
    if (opt_.refresh_period > 0 && ++since_refresh_ >= opt_.refresh_period) refresh();
  }

  void refresh() {
    state_ = recompute();
    since_refresh_ = 0;
  }

  GcsState recompute() const {
    GcsState s;
    const CMatrix h = submatrix(prob_.channel, detail::iota_positions(prob_.channel.rows()), remaining_);
    s.d_inv = inverse_hermitian(identity_plus(gram_cols(h), link_.gamma));
    for (const auto& r : prob_.sensing)
      s.e_inv.push_back(inverse_hermitian(identity_plus(principal_submatrix(r, remaining_), link_.gamma * link_.slots)));
    return s;
  }

 private:
  SelectionProblem prob_;
  LinkParams link_;
  GreedyOptions opt_;
  std::vector<std::size_t> remaining_;
  GcsState state_;
  std::size_t since_refresh_ = 0;
};

// ---------------------------------------------------------------------------
// Selection entry points

template <class Selector>
SelectionSet greedy_select(const SelectionProblem& prob, const LinkParams& p, std::size_t k, GreedyOptions opt = {}) {
  detail::check_target(k, prob.candidates(), "greedy_select");
  if (k == prob.candidates()) return SelectionSet::full(k);
  Selector sel(prob, p, opt);
  while (sel.remaining().size() > k) sel.remove(sel.best_removal());
  return SelectionSet::from_positions(sel.remaining(), prob.candidates());
}

inline SelectionSet ges_select(const SelectionProblem& prob, const LinkParams& p, std::size_t k, GreedyOptions opt = {}) {
  return greedy_select<GesSelector>(prob, p, k, opt);
}

inline SelectionSet gcs_select(const SelectionProblem& prob, const LinkParams& p, std::size_t k, GreedyOptions opt = {}) {
  return greedy_select<GcsSelector>(prob, p, k, opt);
}

inline SelectionSet ges_select(const Scene& scene, const LinkParams& p, std::size_t k) {
  return ges_select(transmit_problem(scene), p, k);
}

inline SelectionSet gcs_select(const Scene& scene, const LinkParams& p, std::size_t k) {
  return gcs_select(transmit_problem(scene), p, k);
}

inline constexpr std::uint64_t kDefaultExhaustiveCap = 200000;

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return static_cast<std::uint64_t>(r + 0.5L);
}

// Visit every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_combination(std::size_t n, std::size_t k, F&& visit) {
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    visit(static_cast<const std::vector<std::size_t>&>(c));
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t t = i; t < k; ++t) c[t] = c[t - 1] + 1;
  }
}

// Exact maximizer of the weighted objective over all k-subsets. Ties go to the
// lexicographically smallest index list.
inline SelectionSet exhaustive_select(const SelectionProblem& prob, const LinkParams& p, std::size_t k,
                                      std::uint64_t cap = kDefaultExhaustiveCap) {
  detail::check_target(k, prob.candidates(), "exhaustive_select");
  const std::uint64_t count = binomial(prob.candidates(), k);
  if (count > cap)
    throw CapacityError("exhaustive_select: C(" + std::to_string(prob.candidates()) + ", " + std::to_string(k) +
                        ") = " + std::to_string(count) + " exceeds the cap of " + std::to_string(cap));
  if (k == prob.candidates()) return SelectionSet::full(k);

  // Principal submatrices of these Grams give every subset's determinants.
  const CMatrix channel_gram = gram_cols(prob.channel);
  const bool use_rows = prob.channel.rows() < k;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_set;
  std::vector<std::size_t> all_rows = detail::iota_positions(prob.channel.rows());
  for_each_combination(prob.candidates(), k, [&](const std::vector<std::size_t>& c) {
    double ic = 0.0;
    if (p.omega_c > 0.0) {
      const CMatrix gram = use_rows ? gram_rows(submatrix(prob.channel, all_rows, c)) : principal_submatrix(channel_gram, c);
      ic = p.slots * logdet_psd(identity_plus(gram, p.gamma));
    }
    double is = 0.0;
    if (p.omega_s > 0.0)
      for (const auto& r : prob.sensing) is += logdet_psd(identity_plus(principal_submatrix(r, c), p.gamma * p.slots));
    const double obj = make_report(ic, is, p, prob.sensing_norm).objective;
    if (obj > best + 1e-12 * std::abs(best) || best_set.empty()) {
      best = obj;
      best_set = c;
    }
  });
  return SelectionSet::from_positions(best_set, prob.candidates());
}

inline SelectionSet exhaustive_select(const Scene& scene, const LinkParams& p, std::size_t k,
                                      std::uint64_t cap = kDefaultExhaustiveCap) {
  return exhaustive_select(transmit_problem(scene), p, k, cap);
}

// Uniformly random k-subset (partial Fisher-Yates).
inline SelectionSet random_select(std::size_t universe, std::size_t k, Rng& rng) {
  detail::check_target(k, universe, "random_select");
  std::vector<std::size_t> pool = detail::iota_positions(universe);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, universe - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return SelectionSet::from_positions(std::move(pool), universe);
}

// Evenly spaced indices round(1 + (i-1) universe / k), advancing past any
// index already taken.
inline SelectionSet fixed_select(std::size_t universe, std::size_t k) {
  detail::check_target(k, universe, "fixed_select");
  std::vector<std::size_t> idx;
  std::vector<bool> taken(universe + 1, false);
  for (std::size_t i = 1; i <= k; ++i) {
    auto v = static_cast<std::size_t>(
        std::lround(1.0 + static_cast<double>(i - 1) * static_cast<double>(universe) / static_cast<double>(k)));
    v = std::clamp<std::size_t>(v, 1, universe);
    while (v <= universe && taken[v]) ++v;
    if (v > universe) {
      v = 1;
      while (taken[v]) ++v;
    }
    taken[v] = true;
    idx.push_back(v);
  }
  std::sort(idx.begin(), idx.end());
  return {std::move(idx), universe};
}

}  // namespace isac
