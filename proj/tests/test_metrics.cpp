#include <gtest/gtest.h>

#include <cmath>

#include "isac/metrics.hpp"
#include "isac/problem.hpp"
#include "support/oracles.hpp"

using namespace isac;

namespace {

GeometryConfig geometry(std::size_t nt = 6, std::size_t nc = 4, std::size_t ns = 3) {
  GeometryConfig g;
  g.n_t = nt;
  g.n_c = nc;
  g.n_s = ns;
  g.paths = 3;
  return g;
}

}  // namespace

TEST(CommMi, ClosedForms) {
  const LinkParams p{1.0, 1.0, 0.5, 0.5};
  EXPECT_EQ(comm_mi(CMatrix(3, 4), p), 0.0);
  EXPECT_NEAR(comm_mi(CMatrix{{cplx(0.6, 0.8)}}, p), std::log2(2.0), 1e-15);
  const LinkParams q{64.0, 10.0, 0.5, 0.5};
  EXPECT_NEAR(comm_mi(CMatrix{{cplx(1.0, 2.0)}}, q), 64.0 * std::log2(1.0 + 10.0 * 5.0), 1e-12);
}

TEST(CommMi, BothGramOrientationsAgree) {
  Rng rng(1);
  const LinkParams p{64.0, 100.0, 0.5, 0.5};
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix h = oracle::random_matrix(4, 6, rng);
    const double small = p.slots * oracle::log2_abs_det(identity_plus(gram_rows(h), p.gamma));
    const double large = p.slots * oracle::log2_abs_det(identity_plus(gram_cols(h), p.gamma));
    EXPECT_NEAR(small, large, 1e-9 * std::abs(small));
    EXPECT_NEAR(comm_mi(h, p), small, 1e-9 * std::abs(small));
    EXPECT_NEAR(comm_mi(h.adjoint(), p), small, 1e-9 * std::abs(small));
  }
}

TEST(SensingMi, ClosedForms) {
  const LinkParams p{64.0, 2.0, 0.5, 0.5};
  std::vector<CMatrix> zeros(3, CMatrix(4, 4));
  EXPECT_EQ(sensing_mi(zeros, p), 0.0);
  // kappa t t^H with ||t||^2 = K
  const CVector t = steering_tx(0.3, 5);
  const double kappa = 0.01;
  std::vector<CMatrix> one{outer(t, t) * cplx{kappa}};
  EXPECT_NEAR(sensing_mi(one, p), std::log2(1.0 + p.gamma * p.slots * kappa * 5.0), 1e-12);
}

TEST(SensingMi, EqualsEigenvalueSum) {
  Rng rng(2);
  const LinkParams p{16.0, 3.0, 0.5, 0.5};
  std::vector<CMatrix> covs;
  for (int n = 0; n < 4; ++n) covs.push_back(gram_rows(oracle::random_matrix(5, 2, rng)) * cplx{0.1});
  double expect = 0.0;
  for (const auto& r : covs)
    for (double l : oracle::hermitian_eigenvalues(r)) expect += std::log2(1.0 + p.gamma * p.slots * std::max(l, 0.0));
  EXPECT_NEAR(sensing_mi(covs, p), expect, 1e-9 * expect);
}

TEST(WeightedObjective, CommunicationOnlyWeight) {
  Rng rng(3);
  const Scene s = generate_scene(geometry(), rng);
  const LinkParams p{64.0, 100.0, 1.0, 0.0};
  const MIReport r = weighted_objective(s, SelectionSet::full(6), p);
  EXPECT_DOUBLE_EQ(r.objective, r.comm_mi / p.slots);
}

TEST(WeightedObjective, FullSelectionUsesWholeScene) {
  Rng rng(4);
  const Scene s = generate_scene(geometry(), rng);
  const LinkParams p = LinkParams::from_snr_db(20.0);
  const MIReport r = weighted_objective(s, SelectionSet::full(6), p);
  EXPECT_DOUBLE_EQ(r.comm_mi, comm_mi(s.h_c, p));
  EXPECT_DOUBLE_EQ(r.sensing_mi, sensing_mi(s.r_t, p));
}

TEST(WeightedObjective, MatchesCompositionOfSubsetsAndDeterminants) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Scene s = generate_scene(geometry(), rng);
    const LinkParams p = LinkParams::from_snr_db(15.0, 0.3);
    const SelectionSet tx({1, 3, 4, 6}, 6), rx_c({2, 3}, 4), rx_s({1, 3}, 3);
    const MIReport r = weighted_objective(s, tx, rx_c, rx_s, p);

    const CMatrix h = subselect_columns(subselect_rows(s.h_c, rx_c), tx);
    const double ic = p.slots * oracle::log2_abs_det(identity_plus(h.adjoint() * h, p.gamma));
    double is = 0.0;
    for (std::size_t n : {0u, 2u}) is += oracle::log2_abs_det(identity_plus(subselect_principal(s.r_t[n], tx), p.gamma * p.slots));
    EXPECT_NEAR(r.comm_mi, ic, 1e-9 * ic);
    EXPECT_NEAR(r.sensing_mi, is, 1e-9 * std::max(1.0, is));
    EXPECT_NEAR(r.objective, 0.3 * ic / 64.0 + 0.7 * is / 3.0, 1e-9 * r.objective);
  }
  const Scene s = generate_scene(geometry(), rng);
  EXPECT_THROW(weighted_objective(s, SelectionSet({}, 6), SelectionSet::full(4), SelectionSet::full(3), LinkParams{}),
               ModelError);
}

TEST(WeightedObjective, EqualWeightsAverageTheNormalizedTerms) {
  Rng rng(6);
  const Scene s = generate_scene(geometry(), rng);
  const MIReport r = weighted_objective(s, SelectionSet::full(6), LinkParams::from_snr_db(10.0, 0.5));
  EXPECT_NEAR(r.objective, 0.5 * (r.comm_normalized + r.sensing_normalized), 1e-15);
}

TEST(MiProperties, StrictlyIncreasingInGamma) {
  Rng rng(7);
  const Scene s = generate_scene(geometry(), rng);
  double prev_c = 0.0, prev_s = 0.0;
  for (double db = -10.0; db <= 40.0; db += 5.0) {
    const LinkParams p = LinkParams::from_snr_db(db);
    const double ic = comm_mi(s.h_c, p), is = sensing_mi(s.r_t, p);
    EXPECT_GT(ic, prev_c);
    EXPECT_GT(is, prev_s);
    prev_c = ic;
    prev_s = is;
  }
}

TEST(MiProperties, AddingAChainNeverDecreasesEitherMi) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Scene s = generate_scene(geometry(8, 4, 4), rng);
    const LinkParams p = LinkParams::from_snr_db(20.0);
    const SelectionProblem prob = transmit_problem(s);
    std::vector<std::size_t> set;
    MIReport prev = evaluate(prob, p, set);
    std::vector<std::size_t> order{5, 1, 7, 0, 3, 6, 2, 4};
    for (std::size_t j : order) {
      set.push_back(j);
      const MIReport cur = evaluate(prob, p, set);
      EXPECT_GE(cur.comm_mi, prev.comm_mi - 1e-9);
      EXPECT_GE(cur.sensing_mi, prev.sensing_mi - 1e-9);
      prev = cur;
    }
  }
}

TEST(LinkParams, Validation) {
  EXPECT_NEAR(LinkParams::from_snr_db(30.0).gamma, 1000.0, 1e-9);
  EXPECT_THROW((LinkParams{0.5, 1.0, 0.5, 0.5}.validate()), ModelError);
  EXPECT_THROW((LinkParams{64.0, 0.0, 0.5, 0.5}.validate()), ModelError);
  EXPECT_THROW((LinkParams{64.0, 1.0, 0.6, 0.6}.validate()), ModelError);
  EXPECT_THROW((LinkParams{64.0, 1.0, 1.5, -0.5}.validate()), ModelError);
}

TEST(CircuitPower, FormulaAndMonotonicity) {
  PowerModel pm;
  pm.p_lo = 0.05;
  pm.p_rf = 0.2;
  pm.sample_rate = 1e8;
  pm.dac_bits = 10;
  pm.dac_coefficient = 0.1 / (1e8 * 1024.0);  // P_DAC = 0.1 W
  EXPECT_NEAR(circuit_power(pm, 0, 0, 0), 3 * 0.05, 1e-15);
  EXPECT_NEAR(circuit_power(pm, 1, 0, 0), 0.45, 1e-15);

  const PowerModel def;
  EXPECT_NEAR(def.dac_power(), 1e-12 * 100e6 * 4096.0, 1e-15);
  for (std::size_t k = 1; k < 16; ++k) {
    EXPECT_GT(circuit_power(def, k + 1, 8, 8), circuit_power(def, k, 8, 8));
    EXPECT_GT(circuit_power(def, 8, k + 1, 8), circuit_power(def, 8, k, 8));
    EXPECT_GT(circuit_power(def, 8, 8, k + 1), circuit_power(def, 8, 8, k));
  }
  PowerModel more_bits = def;
  more_bits.adc_bits_comm = 13;
  EXPECT_GT(circuit_power(more_bits, 4, 4, 4), circuit_power(def, 4, 4, 4));
  EXPECT_NEAR(circuit_power(def, SelectionSet({1, 2}, 4), SelectionSet({1}, 2), SelectionSet({}, 2)),
              circuit_power(def, 2, 1, 0), 1e-15);
}

TEST(EnergyEfficiency, ScalesInverselyWithPower) {
  MIReport r;
  EXPECT_EQ(energy_efficiency(r, 1.0), 0.0);
  r.objective = 12.0;
  EXPECT_DOUBLE_EQ(energy_efficiency(r, 2.0), 6.0);
  EXPECT_DOUBLE_EQ(energy_efficiency(r, 4.0), 3.0);
  EXPECT_THROW(energy_efficiency(r, 0.0), ModelError);
  EXPECT_THROW(energy_efficiency(r, -1.0), ModelError);
}
