#include "sdenet/errors.hpp"
#include "sdenet/results.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sdenet;

namespace {

// Chain of draws whose topology rows are given as strings over a p x p grid;
// the first half (floor) of the draws is burn-in.
ChainSamples chain_from(const std::vector<std::string>& topologies, int p, int lags = 2) {
  ChainSamples c;
  c.nodes = p;
  c.blocks = p;
  c.lags = lags;
  for (std::size_t i = 0; i < topologies.size(); ++i) {
    Draw d;
    d.iteration = static_cast<int>(i);
    d.links = LinkMatrix(p, p);
    for (int r = 0; r < p; ++r) {
      for (int j = 0; j < p; ++j) {
        LinkPrior& lp = d.links(r, j);
        lp.active = topologies[i][std::size_t(r) * p + j] == '1';
        lp.gamma = static_cast<double>(i + 1);
        lp.beta = {0.1 * static_cast<double>(j + 1), 0.5};
      }
    }
    d.sigma = Eigen::VectorXd::Constant(p, static_cast<double>(i));
    d.lambda = 2.0 * static_cast<double>(i);
    d.w = Eigen::MatrixXd::Constant(p, p * lags, static_cast<double>(i));
    c.draws.push_back(std::move(d));
  }
  // No accumulators: summarize falls back to the stored draws.
  c.retained_from = -1;
  return c;
}

}  // namespace

TEST_SUITE("results") {

TEST_CASE("link probability of an always-on link is one") {
  const ChainSamples c = chain_from({"0000", "1000", "1000", "1000"}, 2);
  const PosteriorSummary s = summarize(c);
  CHECK(s.retained == 2);
  CHECK(s.link_prob(0, 0) == 1.0);
  CHECK(s.link_prob(0, 1) == 0.0);
}

TEST_CASE("alternating link gives one half") {
  const ChainSamples c = chain_from({"1111", "1111", "0100", "0000", "0100", "0000"}, 2);
  const PosteriorSummary s = summarize(c);
  CHECK(s.retained == 3);
  CHECK(s.link_prob(0, 1) == doctest::Approx(1.0 / 3.0));
  const ChainSamples d = chain_from({"1111", "1111", "0100", "0000", "0100", "0000", "0100", "0000"}, 2);
  CHECK(summarize(d).link_prob(0, 1) == 0.5);
}

TEST_CASE("MAP topology is the most frequent retained vector") {
  // Burn-in of four draws, then {t1, t1, t2, t3}.
  const ChainSamples c =
      chain_from({"0110", "0110", "0110", "0110", "1001", "1001", "1100", "0011"}, 2);
  const PosteriorSummary s = summarize(c);
  CHECK(s.s_map(0, 0));
  CHECK_FALSE(s.s_map(0, 1));
  CHECK_FALSE(s.s_map(1, 0));
  CHECK(s.s_map(1, 1));
  CHECK(s.map_frequency == 0.5);
}

TEST_CASE("MAP ties go to the first sampled topology") {
  const ChainSamples c = chain_from({"0000", "0000", "0000", "0011", "1100", "1100", "0011"}, 2);
  const PosteriorSummary s = summarize(c);
  CHECK_FALSE(s.s_map(0, 0));
  CHECK(s.s_map(1, 1));
}

TEST_CASE("threshold topology and conditional means") {
  const ChainSamples c = chain_from({"0000", "0000", "1100", "1000", "1010"}, 2);
  const PosteriorSummary s = summarize(c);
  // Retained draws 2, 3, 4.
  CHECK(s.s_threshold(0, 0));
  CHECK_FALSE(s.s_threshold(0, 1));  // 1/3
  CHECK_FALSE(s.s_threshold(1, 0));
  CHECK(s.gamma_mean(0, 0) == doctest::Approx(4.0));  // gammas 3, 4, 5
  CHECK(s.gamma_mean(0, 1) == doctest::Approx(3.0));
  CHECK(std::isnan(s.gamma_mean(1, 1)));
  CHECK(s.beta1_mean(0, 1) == doctest::Approx(0.2));
  CHECK(std::isnan(s.beta2_mean(0, 0)));  // TC has one shape parameter
  CHECK(s.sigma_mean(0) == doctest::Approx(3.0));
  CHECK(s.lambda_mean == doctest::Approx(6.0));
  CHECK(s.w_mean(1, 3) == doctest::Approx(3.0));
  CHECK(s.y_mean.size() == 0);
}

TEST_CASE("link probabilities are the column means of the retained indicators") {
  std::vector<std::string> tops;
  for (int i = 0; i < 41; ++i) {
    std::string t(9, '0');
    for (int k = 0; k < 9; ++k) t[k] = ((i * 7 + k * 3) % 5 < 2) ? '1' : '0';
    tops.push_back(t);
  }
  const ChainSamples c = chain_from(tops, 3);
  const PosteriorSummary s = summarize(c);
  for (int k = 0; k < 9; ++k) {
    double count = 0.0;
    for (int i = 20; i < 41; ++i) count += tops[i][k] == '1';
    CHECK(s.link_prob(k / 3, k % 3) == count / 21.0);
  }
  CHECK((s.link_prob.array() >= 0.0).all());
  CHECK((s.link_prob.array() <= 1.0).all());
}

TEST_CASE("pooled chains and accumulators") {
  ChainSamples a = chain_from({"0000", "1000", "1000"}, 2);
  ChainSamples b = chain_from({"0000", "0000", "0100", "0100"}, 2);
  const std::vector<ChainSamples> both{a, b};
  const PosteriorSummary s = summarize(both);
  CHECK(s.retained == 4);
  CHECK(s.link_prob(0, 0) == 0.5);
  CHECK(s.link_prob(0, 1) == 0.5);

  // A matching accumulator takes precedence over the stored draws.
  a.retained_from = 1;
  a.retained_count = 2;
  a.w_sum = Eigen::MatrixXd::Constant(2, 4, 10.0);
  for (auto& d : a.draws) d.w.resize(0, 0);
  CHECK(summarize(a).w_mean(0, 0) == 5.0);
}

TEST_CASE("errors") {
  ChainSamples empty;
  empty.nodes = 2;
  empty.blocks = 2;
  CHECK_THROWS_AS(summarize(empty), ArgumentError);
  CHECK_THROWS_AS(summarize(std::span<const ChainSamples>{}), ArgumentError);
  const std::vector<ChainSamples> mixed{chain_from({"0000"}, 2), chain_from({"000000000"}, 3)};
  CHECK_THROWS_AS(summarize(mixed), ArgumentError);
}

}  // TEST_SUITE
