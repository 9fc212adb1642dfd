// Copyright 2026 The shaped-ucbvi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "sucbvi/environments.hpp"
#include "sucbvi/error.hpp"
#include "sucbvi/learner.hpp"
#include "sucbvi/modelsel.hpp"

using namespace sucbvi;

namespace {

void check_distribution(const std::vector<double>& p) {
  double sum = 0.0;
  for (double x : p) {
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

}  // namespace

TEST_CASE("beta grids") {
  CHECK(BetaGrid::exponential(3).betas == std::vector<double>{1.0, 2.0, 4.0});
  CHECK_NOTHROW(BetaGrid{{1.0, 1.5, 3.0}}.validate());
  for (const BetaGrid& bad : {BetaGrid{}, BetaGrid{{0.5, 1.0}}, BetaGrid{{2.0, 2.0}},
                              BetaGrid{{1.0, std::nan("")}}}) {
    try {
      bad.validate();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidBeta);
    }
  }
}

TEST_CASE("a single arm is always selected") {
  MasterState m(1);
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(m.select(rng) == 0);
    m.feed(0, 0.3);
  }
  CHECK(m.p() == std::vector<double>{1.0});
}

TEST_CASE("uniform start draws each of two arms about half the time") {
  const MasterState m(2, 100);
  CHECK(m.p() == std::vector<double>{0.5, 0.5});
  CounterRng rng(9);
  int zeros = 0;
  for (int i = 0; i < 10000; ++i) zeros += m.select(rng) == 0;
  CHECK(std::abs(zeros - 5000) <= 150);  // 3 sigma
}

TEST_CASE("exploration floor") {
  MasterState m(3, 1000);
  for (int i = 0; i < 500; ++i) {
    m.feed(0, 0.0);
    const double floor = m.gamma() / 3.0;
    for (double x : m.p()) CHECK(x >= floor * (1.0 - 1e-12));
  }
}

TEST_CASE("zero losses leave the weights uniform") {
  MasterState m(4, 50);
  for (int i = 0; i < 50; ++i) {
    m.feed(static_cast<std::size_t>(i % 4), 1.0);
    for (double x : m.p()) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));
  }
  for (double l : m.importance_losses()) CHECK(l == 0.0);
}

TEST_CASE("update follows the closed-form recursion") {
  const std::uint64_t T = 200;
  MasterState m(2, T);
  const double eta = std::sqrt(2.0 * std::log(2.0) / static_cast<double>(T));
  double L0 = 0.0;
  std::vector<double> p{0.5, 0.5};
  for (std::uint64_t t = 1; t <= 60; ++t) {
    L0 += 1.0 / p[0];
    m.feed(0, 0.0);
    const double gamma = std::min(1.0, std::sqrt(2.0 * std::log(2.0) / static_cast<double>(t)));
    const double w0 = std::exp(-eta * L0), w1 = 1.0;
    p = {(1.0 - gamma) * w0 / (w0 + w1) + gamma / 2.0, (1.0 - gamma) * w1 / (w0 + w1) + gamma / 2.0};
    CHECK(m.importance_losses()[0] == doctest::Approx(L0).epsilon(1e-12));
    CHECK(m.p()[0] == doctest::Approx(p[0]).epsilon(1e-12));
    CHECK(m.p()[1] == doctest::Approx(p[1]).epsilon(1e-12));
    CHECK(m.eta() == doctest::Approx(eta));
    CHECK(m.gamma() == doctest::Approx(gamma));
  }
  CHECK(m.updates() == 60);
}

TEST_CASE("anytime learning rate without a horizon") {
  MasterState m(3);
  for (std::uint64_t t = 1; t <= 10; ++t) {
    m.feed(1, 0.5);
    CHECK(m.eta() == doctest::Approx(std::sqrt(3.0 * std::log(3.0) / static_cast<double>(t))));
  }
}

TEST_CASE("a zero learning rate never moves the weights") {
  MasterState m(3, 100);
  m.fix_eta(0.0);
  CounterRng rng(4);
  for (int i = 0; i < 100; ++i) {
    m.feed(m.select(rng), rng.uniform());
    for (double x : m.p()) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(m.fix_eta(-1.0), Error);
}

TEST_CASE("returns outside [0, 1] are rejected") {
  MasterState m(2);
  for (double r : {-0.1, 1.1, std::nan("")}) {
    try {
      m.feed(0, r);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kOutOfRangeReturn);
    }
  }
  CHECK(m.updates() == 0);
  CHECK_THROWS_AS(m.feed(2, 0.5), Error);
  CHECK_THROWS_AS(MasterState(0), Error);
}

TEST_CASE("weights stay a distribution under random feedback") {
  CounterRng rng(17);
  for (std::size_t n : {2u, 3u, 5u}) {
    MasterState m(n, 3000);
    for (int i = 0; i < 3000; ++i) {
      m.feed(m.select(rng), rng.uniform());
      check_distribution(m.p());
    }
  }
}

TEST_CASE("the best arm ends up with the most weight") {
  MasterState m(3, 3000);
  CounterRng rng(5);
  for (int i = 0; i < 3000; ++i) {
    const std::size_t arm = m.select(rng);
    m.feed(arm, arm == 1 ? 1.0 : 0.2);
  }
  CHECK(m.p()[1] > 0.8);
}

TEST_CASE("online run with zero episodes") {
  const GridEnv env = build_preset("grid8");
  const ValueTable vs = exact_optimal_values(env.mdp);
  CounterRng srng(1);
  const ShapingTable sh = build_sandwiched(vs, 1.5, srng);
  CounterRng rng(2);
  const OnlineResult r = run_online(env.mdp, BetaGrid::exponential(3), {}, sh, 0, rng);
  CHECK(r.trace.episodes.empty());
  for (double x : r.final_p) CHECK(x == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a one-point grid reproduces the plain Shaped run") {
  const GridEnv env = build_preset("corridor10");
  const ValueTable vs = exact_optimal_values(env.mdp);
  CounterRng srng(3);
  const ShapingTable sh = build_sandwiched(vs, 1.5, srng);
  BonusSpec spec;
  spec.beta = 1.5;
  for (bool share : {true, false}) {
    CounterRng a(11), b(11);
    const OnlineResult online =
        run_online(env.mdp, BetaGrid{{1.5}}, spec, sh, 300, a, {share, true});
    const RegretTrace plain = run(env.mdp, Variant::kShaped, spec, sh, 300, b);
    REQUIRE(online.trace.episodes.size() == plain.episodes.size());
    for (std::size_t i = 0; i < plain.episodes.size(); ++i) {
      CHECK(online.trace.episodes[i].instant_regret == plain.episodes[i].instant_regret);
      CHECK(online.trace.episodes[i].episodic_return == plain.episodes[i].episodic_return);
      CHECK(online.trace.episodes[i].arm == 0);
    }
    CHECK(online.trace.visits == plain.visits);
    CHECK(online.trace.final_policy_value == plain.final_policy_value);
    CHECK(online.pulls == std::vector<std::uint64_t>{300});
  }
}

TEST_CASE("online bookkeeping") {
  const GridEnv env = build_preset("grid8");
  const ValueTable vs = exact_optimal_values(env.mdp);
  CounterRng srng(6);
  const ShapingTable sh = build_sandwiched(vs, 1.5, srng);
  for (bool share : {true, false}) {
    CounterRng rng(7);
    const OnlineResult r =
        run_online(env.mdp, BetaGrid::exponential(3), {}, sh, 400, rng, {share, true});
    CHECK(std::accumulate(r.pulls.begin(), r.pulls.end(), std::uint64_t{0}) == 400);
    check_distribution(r.final_p);
    std::vector<std::uint64_t> counted(3, 0);
    double cum = 0.0;
    for (const EpisodeRecord& e : r.trace.episodes) {
      REQUIRE(e.arm >= 0);
      REQUIRE(e.arm < 3);
      ++counted[static_cast<std::size_t>(e.arm)];
      CHECK(e.instant_regret >= -1e-12);
      cum += e.instant_regret;
      CHECK(e.cumulative_regret == doctest::Approx(cum));
    }
    CHECK(counted == r.pulls);
  }
}
