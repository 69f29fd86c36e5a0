#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "twinmarket/opinion.hpp"
#include "twinmarket/rng.hpp"

using namespace twinmarket;

namespace {

ReputationParams half_half() {
  ReputationParams p;
  p.omega1 = 0.5;
  p.omega2 = 0.5;
  p.kappa = 1.0;
  return p;
}

InteractionWindow counts(int p, int q) {
  InteractionWindow w;
  w.positives = p;
  w.negatives = q;
  return w;
}

}  // namespace

TEST_CASE("no interactions means full uncertainty") {
  const Opinion o = opinion_from_counts(counts(0, 0), half_half(), 0.5);
  REQUIRE(o.belief == 0.0);
  REQUIRE(o.disbelief == 0.0);
  REQUIRE(o.uncertainty == 1.0);
}

TEST_CASE("opinion from counts, hand-computed case") {
  // p=4, q=2, w1=w2=0.5, kappa=1 -> denom 4, b=2/4, d=1/4, u=1/4
  const Opinion o = opinion_from_counts(counts(4, 2), half_half(), 0.5);
  REQUIRE(o.belief == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(o.disbelief == Catch::Approx(0.25).margin(1e-12));
  REQUIRE(o.uncertainty == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("belief approaches one as positives dominate") {
  const Opinion o = opinion_from_counts(counts(1000, 0), half_half(), 0.5);
  REQUIRE(o.belief == Catch::Approx(500.0 / 501.0).margin(1e-12));
  REQUIRE(o.uncertainty == Catch::Approx(1.0 / 501.0).margin(1e-12));
  REQUIRE(o.belief > 0.99);
}

TEST_CASE("invalid parameters are a configuration error") {
  ReputationParams p = half_half();
  p.omega2 = 0.7;  // weights no longer sum to 1
  REQUIRE_THROWS_AS(opinion_from_counts(counts(1, 1), p, 0.5), std::invalid_argument);
  p = half_half();
  p.kappa = 0.0;
  REQUIRE_THROWS_AS(opinion_from_counts(counts(1, 1), p, 0.5), std::invalid_argument);
  p = half_half();
  InteractionWindow w = counts(-1, 0);
  REQUIRE_THROWS_AS(opinion_from_counts(w, p, 0.5), std::invalid_argument);
}

TEST_CASE("simplex closure holds for random counts and params") {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    ReputationParams p;
    p.omega1 = rng.uniform_real(0.0, 1.0);
    p.omega2 = 1.0 - p.omega1;
    p.kappa = rng.uniform_real(0.01, 5.0);
    const Opinion o = opinion_from_counts(
        counts(rng.uniform_int(0, 50), rng.uniform_int(0, 50)), p, rng.uniform_real(0.0, 1.0));
    REQUIRE(o.on_simplex(1e-9));
  }
}

TEST_CASE("belief grows with positives, disbelief with negatives") {
  const ReputationParams p = half_half();
  double last_b = -1.0;
  for (int pos = 0; pos <= 30; ++pos) {
    const double b = opinion_from_counts(counts(pos, 5), p, 0.5).belief;
    REQUIRE(b > last_b);
    last_b = b;
  }
  double last_d = -1.0;
  for (int neg = 0; neg <= 30; ++neg) {
    const double d = opinion_from_counts(counts(5, neg), p, 0.5).disbelief;
    REQUIRE(d > last_d);
    last_d = d;
  }
}

TEST_CASE("fading a single window returns it unchanged") {
  ReputationParams p;
  const Opinion o = opinion_from_counts(counts(3, 1), p, 0.4);
  const std::vector<Opinion> history{o};
  const auto faded = fade_opinions(history, p);
  REQUIRE(faded.has_value());
  REQUIRE(faded->belief == Catch::Approx(o.belief).margin(1e-12));
  REQUIRE(faded->disbelief == Catch::Approx(o.disbelief).margin(1e-12));
  REQUIRE(faded->uncertainty == Catch::Approx(o.uncertainty).margin(1e-12));
}

TEST_CASE("two-window fade, hand-computed case") {
  // z=0.5, beliefs 0.2 (old) and 0.8 (recent): (0.5*0.2 + 1*0.8) / 1.5 = 0.6
  ReputationParams p;
  p.fading_z = 0.5;
  Opinion old_op{0.2, 0.4, 0.4, 0.5};
  Opinion new_op{0.8, 0.1, 0.1, 0.5};
  const std::vector<Opinion> history{old_op, new_op};
  const auto faded = fade_opinions(history, p);
  REQUIRE(faded.has_value());
  REQUIRE(faded->belief == Catch::Approx(0.6).margin(1e-12));
  REQUIRE(faded->on_simplex(1e-9));
}

TEST_CASE("identical windows fade to themselves") {
  ReputationParams p;
  const Opinion o = opinion_from_counts(counts(2, 3), p, 0.7);
  const std::vector<Opinion> history(7, o);
  const auto faded = fade_opinions(history, p);
  REQUIRE(faded.has_value());
  REQUIRE(faded->belief == Catch::Approx(o.belief).margin(1e-12));
  REQUIRE(faded->disbelief == Catch::Approx(o.disbelief).margin(1e-12));
}

TEST_CASE("empty history yields no opinion") {
  ReputationParams p;
  const std::vector<Opinion> history;
  REQUIRE_FALSE(fade_opinions(history, p).has_value());
}

TEST_CASE("scalar reputation from an opinion") {
  REQUIRE(opinion_reputation(Opinion{0.5, 0.25, 0.25, 0.5}) == Catch::Approx(0.625).margin(1e-12));
  // cold start scores alpha
  REQUIRE(opinion_reputation(full_uncertainty_opinion(0.5)) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(opinion_reputation(Opinion{1.0, 0.0, 0.0, 0.3}) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("faded opinions stay on the simplex for random histories") {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    ReputationParams p;
    p.omega1 = rng.uniform_real(0.05, 0.95);
    p.omega2 = 1.0 - p.omega1;
    p.fading_z = rng.uniform_real(0.05, 0.95);
    std::vector<Opinion> history;
    const int len = rng.uniform_int(1, 8);
    for (int i = 0; i < len; ++i)
      history.push_back(opinion_from_counts(counts(rng.uniform_int(0, 9), rng.uniform_int(0, 9)),
                                            p, 0.5));
    const auto faded = fade_opinions(history, p);
    REQUIRE(faded.has_value());
    REQUIRE(faded->on_simplex(1e-9));
    const double r = opinion_reputation(*faded);
    REQUIRE(r >= 0.0);
    REQUIRE(r <= 1.0);
  }
}
