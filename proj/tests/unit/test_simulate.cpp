#include <doctest.h>

#include <cmath>
#include <cstring>

#include "orddid/error.hpp"
#include "orddid/simulate.hpp"

using namespace orddid;

namespace {
bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0 || (std::isnan(a) && std::isnan(b)); }
}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("cell frequencies match the latent model") {
    DgpSpec s;
    s.theta00 = s.theta01 = s.theta10 = {0.0, 1.0};
    s.treated = {0.0, 1.0};
    s.n = 250000;
    s.seed = 99;
    const auto d = simulate_panel(s);
    std::vector<long long> c(3, 0);
    for (const auto& r : d.records()) ++c[static_cast<std::size_t>(r.outcome)];
    const double total = static_cast<double>(d.size());
    CHECK(std::fabs(c[0] / total - 0.5) < 0.002);
    CHECK(std::fabs(c[1] / total - 0.3413447460685429) < 0.002);
    CHECK(std::fabs(c[2] / total - 0.15865525393145707) < 0.002);
  }

  TEST_CASE("same seed, same panel") {
    DgpSpec s;
    s.n = 300;
    const auto a = simulate_panel(s), b = simulate_panel(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.records()[i].outcome == b.records()[i].outcome);
    s.seed = 2;
    const auto c = simulate_panel(s);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a.records()[i].outcome != c.records()[i].outcome;
    CHECK(differs);
  }

  TEST_CASE("latent correlation knob") {
    DgpSpec s;
    s.n = 20000;
    s.rho = 0.9;
    s.theta00 = s.theta01 = s.theta10 = s.treated = {0.0, 1.0};
    const auto d = simulate_panel(s);
    long long same = 0;
    for (std::size_t i = 0; i < d.size(); i += 2) same += d.records()[i].outcome == d.records()[i + 1].outcome;
    CHECK(double(same) / (d.size() / 2) > 0.7);
  }

  TEST_CASE("validation") {
    DgpSpec s;
    s.theta01.sigma = 0.0;
    CHECK_THROWS_AS(simulate_panel(s), DomainError);
    DgpSpec k;
    k.kappa = {1.0, 0.0};
    CHECK_THROWS_AS(simulate_panel(k), DomainError);
    DgpSpec r;
    r.rho = 1.0;
    CHECK_THROWS_AS(simulate_panel(r), DomainError);
  }

  TEST_CASE("derived counterfactual satisfies parallel trends exactly") {
    DgpSpec s;
    CHECK(true_t_max(s) < 1e-12);
    s.theta11 = CellParams{1.5, 1.5};
    CHECK(true_t_max(s) == doctest::Approx(0.147227).epsilon(1e-5));
  }

  TEST_CASE("true effects") {
    DgpSpec s;
    const auto d = true_effects(s);
    REQUIRE(d.size() == 2);
    const auto obs = cell_probs(s.treated, s.kappa);
    const auto cf = cell_probs(CellParams{0.5, 4.0 / 3.0}, s.kappa);
    CHECK(d[1] == doctest::Approx(obs[2] - cf[2]).epsilon(1e-14));
    CHECK(d[0] == doctest::Approx(obs[1] + obs[2] - cf[1] - cf[2]).epsilon(1e-14));
  }

  TEST_CASE("dichotomization gap") {
    const std::vector<double> tp{0.3, 0.5, 0.2}, tq{0.2, 0.5, 0.3}, cp{0.2, 0.5, 0.3}, cq{0.2, 0.4, 0.4};
    CHECK(std::fabs(pt_gap(tp, tq, cp, cq, 2)) < 1e-12);
    CHECK(std::fabs(pt_gap(tp, tq, cp, cq, 1) - 0.1) < 1e-12);
    for (int j = 1; j < 3; ++j) CHECK(pt_gap(tp, tp, tp, tp, j) == 0.0);
    CHECK_THROWS_AS(pt_gap({0.5, 0.6, 0.1}, tq, cp, cq, 1), DomainError);
    CHECK_THROWS_AS(pt_gap(tp, tq, cp, cq, 3), DomainError);
  }

  TEST_CASE("estimator Monte Carlo: parallel equals serial") {
    DgpSpec s;
    s.n = 400;
    McOptions o;
    o.reps = 12;
    o.boot_reps = 30;
    o.seed = 4;
    o.threads = 3;
    const auto p = run_estimator_mc(s, o);
    const auto q = serial::run_estimator_mc(s, o);
    CHECK(same_bits(p.abs_bias, q.abs_bias));
    CHECK(same_bits(p.rmse, q.rmse));
    CHECK(same_bits(p.coverage, q.coverage));
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
      for (std::size_t k = 0; k < p.rows[r].size(); ++k) CHECK(same_bits(p.rows[r][k], q.rows[r][k]));
    }
    CHECK(p.reps == 12);
    CHECK(p.coverage >= 0.0);
    CHECK(p.coverage <= 1.0);
    o.reps = 1;
    CHECK_THROWS_AS(run_estimator_mc(s, o), DomainError);
  }

  TEST_CASE("equivalence Monte Carlo: parallel equals serial") {
    DgpSpec s;
    s.theta11 = CellParams{1.5, 1.5};
    s.n = 500;
    EquivalenceMcOptions o;
    o.reps = 10;
    o.deltas = {0.1, 0.3, 0.6};
    o.threads = 2;
    const auto p = run_equivalence_mc(s, o);
    const auto q = serial::run_equivalence_mc(s, o);
    for (std::size_t k = 0; k < 3; ++k) CHECK(same_bits(p.rejection_rate[k], q.rejection_rate[k]));
    CHECK(p.rejection_rate[0] <= p.rejection_rate[2]);
    o.deltas = {0.0};
    CHECK_THROWS_AS(run_equivalence_mc(s, o), DomainError);
  }
}
