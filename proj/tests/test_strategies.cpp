#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "satfl/strategies.hpp"

using namespace satfl;
using fixtures::make_timeline;

TEST_CASE("variant matrix") {
  const auto names = variant_names();
  REQUIRE(names.size() == 8);
  for (const auto& n : names) {
    const auto s = StrategyConfig::from_variant(n);
    CHECK_NOTHROW(s.validate());
    CHECK(s.variant_name() == n);
  }
  CHECK(std::count_if(names.begin(), names.end(),
                      [](const std::string& n) { return n.rfind("fedavg", 0) == 0; }) == 3);
  CHECK(std::count_if(names.begin(), names.end(),
                      [](const std::string& n) { return n.rfind("fedprox", 0) == 0; }) == 4);
  CHECK_THROWS_AS(StrategyConfig::from_variant("fedbuff_sch"), std::invalid_argument);

  const auto v2 = StrategyConfig::from_variant("fedprox_sch_v2", 4);
  CHECK(v2.min_epochs == 4);
  CHECK(v2.schedule);
  CHECK(StrategyConfig::from_variant("fedavg_intra").intra_cc);
}

TEST_CASE("invalid flag combinations") {
  StrategyConfig s;
  s.algorithm = Algorithm::FedBuff;
  s.schedule = true;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.schedule = false;
  s.intra_cc = true;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  StrategyConfig v2;
  v2.schedule_v2 = true;  // fedavg
  CHECK_THROWS_AS(v2.validate(), std::invalid_argument);
  v2.algorithm = Algorithm::FedProx;  // still no schedule
  CHECK_THROWS_AS(v2.validate(), std::invalid_argument);
  v2.schedule = true;
  CHECK_NOTHROW(v2.validate());

  CHECK_THROWS_AS(enforce_min_epochs(StrategyConfig{}, 3), std::invalid_argument);
  CHECK_THROWS_AS(enforce_min_epochs(v2, -1), std::invalid_argument);
  CHECK(enforce_min_epochs(v2, 3).min_epochs == 3);
}

TEST_CASE("client status machine") {
  using S = ClientState::Status;
  ClientState c;
  c.advance(S::AwaitingModel);
  c.advance(S::Training);
  c.advance(S::AwaitingReturn);
  c.advance(S::Idle);
  CHECK(c.status == S::Idle);
  CHECK_THROWS_AS(c.advance(S::Training), std::logic_error);
  CHECK_THROWS_AS(c.advance(S::Idle), std::logic_error);
  CHECK(std::string(to_string(S::AwaitingReturn)) == "awaiting_return");
}

TEST_CASE("buffer fills at D") {
  BufferState b;
  b.D = 2;
  CHECK_FALSE(b.full());
  b.contents.push_back({0, ModelParams{1.0}, 3, 0});
  CHECK_FALSE(b.full());
  b.contents.push_back({1, ModelParams{2.0}, 3, 1});
  CHECK(b.full());
}

TEST_CASE("first-contact selection") {
  // sat2 and sat3 share the earliest window start; sat1 is already in view.
  const auto tl = make_timeline(4, 1000.0,
                                {{{300, 400}}, {{40, 120}}, {{80, 90}}, {{80, 95}}});
  const AccessPlanner planner(tl, 1.0, false);
  std::vector<ClientState> clients(4);

  CHECK(select_clients_first_contact(planner, clients, 50.0, 2) == std::vector<int>{1, 2});
  CHECK(select_clients_first_contact(planner, clients, 50.0, 3) == std::vector<int>{1, 2, 3});
  CHECK(select_clients_first_contact(planner, clients, 50.0, 10).size() == 4);

  clients[1].advance(ClientState::Status::AwaitingModel);
  CHECK(select_clients_first_contact(planner, clients, 50.0, 2) == std::vector<int>{2, 3});

  // After every window has passed nobody can be selected.
  std::vector<ClientState> fresh(4);
  CHECK(select_clients_first_contact(planner, fresh, 500.0, 2).empty());
  CHECK_THROWS_AS(select_clients_first_contact(planner, fresh, 0.0, 0), std::invalid_argument);
}

TEST_CASE("a window too short for the transfer is skipped") {
  const auto tl = make_timeline(1, 1000.0, {{{10, 10.5}, {20, 30}}});
  const AccessPlanner planner(tl, 1.0, false);
  const auto rx = planner.route(0, 0.0, Direction::Down);
  REQUIRE(rx);
  CHECK(rx->t_s == 20.0);
  CHECK(planner.completion(*rx) == 21.0);
}

TEST_CASE("down uses a window in progress, up needs a fresh one") {
  const auto tl = make_timeline(1, 1000.0, {{{10, 20}, {50, 60}}});
  const AccessPlanner planner(tl, 1.0, false);
  const auto rx = planner.route(0, 15.0, Direction::Down);
  REQUIRE(rx);
  CHECK(rx->t_s == 15.0);
  const auto tx = planner.route(0, 15.0, Direction::Up);
  REQUIRE(tx);
  CHECK(tx->t_s == 50.0);
  CHECK_FALSE(planner.route(0, 55.0, Direction::Up));
}

TEST_CASE("scheduled selection prefers the fast round trip") {
  // sat0: early rx but its next pass is far away; sat1: later rx, quick return.
  const auto tl = make_timeline(2, 20000.0, {{{10, 20}, {9000, 9100}}, {{100, 110}, {1600, 1700}}});
  const AccessPlanner planner(tl, 1.0, false);
  std::vector<ClientState> clients(2);
  CHECK(select_clients_first_contact(planner, clients, 0.0, 1) == std::vector<int>{0});
  CHECK(select_clients_scheduled(planner, clients, 0.0, 1, 5.0) == std::vector<int>{1});

  const auto rt0 = planned_round_trip(planner, 0, 0.0, 5.0);
  REQUIRE(rt0);
  CHECK(rt0->score_s == doctest::Approx(10.0 + (9000.0 - 16.0)));
  const auto rt1 = planned_round_trip(planner, 1, 0.0, 5.0);
  REQUIRE(rt1);
  CHECK(rt1->score_s == doctest::Approx(100.0 + (1600.0 - 106.0)));

  StrategyConfig sch;
  sch.schedule = true;
  CHECK(select_evaluation_clients(planner, clients, 0.0, 1, sch, 5.0) == std::vector<int>{1});
  CHECK(select_evaluation_clients(planner, clients, 0.0, 1, StrategyConfig{}, 5.0) ==
        std::vector<int>{0});
}

TEST_CASE("without relays the planned score matches the direct score") {
  const auto tl = make_timeline(2, 20000.0, {{{10, 20}, {9000, 9100}}, {{100, 110}, {1600, 1700}}});
  const AccessPlanner planner(tl, 1.0, false);
  for (int k = 0; k < 2; ++k)
    for (double t : {0.0, 15.0, 105.0}) {
      const auto a = planned_round_trip(planner, k, t, 5.0);
      const auto b = round_trip_score(tl, k, t, 5.0 + 1.0);
      REQUIRE(a.has_value() == b.has_value());
      if (a) CHECK(a->score_s == doctest::Approx(b->score_s));
    }
}

TEST_CASE("scheduler dominance on random timelines") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> gap(50.0, 3000.0), len(5.0, 60.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 8;
    std::vector<std::vector<Interval>> ground(K);
    for (auto& g : ground) {
      double t = gap(rng) * 0.2;
      while (t < 40000.0) {
        const double l = len(rng);
        g.push_back({t, t + l});
        t += l + gap(rng);
      }
    }
    const auto tl = make_timeline(K, 50000.0, ground);
    const AccessPlanner planner(tl, 1.0, false);
    std::vector<ClientState> clients(K);
    const double training = 12.0;
    const auto score = [&](const std::vector<int>& sel) {
      double s = 0.0;
      for (int k : sel) s += planned_round_trip(planner, k, 0.0, training)->score_s;
      return s;
    };
    const auto sch = select_clients_scheduled(planner, clients, 0.0, 3, training);
    const auto first = select_clients_first_contact(planner, clients, 0.0, 3);
    REQUIRE(sch.size() == 3);
    CHECK(score(sch) <= score(first) + 1e-9);
  }
}

namespace {

// A 10-satellite ring, all links always up; only sat0 ever sees the ground.
ContactTimeline ring_with_one_gateway(std::vector<Interval> gateway) {
  std::vector<std::vector<Interval>> ground(10);
  ground[0] = std::move(gateway);
  auto tl = make_timeline(10, 1000.0, ground);
  for (int k = 0; k < 10; ++k) tl.add_link_windows(k, (k + 1) % 10, {{0.0, 1000.0}});
  return tl;
}

}  // namespace

TEST_CASE("relay from the antipodal satellite takes five hops") {
  const auto tl = ring_with_one_gateway({{100, 400}});
  const auto down = relay_route_intra_cluster(tl, 5, 0.0, Direction::Down, 1.0);
  REQUIRE(down);
  CHECK(down->hop_count() == 5);
  CHECK(down->hops == std::vector<int>{5, 4, 3, 2, 1, 0});
  CHECK(down->t_s == 100.0);
  const AccessPlanner planner(tl, 1.0, true);
  CHECK(planner.completion(*down) == 106.0);

  const auto up = planner.route(7, 150.0, Direction::Up);
  REQUIRE(up);
  CHECK(up->hop_count() == 3);
  CHECK(up->hops.front() == 7);
  CHECK(up->hops.back() == 0);
  CHECK(up->t_s == 150.0);  // relay members may use a window in progress

  // Without relays the satellite has no contact at all.
  CHECK_FALSE(AccessPlanner(tl, 1.0, false).route(5, 0.0, Direction::Down));
}

TEST_CASE("relay respects window length for the whole chain") {
  // 5 hops up need 6 transfers; a 5 s window is too short.
  const auto tl = ring_with_one_gateway({{100, 105}, {200, 210}});
  const AccessPlanner planner(tl, 1.0, true);
  const auto up = planner.route(5, 0.0, Direction::Up);
  REQUIRE(up);
  CHECK(up->t_s == 200.0);
  const auto down = planner.route(5, 0.0, Direction::Down);
  REQUIRE(down);
  CHECK(down->t_s == 100.0);
}

TEST_CASE("own window beats a relay at the same time") {
  std::vector<std::vector<Interval>> ground(3);
  ground[0] = {{50, 90}};
  ground[1] = {{50, 90}};
  auto tl = make_timeline(3, 1000.0, ground);
  tl.add_link_windows(0, 1, {{0, 1000}});
  tl.add_link_windows(1, 2, {{0, 1000}});
  const AccessPlanner planner(tl, 1.0, true);
  const auto p = planner.route(1, 0.0, Direction::Down);
  REQUIRE(p);
  CHECK(p->hop_count() == 0);
  const auto q = planner.route(2, 0.0, Direction::Down);
  REQUIRE(q);
  CHECK(q->hops == std::vector<int>{2, 1});
}

TEST_CASE("links that are down block the relay") {
  std::vector<std::vector<Interval>> ground(2);
  ground[0] = {{50, 90}, {500, 520}};
  auto tl = make_timeline(2, 1000.0, ground);
  tl.add_link_windows(0, 1, {{400, 1000}});
  const AccessPlanner planner(tl, 1.0, true);
  const auto p = planner.route(1, 0.0, Direction::Down);
  REQUIRE(p);
  CHECK(p->t_s == 500.0);
}
