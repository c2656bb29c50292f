#include "cogfric/agent.hpp"
#include "cogfric/digest.hpp"
#include "cogfric/errors.hpp"
#include "cogfric/scene.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace cogfric;

namespace {

const std::string kFixtures = COGFRIC_FIXTURES_DIR;
const EmbedConfig kCfg;

Scene open_grid(int width, int height) {
    std::string cells;
    for (int i = 0; i < width * height; ++i) {
        cells += i ? ",{\"occ\":\"open\"}" : "{\"occ\":\"open\"}";
    }
    return load_scene("{\"name\":\"grid\",\"width\":" + std::to_string(width) +
                      ",\"height\":" + std::to_string(height) + ",\"cells\":[" + cells +
                      "],\"spawns\":[[0,0]],\"goals\":[[0,0]]}");
}

Descriptor tokens(const std::vector<std::pair<std::string, double>>& entries) {
    Descriptor d;
    for (const auto& [tok, w] : entries) {
        d.set_max("lighting", tok, w);
    }
    return d;
}

}  // namespace

TEST_CASE("plan_path walks a straight corridor") {
    const Scene s = load_scene(read_file(kFixtures + "/scenes/canonical_glass.json"));
    const auto path = plan_path(s, {1, 1}, {7, 1});
    const std::vector<GridPos> expect = {{2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}};
    CHECK(path == expect);
}

TEST_CASE("plan_path is empty when start equals goal") {
    const Scene s = open_grid(3, 3);
    CHECK(plan_path(s, {1, 1}, {1, 1}).empty());
}

TEST_CASE("plan_path tie-breaks north, east, south, west") {
    const Scene s = open_grid(3, 3);
    const auto path = plan_path(s, {0, 0}, {2, 2});
    // All shortest paths are length 4; the fixed order goes east first.
    const std::vector<GridPos> expect = {{1, 0}, {2, 0}, {2, 1}, {2, 2}};
    CHECK(path == expect);
}

TEST_CASE("plan_path rejects bad endpoints and walled-off goals") {
    const Scene s = load_scene(read_file(kFixtures + "/scenes/canonical_glass.json"));
    CHECK_THROWS_AS(plan_path(s, {0, 0}, {7, 1}), InvalidEndpoint);  // blocked start
    CHECK_THROWS_AS(plan_path(s, {1, 1}, {6, 0}), InvalidEndpoint);  // glass is not Open
    CHECK_THROWS_AS(plan_path(s, {1, 1}, {99, 1}), InvalidEndpoint);

    const char* split =
        R"({"name":"split","width":3,"height":1,
            "cells":[{"occ":"open"},{"occ":"blocked"},{"occ":"open"}],
            "spawns":[[0,0]],"goals":[[2,0]]})";
    CHECK_THROWS_AS(plan_path(load_scene(split), {0, 0}, {2, 0}), NoPath);
}

TEST_CASE("plan_path detours through the maze fixture") {
    const Scene s = load_scene(read_file(kFixtures + "/scenes/maze_8.json"));
    const auto path = plan_path(s, {1, 1}, {6, 6});
    CHECK(path.size() == 14);
    CHECK(path.back() == GridPos{6, 6});
    GridPos prev{1, 1};
    for (const GridPos p : path) {
        CHECK(std::abs(p.x - prev.x) + std::abs(p.y - prev.y) == 1);
        CHECK(s.at(p).occupancy == Occupancy::Open);
        prev = p;
    }
}

TEST_CASE("predict_next_percept is the persistence model") {
    AgentState state;
    CHECK_THROWS_AS(predict_next_percept(state), NoHistory);

    Percept seen;
    seen.descriptor = tokens({{"even", 0.4}});
    state.prev_percept = seen;
    CHECK(predict_next_percept(state) == seen.descriptor);

    state.prev_percept = Percept{};  // present but empty
    CHECK(predict_next_percept(state).empty());
}

TEST_CASE("surprisal degenerate rules") {
    CHECK(surprisal(std::nullopt, Descriptor(), kCfg) == 0.0);
    CHECK(surprisal(Descriptor(), Descriptor(), kCfg) == 0.0);
    CHECK(surprisal(std::nullopt, tokens({{"a", 1.0}}), kCfg) == 1.0);
    CHECK(surprisal(tokens({{"a", 1.0}}), Descriptor(), kCfg) == 1.0);
}

TEST_CASE("surprisal is one minus embedded similarity") {
    const auto a = tokens({{"a", 1.0}});
    CHECK(surprisal(a, a, kCfg) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(surprisal(a, tokens({{"b", 1.0}}), kCfg) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(surprisal(a, tokens({{"a", 1.0}, {"b", 1.0}}), kCfg) ==
          doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("trigger predicate: surprisal beats boundary, threshold is strict") {
    AgentProfile p;
    p.tau = 0.5;
    Cell plain;
    Cell doorway;
    doorway.event_boundary = true;

    auto d = should_invoke_system2(0.6, p, doorway);
    CHECK(d.fire);
    CHECK(d.trigger == Trigger::Surprisal);

    d = should_invoke_system2(0.5, p, doorway);  // equal to tau: not above
    CHECK(d.fire);
    CHECK(d.trigger == Trigger::Boundary);

    d = should_invoke_system2(0.5, p, plain);
    CHECK_FALSE(d.fire);

    d = should_invoke_system2(0.51, p, plain);
    CHECK(d.fire);
    CHECK(d.trigger == Trigger::Surprisal);
}

TEST_CASE("step_autopilot advances, observes, and tracks history") {
    const Scene s = load_scene(read_file(kFixtures + "/scenes/canonical_glass.json"));
    AgentProfile p;
    p.id = "walker";

    AgentState state;
    state.position = {1, 1};
    state.goal = {7, 1};
    const auto planned = plan_path(s, state.position, state.goal);
    state.path.assign(planned.begin(), planned.end());

    // First step: no history, non-empty percept, maximal surprisal.
    auto out = step_autopilot(s, state, p, kCfg);
    CHECK(state.position == GridPos{2, 1});
    CHECK(state.step == 1);
    CHECK(out.percept.step == 1);
    CHECK(out.percept.position == GridPos{2, 1});
    CHECK(out.surprisal == 1.0);
    CHECK(out.percept.descriptor.weight_of("material", "concrete") == 0.9);

    // Second step: identical percept, zero surprisal.
    out = step_autopilot(s, state, p, kCfg);
    CHECK(state.position == GridPos{3, 1});
    CHECK(out.surprisal == doctest::Approx(0.0).epsilon(1e-12));

    // Third step: concrete leaves the neighborhood.
    out = step_autopilot(s, state, p, kCfg);
    CHECK(state.position == GridPos{4, 1});
    CHECK(out.surprisal > 0.5);

    while (!state.path.empty()) {
        step_autopilot(s, state, p, kCfg);
    }
    CHECK(state.position == GridPos{7, 1});
    CHECK(state.step == 6);
    CHECK_THROWS_AS(step_autopilot(s, state, p, kCfg), PathExhausted);
}

TEST_CASE("trigger names are stable") {
    CHECK(std::string(trigger_name(Trigger::Surprisal)) == "Surprisal");
    CHECK(std::string(trigger_name(Trigger::Boundary)) == "Boundary");
}
