#include "cogfric/agent.hpp"

#include "cogfric/errors.hpp"

#include <array>
#include <limits>
#include <queue>
#include <string>

namespace cogfric {

namespace {

std::string pos_str(GridPos p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

// North, east, south, west: the fixed tie-break order. Origin is top-left
// with y growing downward, so north is y-1.
constexpr std::array<GridPos, 4> kNeighborOrder = {
    GridPos{0, -1}, GridPos{1, 0}, GridPos{0, 1}, GridPos{-1, 0}};

bool walkable(const Scene& scene, GridPos p) {
    return scene.in_bounds(p) && scene.at(p).occupancy == Occupancy::Open;
}

}  // namespace

const char* trigger_name(Trigger t) {
    return t == Trigger::Surprisal ? "Surprisal" : "Boundary";
}

std::vector<GridPos> plan_path(const Scene& scene, GridPos start, GridPos goal) {
    if (!walkable(scene, start)) {
        throw InvalidEndpoint("start " + pos_str(start) + " is not an Open cell in bounds");
    }
    if (!walkable(scene, goal)) {
        throw InvalidEndpoint("goal " + pos_str(goal) + " is not an Open cell in bounds");
    }
    if (start == goal) {
        return {};
    }

    // Breadth-first distance field from the goal, then a greedy descent from
    // the start taking the first neighbor (in N,E,S,W order) that lowers the
    // distance. This realizes the tie-break deterministically at every step.
    constexpr int kUnreached = std::numeric_limits<int>::max();
    std::vector<int> dist(static_cast<std::size_t>(scene.width) *
                              static_cast<std::size_t>(scene.height),
                          kUnreached);
    auto idx = [&](GridPos p) {
        return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(scene.width) +
               static_cast<std::size_t>(p.x);
    };
    std::queue<GridPos> frontier;
    dist[idx(goal)] = 0;
    frontier.push(goal);
    while (!frontier.empty()) {
        GridPos p = frontier.front();
        frontier.pop();
        for (GridPos d : kNeighborOrder) {
            GridPos q{p.x + d.x, p.y + d.y};
            if (walkable(scene, q) && dist[idx(q)] == kUnreached) {
                dist[idx(q)] = dist[idx(p)] + 1;
                frontier.push(q);
            }
        }
    }
    if (dist[idx(start)] == kUnreached) {
        throw NoPath("goal " + pos_str(goal) + " unreachable from " + pos_str(start));
    }

    std::vector<GridPos> path;
    path.reserve(static_cast<std::size_t>(dist[idx(start)]));
    GridPos cur = start;
    while (cur != goal) {
        for (GridPos d : kNeighborOrder) {
            GridPos q{cur.x + d.x, cur.y + d.y};
            if (walkable(scene, q) && dist[idx(q)] == dist[idx(cur)] - 1) {
                cur = q;
                break;
            }
        }
        path.push_back(cur);
    }
    return path;
}

Descriptor predict_next_percept(const AgentState& state) {
    if (!state.prev_percept.has_value()) {
        throw NoHistory();
    }
    return state.prev_percept->descriptor;
}

double surprisal(const std::optional<Descriptor>& predicted, const Descriptor& actual,
                 const EmbedConfig& cfg) {
    const bool have_predicted = predicted.has_value() && !predicted->empty();
    const bool have_actual = !actual.empty();
    if (!have_predicted && !have_actual) {
        return 0.0;  // nothing expected, nothing seen
    }
    if (have_predicted != have_actual) {
        return 1.0;  // maximal surprise
    }
    return 1.0 - cosine_sim(embed_descriptor(*predicted, cfg), embed_descriptor(actual, cfg));
}

TriggerDecision should_invoke_system2(double s, const AgentProfile& profile, const Cell& cell) {
    if (s > profile.tau) {
        return {true, Trigger::Surprisal};
    }
    if (cell.event_boundary) {
        return {true, Trigger::Boundary};
    }
    return {};
}

StepOutcome step_autopilot(const Scene& scene, AgentState& state, const AgentProfile& profile,
                           const EmbedConfig& cfg) {
    if (state.path.empty()) {
        throw PathExhausted();
    }
    std::optional<Descriptor> predicted;
    if (state.prev_percept.has_value()) {
        predicted = predict_next_percept(state);
    }

    state.position = state.path.front();
    state.path.pop_front();
    state.step += 1;

    StepOutcome out;
    out.percept = percept_at(scene, state.position, profile.percept_radius, profile);
    out.percept.step = state.step;
    out.surprisal = surprisal(predicted, out.percept.descriptor, cfg);
    state.prev_percept = out.percept;
    return out;
}

}  // namespace cogfric
