#pragma once

#include "cogfric/embed.hpp"
#include "cogfric/profile.hpp"
#include "cogfric/scene.hpp"

#include <deque>
#include <optional>
#include <vector>

namespace cogfric {

enum class Trigger { Surprisal, Boundary };

const char* trigger_name(Trigger t);

enum class AgentMode { Autopilot, Episodic };

struct AgentState {
    GridPos position;
    GridPos goal;
    std::deque<GridPos> path;  // remaining; front is the next cell, back is the goal
    int step = 0;
    std::optional<Percept> prev_percept;
    AgentMode mode = AgentMode::Autopilot;
};

// Shortest 4-connected path over Open cells (Blocked and BlockedTransparent
// are both impassable: the planner is physical, not perceptual). Ties are
// broken by fixed neighbor order north, east, south, west. Returns the
// sequence excluding start, including goal; empty when start == goal.
// Throws InvalidEndpoint / NoPath.
std::vector<GridPos> plan_path(const Scene& scene, GridPos start, GridPos goal);

// Persistence model: System 1 expects the world to look like it just did.
// Throws NoHistory when no percept has been observed yet. A present but
// empty previous percept is returned as-is; it acts as an absent
// prediction in surprisal().
Descriptor predict_next_percept(const AgentState& state);

// 1 - cosine similarity of the embedded descriptors. Degenerate rules make
// it total: exactly one side empty/absent -> 1.0, both empty -> 0.0.
double surprisal(const std::optional<Descriptor>& predicted, const Descriptor& actual,
                 const EmbedConfig& cfg);

struct TriggerDecision {
    bool fire = false;
    Trigger trigger = Trigger::Surprisal;
};

// Fires with Surprisal when s > tau; otherwise with Boundary when the cell
// is an event boundary. Surprisal takes precedence when both hold.
TriggerDecision should_invoke_system2(double s, const AgentProfile& profile, const Cell& cell);

struct StepOutcome {
    Percept percept;
    double surprisal = 0.0;
};

// One System 1 tick: advance to the path head, observe, compare against the
// persistence prediction, update history. Throws PathExhausted when the
// agent is already at the goal.
StepOutcome step_autopilot(const Scene& scene, AgentState& state, const AgentProfile& profile,
                           const EmbedConfig& cfg);

}  // namespace cogfric
