#pragma once

#include "cogfric/descriptor.hpp"
#include "cogfric/profile.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cogfric {

enum class Occupancy { Open, Blocked, BlockedTransparent };

struct GridPos {
    int x = 0;
    int y = 0;

    bool operator==(const GridPos&) const = default;
    // Row-major order: (y, x).
    bool operator<(const GridPos& other) const {
        if (y != other.y) {
            return y < other.y;
        }
        return x < other.x;
    }
};

struct SemioticSignal {
    Channel channel = Channel::Material;
    std::string token;
    double strength = 0.0;  // in [0,1]

    bool operator==(const SemioticSignal&) const = default;
};

struct Cell {
    Occupancy occupancy = Occupancy::Open;
    std::vector<SemioticSignal> signals;
    bool event_boundary = false;
    double intended_friction = 0.0;  // designer intent mask, in [0,1]

    bool operator==(const Cell&) const = default;
};

// Immutable after load; all queries are pure reads, so one Scene can be
// shared across any number of concurrently running agents.
struct Scene {
    int width = 0;
    int height = 0;
    std::vector<Cell> cells;  // row-major, origin top-left, x right, y down
    std::vector<GridPos> spawns;
    std::vector<GridPos> goals;
    std::string name;
    std::string scene_hash;  // SHA-256 of the canonical serialization

    bool in_bounds(GridPos p) const {
        return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
    }
    const Cell& at(GridPos p) const {
        return cells[static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(p.x)];
    }

    bool operator==(const Scene&) const = default;
};

// What the agent observes at a position: the union of semiotic signals
// within Chebyshev distance <= radius, weighted by the profile.
struct Percept {
    Descriptor descriptor;
    GridPos position;
    int step = 0;
};

// Parses and validates a scene document; computes scene_hash. Loading the
// same bytes twice yields the identical scene_hash.
// Throws ParseError (malformed document) or ValidationError (first
// violation, with field path).
Scene load_scene(std::string_view bytes);

// Canonical scene document (sorted keys, round-trip exact numbers).
// load_scene(serialize_scene(s)) == s for any loaded scene.
std::string serialize_scene(const Scene& scene);

// Collects every validation violation instead of stopping at the first.
// A malformed document yields a single parse-level entry.
std::vector<std::string> scene_violations(std::string_view bytes);

// Fixed affordance reading of physical occupancy, merged with the cell's
// geometry-channel signals. Pure function of (occupancy, geometry signals).
// Throws OutOfBounds.
Descriptor ground_truth_descriptor(const Scene& scene, GridPos pos);

// Union of signals over the Chebyshev neighborhood; entry weight =
// strength * profile channel weight; zero weights omitted; duplicate
// (channel, token) pairs keep the maximum weight. Throws OutOfBounds.
Percept percept_at(const Scene& scene, GridPos pos, int radius, const AgentProfile& profile);

// Cell whose strongest weighted signal dominates the percept neighborhood:
// the locus an episode is attributed to. Ties prefer the nearer cell
// (Chebyshev), then smaller (y, x); a signal-free neighborhood yields pos
// itself. Throws OutOfBounds.
GridPos strongest_signal_cell(const Scene& scene, GridPos pos, int radius,
                              const AgentProfile& profile);

}  // namespace cogfric
