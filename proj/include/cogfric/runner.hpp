#pragma once

#include "cogfric/agent.hpp"
#include "cogfric/episodic.hpp"
#include "cogfric/friction.hpp"
#include "cogfric/profile.hpp"
#include "cogfric/scene.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogfric {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ProviderConfig {
    std::string rule_table_path;  // exactly one of the two is set
    std::string remote_url;
};

struct RunConfig {
    std::string scene_path;
    std::vector<std::string> profile_paths;
    ProviderConfig provider;
    EmbedConfig embed;
    std::uint64_t seed = 0;
    Thresholds thresholds;
    int max_steps = 256;
    std::string out_dir;
};

// Parses {"scene","profiles":[...],"provider":{"rule_table":path}or
// {"remote":url},"embed":{...},"seed","thresholds":{...},"max_steps","out"}
// and resolves relative paths against base_dir. Throws ConfigError.
RunConfig parse_run_config(std::string_view bytes, const std::string& base_dir);

// Reads and parses the config file; relative paths resolve against the
// file's directory. Throws ConfigError / IoError.
RunConfig load_run_config(const std::string& path);

struct AgentSummary {
    std::string agent_id;
    std::string profile_id;
    GridPos spawn;
    GridPos goal;
    int steps_taken = 0;
    bool reached_goal = false;
    long long events = 0;
    long long skipped = 0;
    std::string failure;  // non-empty when the agent could not run at all
};

// One System 2 activation: a full episode, or a skipped record carrying
// the cause. Both appear in events.jsonl and in the manifest counts.
struct EventRecord {
    std::string agent_id;
    int step = 0;
    GridPos agent_position;
    Trigger trigger = Trigger::Surprisal;
    bool skipped = false;
    std::string cause;
    std::optional<EpisodeEvent> episode;
};

struct RunManifest {
    std::string artifact_version;
    RunConfig config;  // echo with resolved paths
    std::string scene_hash;
    std::string provider_identity;  // rule table digest or remote endpoint
    std::string started_utc;
    std::string ended_utc;
    std::vector<AgentSummary> agents;
    std::map<std::string, std::string> input_digests;   // path -> sha256 of raw bytes
    std::map<std::string, std::string> output_digests;  // filename -> sha256
};

struct RunResult {
    Scene scene;
    FrictionField field;
    std::vector<FrictionClass> classifications;  // row-major, from the merged field
    std::vector<EventRecord> events;             // agent order, step order within agent
    std::vector<PhantomAffordance> phantoms;
    RunManifest manifest;  // output_digests filled by write_outputs
};

// Event-local RNG seed: a hash of (run seed, agent id, step), so a draw
// never depends on how many events fired before it.
std::uint64_t event_seed(std::uint64_t run_seed, const std::string& agent_id, int step);

// The full loop: every (profile, spawn, goal) agent walks its planned path
// under System 1; System 2 fires per the trigger predicate and records an
// episode against the cell sourcing the strongest percept signal. Agents
// run in profile order x spawn order x goal order; their local fields
// merge in that order. NoPath is reported in the agent summary and
// ProviderError in a skipped event record, neither aborts the run.
// Throws ConfigError / ParseError / ValidationError / IoError.
RunResult simulate_run(const RunConfig& cfg);

// One canonical JSON line (sorted keys, no trailing newline).
std::string event_record_json(const EventRecord& rec);

std::string serialize_manifest(const RunManifest& manifest);

// Throws ParseError / ConfigError.
RunManifest parse_manifest(std::string_view bytes);

// The four replayable output files as bytes, keyed by filename.
std::map<std::string, std::string> render_outputs(const RunResult& result);

// Writes events.jsonl, heatmap.json, heatmap.pgm, phantoms.json, then
// manifest.json last (holding the other files' digests) into dir,
// creating it if needed. Fills result.manifest.output_digests and returns
// the manifest as written. Throws IoError.
RunManifest write_outputs(RunResult& result, const std::string& dir);

struct ReplayReport {
    bool ok = false;
    std::vector<std::string> mismatches;  // one named entry per failed check
};

// Verifies input files against recorded digests, re-runs the config, and
// compares both the re-run bytes and the on-disk output files against the
// manifest. Throws ParseError / ConfigError / IoError for an unreadable
// manifest; everything else is reported in the mismatch list.
ReplayReport replay_manifest(const std::string& manifest_path);

}  // namespace cogfric
