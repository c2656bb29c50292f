#include "cogfric/runner.hpp"

#include "cogfric/digest.hpp"
#include "cogfric/errors.hpp"
#include "cogfric/hash.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <deque>
#include <filesystem>
#include <memory>
#include <set>
#include <utility>

namespace cogfric {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    fs::path p(path);
    if (p.is_absolute()) {
        return p.lexically_normal().string();
    }
    return (fs::path(base_dir) / p).lexically_normal().string();
}

json pos_json(GridPos p) {
    return json::array({p.x, p.y});
}

GridPos pos_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
        !j[1].is_number_integer()) {
        throw ParseError(path + ": expected [x, y]");
    }
    return GridPos{j[0].get<int>(), j[1].get<int>()};
}

json sparse_json(const EmbeddingVector& v) {
    json arr = json::array();
    for (std::size_t i = 0; i < static_cast<std::size_t>(v.dimension()); ++i) {
        if (v[i] != 0.0) {
            arr.push_back(json::array({i, v[i]}));
        }
    }
    return arr;
}

json descriptor_json(const Descriptor& d) {
    json arr = json::array();
    for (const auto& [key, w] : d.entries()) {
        arr.push_back(json::array({key.first, key.second, w}));
    }
    return arr;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["embed"] = {{"dimension", cfg.embed.dimension}, {"hash_seed", cfg.embed.hash_seed}};
    j["max_steps"] = cfg.max_steps;
    j["out"] = cfg.out_dir;
    j["profiles"] = cfg.profile_paths;
    if (!cfg.provider.rule_table_path.empty()) {
        j["provider"] = {{"rule_table", cfg.provider.rule_table_path}};
    } else {
        j["provider"] = {{"remote", cfg.provider.remote_url}};
    }
    j["scene"] = cfg.scene_path;
    j["seed"] = cfg.seed;
    j["thresholds"] = {{"sigma_min", cfg.thresholds.sigma_min},
                       {"theta_h", cfg.thresholds.theta_h},
                       {"theta_p", cfg.thresholds.theta_p}};
    return j;
}

RunConfig config_from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object()) {
        throw ConfigError("run config must be a JSON object");
    }
    RunConfig cfg;
    if (!j.contains("scene") || !j["scene"].is_string()) {
        throw ConfigError("run config: \"scene\" (string) is required");
    }
    cfg.scene_path = resolve(j["scene"].get<std::string>(), base_dir);
    if (!j.contains("profiles") || !j["profiles"].is_array() || j["profiles"].empty()) {
        throw ConfigError("run config: \"profiles\" (non-empty array) is required");
    }
    for (const json& p : j["profiles"]) {
        if (!p.is_string()) {
            throw ConfigError("run config: profile entries must be strings");
        }
        cfg.profile_paths.push_back(resolve(p.get<std::string>(), base_dir));
    }
    if (!j.contains("provider") || !j["provider"].is_object()) {
        throw ConfigError("run config: \"provider\" (object) is required");
    }
    const json& jp = j["provider"];
    const bool has_table = jp.contains("rule_table");
    const bool has_remote = jp.contains("remote");
    if (has_table == has_remote) {
        throw ConfigError("run config: exactly one of provider.rule_table / provider.remote");
    }
    if (has_table) {
        if (!jp["rule_table"].is_string()) {
            throw ConfigError("run config: provider.rule_table must be a string");
        }
        cfg.provider.rule_table_path = resolve(jp["rule_table"].get<std::string>(), base_dir);
    } else {
        if (!jp["remote"].is_string()) {
            throw ConfigError("run config: provider.remote must be a string");
        }
        cfg.provider.remote_url = jp["remote"].get<std::string>();
    }
    if (j.contains("embed")) {
        if (!j["embed"].is_object()) {
            throw ConfigError("run config: \"embed\" must be an object");
        }
        if (j["embed"].contains("dimension")) {
            if (!j["embed"]["dimension"].is_number_integer()) {
                throw ConfigError("run config: embed.dimension must be an integer");
            }
            cfg.embed.dimension = j["embed"]["dimension"].get<int>();
        }
        if (j["embed"].contains("hash_seed")) {
            if (!j["embed"]["hash_seed"].is_number_integer() &&
                !j["embed"]["hash_seed"].is_number_unsigned()) {
                throw ConfigError("run config: embed.hash_seed must be an integer");
            }
            cfg.embed.hash_seed = j["embed"]["hash_seed"].get<std::uint64_t>();
        }
    }
    if (cfg.embed.dimension < 2) {
        throw ConfigError("run config: embed.dimension must be >= 2");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            throw ConfigError("run config: seed must be a 64-bit unsigned integer");
        }
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("thresholds")) {
        const json& jt = j["thresholds"];
        if (!jt.is_object()) {
            throw ConfigError("run config: \"thresholds\" must be an object");
        }
        for (const char* key : {"theta_p", "sigma_min", "theta_h"}) {
            if (jt.contains(key) && !jt[key].is_number()) {
                throw ConfigError(std::string("run config: thresholds.") + key +
                                  " must be a number");
            }
        }
        if (jt.contains("theta_p")) {
            cfg.thresholds.theta_p = jt["theta_p"].get<double>();
        }
        if (jt.contains("sigma_min")) {
            cfg.thresholds.sigma_min = jt["sigma_min"].get<double>();
        }
        if (jt.contains("theta_h")) {
            cfg.thresholds.theta_h = jt["theta_h"].get<double>();
        }
        for (const double v :
             {cfg.thresholds.theta_p, cfg.thresholds.sigma_min, cfg.thresholds.theta_h}) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ConfigError("run config: thresholds must lie in [0,1]");
            }
        }
    }
    if (j.contains("max_steps")) {
        if (!j["max_steps"].is_number_integer()) {
            throw ConfigError("run config: max_steps must be an integer");
        }
        cfg.max_steps = j["max_steps"].get<int>();
    }
    if (cfg.max_steps < 1) {
        throw ConfigError("run config: max_steps must be >= 1");
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) {
            throw ConfigError("run config: \"out\" must be a string");
        }
        cfg.out_dir = resolve(j["out"].get<std::string>(), base_dir);
    } else {
        cfg.out_dir = resolve("out", base_dir);
    }
    return cfg;
}

const char* kOutputNames[] = {"events.jsonl", "heatmap.json", "heatmap.pgm", "phantoms.json"};

}  // namespace

RunConfig parse_run_config(std::string_view bytes, const std::string& base_dir) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw ConfigError("run config is not valid JSON");
    }
    return config_from_json(doc, base_dir);
}

RunConfig load_run_config(const std::string& path) {
    const std::string bytes = read_file(path);
    return parse_run_config(bytes, fs::path(path).parent_path().string());
}

std::uint64_t event_seed(std::uint64_t run_seed, const std::string& agent_id, int step) {
    std::string bytes = agent_id;
    bytes.push_back('\0');
    const auto s = static_cast<std::uint64_t>(step);
    for (int i = 0; i < 8; ++i) {
        bytes.push_back(static_cast<char>((s >> (8 * i)) & 0xff));
    }
    return fnv1a64(bytes, run_seed);
}

RunResult simulate_run(const RunConfig& cfg) {
    if (cfg.max_steps < 1) {
        throw ConfigError("max_steps must be >= 1");
    }
    if (cfg.provider.rule_table_path.empty() == cfg.provider.remote_url.empty()) {
        throw ConfigError("exactly one expectation provider must be configured");
    }
    if (cfg.profile_paths.empty()) {
        throw ConfigError("at least one profile is required");
    }

    RunManifest manifest;
    manifest.artifact_version = kArtifactVersion;
    manifest.config = cfg;
    manifest.started_utc = now_utc();

    const std::string scene_bytes = read_file(cfg.scene_path);
    manifest.input_digests[cfg.scene_path] = sha256_hex(scene_bytes);
    Scene scene = load_scene(scene_bytes);
    manifest.scene_hash = scene.scene_hash;

    std::vector<AgentProfile> profiles;
    std::set<std::string> profile_ids;
    for (const std::string& path : cfg.profile_paths) {
        const std::string bytes = read_file(path);
        manifest.input_digests[path] = sha256_hex(bytes);
        profiles.push_back(load_profile(bytes));
        if (!profile_ids.insert(profiles.back().id).second) {
            throw ConfigError("duplicate profile id: " + profiles.back().id);
        }
    }

    std::unique_ptr<ExpectationProvider> provider;
    if (!cfg.provider.rule_table_path.empty()) {
        const std::string bytes = read_file(cfg.provider.rule_table_path);
        const std::string digest = sha256_hex(bytes);
        manifest.input_digests[cfg.provider.rule_table_path] = digest;
        provider = std::make_unique<RuleTableProvider>(RuleTable::from_json(bytes),
                                                       "rule_table:" + digest);
    } else {
        provider = std::make_unique<RemoteProvider>(cfg.provider.remote_url);
    }
    manifest.provider_identity = provider->identity();

    FrictionField field(scene.width, scene.height);
    std::vector<EventRecord> events;

    for (const AgentProfile& profile : profiles) {
        for (const GridPos spawn : scene.spawns) {
            for (const GridPos goal : scene.goals) {
                AgentSummary summary;
                summary.agent_id = profile.id + "@(" + std::to_string(spawn.x) + "," +
                                   std::to_string(spawn.y) + ")->(" + std::to_string(goal.x) +
                                   "," + std::to_string(goal.y) + ")";
                summary.profile_id = profile.id;
                summary.spawn = spawn;
                summary.goal = goal;

                std::vector<GridPos> path;
                try {
                    path = plan_path(scene, spawn, goal);
                } catch (const NoPath& e) {
                    summary.failure = e.what();
                    manifest.agents.push_back(std::move(summary));
                    continue;
                }

                AgentState state;
                state.position = spawn;
                state.goal = goal;
                state.path.assign(path.begin(), path.end());

                FrictionField local(scene.width, scene.height);
                while (!state.path.empty() && state.step < cfg.max_steps) {
                    const StepOutcome out = step_autopilot(scene, state, profile, cfg.embed);
                    const TriggerDecision decision =
                        should_invoke_system2(out.surprisal, profile, scene.at(state.position));
                    if (!decision.fire) {
                        state.mode = AgentMode::Autopilot;
                        continue;
                    }
                    state.mode = AgentMode::Episodic;

                    EventRecord rec;
                    rec.agent_id = summary.agent_id;
                    rec.step = state.step;
                    rec.agent_position = state.position;
                    rec.trigger = decision.trigger;
                    const std::uint64_t seed =
                        event_seed(cfg.seed, summary.agent_id, state.step);
                    try {
                        Expectation exp = generate_expectation(
                            *provider, out.percept.descriptor, profile, cfg.embed, seed);
                        const GridPos focus = strongest_signal_cell(
                            scene, state.position, profile.percept_radius, profile);
                        Descriptor truth = ground_truth_descriptor(scene, focus);
                        EmbeddingVector r_phys = embed_descriptor(truth, cfg.embed);
                        const double c_f = cognitive_friction(exp.e_gen, r_phys);
                        const FrictionClass cls = classify_friction(
                            c_f, scene.at(focus).intended_friction, cfg.thresholds.theta_h);
                        const double max_signal = out.percept.descriptor.max_weight();
                        std::string narrative = compose_narrative(
                            state.step, focus, decision.trigger, exp.aggregate, truth, c_f, cls);
                        local.accumulate(
                            FrictionSample{focus, c_f, max_signal, decision.trigger});
                        rec.episode = EpisodeEvent{state.step,
                                                   focus,
                                                   decision.trigger,
                                                   std::move(exp.e_gen),
                                                   std::move(r_phys),
                                                   c_f,
                                                   c_f,
                                                   cls,
                                                   std::move(narrative),
                                                   std::move(exp.samples_digest),
                                                   std::move(exp.aggregate),
                                                   std::move(truth),
                                                   max_signal,
                                                   state.position};
                        summary.events += 1;
                    } catch (const ProviderError& e) {
                        rec.skipped = true;
                        rec.cause = e.what();
                        summary.skipped += 1;
                    } catch (const EmptyExpectation& e) {
                        rec.skipped = true;
                        rec.cause = e.what();
                        summary.skipped += 1;
                    }
                    events.push_back(std::move(rec));
                }
                summary.steps_taken = state.step;
                summary.reached_goal = state.position == goal;
                field.merge(local);
                manifest.agents.push_back(std::move(summary));
            }
        }
    }

    std::vector<FrictionClass> classifications;
    classifications.reserve(field.cells().size());
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            const GridPos pos{x, y};
            classifications.push_back(classify_friction(field.at(pos).mean_c_f,
                                                        scene.at(pos).intended_friction,
                                                        cfg.thresholds.theta_h));
        }
    }

    std::vector<EpisodeEvent> episodes;
    for (const EventRecord& rec : events) {
        if (rec.episode) {
            episodes.push_back(*rec.episode);
        }
    }
    std::vector<PhantomAffordance> phantoms = detect_phantoms(
        field, scene, episodes, cfg.thresholds.theta_p, cfg.thresholds.sigma_min);

    manifest.ended_utc = now_utc();
    return RunResult{std::move(scene),        std::move(field), std::move(classifications),
                     std::move(events),       std::move(phantoms), std::move(manifest)};
}

std::string event_record_json(const EventRecord& rec) {
    json j;
    j["agent_id"] = rec.agent_id;
    j["agent_position"] = pos_json(rec.agent_position);
    j["step"] = rec.step;
    j["trigger"] = trigger_name(rec.trigger);
    if (rec.skipped) {
        j["status"] = "skipped";
        j["cause"] = rec.cause;
        return j.dump();
    }
    const EpisodeEvent& ev = *rec.episode;
    j["status"] = "ok";
    j["position"] = pos_json(ev.position);
    j["c_f"] = ev.c_f;
    j["delta"] = ev.delta;
    j["classification"] = friction_class_name(ev.classification);
    j["e_gen"] = sparse_json(ev.e_gen);
    j["r_phys"] = sparse_json(ev.r_phys);
    j["expected"] = descriptor_json(ev.expected);
    j["found"] = descriptor_json(ev.found);
    j["max_signal_strength"] = ev.max_signal_strength;
    j["narrative"] = ev.narrative;
    j["samples_digest"] = ev.samples_digest;
    return j.dump();
}

std::string serialize_manifest(const RunManifest& manifest) {
    json j;
    json agents = json::array();
    for (const AgentSummary& a : manifest.agents) {
        json ja;
        ja["agent_id"] = a.agent_id;
        ja["events"] = a.events;
        ja["failure"] = a.failure;
        ja["goal"] = pos_json(a.goal);
        ja["profile"] = a.profile_id;
        ja["reached_goal"] = a.reached_goal;
        ja["skipped"] = a.skipped;
        ja["spawn"] = pos_json(a.spawn);
        ja["steps_taken"] = a.steps_taken;
        agents.push_back(std::move(ja));
    }
    j["agents"] = std::move(agents);
    j["artifact_version"] = manifest.artifact_version;
    j["config"] = config_json(manifest.config);
    j["ended_utc"] = manifest.ended_utc;
    j["input_digests"] = manifest.input_digests;
    j["output_digests"] = manifest.output_digests;
    j["provider_identity"] = manifest.provider_identity;
    j["scene_hash"] = manifest.scene_hash;
    j["started_utc"] = manifest.started_utc;
    return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view bytes) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ParseError("manifest is not valid JSON");
    }
    for (const char* key : {"agents", "artifact_version", "config", "ended_utc", "input_digests",
                            "output_digests", "provider_identity", "scene_hash", "started_utc"}) {
        if (!doc.contains(key)) {
            throw ParseError(std::string("manifest missing key: ") + key);
        }
    }
    RunManifest m;
    m.artifact_version = doc["artifact_version"].get<std::string>();
    m.config = config_from_json(doc["config"], "");
    m.scene_hash = doc["scene_hash"].get<std::string>();
    m.provider_identity = doc["provider_identity"].get<std::string>();
    m.started_utc = doc["started_utc"].get<std::string>();
    m.ended_utc = doc["ended_utc"].get<std::string>();
    if (!doc["agents"].is_array()) {
        throw ParseError("manifest agents must be an array");
    }
    for (std::size_t i = 0; i < doc["agents"].size(); ++i) {
        const json& ja = doc["agents"][i];
        const std::string path = "agents[" + std::to_string(i) + "]";
        AgentSummary a;
        a.agent_id = ja.at("agent_id").get<std::string>();
        a.profile_id = ja.at("profile").get<std::string>();
        a.spawn = pos_from_json(ja.at("spawn"), path + ".spawn");
        a.goal = pos_from_json(ja.at("goal"), path + ".goal");
        a.steps_taken = ja.at("steps_taken").get<int>();
        a.reached_goal = ja.at("reached_goal").get<bool>();
        a.events = ja.at("events").get<long long>();
        a.skipped = ja.at("skipped").get<long long>();
        a.failure = ja.at("failure").get<std::string>();
        m.agents.push_back(std::move(a));
    }
    if (!doc["input_digests"].is_object() || !doc["output_digests"].is_object()) {
        throw ParseError("manifest digest maps must be objects");
    }
    for (const auto& [key, val] : doc["input_digests"].items()) {
        m.input_digests[key] = val.get<std::string>();
    }
    for (const auto& [key, val] : doc["output_digests"].items()) {
        m.output_digests[key] = val.get<std::string>();
    }
    return m;
}

std::map<std::string, std::string> render_outputs(const RunResult& result) {
    std::string events_bytes;
    for (const EventRecord& rec : result.events) {
        events_bytes += event_record_json(rec);
        events_bytes += "\n";
    }
    std::map<std::string, std::string> outputs;
    outputs["events.jsonl"] = std::move(events_bytes);
    outputs["heatmap.json"] = export_heatmap_json(result.field, result.manifest.config.thresholds,
                                                  result.classifications);
    outputs["heatmap.pgm"] = render_heatmap_image(result.field);
    outputs["phantoms.json"] =
        export_phantoms_json(result.phantoms, result.manifest.config.thresholds);
    return outputs;
}

RunManifest write_outputs(RunResult& result, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir + ": " + ec.message());
    }
    const std::map<std::string, std::string> outputs = render_outputs(result);
    for (const auto& [name, bytes] : outputs) {
        write_file((fs::path(dir) / name).string(), bytes);
        result.manifest.output_digests[name] = sha256_hex(bytes);
    }
    write_file((fs::path(dir) / "manifest.json").string(),
               serialize_manifest(result.manifest));
    return result.manifest;
}

ReplayReport replay_manifest(const std::string& manifest_path) {
    ReplayReport report;
    const RunManifest manifest = parse_manifest(read_file(manifest_path));

    for (const auto& [path, digest] : manifest.input_digests) {
        std::string bytes;
        try {
            bytes = read_file(path);
        } catch (const IoError& e) {
            report.mismatches.push_back("input " + path + ": " + e.what());
            continue;
        }
        if (sha256_hex(bytes) != digest) {
            report.mismatches.push_back("input " + path + ": digest mismatch");
        }
    }
    if (!report.mismatches.empty()) {
        return report;  // inputs changed, a re-run would not be comparable
    }

    for (const char* name : kOutputNames) {
        const auto it = manifest.output_digests.find(name);
        if (it == manifest.output_digests.end()) {
            report.mismatches.push_back(std::string("manifest lacks digest for ") + name);
            continue;
        }
        const std::string on_disk =
            (fs::path(manifest_path).parent_path() / name).string();
        try {
            if (sha256_hex(read_file(on_disk)) != it->second) {
                report.mismatches.push_back(std::string("file ") + name + ": digest mismatch");
            }
        } catch (const IoError& e) {
            report.mismatches.push_back(std::string("file ") + name + ": " + e.what());
        }
    }

    RunResult rerun = simulate_run(manifest.config);
    const std::map<std::string, std::string> outputs = render_outputs(rerun);
    for (const auto& [name, bytes] : outputs) {
        const auto it = manifest.output_digests.find(name);
        if (it != manifest.output_digests.end() && sha256_hex(bytes) != it->second) {
            report.mismatches.push_back("replay " + name + ": digest mismatch");
        }
    }

    report.ok = report.mismatches.empty();
    return report;
}

}  // namespace cogfric
