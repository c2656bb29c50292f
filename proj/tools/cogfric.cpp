#include "cogfric/digest.hpp"
#include "cogfric/errors.hpp"
#include "cogfric/friction.hpp"
#include "cogfric/runner.hpp"
#include "cogfric/scene.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

int cmd_run(const std::string& config_path, const CLI::Option* seed_opt, std::uint64_t seed,
            const std::string& out_dir) {
    cogfric::RunConfig cfg = cogfric::load_run_config(config_path);
    if (seed_opt->count() > 0) {
        cfg.seed = seed;
    }
    if (!out_dir.empty()) {
        cfg.out_dir = std::filesystem::absolute(out_dir).lexically_normal().string();
    }
    cogfric::RunResult result = cogfric::simulate_run(cfg);
    result.manifest.config = cfg;
    cogfric::write_outputs(result, cfg.out_dir);
    for (const cogfric::AgentSummary& a : result.manifest.agents) {
        std::cout << a.agent_id << ": steps=" << a.steps_taken << " events=" << a.events
                  << " skipped=" << a.skipped
                  << (a.reached_goal ? " reached goal" : " did not reach goal");
        if (!a.failure.empty()) {
            std::cout << " (" << a.failure << ")";
        }
        std::cout << "\n";
    }
    std::cout << "phantom affordances: " << result.phantoms.size() << "\n";
    std::cout << "outputs written to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_validate_scene(const std::string& path) {
    const std::vector<std::string> violations =
        cogfric::scene_violations(cogfric::read_file(path));
    if (!violations.empty()) {
        for (const std::string& v : violations) {
            std::cout << v << "\n";
        }
        return 1;
    }
    const cogfric::Scene scene = cogfric::load_scene(cogfric::read_file(path));
    std::cout << "scene ok: " << scene.name << " (" << scene.width << "x" << scene.height
              << ")\n";
    return 0;
}

int cmd_render_heatmap(const std::string& heatmap_path, const std::string& out_path) {
    const cogfric::HeatmapDocument doc =
        cogfric::parse_heatmap_json(cogfric::read_file(heatmap_path));
    cogfric::write_file(out_path, cogfric::render_heatmap_image(doc.field));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_replay(const std::string& manifest_path) {
    const cogfric::ReplayReport report = cogfric::replay_manifest(manifest_path);
    if (!report.ok) {
        for (const std::string& m : report.mismatches) {
            std::cerr << m << "\n";
        }
        return 1;
    }
    std::cout << "replay ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic dual-process navigation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    CLI::App* run = app.add_subcommand("run", "simulate a config and write all outputs");
    run->add_option("--config", config_path, "run config JSON")->required();
    CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "override the output directory");

    std::string scene_path;
    CLI::App* validate =
        app.add_subcommand("validate-scene", "check a scene document, printing violations");
    validate->add_option("scene", scene_path, "scene JSON")->required();

    std::string heatmap_path;
    std::string pgm_path;
    CLI::App* render = app.add_subcommand("render-heatmap", "render heatmap JSON to a PGM image");
    render->add_option("heatmap", heatmap_path, "heatmap JSON")->required();
    render->add_option("--out", pgm_path, "output PGM path")->required();

    std::string manifest_path;
    CLI::App* replay =
        app.add_subcommand("replay", "re-run a manifest and verify every recorded digest");
    replay->add_option("--manifest", manifest_path, "manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seed_opt, seed, out_dir);
        }
        if (validate->parsed()) {
            return cmd_validate_scene(scene_path);
        }
        if (render->parsed()) {
            return cmd_render_heatmap(heatmap_path, pgm_path);
        }
        if (replay->parsed()) {
            return cmd_replay(manifest_path);
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
