#include "cogfric/digest.hpp"
#include "cogfric/episodic.hpp"
#include "cogfric/errors.hpp"
#include "cogfric/runner.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <unistd.h>

using namespace cogfric;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kFixtures = COGFRIC_FIXTURES_DIR;

struct TestServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    explicit TestServer(httplib::Server::Handler handler) {
        server.Post("/expect", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        thread.join();
    }

    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/expect";
    }
};

// A server that answers the wire protocol honestly, backed by a rule table
// reseeded per request. Mirrors what a conforming external service does.
httplib::Server::Handler faithful_handler(std::shared_ptr<RuleTable> table) {
    return [table](const httplib::Request& req, httplib::Response& res) {
        const json body = json::parse(req.body);
        Descriptor percept;
        for (const auto& e : body["percept"]["entries"]) {
            percept.set_max(e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<double>());
        }
        std::mt19937_64 rng(body["seed"].get<std::uint64_t>());
        const auto samples = sample_expectations(*table, percept, body["n"].get<int>(), rng);

        json out;
        out["samples"] = json::array();
        for (const auto& s : samples) {
            json entries = json::array();
            for (const auto& [key, w] : s.descriptor.entries()) {
                entries.push_back({key.first, key.second, w});
            }
            out["samples"].push_back({{"entries", entries}});
        }
        res.set_content(out.dump(), "application/json");
    };
}

std::shared_ptr<RuleTable> default_table() {
    return std::make_shared<RuleTable>(
        RuleTable::from_json(read_file(kFixtures + "/rules/default_rules.json")));
}

Descriptor glass_percept() {
    Descriptor d;
    d.set_max("material", "glass", 0.9);
    return d;
}

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("cogfric_wire_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("remote samples equal local samples for the same seed") {
    auto table = default_table();
    TestServer server(faithful_handler(table));
    RemoteProvider remote(server.url());
    RuleTableProvider local(*table, "local");

    for (const std::uint64_t seed : {1ULL, 42ULL, 99ULL}) {
        CHECK(serialize_samples(remote.sample(glass_percept(), 16, seed)) ==
              serialize_samples(local.sample(glass_percept(), 16, seed)));
    }
}

TEST_CASE("requests carry percept entries, n, and seed") {
    std::string seen_body;
    TestServer server([&seen_body](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        json out;
        out["samples"] = json::array();
        for (int i = 0; i < 2; ++i) {
            out["samples"].push_back({{"entries", json::array({{"a", "p", 1.0}})}});
        }
        res.set_content(out.dump(), "application/json");
    });

    RemoteProvider remote(server.url());
    const auto samples = remote.sample(glass_percept(), 2, 7);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].descriptor.weight_of("a", "p") == 1.0);
    CHECK(samples[0].weight == 0.5);

    const json req = json::parse(seen_body);
    CHECK(req["n"] == 2);
    CHECK(req["seed"] == 7);
    CHECK(req["percept"]["entries"] == json::array({{"material", "glass", 0.9}}));
}

TEST_CASE("protocol violations raise ProviderError") {
    auto table = default_table();

    SUBCASE("wrong sample count") {
        TestServer server([](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"samples":[{"entries":[["a","p",1.0]]}]})", "application/json");
        });
        RemoteProvider remote(server.url());
        CHECK_THROWS_AS(remote.sample(glass_percept(), 3, 1), ProviderError);
    }

    SUBCASE("non-positive weight") {
        TestServer server([](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"samples":[{"entries":[["a","p",0.0]]}]})", "application/json");
        });
        RemoteProvider remote(server.url());
        CHECK_THROWS_AS(remote.sample(glass_percept(), 1, 1), ProviderError);
    }

    SUBCASE("http error status") {
        TestServer server([](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("boom", "text/plain");
        });
        RemoteProvider remote(server.url());
        CHECK_THROWS_AS(remote.sample(glass_percept(), 1, 1), ProviderError);
    }

    SUBCASE("unparseable body") {
        TestServer server([](const httplib::Request&, httplib::Response& res) {
            res.set_content("not json at all", "application/json");
        });
        RemoteProvider remote(server.url());
        CHECK_THROWS_AS(remote.sample(glass_percept(), 1, 1), ProviderError);
    }

    SUBCASE("missing samples key") {
        TestServer server([](const httplib::Request&, httplib::Response& res) {
            res.set_content("{}", "application/json");
        });
        RemoteProvider remote(server.url());
        CHECK_THROWS_AS(remote.sample(glass_percept(), 1, 1), ProviderError);
    }

    SUBCASE("connection refused") {
        RemoteProvider remote("http://127.0.0.1:9/expect", 0.5);
        CHECK_THROWS_AS(remote.sample(glass_percept(), 1, 1), ProviderError);
    }
}

TEST_CASE("a run against a faithful remote reproduces the local outputs") {
    TestServer server(faithful_handler(default_table()));
    TempDir dir;

    auto make_config = [&](const json& provider, const std::string& name) {
        json cfg;
        cfg["scene"] = kFixtures + "/scenes/canonical_glass.json";
        cfg["profiles"] = {kFixtures + "/profiles/default.json"};
        cfg["provider"] = provider;
        cfg["seed"] = 42;
        cfg["max_steps"] = 64;
        cfg["thresholds"] = {{"theta_p", 0.5}, {"sigma_min", 0.3}, {"theta_h", 0.3}};
        cfg["out"] = (dir.path / (name + "_out")).string();
        const std::string path = (dir.path / (name + ".json")).string();
        write_file(path, cfg.dump());
        return load_run_config(path);
    };

    const RunResult local = simulate_run(
        make_config({{"rule_table", kFixtures + "/rules/default_rules.json"}}, "local"));
    const RunResult remote = simulate_run(make_config({{"remote", server.url()}}, "remote"));

    const auto local_outputs = render_outputs(local);
    const auto remote_outputs = render_outputs(remote);
    for (const char* name : {"events.jsonl", "heatmap.json", "heatmap.pgm", "phantoms.json"}) {
        CHECK(local_outputs.at(name) == remote_outputs.at(name));
    }
    CHECK(remote.manifest.provider_identity == server.url());
    CHECK(local.manifest.provider_identity != remote.manifest.provider_identity);
}

TEST_CASE("a failing remote degrades to skipped events, not a crash") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("overloaded", "text/plain");
    });
    TempDir dir;

    json cfg;
    cfg["scene"] = kFixtures + "/scenes/canonical_glass.json";
    cfg["profiles"] = {kFixtures + "/profiles/default.json"};
    cfg["provider"] = {{"remote", server.url()}};
    cfg["seed"] = 42;
    cfg["out"] = (dir.path / "out").string();
    const std::string path = (dir.path / "config.json").string();
    write_file(path, cfg.dump());

    const RunResult result = simulate_run(load_run_config(path));
    REQUIRE(result.manifest.agents.size() == 1);
    CHECK(result.manifest.agents[0].reached_goal);
    CHECK(result.manifest.agents[0].events == 0);
    CHECK(result.manifest.agents[0].skipped == 3);
    CHECK(result.phantoms.empty());
    for (const EventRecord& rec : result.events) {
        CHECK(rec.skipped);
        CHECK_FALSE(rec.cause.empty());
        CHECK_FALSE(rec.episode.has_value());
    }
}
