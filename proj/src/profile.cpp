#include "cogfric/profile.hpp"

#include "cogfric/errors.hpp"

#include <nlohmann/json.hpp>

namespace cogfric {

using nlohmann::json;

AgentProfile load_profile(std::string_view bytes) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw ParseError("profile document is not valid JSON");
    }
    if (!doc.is_object()) {
        throw ParseError("profile: expected an object");
    }

    AgentProfile p;
    auto get = [&](const char* key) -> const json& {
        auto it = doc.find(key);
        if (it == doc.end()) {
            throw ParseError("profile: missing required key \"" + std::string(key) + "\"");
        }
        return *it;
    };

    if (!get("id").is_string()) {
        throw ParseError("profile.id: expected a string");
    }
    p.id = get("id").get<std::string>();
    if (p.id.empty()) {
        throw ValidationError("profile.id: must be non-empty");
    }

    const json& weights = get("channel_weights");
    if (!weights.is_object()) {
        throw ParseError("profile.channel_weights: expected an object");
    }
    // All five channels explicit, no defaults.
    for (Channel c : kAllChannels) {
        const char* name = channel_name(c);
        auto it = weights.find(name);
        if (it == weights.end()) {
            throw ValidationError("profile.channel_weights: missing channel \"" +
                                  std::string(name) + "\"");
        }
        if (!it->is_number()) {
            throw ParseError("profile.channel_weights." + std::string(name) +
                             ": expected a number");
        }
        const double w = it->get<double>();
        if (!(w >= 0.0 && w <= 1.0)) {
            throw ValidationError("profile.channel_weights." + std::string(name) +
                                  ": weight out of range [0,1]");
        }
        p.channel_weights[static_cast<std::size_t>(c)] = w;
    }

    if (!get("tau").is_number()) {
        throw ParseError("profile.tau: expected a number");
    }
    p.tau = get("tau").get<double>();
    if (!(p.tau >= 0.0 && p.tau <= 1.0)) {
        throw ValidationError("profile.tau: out of range [0,1]");
    }

    if (!get("n_samples").is_number_integer()) {
        throw ParseError("profile.n_samples: expected an integer");
    }
    p.n_samples = get("n_samples").get<int>();
    if (p.n_samples < 1) {
        throw ValidationError("profile.n_samples: must be >= 1");
    }

    if (!get("percept_radius").is_number_integer()) {
        throw ParseError("profile.percept_radius: expected an integer");
    }
    p.percept_radius = get("percept_radius").get<int>();
    if (p.percept_radius < 0) {
        throw ValidationError("profile.percept_radius: must be >= 0");
    }

    return p;
}

}  // namespace cogfric
