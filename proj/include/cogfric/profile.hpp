#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace cogfric {

// The five semiotic channels a scene can annotate.
enum class Channel { Material, Signage, Lighting, Geometry, Affect };

inline constexpr std::array<Channel, 5> kAllChannels = {
    Channel::Material, Channel::Signage, Channel::Lighting, Channel::Geometry, Channel::Affect};

const char* channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);

// Per-profile perception weighting plus the System 2 trigger threshold tau
// and the expectation sample count N. Channel weights are a stand-in for
// demographic/neurodivergent perceptual differences: 0 mutes a channel.
struct AgentProfile {
    std::string id;
    std::array<double, 5> channel_weights{1.0, 1.0, 1.0, 1.0, 1.0};  // indexed by Channel
    double tau = 0.5;
    int n_samples = 1;
    int percept_radius = 1;

    double channel_weight(Channel c) const {
        return channel_weights[static_cast<std::size_t>(c)];
    }
};

// Parses and validates the profile document:
// {"id", "channel_weights":{all five channels}, "tau", "n_samples",
//  "percept_radius"}. All five channel weights must be explicit.
// Throws ParseError / ValidationError.
AgentProfile load_profile(std::string_view bytes);

}  // namespace cogfric
