#include "cogfric/descriptor.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace cogfric {

void Descriptor::set_max(const std::string& channel, const std::string& token, double weight) {
    if (weight <= 0.0) {
        return;
    }
    auto [it, inserted] = entries_.try_emplace({channel, token}, weight);
    if (!inserted && weight > it->second) {
        it->second = weight;
    }
}

void Descriptor::add(const std::string& channel, const std::string& token, double weight) {
    if (weight <= 0.0) {
        return;
    }
    entries_[{channel, token}] += weight;
}

double Descriptor::weight_of(const std::string& channel, const std::string& token) const {
    auto it = entries_.find({channel, token});
    return it == entries_.end() ? 0.0 : it->second;
}

double Descriptor::max_weight() const {
    double m = 0.0;
    for (const auto& [key, w] : entries_) {
        m = std::max(m, w);
    }
    return m;
}

void Descriptor::scale(double c) {
    for (auto& [key, w] : entries_) {
        w *= c;
    }
}

std::vector<std::pair<std::string, double>> Descriptor::top_tokens(int limit) const {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(entries_.size());
    for (const auto& [key, w] : entries_) {
        out.emplace_back(key.first + ":" + key.second, w);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    if (limit >= 0 && out.size() > static_cast<std::size_t>(limit)) {
        out.resize(static_cast<std::size_t>(limit));
    }
    return out;
}

std::string Descriptor::canonical_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, w] : entries_) {
        arr.push_back({key.first, key.second, w});
    }
    return arr.dump();
}

}  // namespace cogfric
