#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cogfric {

// Weighted multiset of channel:token pairs. The common symbolic currency of
// percepts, expectations and ground truth. Entries are keyed by
// (channel, token), so duplicates cannot exist; iteration order is the
// canonical (channel, token) lexicographic order. Weights are always
// strictly positive: non-positive weights are dropped on insertion.
class Descriptor {
public:
    using Key = std::pair<std::string, std::string>;  // (channel, token)

    Descriptor() = default;

    // Keeps the larger weight when the pair is already present.
    void set_max(const std::string& channel, const std::string& token, double weight);

    // Adds to the existing weight (used for probability-weighted aggregates).
    void add(const std::string& channel, const std::string& token, double weight);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::map<Key, double>& entries() const { return entries_; }

    // Weight of (channel, token), or 0 when absent.
    double weight_of(const std::string& channel, const std::string& token) const;

    // Largest entry weight; 0 for an empty descriptor.
    double max_weight() const;

    // Scales every weight by c > 0.
    void scale(double c);

    // Entries as "channel:token" labels ordered by weight descending, then
    // label ascending; at most `limit` entries (limit < 0 means all).
    std::vector<std::pair<std::string, double>> top_tokens(int limit = -1) const;

    // Canonical serialization: [["channel","token",weight], ...] in
    // (channel, token) order. Stable bytes for stable input.
    std::string canonical_json() const;

    bool operator==(const Descriptor& other) const { return entries_ == other.entries_; }

private:
    std::map<Key, double> entries_;
};

}  // namespace cogfric
