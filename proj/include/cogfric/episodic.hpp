#pragma once

#include "cogfric/descriptor.hpp"
#include "cogfric/embed.hpp"
#include "cogfric/friction.hpp"
#include "cogfric/profile.hpp"
#include "cogfric/scene.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cogfric {

struct PatternEntry {
    std::string channel;
    std::string token;
    double min_strength = 0.0;
};

struct RuleOutcome {
    Descriptor descriptor;
    double probability = 0.0;
};

// One programmable bias: when the pattern is contained in the percept (with
// strengths at or above the minimums), the agent expects one of the
// outcomes, drawn by probability.
struct ExpectationRule {
    std::vector<PatternEntry> pattern;
    std::vector<RuleOutcome> outcomes;
    int priority = 0;
};

// Priority-ordered rule list with an implicit fallback: when no rule
// matches, the expectation is the percept itself with probability 1.
class RuleTable {
public:
    explicit RuleTable(std::vector<ExpectationRule> rules);

    // Parses {"rules":[{"pattern":[["ch","tok",min_s],...],
    //   "outcomes":[{"entries":[["ch","tok",w],...],"p":num},...],
    //   "priority":int}]}. Throws ParseError / ValidationError.
    static RuleTable from_json(std::string_view bytes);

    const std::vector<ExpectationRule>& rules() const { return rules_; }

private:
    std::vector<ExpectationRule> rules_;  // priority descending
};

// Highest-priority rule whose pattern is a subset of the percept, or
// nullptr for the fallback.
const ExpectationRule* match_rule(const RuleTable& table, const Descriptor& percept);

struct ExpectationSample {
    Descriptor descriptor;
    double weight = 1.0;  // uniform 1/N for sampled providers
};

// N independent draws from the matched rule's outcome table; deterministic
// given (table, percept, n, stream state).
std::vector<ExpectationSample> sample_expectations(const RuleTable& table,
                                                   const Descriptor& percept, int n,
                                                   std::mt19937_64& rng);

// Probability-weighted mean of the outcome embeddings, renormalized: the
// analytic value the sampled aggregate converges to.
EmbeddingVector expected_embedding(const RuleTable& table, const Descriptor& percept,
                                   const EmbedConfig& cfg);

// Where E_gen samples come from: a local rule table or a remote service.
class ExpectationProvider {
public:
    virtual ~ExpectationProvider() = default;

    // Throws ProviderError on failure; never fabricates samples.
    virtual std::vector<ExpectationSample> sample(const Descriptor& percept, int n,
                                                  std::uint64_t seed) = 0;

    // Stable identity recorded in run manifests.
    virtual std::string identity() const = 0;
};

class RuleTableProvider : public ExpectationProvider {
public:
    RuleTableProvider(RuleTable table, std::string identity);

    std::vector<ExpectationSample> sample(const Descriptor& percept, int n,
                                          std::uint64_t seed) override;
    std::string identity() const override { return identity_; }
    const RuleTable& table() const { return table_; }

private:
    RuleTable table_;
    std::string identity_;
};

// Client for the expectation wire protocol. POSTs
//   {"percept":{"entries":[["ch","tok",w],...]},"n":int,"seed":uint64}
// to the configured endpoint and expects
//   {"samples":[{"entries":[["ch","tok",w],...]},...]}
// with exactly n samples. Non-200 status, wrong sample count, or invalid
// weights raise ProviderError.
class RemoteProvider : public ExpectationProvider {
public:
    explicit RemoteProvider(std::string url, double timeout_seconds = 30.0);

    std::vector<ExpectationSample> sample(const Descriptor& percept, int n,
                                          std::uint64_t seed) override;
    std::string identity() const override { return url_; }

private:
    std::string url_;
    std::string scheme_host_port_;
    std::string path_;
    double timeout_seconds_;
};

struct Expectation {
    EmbeddingVector e_gen;
    std::string samples_digest;  // SHA-256 over the canonical sample serialization
    Descriptor aggregate;        // sample-weighted token aggregate, for narratives/reports
};

// Obtains N = profile.n_samples samples, embeds and aggregates them, and
// digests the canonical serialization of all N descriptors.
// Throws ProviderError (propagated) and EmptyExpectation (all samples
// empty, possible only for an empty percept under the fallback).
Expectation generate_expectation(ExpectationProvider& provider, const Descriptor& percept,
                                 const AgentProfile& profile, const EmbedConfig& cfg,
                                 std::uint64_t seed);

// Canonical serialization of a sample list (the digest input).
std::string serialize_samples(const std::vector<ExpectationSample>& samples);

// One System 2 activation record.
struct EpisodeEvent {
    int step = 0;
    GridPos position;  // the cell the episode is attributed to
    Trigger trigger = Trigger::Surprisal;
    EmbeddingVector e_gen;
    EmbeddingVector r_phys;
    double delta = 0.0;  // identical to c_f by construction
    double c_f = 0.0;
    FrictionClass classification = FrictionClass::Negligible;
    std::string narrative;
    std::string samples_digest;
    Descriptor expected;  // aggregate expectation tokens
    Descriptor found;     // ground truth at the attributed cell
    double max_signal_strength = 0.0;
    GridPos agent_position;  // where the agent stood when the episode fired
};

// Deterministic narrative line:
// "[step S] at (x,y) trigger=T: expected <top-3 expectation tokens>, found
//  <ground-truth tokens>; C_f=0.000 (Class)".
std::string compose_narrative(int step, GridPos pos, Trigger trigger, const Descriptor& expected,
                              const Descriptor& found, double c_f, FrictionClass classification);

}  // namespace cogfric
