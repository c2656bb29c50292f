#include "cogfric/episodic.hpp"

#include "cogfric/digest.hpp"
#include "cogfric/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace cogfric {

using nlohmann::json;

namespace {

constexpr double kProbabilitySumTolerance = 1e-9;

// 53-bit mantissa draw in [0,1); engine output is fully specified by the
// standard, so the stream is identical on every platform.
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool pattern_matches(const ExpectationRule& rule, const Descriptor& percept) {
    for (const PatternEntry& e : rule.pattern) {
        if (percept.weight_of(e.channel, e.token) < e.min_strength) {
            return false;
        }
        if (percept.weight_of(e.channel, e.token) <= 0.0) {
            return false;  // token absent entirely
        }
    }
    return true;
}

Descriptor parse_entries(const json& arr, const std::string& path) {
    if (!arr.is_array()) {
        throw ParseError(path + ": expected an array of [channel, token, weight]");
    }
    Descriptor d;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string epath = path + "[" + std::to_string(i) + "]";
        const json& e = arr[i];
        if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() ||
            !e[2].is_number()) {
            throw ParseError(epath + ": expected [channel, token, weight]");
        }
        const auto channel = e[0].get<std::string>();
        const auto token = e[1].get<std::string>();
        const double w = e[2].get<double>();
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ValidationError(epath + ": weight must be finite and > 0");
        }
        if (!seen.insert({channel, token}).second) {
            throw ValidationError(epath + ": duplicate (channel, token) pair");
        }
        d.set_max(channel, token, w);
    }
    return d;
}

json entries_json(const Descriptor& d) {
    json arr = json::array();
    for (const auto& [key, w] : d.entries()) {
        arr.push_back({key.first, key.second, w});
    }
    return arr;
}

std::vector<RuleOutcome> matched_outcomes(const RuleTable& table, const Descriptor& percept) {
    if (const ExpectationRule* rule = match_rule(table, percept)) {
        return rule->outcomes;
    }
    return {RuleOutcome{percept, 1.0}};  // fallback: the percept itself
}

}  // namespace

RuleTable::RuleTable(std::vector<ExpectationRule> rules) : rules_(std::move(rules)) {
    std::set<int> priorities;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const ExpectationRule& r = rules_[i];
        const std::string path = "rules[" + std::to_string(i) + "]";
        if (r.pattern.empty()) {
            throw ValidationError(path + ".pattern: must be non-empty");
        }
        if (r.outcomes.empty()) {
            throw ValidationError(path + ".outcomes: must be non-empty");
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < r.outcomes.size(); ++j) {
            const RuleOutcome& o = r.outcomes[j];
            if (!(o.probability > 0.0)) {
                throw ValidationError(path + ".outcomes[" + std::to_string(j) +
                                      "].p: probability must be > 0");
            }
            if (o.descriptor.empty()) {
                throw ValidationError(path + ".outcomes[" + std::to_string(j) +
                                      "].entries: outcome descriptor must be non-empty");
            }
            sum += o.probability;
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
            throw ValidationError(path + ".outcomes: probabilities sum to " +
                                  std::to_string(sum) + ", expected 1");
        }
        if (!priorities.insert(r.priority).second) {
            throw ValidationError(path + ".priority: duplicate priority " +
                                  std::to_string(r.priority));
        }
    }
    std::sort(rules_.begin(), rules_.end(),
              [](const ExpectationRule& a, const ExpectationRule& b) {
                  return a.priority > b.priority;
              });
}

RuleTable RuleTable::from_json(std::string_view bytes) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw ParseError("rule table document is not valid JSON");
    }
    if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
        throw ParseError("rule table: expected {\"rules\": [...]}");
    }
    std::vector<ExpectationRule> rules;
    const json& jrules = doc["rules"];
    for (std::size_t i = 0; i < jrules.size(); ++i) {
        const std::string path = "rules[" + std::to_string(i) + "]";
        const json& jr = jrules[i];
        if (!jr.is_object()) {
            throw ParseError(path + ": expected an object");
        }
        ExpectationRule rule;
        if (!jr.contains("pattern") || !jr["pattern"].is_array()) {
            throw ParseError(path + ".pattern: expected an array");
        }
        for (std::size_t j = 0; j < jr["pattern"].size(); ++j) {
            const json& jp = jr["pattern"][j];
            const std::string ppath = path + ".pattern[" + std::to_string(j) + "]";
            if (!jp.is_array() || jp.size() != 3 || !jp[0].is_string() || !jp[1].is_string() ||
                !jp[2].is_number()) {
                throw ParseError(ppath + ": expected [channel, token, min_strength]");
            }
            const double min_s = jp[2].get<double>();
            if (!(min_s >= 0.0 && min_s <= 1.0)) {
                throw ValidationError(ppath + ": min strength out of range [0,1]");
            }
            rule.pattern.push_back({jp[0].get<std::string>(), jp[1].get<std::string>(), min_s});
        }
        if (!jr.contains("outcomes") || !jr["outcomes"].is_array()) {
            throw ParseError(path + ".outcomes: expected an array");
        }
        for (std::size_t j = 0; j < jr["outcomes"].size(); ++j) {
            const json& jo = jr["outcomes"][j];
            const std::string opath = path + ".outcomes[" + std::to_string(j) + "]";
            if (!jo.is_object() || !jo.contains("entries") || !jo.contains("p") ||
                !jo["p"].is_number()) {
                throw ParseError(opath + ": expected {\"entries\": [...], \"p\": num}");
            }
            rule.outcomes.push_back(
                {parse_entries(jo["entries"], opath + ".entries"), jo["p"].get<double>()});
        }
        if (!jr.contains("priority") || !jr["priority"].is_number_integer()) {
            throw ParseError(path + ".priority: expected an integer");
        }
        rule.priority = jr["priority"].get<int>();
        rules.push_back(std::move(rule));
    }
    return RuleTable(std::move(rules));
}

const ExpectationRule* match_rule(const RuleTable& table, const Descriptor& percept) {
    for (const ExpectationRule& rule : table.rules()) {  // priority descending
        if (pattern_matches(rule, percept)) {
            return &rule;
        }
    }
    return nullptr;
}

std::vector<ExpectationSample> sample_expectations(const RuleTable& table,
                                                   const Descriptor& percept, int n,
                                                   std::mt19937_64& rng) {
    const std::vector<RuleOutcome> outcomes = matched_outcomes(table, percept);
    std::vector<ExpectationSample> samples;
    samples.reserve(static_cast<std::size_t>(n));
    const double weight = 1.0 / static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        const double u = u01(rng);
        double cdf = 0.0;
        const RuleOutcome* chosen = &outcomes.back();
        for (const RuleOutcome& o : outcomes) {
            cdf += o.probability;
            if (u < cdf) {
                chosen = &o;
                break;
            }
        }
        samples.push_back({chosen->descriptor, weight});
    }
    return samples;
}

EmbeddingVector expected_embedding(const RuleTable& table, const Descriptor& percept,
                                   const EmbedConfig& cfg) {
    const std::vector<RuleOutcome> outcomes = matched_outcomes(table, percept);
    std::vector<double> mix(static_cast<std::size_t>(cfg.dimension), 0.0);
    for (const RuleOutcome& o : outcomes) {
        const EmbeddingVector e = embed_descriptor(o.descriptor, cfg);
        for (std::size_t i = 0; i < mix.size(); ++i) {
            mix[i] += o.probability * e[i];
        }
    }
    return EmbeddingVector::normalized(std::move(mix));
}

RuleTableProvider::RuleTableProvider(RuleTable table, std::string identity)
    : table_(std::move(table)), identity_(std::move(identity)) {}

std::vector<ExpectationSample> RuleTableProvider::sample(const Descriptor& percept, int n,
                                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_expectations(table_, percept, n, rng);
}

RemoteProvider::RemoteProvider(std::string url, double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {
    // Split scheme://host:port from the request path.
    auto scheme_end = url_.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("remote provider url must include a scheme: " + url_);
    }
    auto path_start = url_.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = url_;
        path_ = "/";
    } else {
        scheme_host_port_ = url_.substr(0, path_start);
        path_ = url_.substr(path_start);
    }
}

std::vector<ExpectationSample> RemoteProvider::sample(const Descriptor& percept, int n,
                                                      std::uint64_t seed) {
    json request;
    request["percept"] = {{"entries", entries_json(percept)}};
    request["n"] = n;
    request["seed"] = seed;

    httplib::Client client(scheme_host_port_);
    const auto secs = static_cast<time_t>(timeout_seconds_);
    const auto usecs =
        static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Result res = client.Post(path_, request.dump(), "application/json");
    if (!res) {
        throw ProviderError("request to " + url_ + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ProviderError("provider returned status " + std::to_string(res->status));
    }

    json body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded() || !body.is_object() || !body.contains("samples") ||
        !body["samples"].is_array()) {
        throw ProviderError("malformed provider response body");
    }
    const json& jsamples = body["samples"];
    if (static_cast<int>(jsamples.size()) != n) {
        throw ProviderError("provider returned " + std::to_string(jsamples.size()) +
                            " samples, expected " + std::to_string(n));
    }
    std::vector<ExpectationSample> samples;
    samples.reserve(jsamples.size());
    const double weight = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < jsamples.size(); ++i) {
        const json& js = jsamples[i];
        if (!js.is_object() || !js.contains("entries")) {
            throw ProviderError("sample " + std::to_string(i) + " missing entries");
        }
        try {
            samples.push_back({parse_entries(js["entries"], "samples[" + std::to_string(i) + "]"),
                               weight});
        } catch (const std::runtime_error& e) {
            throw ProviderError(e.what());
        }
    }
    return samples;
}

std::string serialize_samples(const std::vector<ExpectationSample>& samples) {
    json arr = json::array();
    for (const ExpectationSample& s : samples) {
        arr.push_back(entries_json(s.descriptor));
    }
    return arr.dump();
}

Expectation generate_expectation(ExpectationProvider& provider, const Descriptor& percept,
                                 const AgentProfile& profile, const EmbedConfig& cfg,
                                 std::uint64_t seed) {
    const std::vector<ExpectationSample> samples =
        provider.sample(percept, profile.n_samples, seed);

    std::vector<EmbeddingVector> embedded;
    embedded.reserve(samples.size());
    Descriptor aggregate;
    for (const ExpectationSample& s : samples) {
        if (s.descriptor.empty()) {
            continue;
        }
        embedded.push_back(embed_descriptor(s.descriptor, cfg));
        for (const auto& [key, w] : s.descriptor.entries()) {
            aggregate.add(key.first, key.second, s.weight * w);
        }
    }
    if (embedded.empty()) {
        throw EmptyExpectation();
    }
    return Expectation{aggregate_embeddings(embedded), sha256_hex(serialize_samples(samples)),
                       std::move(aggregate)};
}

std::string compose_narrative(int step, GridPos pos, Trigger trigger, const Descriptor& expected,
                              const Descriptor& found, double c_f,
                              FrictionClass classification) {
    auto join = [](const std::vector<std::pair<std::string, double>>& tokens) {
        std::string out;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            out += tokens[i].first;
        }
        return out.empty() ? std::string("nothing") : out;
    };
    char cf_text[32];
    std::snprintf(cf_text, sizeof(cf_text), "%.3f", c_f);
    return "[step " + std::to_string(step) + "] at (" + std::to_string(pos.x) + "," +
           std::to_string(pos.y) + ") trigger=" + trigger_name(trigger) + ": expected " +
           join(expected.top_tokens(3)) + ", found " + join(found.top_tokens()) +
           "; C_f=" + cf_text + " (" + friction_class_name(classification) + ")";
}

}  // namespace cogfric
