#include "cogfric/embed.hpp"

#include "cogfric/errors.hpp"
#include "cogfric/hash.hpp"

#include <cmath>
#include <string>

namespace cogfric {

namespace {

void check_config(const EmbedConfig& cfg) {
    if (cfg.dimension < 2) {
        throw ValidationError("embed dimension must be >= 2, got " +
                              std::to_string(cfg.dimension));
    }
}

double l2_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> components) {
    if (components.empty()) {
        throw ValidationError("embedding vector has no components");
    }
    for (double x : components) {
        if (!(x >= 0.0)) {
            throw ValidationError("embedding component negative or NaN");
        }
    }
    double norm = l2_norm(components);
    if (norm <= 0.0) {
        throw ValidationError("zero vectors are unrepresentable in the embedding space");
    }
    for (double& x : components) {
        x /= norm;
    }
    return EmbeddingVector(std::move(components));
}

std::size_t token_index(const std::string& channel, const std::string& token,
                        const EmbedConfig& cfg) {
    std::uint64_t h = fnv1a64(channel + ":" + token, cfg.hash_seed);
    return static_cast<std::size_t>(h % static_cast<std::uint64_t>(cfg.dimension));
}

EmbeddingVector embed_descriptor(const Descriptor& d, const EmbedConfig& cfg) {
    check_config(cfg);
    if (d.empty()) {
        throw EmptyDescriptor();
    }
    std::vector<double> comps(static_cast<std::size_t>(cfg.dimension), 0.0);
    for (const auto& [key, weight] : d.entries()) {
        comps[token_index(key.first, key.second, cfg)] += weight;
    }
    return EmbeddingVector::normalized(std::move(comps));
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionMismatch(std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
    }
    double dot = 0.0;
    for (int i = 0; i < a.dimension(); ++i) {
        dot += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    }
    // Unit vectors in the non-negative orthant: clamp rounding spill only.
    if (dot < 0.0) {
        dot = 0.0;
    }
    if (dot > 1.0) {
        dot = 1.0;
    }
    return dot;
}

EmbeddingVector aggregate_embeddings(const std::vector<EmbeddingVector>& vs) {
    if (vs.empty()) {
        throw EmptyList();
    }
    const int dim = vs.front().dimension();
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    for (const auto& v : vs) {
        if (v.dimension() != dim) {
            throw DimensionMismatch(std::to_string(v.dimension()) + " vs " +
                                    std::to_string(dim));
        }
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i] += v[i];
        }
    }
    for (double& x : mean) {
        x /= static_cast<double>(vs.size());
    }
    // Mean of non-negative unit vectors is nonzero, so this never throws.
    return EmbeddingVector::normalized(std::move(mean));
}

}  // namespace cogfric
