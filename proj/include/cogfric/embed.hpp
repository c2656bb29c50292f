#pragma once

#include "cogfric/descriptor.hpp"

#include <cstdint>
#include <vector>

namespace cogfric {

struct EmbedConfig {
    int dimension = 1024;
    std::uint64_t hash_seed = 0;
};

// Non-negative unit vector in the shared embedding space. Only the factory
// and the embedding/aggregation functions can construct one, so every
// instance is L2-normalized with all components >= 0.
class EmbeddingVector {
public:
    // Validates non-negativity, rejects (near-)zero vectors, renormalizes.
    static EmbeddingVector normalized(std::vector<double> components);

    int dimension() const { return static_cast<int>(components_.size()); }
    double operator[](std::size_t i) const { return components_[i]; }
    const std::vector<double>& components() const { return components_; }

    bool operator==(const EmbeddingVector& other) const {
        return components_ == other.components_;
    }

private:
    explicit EmbeddingVector(std::vector<double> components)
        : components_(std::move(components)) {}

    std::vector<double> components_;
};

// Index assigned to a (channel, token) pair: fnv1a64("channel:token",
// hash_seed) mod dimension.
std::size_t token_index(const std::string& channel, const std::string& token,
                        const EmbedConfig& cfg);

// Feature-hashed bag-of-tokens embedding: weights accumulate at hashed
// indices, result is L2-normalized. Throws EmptyDescriptor on empty input.
EmbeddingVector embed_descriptor(const Descriptor& d, const EmbedConfig& cfg);

// Dot product of two non-negative unit vectors; always in [0,1], symmetric.
// Throws DimensionMismatch.
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

// Component-wise mean, renormalized. Throws EmptyList / DimensionMismatch.
EmbeddingVector aggregate_embeddings(const std::vector<EmbeddingVector>& vs);

}  // namespace cogfric
