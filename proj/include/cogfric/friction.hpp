#pragma once

#include "cogfric/agent.hpp"
#include "cogfric/embed.hpp"
#include "cogfric/scene.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cogfric {

struct EpisodeEvent;  // episodic.hpp

enum class FrictionClass { Negligible, Productive, Hazardous };

const char* friction_class_name(FrictionClass c);

struct FrictionSample {
    GridPos position;
    double c_f = 0.0;
    double max_signal_strength = 0.0;  // strongest signal in the triggering percept
    Trigger trigger = Trigger::Surprisal;
};

struct CellAggregate {
    long long count = 0;
    double mean_c_f = 0.0;
    double max_c_f = 0.0;
    double mean_signal_strength = 0.0;
};

struct HeatmapDocument;
HeatmapDocument parse_heatmap_json(std::string_view bytes);

// Per-cell accumulation of C_f samples; the source of heatmaps and phantom
// reports. Running means are updated exactly (mean' = mean + (x-mean)/n')
// so aggregation is order-invariant at numerical tolerance, and two fields
// built from disjoint sample lists merge associatively.
class FrictionField {
public:
    FrictionField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    const CellAggregate& at(GridPos p) const;
    const std::vector<CellAggregate>& cells() const { return cells_; }

    // Throws OutOfBounds.
    void accumulate(const FrictionSample& s);

    // Combines counts, means (weighted) and maxima. Throws DimensionMismatch
    // on differing grid sizes.
    void merge(const FrictionField& other);

private:
    friend HeatmapDocument parse_heatmap_json(std::string_view bytes);

    int width_;
    int height_;
    std::vector<CellAggregate> cells_;
};

// Eq-style semantic divergence of expectation from reality: 1 - cosine.
double cognitive_friction(const EmbeddingVector& e_gen, const EmbeddingVector& r_phys);

// Negligible below the hazard threshold; above it, designer intent decides
// between orchestrated (Productive) and unintentional (Hazardous) friction.
FrictionClass classify_friction(double mean_c_f, double intended_friction, double theta_h);

struct PhantomAffordance {
    GridPos position;
    double mean_c_f = 0.0;
    std::string dominant_expected_token;
    std::string dominant_actual_token;
    long long sample_count = 0;
};

struct Thresholds {
    double theta_p = 0.5;    // phantom: minimum mean C_f
    double sigma_min = 0.3;  // phantom: minimum mean signal strength
    double theta_h = 0.3;    // hazard: minimum mean C_f for a non-Negligible class
};

// Cells whose mean C_f and mean signal strength clear both thresholds:
// a strong signal making a promise reality does not keep. Dominant tokens
// come from the cell's events (highest aggregate expectation weight vs
// highest ground-truth weight). Sorted by mean C_f descending, ties (y,x).
std::vector<PhantomAffordance> detect_phantoms(const FrictionField& field, const Scene& scene,
                                               const std::vector<EpisodeEvent>& events,
                                               double theta_p, double sigma_min);

// Canonical heatmap document: sorted keys, reals at fixed 6 decimal places,
// byte-identical for identical fields. `classifications` holds one entry
// per cell, row-major.
std::string export_heatmap_json(const FrictionField& field, const Thresholds& thresholds,
                                const std::vector<FrictionClass>& classifications);

struct HeatmapDocument {
    FrictionField field;
    Thresholds thresholds;
    std::vector<FrictionClass> classifications;
};

// Inverse of export_heatmap_json. Throws ParseError.
HeatmapDocument parse_heatmap_json(std::string_view bytes);

// Canonical phantom report with plain-language descriptions.
std::string export_phantoms_json(const std::vector<PhantomAffordance>& phantoms,
                                 const Thresholds& thresholds);

// Binary PGM (P5), maxval 255, pixel = round(255 * mean_c_f) after rounding
// the mean to 6 decimals, which keeps the image a pure function of the
// exported heatmap JSON. Unsampled cells render as 0.
std::string render_heatmap_image(const FrictionField& field);

}  // namespace cogfric
