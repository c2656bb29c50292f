#include "cogfric/friction.hpp"

#include "cogfric/episodic.hpp"
#include "cogfric/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace cogfric {

using nlohmann::json;

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double quantize6(double v) {
    return static_cast<double>(std::llround(v * 1e6)) / 1e6;
}

std::string escaped(const std::string& s) {
    return json(s).dump();  // quoted and escaped
}

const char* kClassNames[] = {"Negligible", "Productive", "Hazardous"};

FrictionClass class_from_name(const std::string& name) {
    for (int i = 0; i < 3; ++i) {
        if (name == kClassNames[i]) {
            return static_cast<FrictionClass>(i);
        }
    }
    throw ParseError("unknown friction class: " + name);
}

}  // namespace

const char* friction_class_name(FrictionClass c) {
    return kClassNames[static_cast<int>(c)];
}

FrictionField::FrictionField(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw ValidationError("friction field dimensions must be positive");
    }
    cells_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
}

const CellAggregate& FrictionField::at(GridPos p) const {
    if (p.x < 0 || p.x >= width_ || p.y < 0 || p.y >= height_) {
        throw OutOfBounds("(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")");
    }
    return cells_[static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width_) +
                  static_cast<std::size_t>(p.x)];
}

void FrictionField::accumulate(const FrictionSample& s) {
    if (s.position.x < 0 || s.position.x >= width_ || s.position.y < 0 ||
        s.position.y >= height_) {
        throw OutOfBounds("(" + std::to_string(s.position.x) + "," +
                          std::to_string(s.position.y) + ")");
    }
    CellAggregate& c =
        cells_[static_cast<std::size_t>(s.position.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(s.position.x)];
    c.count += 1;
    const double n = static_cast<double>(c.count);
    c.mean_c_f += (s.c_f - c.mean_c_f) / n;
    c.mean_signal_strength += (s.max_signal_strength - c.mean_signal_strength) / n;
    c.max_c_f = std::max(c.max_c_f, s.c_f);
}

void FrictionField::merge(const FrictionField& other) {
    if (other.width_ != width_ || other.height_ != height_) {
        throw DimensionMismatch("cannot merge fields of different sizes");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        CellAggregate& a = cells_[i];
        const CellAggregate& b = other.cells_[i];
        if (b.count == 0) {
            continue;
        }
        const double total = static_cast<double>(a.count + b.count);
        const double wb = static_cast<double>(b.count) / total;
        a.mean_c_f += (b.mean_c_f - a.mean_c_f) * wb;
        a.mean_signal_strength += (b.mean_signal_strength - a.mean_signal_strength) * wb;
        a.max_c_f = std::max(a.max_c_f, b.max_c_f);
        a.count += b.count;
    }
}

double cognitive_friction(const EmbeddingVector& e_gen, const EmbeddingVector& r_phys) {
    return 1.0 - cosine_sim(e_gen, r_phys);
}

FrictionClass classify_friction(double mean_c_f, double intended_friction, double theta_h) {
    if (mean_c_f < theta_h) {
        return FrictionClass::Negligible;
    }
    return intended_friction >= 0.5 ? FrictionClass::Productive : FrictionClass::Hazardous;
}

std::vector<PhantomAffordance> detect_phantoms(const FrictionField& field, const Scene& scene,
                                               const std::vector<EpisodeEvent>& events,
                                               double theta_p, double sigma_min) {
    (void)scene;
    std::map<GridPos, std::pair<Descriptor, Descriptor>> by_cell;  // expected, found
    for (const EpisodeEvent& ev : events) {
        auto& [expected, found] = by_cell[ev.position];
        for (const auto& [key, w] : ev.expected.entries()) {
            expected.add(key.first, key.second, w);
        }
        for (const auto& [key, w] : ev.found.entries()) {
            found.add(key.first, key.second, w);
        }
    }

    std::vector<PhantomAffordance> phantoms;
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            const GridPos pos{x, y};
            const CellAggregate& agg = field.at(pos);
            if (agg.count == 0 || agg.mean_c_f < theta_p ||
                agg.mean_signal_strength < sigma_min) {
                continue;
            }
            PhantomAffordance p;
            p.position = pos;
            p.mean_c_f = agg.mean_c_f;
            p.sample_count = agg.count;
            auto it = by_cell.find(pos);
            if (it != by_cell.end()) {
                auto top_expected = it->second.first.top_tokens(1);
                auto top_found = it->second.second.top_tokens(1);
                if (!top_expected.empty()) {
                    p.dominant_expected_token = top_expected[0].first;
                }
                if (!top_found.empty()) {
                    p.dominant_actual_token = top_found[0].first;
                }
            }
            phantoms.push_back(std::move(p));
        }
    }
    std::sort(phantoms.begin(), phantoms.end(),
              [](const PhantomAffordance& a, const PhantomAffordance& b) {
                  if (a.mean_c_f != b.mean_c_f) {
                      return a.mean_c_f > b.mean_c_f;
                  }
                  if (a.position.y != b.position.y) {
                      return a.position.y < b.position.y;
                  }
                  return a.position.x < b.position.x;
              });
    return phantoms;
}

std::string export_heatmap_json(const FrictionField& field, const Thresholds& thresholds,
                                const std::vector<FrictionClass>& classifications) {
    if (classifications.size() != field.cells().size()) {
        throw DimensionMismatch("one classification per cell required");
    }
    std::string out = "{\"cells\":[";
    for (int y = 0; y < field.height(); ++y) {
        for (int x = 0; x < field.width(); ++x) {
            const std::size_t i =
                static_cast<std::size_t>(y) * static_cast<std::size_t>(field.width()) +
                static_cast<std::size_t>(x);
            const CellAggregate& c = field.cells()[i];
            if (i > 0) {
                out += ",";
            }
            out += "{\"classification\":\"";
            out += friction_class_name(classifications[i]);
            out += "\",\"count\":" + std::to_string(c.count);
            out += ",\"max_c_f\":" + fmt6(c.max_c_f);
            out += ",\"mean_c_f\":" + fmt6(c.mean_c_f);
            out += ",\"mean_signal_strength\":" + fmt6(c.mean_signal_strength);
            out += ",\"unsampled\":";
            out += (c.count == 0 ? "true" : "false");
            out += ",\"x\":" + std::to_string(x);
            out += ",\"y\":" + std::to_string(y) + "}";
        }
    }
    out += "],\"height\":" + std::to_string(field.height());
    out += ",\"thresholds\":{\"sigma_min\":" + fmt6(thresholds.sigma_min);
    out += ",\"theta_h\":" + fmt6(thresholds.theta_h);
    out += ",\"theta_p\":" + fmt6(thresholds.theta_p) + "}";
    out += ",\"width\":" + std::to_string(field.width()) + "}\n";
    return out;
}

HeatmapDocument parse_heatmap_json(std::string_view bytes) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ParseError("heatmap document is not valid JSON");
    }
    for (const char* key : {"cells", "height", "thresholds", "width"}) {
        if (!doc.contains(key)) {
            throw ParseError(std::string("heatmap document missing key: ") + key);
        }
    }
    if (!doc["width"].is_number_integer() || !doc["height"].is_number_integer() ||
        !doc["cells"].is_array() || !doc["thresholds"].is_object()) {
        throw ParseError("heatmap document has wrong value types");
    }
    const int width = doc["width"].get<int>();
    const int height = doc["height"].get<int>();
    if (width < 1 || height < 1) {
        throw ParseError("heatmap dimensions must be positive");
    }
    if (doc["cells"].size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ParseError("heatmap cell count does not match width*height");
    }
    FrictionField field(width, height);
    std::vector<FrictionClass> classifications;
    classifications.reserve(doc["cells"].size());
    for (std::size_t i = 0; i < doc["cells"].size(); ++i) {
        const json& jc = doc["cells"][i];
        for (const char* key : {"classification", "count", "max_c_f", "mean_c_f",
                                "mean_signal_strength", "unsampled", "x", "y"}) {
            if (!jc.contains(key)) {
                throw ParseError("cells[" + std::to_string(i) + "] missing key: " + key);
            }
        }
        CellAggregate agg;
        agg.count = jc["count"].get<long long>();
        agg.mean_c_f = jc["mean_c_f"].get<double>();
        agg.max_c_f = jc["max_c_f"].get<double>();
        agg.mean_signal_strength = jc["mean_signal_strength"].get<double>();
        const int x = jc["x"].get<int>();
        const int y = jc["y"].get<int>();
        if (x < 0 || x >= width || y < 0 || y >= height ||
            static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x) != i) {
            throw ParseError("cells[" + std::to_string(i) + "] out of row-major order");
        }
        field.cells_[i] = agg;
        classifications.push_back(class_from_name(jc["classification"].get<std::string>()));
    }
    const json& jt = doc["thresholds"];
    Thresholds thresholds;
    for (const char* key : {"sigma_min", "theta_h", "theta_p"}) {
        if (!jt.contains(key) || !jt[key].is_number()) {
            throw ParseError(std::string("thresholds missing key: ") + key);
        }
    }
    thresholds.sigma_min = jt["sigma_min"].get<double>();
    thresholds.theta_h = jt["theta_h"].get<double>();
    thresholds.theta_p = jt["theta_p"].get<double>();
    return HeatmapDocument{std::move(field), thresholds, std::move(classifications)};
}

std::string export_phantoms_json(const std::vector<PhantomAffordance>& phantoms,
                                 const Thresholds& thresholds) {
    std::string out = "{\"phantoms\":[";
    for (std::size_t i = 0; i < phantoms.size(); ++i) {
        const PhantomAffordance& p = phantoms[i];
        if (i > 0) {
            out += ",";
        }
        const std::string cell = "(" + std::to_string(p.position.x) + "," +
                                 std::to_string(p.position.y) + ")";
        out += "{\"description\":" +
               escaped("strong signal at " + cell + " invites " + p.dominant_expected_token +
                       " but the cell is " + p.dominant_actual_token + " (mean C_f " +
                       fmt6(p.mean_c_f) + " over " + std::to_string(p.sample_count) + " events)");
        out += ",\"dominant_actual_token\":" + escaped(p.dominant_actual_token);
        out += ",\"dominant_expected_token\":" + escaped(p.dominant_expected_token);
        out += ",\"mean_c_f\":" + fmt6(p.mean_c_f);
        out += ",\"sample_count\":" + std::to_string(p.sample_count);
        out += ",\"x\":" + std::to_string(p.position.x);
        out += ",\"y\":" + std::to_string(p.position.y) + "}";
    }
    out += "],\"thresholds\":{\"sigma_min\":" + fmt6(thresholds.sigma_min);
    out += ",\"theta_p\":" + fmt6(thresholds.theta_p) + "}}\n";
    return out;
}

std::string render_heatmap_image(const FrictionField& field) {
    std::string out = "P5\n" + std::to_string(field.width()) + " " +
                      std::to_string(field.height()) + "\n255\n";
    out.reserve(out.size() + field.cells().size());
    for (const CellAggregate& c : field.cells()) {
        const long pixel = std::lround(255.0 * quantize6(c.mean_c_f));
        out.push_back(static_cast<char>(static_cast<unsigned char>(
            std::clamp(pixel, 0L, 255L))));
    }
    return out;
}

}  // namespace cogfric
