#include "cogfric/scene.hpp"

#include "cogfric/digest.hpp"
#include "cogfric/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace cogfric {

using nlohmann::json;

const char* channel_name(Channel c) {
    switch (c) {
    case Channel::Material: return "material";
    case Channel::Signage: return "signage";
    case Channel::Lighting: return "lighting";
    case Channel::Geometry: return "geometry";
    case Channel::Affect: return "affect";
    }
    return "?";
}

std::optional<Channel> channel_from_name(std::string_view name) {
    for (Channel c : kAllChannels) {
        if (name == channel_name(c)) {
            return c;
        }
    }
    return std::nullopt;
}

namespace {

std::string pos_str(GridPos p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

// Shape/type problems are ParseError; value constraints are ValidationError.
const json& require_key(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(path + ": missing required key \"" + std::string(key) + "\"");
    }
    return *it;
}

int require_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw ParseError(path + ": expected an integer");
    }
    return v.get<int>();
}

double require_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ParseError(path + ": expected a number");
    }
    return v.get<double>();
}

std::string require_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw ParseError(path + ": expected a string");
    }
    return v.get<std::string>();
}

bool valid_token(const std::string& token) {
    if (token.empty()) {
        return false;
    }
    for (char c : token) {
        if (c == ':' || std::isspace(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

GridPos parse_coord(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) {
        throw ParseError(path + ": expected a [x,y] pair");
    }
    return GridPos{require_int(v[0], path + "[0]"), require_int(v[1], path + "[1]")};
}

// Builds the Scene while reporting violations. With collect == nullptr the
// first violation throws; otherwise all violations are gathered and the
// (possibly inconsistent) scene is still returned for inspection.
Scene build_scene(const json& doc, std::vector<std::string>* collect) {
    auto violate = [&](const std::string& msg) {
        if (collect) {
            collect->push_back(msg);
        } else {
            throw ValidationError(msg);
        }
    };

    if (!doc.is_object()) {
        throw ParseError("top level: expected an object");
    }

    Scene scene;
    scene.name = require_string(require_key(doc, "name", "top level"), "name");
    scene.width = require_int(require_key(doc, "width", "top level"), "width");
    scene.height = require_int(require_key(doc, "height", "top level"), "height");
    if (scene.width < 1) {
        violate("width: must be a positive integer");
        scene.width = 1;
    }
    if (scene.height < 1) {
        violate("height: must be a positive integer");
        scene.height = 1;
    }

    const json& cells = require_key(doc, "cells", "top level");
    if (!cells.is_array()) {
        throw ParseError("cells: expected an array");
    }
    const std::size_t expected =
        static_cast<std::size_t>(scene.width) * static_cast<std::size_t>(scene.height);
    if (cells.size() != expected) {
        violate("cells: length " + std::to_string(cells.size()) + " does not match width*height " +
                std::to_string(expected));
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string path = "cells[" + std::to_string(i) + "]";
        const json& jc = cells[i];
        if (!jc.is_object()) {
            throw ParseError(path + ": expected an object");
        }
        Cell cell;
        const std::string occ = require_string(require_key(jc, "occ", path), path + ".occ");
        if (occ == "open") {
            cell.occupancy = Occupancy::Open;
        } else if (occ == "blocked") {
            cell.occupancy = Occupancy::Blocked;
        } else if (occ == "blocked_transparent") {
            cell.occupancy = Occupancy::BlockedTransparent;
        } else {
            violate(path + ".occ: unknown occupancy \"" + occ + "\"");
        }
        if (auto it = jc.find("boundary"); it != jc.end()) {
            if (!it->is_boolean()) {
                throw ParseError(path + ".boundary: expected a boolean");
            }
            cell.event_boundary = it->get<bool>();
        }
        if (auto it = jc.find("intent"); it != jc.end()) {
            cell.intended_friction = require_number(*it, path + ".intent");
            if (!(cell.intended_friction >= 0.0 && cell.intended_friction <= 1.0)) {
                violate(path + ".intent: intended friction out of range [0,1]");
            }
        }
        if (auto it = jc.find("signals"); it != jc.end()) {
            if (!it->is_array()) {
                throw ParseError(path + ".signals: expected an array");
            }
            std::set<std::pair<std::string, std::string>> seen;
            for (std::size_t j = 0; j < it->size(); ++j) {
                const std::string spath = path + ".signals[" + std::to_string(j) + "]";
                const json& js = (*it)[j];
                if (!js.is_object()) {
                    throw ParseError(spath + ": expected an object");
                }
                SemioticSignal sig;
                const std::string ch =
                    require_string(require_key(js, "ch", spath), spath + ".ch");
                if (auto channel = channel_from_name(ch)) {
                    sig.channel = *channel;
                } else {
                    violate(spath + ".ch: unknown channel \"" + ch + "\"");
                }
                sig.token = require_string(require_key(js, "tok", spath), spath + ".tok");
                if (!valid_token(sig.token)) {
                    violate(spath + ".tok: token must be non-empty without whitespace or ':'");
                }
                sig.strength = require_number(require_key(js, "s", spath), spath + ".s");
                if (!(sig.strength >= 0.0 && sig.strength <= 1.0)) {
                    violate(spath + ".s: strength out of range [0,1]");
                }
                if (!seen.insert({ch, sig.token}).second) {
                    violate(spath + ": duplicate (channel, token) pair \"" + ch + ":" +
                            sig.token + "\" within one cell");
                }
                cell.signals.push_back(std::move(sig));
            }
        }
        scene.cells.push_back(std::move(cell));
    }
    scene.cells.resize(expected);  // keep at() well-defined in collect mode

    auto read_endpoints = [&](const char* key, const char* label, std::vector<GridPos>& out) {
        const json& arr = require_key(doc, key, "top level");
        if (!arr.is_array()) {
            throw ParseError(std::string(key) + ": expected an array");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
            GridPos p = parse_coord(arr[i], path);
            if (!scene.in_bounds(p)) {
                violate(path + ": " + std::string(label) + " " + pos_str(p) + " out of bounds");
            } else if (scene.at(p).occupancy != Occupancy::Open) {
                violate(path + ": " + std::string(label) + " not on Open cell at " + pos_str(p));
            }
            out.push_back(p);
        }
    };
    read_endpoints("spawns", "spawn", scene.spawns);
    read_endpoints("goals", "goal", scene.goals);

    return scene;
}

json scene_document(const Scene& scene) {
    json doc;
    doc["name"] = scene.name;
    doc["width"] = scene.width;
    doc["height"] = scene.height;
    json cells = json::array();
    for (const Cell& cell : scene.cells) {
        json jc;
        switch (cell.occupancy) {
        case Occupancy::Open: jc["occ"] = "open"; break;
        case Occupancy::Blocked: jc["occ"] = "blocked"; break;
        case Occupancy::BlockedTransparent: jc["occ"] = "blocked_transparent"; break;
        }
        json sigs = json::array();
        for (const SemioticSignal& s : cell.signals) {
            sigs.push_back({{"ch", channel_name(s.channel)}, {"tok", s.token}, {"s", s.strength}});
        }
        jc["signals"] = std::move(sigs);
        jc["boundary"] = cell.event_boundary;
        jc["intent"] = cell.intended_friction;
        cells.push_back(std::move(jc));
    }
    doc["cells"] = std::move(cells);
    auto coords = [](const std::vector<GridPos>& ps) {
        json arr = json::array();
        for (GridPos p : ps) {
            arr.push_back({p.x, p.y});
        }
        return arr;
    };
    doc["spawns"] = coords(scene.spawns);
    doc["goals"] = coords(scene.goals);
    return doc;
}

json parse_document(std::string_view bytes) {
    json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
        throw ParseError("document is not valid JSON");
    }
    return doc;
}

}  // namespace

Scene load_scene(std::string_view bytes) {
    Scene scene = build_scene(parse_document(bytes), nullptr);
    scene.scene_hash = sha256_hex(serialize_scene(scene));
    return scene;
}

std::string serialize_scene(const Scene& scene) {
    // nlohmann objects are key-sorted and numbers round-trip exactly, so the
    // dump is the canonical document. scene_hash is derived from these bytes
    // and deliberately not part of them.
    return scene_document(scene).dump();
}

std::vector<std::string> scene_violations(std::string_view bytes) {
    std::vector<std::string> violations;
    try {
        build_scene(parse_document(bytes), &violations);
    } catch (const ParseError& e) {
        violations.push_back(e.what());
    }
    return violations;
}

Descriptor ground_truth_descriptor(const Scene& scene, GridPos pos) {
    if (!scene.in_bounds(pos)) {
        throw OutOfBounds(pos_str(pos));
    }
    const Cell& cell = scene.at(pos);
    Descriptor d;
    switch (cell.occupancy) {
    case Occupancy::Open:
        d.set_max("affordance", "passable", 1.0);
        break;
    case Occupancy::Blocked:
        d.set_max("affordance", "blocked", 1.0);
        break;
    case Occupancy::BlockedTransparent:
        d.set_max("affordance", "blocked", 1.0);
        d.set_max("material", "transparent", 1.0);
        break;
    }
    for (const SemioticSignal& s : cell.signals) {
        if (s.channel == Channel::Geometry) {
            d.set_max(channel_name(s.channel), s.token, s.strength);
        }
    }
    return d;
}

Percept percept_at(const Scene& scene, GridPos pos, int radius, const AgentProfile& profile) {
    if (!scene.in_bounds(pos)) {
        throw OutOfBounds(pos_str(pos));
    }
    Percept percept;
    percept.position = pos;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            GridPos p{pos.x + dx, pos.y + dy};
            if (!scene.in_bounds(p)) {
                continue;
            }
            for (const SemioticSignal& s : scene.at(p).signals) {
                percept.descriptor.set_max(channel_name(s.channel), s.token,
                                           s.strength * profile.channel_weight(s.channel));
            }
        }
    }
    return percept;
}

GridPos strongest_signal_cell(const Scene& scene, GridPos pos, int radius,
                              const AgentProfile& profile) {
    if (!scene.in_bounds(pos)) {
        throw OutOfBounds(pos_str(pos));
    }
    GridPos best = pos;
    double best_weight = 0.0;
    int best_dist = 0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            GridPos p{pos.x + dx, pos.y + dy};
            if (!scene.in_bounds(p)) {
                continue;
            }
            double w = 0.0;
            for (const SemioticSignal& s : scene.at(p).signals) {
                w = std::max(w, s.strength * profile.channel_weight(s.channel));
            }
            if (w <= 0.0) {
                continue;
            }
            const int dist = std::max(std::abs(dx), std::abs(dy));
            const bool wins = w > best_weight ||
                              (w == best_weight && (dist < best_dist ||
                                                    (dist == best_dist && p < best)));
            if (best_weight == 0.0 || wins) {
                best = p;
                best_weight = w;
                best_dist = dist;
            }
        }
    }
    return best;
}

}  // namespace cogfric
