#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "univoque/similitude.hpp"

namespace univoque {

using Json = nlohmann::ordered_json;

/// Parsed, validated analysis input.
struct AnalysisConfig {
    std::size_t dimension = 1;
    std::vector<Similitude> maps;
    std::optional<Box> invariant_box;
    int depth = 12;
    bool prune_twins = true;
    double tolerance = 1e-9;
    std::size_t frontier_budget = 1'000'000;

    IFS ifs() const { return IFS(dimension, maps); }
};

namespace detail {

inline Point parse_point(const Json& arr, std::size_t dim, const std::string& where,
                         std::vector<std::string>& errors) {
    std::vector<Rational> coords;
    if (!arr.is_array() || arr.size() != dim) {
        errors.push_back(where + ": expected an array of " + std::to_string(dim) +
                         " rational strings");
        return Point::zero(dim);
    }
    for (const auto& c : arr) {
        if (!c.is_string()) {
            errors.push_back(where + ": rationals must be strings like \"9/17\"");
            return Point::zero(dim);
        }
        try {
            coords.push_back(parse_rational(c.get<std::string>()));
        } catch (const Error& e) {
            errors.push_back(where + ": " + e.what());
            return Point::zero(dim);
        }
    }
    return Point(std::move(coords));
}

inline void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where, std::vector<std::string>& errors) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= key == a;
        if (!ok) errors.push_back(where + ": unknown field '" + key + "'");
    }
}

}  // namespace detail

/// Parses and validates a JSON configuration document; throws ConfigError
/// carrying one message per offending field.
inline AnalysisConfig parse_config(const std::string& text) {
    std::vector<std::string> errors;
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("top level must be a JSON object");

    AnalysisConfig cfg;
    detail::check_keys(doc,
                       {"dimension", "maps", "invariant_box", "depth", "prune_twins",
                        "tolerance", "frontier_budget"},
                       "config", errors);

    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer() ||
        doc["dimension"].get<long long>() < 1) {
        errors.push_back("dimension: required positive integer");
    } else {
        cfg.dimension = doc["dimension"].get<std::size_t>();
    }

    if (!doc.contains("maps") || !doc["maps"].is_array() || doc["maps"].size() < 2) {
        errors.push_back("maps: required array of at least 2 maps");
    } else {
        for (std::size_t i = 0; i < doc["maps"].size(); ++i) {
            const Json& m = doc["maps"][i];
            const std::string where = "maps[" + std::to_string(i) + "]";
            if (!m.is_object()) {
                errors.push_back(where + ": expected an object");
                continue;
            }
            detail::check_keys(m, {"ratio", "orth", "translation"}, where, errors);
            Rational ratio(1, 2);
            if (!m.contains("ratio") || !m["ratio"].is_string()) {
                errors.push_back(where + ".ratio: required rational string");
            } else {
                try {
                    ratio = parse_rational(m["ratio"].get<std::string>());
                    if (!(ratio > 0 && ratio < 1))
                        errors.push_back(where + ".ratio: ratio not in (0,1)");
                } catch (const Error& e) {
                    errors.push_back(where + ".ratio: " + std::string(e.what()));
                }
            }
            SignedPermutation orth = SignedPermutation::identity(cfg.dimension);
            if (m.contains("orth")) {
                const Json& o = m["orth"];
                detail::check_keys(o, {"perm", "signs"}, where + ".orth", errors);
                std::vector<std::size_t> perm;
                std::vector<int> signs;
                bool shape_ok = o.is_object() && o.contains("perm") && o["perm"].is_array() &&
                                o.contains("signs") && o["signs"].is_array() &&
                                o["perm"].size() == cfg.dimension &&
                                o["signs"].size() == cfg.dimension;
                if (!shape_ok) {
                    errors.push_back(where + ".orth: expected perm and signs arrays of length " +
                                     std::to_string(cfg.dimension));
                } else {
                    for (const auto& p : o["perm"]) {
                        const long long v = p.is_number_integer() ? p.get<long long>() : -1;
                        if (v < 1 || v > static_cast<long long>(cfg.dimension)) {
                            errors.push_back(where + ".orth.perm: entries must be axes 1.." +
                                             std::to_string(cfg.dimension));
                            shape_ok = false;
                            break;
                        }
                        perm.push_back(static_cast<std::size_t>(v - 1));
                    }
                    for (const auto& s : o["signs"]) {
                        const long long v = s.is_number_integer() ? s.get<long long>() : 0;
                        if (v != 1 && v != -1) {
                            errors.push_back(where + ".orth.signs: entries must be +-1");
                            shape_ok = false;
                            break;
                        }
                        signs.push_back(static_cast<int>(v));
                    }
                    if (shape_ok) {
                        try {
                            orth = SignedPermutation(perm, signs);
                        } catch (const Error& e) {
                            errors.push_back(where + ".orth: " + std::string(e.what()));
                        }
                    }
                }
            }
            Point trans = Point::zero(cfg.dimension);
            if (!m.contains("translation")) {
                errors.push_back(where + ".translation: required");
            } else {
                trans = detail::parse_point(m["translation"], cfg.dimension,
                                            where + ".translation", errors);
            }
            if (errors.empty()) cfg.maps.emplace_back(ratio, orth, trans);
        }
    }

    if (doc.contains("invariant_box")) {
        const Json& b = doc["invariant_box"];
        detail::check_keys(b, {"lo", "hi"}, "invariant_box", errors);
        if (!b.is_object() || !b.contains("lo") || !b.contains("hi")) {
            errors.push_back("invariant_box: expected lo and hi arrays");
        } else {
            Point lo = detail::parse_point(b["lo"], cfg.dimension, "invariant_box.lo", errors);
            Point hi = detail::parse_point(b["hi"], cfg.dimension, "invariant_box.hi", errors);
            if (errors.empty()) {
                try {
                    cfg.invariant_box = Box(lo, hi);
                } catch (const Error& e) {
                    errors.push_back("invariant_box: " + std::string(e.what()));
                }
            }
        }
    }

    if (doc.contains("depth")) {
        if (!doc["depth"].is_number_integer() || doc["depth"].get<long long>() < 1)
            errors.push_back("depth: must be a positive integer");
        else
            cfg.depth = doc["depth"].get<int>();
    }
    if (doc.contains("prune_twins")) {
        if (!doc["prune_twins"].is_boolean())
            errors.push_back("prune_twins: must be a boolean");
        else
            cfg.prune_twins = doc["prune_twins"].get<bool>();
    }
    if (doc.contains("tolerance")) {
        if (!doc["tolerance"].is_number() || doc["tolerance"].get<double>() <= 0)
            errors.push_back("tolerance: must be a positive number");
        else
            cfg.tolerance = doc["tolerance"].get<double>();
    }
    if (doc.contains("frontier_budget")) {
        if (!doc["frontier_budget"].is_number_integer() ||
            doc["frontier_budget"].get<long long>() < 1)
            errors.push_back("frontier_budget: must be a positive integer");
        else
            cfg.frontier_budget = doc["frontier_budget"].get<std::size_t>();
    }

    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

/// Serializes a config exactly as parse_config accepts it.
inline Json emit_config(const AnalysisConfig& cfg) {
    Json doc;
    doc["dimension"] = cfg.dimension;
    doc["maps"] = Json::array();
    for (const auto& f : cfg.maps) {
        Json m;
        m["ratio"] = format_rational(f.ratio);
        if (!f.orth.is_identity()) {
            Json o;
            o["perm"] = Json::array();
            o["signs"] = Json::array();
            for (std::size_t j = 0; j < f.orth.dim(); ++j) {
                o["perm"].push_back(f.orth.perm[j] + 1);
                o["signs"].push_back(f.orth.signs[j]);
            }
            m["orth"] = o;
        }
        m["translation"] = Json::array();
        for (const auto& c : f.trans.coords) m["translation"].push_back(format_rational(c));
        doc["maps"].push_back(m);
    }
    if (cfg.invariant_box) {
        Json b;
        b["lo"] = Json::array();
        b["hi"] = Json::array();
        for (const auto& c : cfg.invariant_box->lo.coords) b["lo"].push_back(format_rational(c));
        for (const auto& c : cfg.invariant_box->hi.coords) b["hi"].push_back(format_rational(c));
        doc["invariant_box"] = b;
    }
    doc["depth"] = cfg.depth;
    doc["prune_twins"] = cfg.prune_twins;
    doc["tolerance"] = cfg.tolerance;
    doc["frontier_budget"] = cfg.frontier_budget;
    return doc;
}

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

/// FNV-1a over the canonical serialization: the config's full identity.
inline std::string config_hash(const AnalysisConfig& cfg) {
    return detail::fnv1a_hex(emit_config(cfg).dump());
}

/// Cache key: covers only what determines level content (system, box, prune
/// mode), so deeper runs can resume a shallower cache.
inline std::string cache_key(const AnalysisConfig& cfg) {
    Json j = emit_config(cfg);
    j.erase("depth");
    j.erase("tolerance");
    j.erase("frontier_budget");
    return detail::fnv1a_hex(j.dump());
}

}  // namespace univoque
