#include "lce/profile.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "lce/errors.hpp"
#include "lce/format.hpp"

namespace lce {

using nlohmann::json;

std::string_view to_string(ConceptCategory c) {
    switch (c) {
        case ConceptCategory::Object: return "object";
        case ConceptCategory::Part: return "part";
        case ConceptCategory::Material: return "material";
        case ConceptCategory::Color: return "color";
    }
    return "?";
}

ConceptCategory parse_category(std::string_view name) {
    for (auto c : kCategories) {
        if (to_string(c) == name) return c;
    }
    throw ValidationError("unknown concept category '" + std::string(name) + "'");
}

std::string_view to_string(AbstractionMode m) {
    return m == AbstractionMode::All ? "all" : "unique";
}

std::size_t DissectProfile::assigned_count() const {
    std::size_t n = 0;
    for (const auto& u : units) n += u.assigned() ? 1 : 0;
    return n;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(where + ": missing field '" + key + "'");
    return *it;
}

std::size_t as_index(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw ValidationError(what + " must be an integer");
    const auto i = v.get<long long>();
    if (i < 0) throw ValidationError(what + " must be non-negative");
    return static_cast<std::size_t>(i);
}

}  // namespace

DissectProfile parse_profile(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed profile JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("profile document must be a JSON object");

    DissectProfile p;
    const auto& model = require(doc, "model", "profile");
    const auto& layer = require(doc, "layer", "profile");
    if (!model.is_string() || !layer.is_string())
        throw ValidationError("profile: 'model' and 'layer' must be strings");
    p.model_name = trim(model.get<std::string>());
    p.layer_name = layer.get<std::string>();
    if (p.model_name.empty()) throw ValidationError("profile: empty model name");
    p.layer_width = as_index(require(doc, "layer_width", "profile"), "layer_width");
    if (p.layer_width == 0) throw ValidationError("profile: layer_width must be positive");

    const auto& units = require(doc, "units", "profile");
    if (!units.is_array()) throw ValidationError("profile: 'units' must be an array");

    const std::string where = "profile '" + p.model_name + "'";
    std::unordered_set<std::size_t> seen;
    p.units.reserve(units.size());
    for (const auto& u : units) {
        if (!u.is_object()) throw ValidationError(where + ": unit entries must be objects");
        UnitAssignment a;
        a.unit_id = as_index(require(u, "unit", where), where + ": unit");
        if (a.unit_id >= p.layer_width)
            throw ValidationError(where + ": unit " + std::to_string(a.unit_id) +
                                  " >= layer_width " + std::to_string(p.layer_width));
        if (!seen.insert(a.unit_id).second)
            throw ValidationError(where + ": duplicate unit id " + std::to_string(a.unit_id));

        const auto& iou = require(u, "iou", where);
        if (!iou.is_number()) throw ValidationError(where + ": iou must be a number");
        a.iou = iou.get<double>();
        if (!(a.iou >= 0.0 && a.iou <= 1.0))
            throw ValidationError(where + ": iou outside [0,1] on unit " + std::to_string(a.unit_id));

        const auto& concept_field = require(u, "concept", where);
        const auto& category_field = require(u, "category", where);
        if (concept_field.is_null() != category_field.is_null())
            throw ValidationError(where + ": unit " + std::to_string(a.unit_id) +
                                  " must have both concept and category, or neither");
        if (!concept_field.is_null()) {
            if (!concept_field.is_string() || !category_field.is_string())
                throw ValidationError(where + ": concept and category must be strings or null");
            auto name = trim(concept_field.get<std::string>());
            if (name.empty()) throw ValidationError(where + ": empty concept name");
            a.concept_name = std::move(name);
            a.category = parse_category(category_field.get<std::string>());
        }
        p.units.push_back(std::move(a));
    }
    return p;
}

DissectProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open profile file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_profile(ss.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string to_json(const DissectProfile& profile) {
    json units = json::array();
    for (const auto& u : profile.units) {
        json j;
        j["unit"] = u.unit_id;
        j["concept"] = u.concept_name ? json(*u.concept_name) : json(nullptr);
        j["category"] = u.category ? json(std::string(to_string(*u.category))) : json(nullptr);
        j["iou"] = u.iou;
        units.push_back(std::move(j));
    }
    json doc;
    doc["model"] = profile.model_name;
    doc["layer"] = profile.layer_name;
    doc["layer_width"] = profile.layer_width;
    doc["units"] = std::move(units);
    return doc.dump(2) + "\n";
}

DissectProfile filter_by_iou(const DissectProfile& profile, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ValidationError("iou threshold must lie in [0,1]");
    DissectProfile out = profile;
    for (auto& u : out.units) {
        if (u.iou < threshold) {
            u.concept_name.reset();
            u.category.reset();
        }
    }
    return out;
}

AbstractedProfile abstract_profile(const DissectProfile& profile, AbstractionMode mode) {
    AbstractedProfile out;
    out.mode = mode;
    if (mode == AbstractionMode::All) {
        for (const auto& u : profile.units) {
            if (u.assigned()) ++out.counts[index_of(*u.category)];
        }
    } else {
        std::set<std::pair<ConceptCategory, std::string>> distinct;
        for (const auto& u : profile.units) {
            if (u.assigned()) distinct.emplace(*u.category, *u.concept_name);
        }
        for (const auto& [cat, name] : distinct) ++out.counts[index_of(cat)];
    }
    return out;
}

}  // namespace lce
