#include <doctest.h>

#include <random>

#include "lce/errors.hpp"
#include "lce/profile.hpp"
#include "oracles.hpp"

using lce::AbstractionMode;
using lce::ConceptCategory;
using testutil::make_profile;

namespace {

const char* kThreeUnits = R"({
  "model": "SwAV", "layer": "layer4", "layer_width": 2048,
  "units": [
    {"unit": 0, "concept": "car", "category": "object", "iou": 0.12},
    {"unit": 5, "concept": " fur ", "category": "material", "iou": 0.03},
    {"unit": 7, "concept": null, "category": null, "iou": 0.01}
  ]
})";

std::string with_units(const std::string& units, int width = 2048) {
    return R"({"model": "m", "layer": "l", "layer_width": )" + std::to_string(width) + R"(, "units": [)" + units + "]}";
}

}  // namespace

TEST_CASE("parse_profile echoes a valid document") {
    const auto p = lce::parse_profile(kThreeUnits);
    CHECK(p.model_name == "SwAV");
    CHECK(p.layer_name == "layer4");
    CHECK(p.layer_width == 2048);
    REQUIRE(p.units.size() == 3);
    CHECK(p.units[0].concept_name == "car");
    CHECK(p.units[0].category == ConceptCategory::Object);
    CHECK(p.units[1].concept_name == "fur");  // trimmed
    CHECK(p.units[1].category == ConceptCategory::Material);
    CHECK_FALSE(p.units[2].assigned());
    CHECK_FALSE(p.units[2].category.has_value());
    CHECK(p.assigned_count() == 2);
}

TEST_CASE("parse_profile rejects contract violations") {
    auto bad = [](const std::string& doc) { CHECK_THROWS_AS(lce::parse_profile(doc), lce::ValidationError); };
    SUBCASE("duplicate unit id") {
        bad(with_units(R"({"unit": 7, "concept": "car", "category": "object", "iou": 0.1},
                          {"unit": 7, "concept": "sky", "category": "object", "iou": 0.1})"));
    }
    SUBCASE("iou outside [0,1]") {
        bad(with_units(R"({"unit": 1, "concept": "car", "category": "object", "iou": 1.5})"));
        bad(with_units(R"({"unit": 1, "concept": "car", "category": "object", "iou": -0.1})"));
    }
    SUBCASE("unit id beyond layer width") { bad(with_units(R"({"unit": 4, "concept": null, "category": null, "iou": 0})", 4)); }
    SUBCASE("unknown category") { bad(with_units(R"({"unit": 1, "concept": "car", "category": "texture", "iou": 0.1})")); }
    SUBCASE("concept without category") { bad(with_units(R"({"unit": 1, "concept": "car", "category": null, "iou": 0.1})")); }
    SUBCASE("malformed json") { bad("{\"model\": "); }
    SUBCASE("missing field") { bad(R"({"model": "m", "layer": "l", "units": []})"); }
    SUBCASE("zero width") { bad(with_units("", 0)); }
    SUBCASE("negative unit") { bad(with_units(R"({"unit": -1, "concept": null, "category": null, "iou": 0})")); }
}

TEST_CASE("category names round-trip") {
    for (auto c : lce::kCategories) CHECK(lce::parse_category(lce::to_string(c)) == c);
    CHECK_THROWS_AS(lce::parse_category("Object"), lce::ValidationError);  // case-sensitive
}

TEST_CASE("filter_by_iou clears sub-threshold units and keeps them") {
    const auto p = make_profile("m", 16,
                                {{"car", ConceptCategory::Object, 0.03},
                                 {"car", ConceptCategory::Object, 0.04},
                                 {"fur", ConceptCategory::Material, 0.5}});
    const auto f = lce::filter_by_iou(p, 0.04);
    REQUIRE(f.units.size() == 3);
    CHECK_FALSE(f.units[0].assigned());
    CHECK(f.units[1].assigned());  // exactly at threshold is kept
    CHECK(f.units[2].assigned());

    CHECK(lce::filter_by_iou(p, 0.0) == p);
    CHECK(lce::filter_by_iou(p, 1.0).assigned_count() == 0);
    CHECK_THROWS_AS(lce::filter_by_iou(p, 1.01), lce::ValidationError);
    CHECK_THROWS_AS(lce::filter_by_iou(p, -0.1), lce::ValidationError);
}

TEST_CASE("abstract_profile counts per mode") {
    const auto p = make_profile("m", 16,
                                {{"car", ConceptCategory::Object, 0.2},
                                 {"car", ConceptCategory::Object, 0.2},
                                 {"fur", ConceptCategory::Material, 0.2},
                                 {nullptr, ConceptCategory::Object, 0.0}});
    const auto all = lce::abstract_profile(p, AbstractionMode::All);
    CHECK(all[ConceptCategory::Object] == 2);
    CHECK(all[ConceptCategory::Material] == 1);
    CHECK(all[ConceptCategory::Part] == 0);
    CHECK(all[ConceptCategory::Color] == 0);
    const auto uniq = lce::abstract_profile(p, AbstractionMode::Unique);
    CHECK(uniq[ConceptCategory::Object] == 1);
    CHECK(uniq[ConceptCategory::Material] == 1);
    CHECK(uniq[ConceptCategory::Part] == 0);

    const auto empty = make_profile("e", 4, {{nullptr, ConceptCategory::Object, 0.0}});
    for (auto mode : {AbstractionMode::All, AbstractionMode::Unique})
        for (auto c : lce::kCategories) CHECK(lce::abstract_profile(empty, mode)[c] == 0);
}

namespace {

lce::DissectProfile random_profile(std::mt19937_64& rng) {
    const char* names[] = {"car", "sky", "fur", "skin", "wheel", "red", "leg", "brick"};
    const ConceptCategory cats[] = {ConceptCategory::Object, ConceptCategory::Object, ConceptCategory::Material,
                                    ConceptCategory::Material, ConceptCategory::Part, ConceptCategory::Color,
                                    ConceptCategory::Part, ConceptCategory::Material};
    std::uniform_int_distribution<int> pick(0, 8), len(0, 40);
    std::uniform_real_distribution<double> iou(0.0, 1.0);
    std::vector<testutil::UnitSpec> units;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        const int c = pick(rng);
        units.push_back({c == 8 ? nullptr : names[c], c == 8 ? ConceptCategory::Object : cats[c], iou(rng)});
    }
    return make_profile("rand", 64, units);
}

}  // namespace

TEST_CASE("property: filter idempotent and monotone; unique <= all; JSON round-trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> t(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_profile(rng);
        double t1 = t(rng), t2 = t(rng);
        if (t1 > t2) std::swap(t1, t2);

        const auto once = lce::filter_by_iou(p, t1);
        CHECK(lce::filter_by_iou(once, t1) == once);

        const auto hi = lce::filter_by_iou(p, t2);
        for (std::size_t i = 0; i < p.units.size(); ++i)
            if (hi.units[i].assigned()) CHECK(once.units[i].assigned());

        const auto all = lce::abstract_profile(p, AbstractionMode::All);
        const auto uniq = lce::abstract_profile(p, AbstractionMode::Unique);
        std::size_t total = 0;
        for (auto c : lce::kCategories) {
            CHECK(uniq[c] <= all[c]);
            total += all[c];
        }
        CHECK(total == p.assigned_count());

        const auto back = lce::parse_profile(lce::to_json(p));
        CHECK(back == p);
        CHECK(lce::to_json(back) == lce::to_json(p));
    }
}
