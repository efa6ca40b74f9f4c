#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "lce/concept_matrix.hpp"
#include "lce/errors.hpp"
#include "oracles.hpp"

using lce::ConceptCategory;
using testutil::counted_profile;

TEST_CASE("superset is the ordered union with category totals") {
    const std::vector<lce::DissectProfile> ps{counted_profile("a", {{"car", ConceptCategory::Object, 1}}),
                                              counted_profile("b", {{"fur", ConceptCategory::Material, 1}})};
    const auto s = lce::build_superset(ps);
    REQUIRE(s.size() == 2);
    CHECK(s.concepts()[0] == lce::Concept{"car", ConceptCategory::Object});
    CHECK(s.concepts()[1] == lce::Concept{"fur", ConceptCategory::Material});
    CHECK(s.category_totals() == lce::CategoryCounts{1, 0, 1, 0});
}

TEST_CASE("superset ordering: category first, then name") {
    const std::vector<lce::DissectProfile> ps{counted_profile("a", {{"red", ConceptCategory::Color, 1},
                                                                    {"wheel", ConceptCategory::Part, 1},
                                                                    {"sky", ConceptCategory::Object, 1},
                                                                    {"car", ConceptCategory::Object, 1},
                                                                    {"fur", ConceptCategory::Material, 2}})};
    const auto s = lce::build_superset(ps);
    std::vector<std::string> names;
    for (const auto& c : s.concepts()) names.push_back(c.name);
    CHECK(names == std::vector<std::string>{"car", "sky", "wheel", "fur", "red"});
}

TEST_CASE("superset errors") {
    SUBCASE("conflicting categories") {
        const std::vector<lce::DissectProfile> ps{counted_profile("a", {{"car", ConceptCategory::Object, 1}}),
                                                  counted_profile("b", {{"car", ConceptCategory::Part, 1}})};
        CHECK_THROWS_AS(lce::build_superset(ps), lce::ValidationError);
    }
    SUBCASE("nothing assigned") {
        const std::vector<lce::DissectProfile> ps{testutil::make_profile("a", 4, {{nullptr, ConceptCategory::Object, 0}})};
        CHECK_THROWS_AS(lce::build_superset(ps), lce::ValidationError);
    }
    SUBCASE("no profiles") { CHECK_THROWS_AS(lce::build_superset({}), lce::ValidationError); }
}

TEST_CASE("matrix normalizes by superset category totals") {
    // 67 objects in the superset, model a has 10 units on "car".
    std::vector<std::tuple<std::string, ConceptCategory, int>> objs;
    for (int i = 0; i < 66; ++i) objs.emplace_back("obj" + std::to_string(100 + i), ConceptCategory::Object, 1);
    auto b = counted_profile("b", objs);
    const std::vector<lce::DissectProfile> ps{counted_profile("a", {{"car", ConceptCategory::Object, 10}}), b};
    const auto s = lce::build_superset(ps);
    CHECK(s.total(ConceptCategory::Object) == 67);
    const auto m = lce::build_matrix(ps, s);
    const auto car = static_cast<Eigen::Index>(*s.find("car"));
    CHECK(m.raw_counts(0, car) == 10);
    CHECK(m.normalized(0, car) == 10.0 / 67.0);
    CHECK(m.normalized(1, car) == 0.0);
    CHECK(m.raw_counts.rows() == 2);
    CHECK(m.raw_counts.cols() == 67);
}

TEST_CASE("matrix rejects concepts outside the superset") {
    const std::vector<lce::DissectProfile> small{counted_profile("a", {{"car", ConceptCategory::Object, 1}})};
    const auto s = lce::build_superset(small);
    const std::vector<lce::DissectProfile> more{counted_profile("b", {{"sky", ConceptCategory::Object, 1}})};
    CHECK_THROWS_AS(lce::build_matrix(more, s), lce::ValidationError);
}

TEST_CASE("zero-assignment models stay as zero rows") {
    const std::vector<lce::DissectProfile> ps{counted_profile("a", {{"car", ConceptCategory::Object, 3}}),
                                              testutil::make_profile("random", 8, {{nullptr, ConceptCategory::Object, 0}})};
    const auto m = lce::build_matrix(ps, lce::build_superset(ps));
    CHECK(m.model_names == std::vector<std::string>{"a", "random"});
    CHECK(m.normalized.row(1).isZero(0));
}

TEST_CASE("CSV export header and 9-digit values") {
    const std::vector<lce::DissectProfile> ps{
        counted_profile("a", {{"car", ConceptCategory::Object, 1}, {"sky", ConceptCategory::Object, 2}}),
        counted_profile("b", {{"fur", ConceptCategory::Material, 1}})};
    const auto m = lce::build_matrix(ps, lce::build_superset(ps));
    std::ostringstream norm, raw;
    lce::write_normalized_csv(norm, m);
    lce::write_raw_counts_csv(raw, m);
    CHECK(norm.str() == "model,car,sky,fur\na,0.500000000,1.000000000,0.000000000\nb,0.000000000,0.000000000,1.000000000\n");
    CHECK(raw.str() == "model,car,sky,fur\na,1,2,0\nb,0,0,1\n");
}

TEST_CASE("property: row permutation, cell bounds, nonzero-column subset") {
    std::mt19937_64 rng(11);
    const char* names[] = {"car", "sky", "fur", "skin", "wheel", "red", "leg", "person"};
    const ConceptCategory cats[] = {ConceptCategory::Object, ConceptCategory::Object, ConceptCategory::Material,
                                    ConceptCategory::Material, ConceptCategory::Part, ConceptCategory::Color,
                                    ConceptCategory::Part, ConceptCategory::Object};
    std::uniform_int_distribution<int> count(0, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<lce::DissectProfile> ps;
        for (int m = 0; m < 5; ++m) {
            std::vector<std::tuple<std::string, ConceptCategory, int>> spec;
            for (int c = 0; c < 8; ++c) spec.emplace_back(names[c], cats[c], count(rng));
            ps.push_back(counted_profile("m" + std::to_string(m), spec, 64));
        }
        if (std::all_of(ps.begin(), ps.end(), [](const auto& p) { return p.assigned_count() == 0; })) continue;

        const auto s = lce::build_superset(ps);
        const auto m = lce::build_matrix(ps, s);

        auto perm = ps;
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto mp = lce::build_matrix(perm, lce::build_superset(perm));
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const auto src = std::find(m.model_names.begin(), m.model_names.end(), mp.model_names[i]) - m.model_names.begin();
            CHECK(mp.normalized.row(static_cast<Eigen::Index>(i)) == m.normalized.row(src));
        }

        std::size_t min_total = SIZE_MAX;
        for (auto c : lce::kCategories)
            if (s.total(c) > 0) min_total = std::min(min_total, s.total(c));
        CHECK(m.normalized.minCoeff() >= 0.0);
        CHECK(m.normalized.maxCoeff() <= 64.0 / static_cast<double>(min_total));
        for (Eigen::Index i = 0; i < m.raw_counts.rows(); ++i) CHECK(m.raw_counts.row(i).sum() <= 64);

        // Superset built from the same profiles: every column is used by someone.
        for (Eigen::Index j = 0; j < m.raw_counts.cols(); ++j) CHECK(m.raw_counts.col(j).sum() > 0);
    }
}
