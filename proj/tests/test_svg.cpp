#include <doctest.h>

#include <regex>
#include <set>

#include "lce/errors.hpp"
#include "lce/svg.hpp"

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<std::string> fills_of(const std::string& svg, const std::string& cls) {
    const std::regex re("<rect class=\"" + cls + "\"[^>]*fill=\"(#[0-9a-f]{6})\"");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back((*it)[1]);
    return out;
}

lce::LceEmbedding toy_embedding() {
    lce::LceEmbedding e;
    e.model_names = {"SwAV", "BYOL", "CLIP<v>", "DINO"};
    e.scores.resize(4, 2);
    e.scores << -1, -1, -0.8, -1.2, 2, 0.5, 0.3, 2;
    e.loadings = Eigen::MatrixXd::Identity(2, 2);
    e.explained_variance_ratio.resize(2);
    e.explained_variance_ratio << 0.612, 0.25;
    return e;
}

lce::ClusteringResult toy_clusters() {
    lce::ClusteringResult c;
    c.k = 3;
    c.model_names = {"SwAV", "BYOL", "CLIP<v>", "DINO"};
    c.assignments = {0, 0, 1, 2};
    c.region_labels = {{0, lce::RegionLabel::A}, {1, lce::RegionLabel::B}, {2, lce::RegionLabel::C}};
    c.inertia_curve = {{1, 10}, {2, 4}, {3, 1}, {4, 0}};
    return c;
}

lce::EnsembleGainMatrix toy_gain(double g01, double g02, double g12) {
    lce::EnsembleGainMatrix m;
    m.dataset = "dtd";
    m.model_names = {"a", "b", "c"};
    m.solo_accuracy.resize(3);
    m.solo_accuracy << 0.7, 0.6, 0.5;
    m.gain = Eigen::MatrixXd::Zero(3, 3);
    m.gain(0, 1) = m.gain(1, 0) = g01;
    m.gain(0, 2) = m.gain(2, 0) = g02;
    m.gain(1, 2) = m.gain(2, 1) = g12;
    return m;
}

}  // namespace

TEST_CASE("scatter: one point and label per model, legend per cluster") {
    const auto svg = lce::emit_scatter(toy_embedding(), toy_clusters());
    CHECK(count(svg, "<circle class=\"point\"") == 4);
    CHECK(count(svg, "<text class=\"label\"") == 4);
    CHECK(count(svg, "class=\"legend-entry\"") == 3);
    CHECK(svg.find("CLIP&lt;v&gt;") != std::string::npos);
    CHECK(svg.find("PC1 (61.2% var)") != std::string::npos);
    CHECK(svg.find("PC2 (25.0% var)") != std::string::npos);
    CHECK(svg.find(">A</text>") != std::string::npos);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(lce::emit_scatter(toy_embedding(), toy_clusters()) == svg);
    CHECK_THROWS_AS(lce::emit_scatter(toy_embedding(), toy_clusters(), {0, 2}), lce::ValidationError);
}

TEST_CASE("scatter: members of a cluster share a colour") {
    const auto svg = lce::emit_scatter(toy_embedding(), toy_clusters());
    const std::regex re("<circle class=\"point\"[^>]*fill=\"(#[0-9a-f]{6})\"");
    std::vector<std::string> fills;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        fills.push_back((*it)[1]);
    REQUIRE(fills.size() == 4);
    CHECK(fills[0] == fills[1]);
    CHECK(fills[1] != fills[2]);
    CHECK(fills[2] != fills[3]);
}

TEST_CASE("heatmap: cells, diagonal styling, values and scale") {
    const auto svg = lce::emit_heatmap(toy_gain(0.02, -0.05, 0.01));
    CHECK(count(svg, "<rect class=\"cell\"") == 6);
    CHECK(count(svg, "<rect class=\"cell diagonal\"") == 3);
    CHECK(count(svg, "<text class=\"value\"") == 9);
    CHECK(svg.find(">0.70</text>") != std::string::npos);
    CHECK(svg.find(">-0.05</text>") != std::string::npos);
    CHECK(svg.find("min -0.0500") != std::string::npos);
    CHECK(svg.find("max 0.0200") != std::string::npos);
    const auto cells = fills_of(svg, "cell");
    CHECK(std::set<std::string>(cells.begin(), cells.end()).size() == 3);
    for (const auto& f : fills_of(svg, "cell diagonal")) CHECK(f == "#d9d9d9");
}

TEST_CASE("heatmap: two models and uniform gain") {
    lce::EnsembleGainMatrix m;
    m.dataset = "aircraft";
    m.model_names = {"x", "y"};
    m.solo_accuracy = Eigen::Vector2d(0.4, 0.45);
    m.gain = Eigen::Matrix2d::Zero();
    const auto svg = lce::emit_heatmap(m);
    CHECK(count(svg, "<rect class=\"cell\"") == 2);
    CHECK(count(svg, "<rect class=\"cell diagonal\"") == 2);
    const auto cells = fills_of(svg, "cell");
    REQUIRE(cells.size() == 2);
    CHECK(cells[0] == cells[1]);

    const auto uniform = lce::emit_heatmap(toy_gain(0.01, 0.01, 0.01));
    const auto fills = fills_of(uniform, "cell");
    CHECK(std::set<std::string>(fills.begin(), fills.end()).size() == 1);
}

TEST_CASE("elbow plot marks the chosen k") {
    const auto svg = lce::emit_elbow(toy_clusters());
    CHECK(count(svg, "<circle class=\"elbow\"") == 1);
    CHECK(count(svg, "<circle class=\"k\"") == 3);
    CHECK(count(svg, "<polyline") == 1);
}
