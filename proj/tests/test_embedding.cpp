#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "lce/embedding.hpp"
#include "lce/errors.hpp"
#include "oracles.hpp"

namespace {

std::vector<lce::Concept> columns(Eigen::Index d) {
    std::vector<lce::Concept> out;
    for (Eigen::Index j = 0; j < d; ++j) out.push_back({"c" + std::to_string(j), lce::ConceptCategory::Object});
    return out;
}

std::vector<std::string> rows(Eigen::Index n) {
    std::vector<std::string> out;
    for (Eigen::Index i = 0; i < n; ++i) out.push_back("m" + std::to_string(i));
    return out;
}

lce::LceEmbedding fit(const Eigen::MatrixXd& x, int k) { return lce::fit_pca(x, rows(x.rows()), columns(x.cols()), k); }

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = u(rng);
    return m;
}

oracle::Mat to_mat(const Eigen::MatrixXd& m) {
    oracle::Mat out(static_cast<std::size_t>(m.rows()), oracle::Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return out;
}

}  // namespace

TEST_CASE("agrees with the Jacobi reference up to sign") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = 3 + trial % 8, d = 4 + trial % 11;
        const auto x = random_matrix(rng, n, d);
        const int k = static_cast<int>(std::min(n - 1, d));
        const auto e = fit(x, k);
        const auto ref = oracle::reference_pca(to_mat(x), static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
            double dot = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) dot += e.loadings(c, j) * ref.loadings[c][static_cast<std::size_t>(j)];
            const double s = dot < 0 ? -1.0 : 1.0;
            CHECK(e.explained_variance_ratio(c) == doctest::Approx(ref.ratios[c]).epsilon(1e-9));
            for (Eigen::Index j = 0; j < d; ++j)
                CHECK(std::abs(e.loadings(c, j) - s * ref.loadings[c][static_cast<std::size_t>(j)]) < 1e-9);
            for (Eigen::Index i = 0; i < n; ++i)
                CHECK(std::abs(e.scores(i, c) - s * ref.scores[static_cast<std::size_t>(i)][c]) < 1e-9);
        }
    }
}

TEST_CASE("two distinct rows: one component explains everything") {
    Eigen::MatrixXd x(2, 3);
    x << 0, 1, 2, 4, 1, 0;
    const auto e = fit(x, 1);
    CHECK(e.explained_variance_ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.scores(0, 0) == doctest::Approx(-e.scores(1, 0)).epsilon(1e-12));
}

TEST_CASE("invariants on random data") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = 4 + trial % 9, d = 5 + trial % 7;
        const auto x = random_matrix(rng, n, d);
        const int full = static_cast<int>(std::min(n - 1, d));
        const auto e = fit(x, full);

        const Eigen::MatrixXd gram = e.loadings * e.loadings.transpose();
        CHECK((gram - Eigen::MatrixXd::Identity(full, full)).cwiseAbs().maxCoeff() < 1e-9);

        const Eigen::MatrixXd back = (e.scores * e.loadings).rowwise() + e.column_means.transpose();
        CHECK((back - x).cwiseAbs().maxCoeff() < 1e-8);

        for (int c = 1; c < full; ++c) CHECK(e.explained_variance_ratio(c) <= e.explained_variance_ratio(c - 1) + 1e-15);
        CHECK(e.explained_variance_ratio.sum() == doctest::Approx(1.0).epsilon(1e-9));

        for (int c = 0; c < full; ++c) {
            Eigen::Index arg = 0;
            e.loadings.row(c).cwiseAbs().maxCoeff(&arg);
            CHECK(e.loadings(c, arg) > 0);
        }

        // Bit-identical on a rerun.
        const auto again = fit(x, full);
        CHECK(again.scores == e.scores);
        CHECK(again.loadings == e.loadings);
    }
}

TEST_CASE("projection") {
    std::mt19937_64 rng(9);
    const auto x = random_matrix(rng, 6, 5);
    const auto e = fit(x, 3);
    CHECK(lce::project(e, e.column_means).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        CHECK((lce::project(e, x.row(i).transpose()) - e.scores.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(lce::project(e, Eigen::VectorXd::Zero(4)), lce::ValidationError);
}

TEST_CASE("top loadings by magnitude") {
    Eigen::MatrixXd x(3, 4);
    x << 0, 0, 0, 0,  //
        1, -1, 0.5, 1,  //
        2, -2, 1, 2;
    const auto e = fit(x, 1);
    const auto top = lce::top_loadings(e, 0, 3);
    REQUIRE(top.size() == 3);
    std::vector<std::string> names;
    for (const auto& [name, coef] : top) names.push_back(name);
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::string>{"c0", "c1", "c3"});
    CHECK(std::abs(top[0].second) >= std::abs(top[2].second));
    CHECK(lce::top_loadings(e, 0, 4).back().first == "c2");
    CHECK(lce::top_loadings(e, 0, 100).size() == 4);
    CHECK_THROWS_AS(lce::top_loadings(e, 1, 2), lce::ValidationError);
}

TEST_CASE("top loadings: equal magnitudes ordered by name") {
    lce::LceEmbedding e;
    e.concepts = {{"sky", lce::ConceptCategory::Object}, {"fur", lce::ConceptCategory::Material},
                  {"car", lce::ConceptCategory::Object}};
    e.loadings.resize(1, 3);
    e.loadings << 0.5, -0.5, 0.5;
    const auto top = lce::top_loadings(e, 0, 3);
    CHECK(top[0].first == "car");
    CHECK(top[1].first == "fur");
    CHECK(top[2].first == "sky");
}

TEST_CASE("sign convention") {
    Eigen::VectorXd v(3);
    v << 0.2, -0.9, 0.1;
    lce::normalize_sign(v);
    CHECK(v(1) == 0.9);
    CHECK(v(0) == -0.2);
    Eigen::VectorXd tie(2);
    tie << -0.5, 0.5;
    lce::normalize_sign(tie);
    CHECK(tie(0) == 0.5);
}

TEST_CASE("input errors") {
    Eigen::MatrixXd same(3, 2);
    same << 1, 2, 1, 2, 1, 2;
    CHECK_THROWS_AS(fit(same, 1), lce::ComputationError);
    Eigen::MatrixXd one(1, 3);
    one << 1, 2, 3;
    CHECK_THROWS_AS(fit(one, 1), lce::ValidationError);
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 3, 4, 5, 7;
    CHECK_THROWS_AS(fit(x, 3), lce::ValidationError);
    CHECK_THROWS_AS(fit(x, 0), lce::ValidationError);
}

TEST_CASE("CSV headers") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 3, 4, 5, 7;
    const auto e = fit(x, 2);
    std::ostringstream emb, load, var;
    lce::write_embedding_csv(emb, e);
    lce::write_loadings_csv(load, e);
    lce::write_variance_csv(var, e);
    CHECK(emb.str().rfind("model,pc1,pc2\n", 0) == 0);
    CHECK(load.str().rfind("component,concept,category,coefficient\n", 0) == 0);
    CHECK(var.str().rfind("component,ratio,cumulative\n", 0) == 0);
}
