#include "lce/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lce/errors.hpp"
#include "lce/format.hpp"
#include "lce/random.hpp"

namespace lce {

namespace {

using Index = Eigen::Index;

double squared_distance(const Eigen::MatrixXd& a, Index i, const Eigen::MatrixXd& b, Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& points, int k, Rng& rng) {
    const Index n = points.rows();
    Eigen::MatrixXd centroids(k, points.cols());
    Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);

    std::vector<double> nearest(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) nearest[static_cast<std::size_t>(i)] = squared_distance(points, i, centroids, 0);

    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : nearest) total += d;
        Index pick = n - 1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            for (Index i = 0; i < n; ++i) {
                const double w = nearest[static_cast<std::size_t>(i)];
                if (w <= 0.0) continue;
                cumulative += w;
                if (cumulative > target) {
                    pick = i;
                    break;
                }
            }
            // Round-off can leave target == total; fall back to the last weighted point.
            if (nearest[static_cast<std::size_t>(pick)] <= 0.0) {
                for (Index i = n - 1; i >= 0; --i) {
                    if (nearest[static_cast<std::size_t>(i)] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        centroids.row(c) = points.row(pick);
        for (Index i = 0; i < n; ++i) {
            auto& d = nearest[static_cast<std::size_t>(i)];
            d = std::min(d, squared_distance(points, i, centroids, c));
        }
    }
    return centroids;
}

struct LloydRun {
    std::vector<int> assignments;
    Eigen::MatrixXd centroids;
    double inertia = 0.0;
    std::vector<double> trace;
};

LloydRun lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids, const KMeansOptions& opt) {
    const Index n = points.rows();
    const int k = static_cast<int>(centroids.rows());
    LloydRun run;
    run.assignments.assign(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points, i, centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d = squared_distance(points, i, centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            auto& a = run.assignments[static_cast<std::size_t>(i)];
            if (a != best) {
                a = best;
                changed = true;
            }
        }

        // Empty-cluster repair: the point farthest from its centroid moves over.
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int a : run.assignments) ++counts[static_cast<std::size_t>(a)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Index far = -1;
            double far_d = -1.0;
            for (Index i = 0; i < n; ++i) {
                const int a = run.assignments[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(a)] <= 1) continue;
                const double d = squared_distance(points, i, centroids, a);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far < 0) throw ComputationError("kmeans: cannot repair empty cluster");
            --counts[static_cast<std::size_t>(run.assignments[static_cast<std::size_t>(far)])];
            run.assignments[static_cast<std::size_t>(far)] = c;
            counts[static_cast<std::size_t>(c)] = 1;
            centroids.row(c) = points.row(far);
            changed = true;
        }

        Eigen::MatrixXd updated = Eigen::MatrixXd::Zero(k, points.cols());
        for (Index i = 0; i < n; ++i) updated.row(run.assignments[static_cast<std::size_t>(i)]) += points.row(i);
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            updated.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
            shift = std::max(shift, (updated.row(c) - centroids.row(c)).norm());
        }
        centroids = std::move(updated);
        run.trace.push_back(inertia_of(points, run.assignments, centroids));

        if (!changed || shift < opt.shift_tolerance) break;
    }

    // Single-point transfers (Hartigan): move a point when the exact change
    // in inertia, counting both centroid updates, is negative. Lloyd fixed
    // points can still admit such moves; the result remains Lloyd-stable.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : run.assignments) ++counts[static_cast<std::size_t>(a)];
    for (int sweep = 0; sweep < opt.max_iterations; ++sweep) {
        bool moved = false;
        for (Index i = 0; i < n; ++i) {
            const int a = run.assignments[static_cast<std::size_t>(i)];
            const double na = counts[static_cast<std::size_t>(a)];
            if (na <= 1) continue;
            const double leave = na / (na - 1.0) * squared_distance(points, i, centroids, a);
            int target = -1;
            double best_gain = 0.0;
            for (int c = 0; c < k; ++c) {
                if (c == a) continue;
                const double nc = counts[static_cast<std::size_t>(c)];
                const double gain = leave - nc / (nc + 1.0) * squared_distance(points, i, centroids, c);
                if (gain > best_gain + 1e-12 * (1.0 + leave)) {
                    best_gain = gain;
                    target = c;
                }
            }
            if (target < 0) continue;
            centroids.row(a) = (centroids.row(a) * na - points.row(i)) / (na - 1.0);
            const double nt = counts[static_cast<std::size_t>(target)];
            centroids.row(target) = (centroids.row(target) * nt + points.row(i)) / (nt + 1.0);
            --counts[static_cast<std::size_t>(a)];
            ++counts[static_cast<std::size_t>(target)];
            run.assignments[static_cast<std::size_t>(i)] = target;
            moved = true;
        }
        if (!moved) break;
        // Recompute means exactly so incremental updates do not drift.
        centroids.setZero();
        for (Index i = 0; i < n; ++i) centroids.row(run.assignments[static_cast<std::size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
        run.trace.push_back(inertia_of(points, run.assignments, centroids));
    }
    run.centroids = std::move(centroids);
    run.inertia = run.trace.empty() ? inertia_of(points, run.assignments, run.centroids) : run.trace.back();
    return run;
}

void canonicalize(KMeansResult& r) {
    const int k = static_cast<int>(r.centroids.rows());
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    int next = 0;
    for (int a : r.assignments) {
        if (remap[static_cast<std::size_t>(a)] < 0) remap[static_cast<std::size_t>(a)] = next++;
    }
    for (auto& m : remap) {
        if (m < 0) m = next++;
    }
    Eigen::MatrixXd reordered(r.centroids.rows(), r.centroids.cols());
    for (int c = 0; c < k; ++c) reordered.row(remap[static_cast<std::size_t>(c)]) = r.centroids.row(c);
    r.centroids = std::move(reordered);
    for (auto& a : r.assignments) a = remap[static_cast<std::size_t>(a)];
}

}  // namespace

double inertia_of(const Eigen::MatrixXd& points, std::span<const int> assignments,
                  const Eigen::MatrixXd& centroids) {
    double total = 0.0;
    for (Index i = 0; i < points.rows(); ++i)
        total += squared_distance(points, i, centroids, assignments[static_cast<std::size_t>(i)]);
    return total;
}

KMeansResult kmeans_fit(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options) {
    if (points.rows() == 0 || points.cols() == 0) throw ValidationError("kmeans: empty input");
    if (k < 1 || k > points.rows())
        throw ValidationError("kmeans: k=" + std::to_string(k) + " outside [1, " + std::to_string(points.rows()) + "]");
    if (options.restarts < 1 || options.max_iterations < 1) throw ValidationError("kmeans: bad options");

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        auto run = lloyd(points, seed_plus_plus(points, k, rng), options);
        if (run.inertia < best.inertia) {
            best.assignments = std::move(run.assignments);
            best.centroids = std::move(run.centroids);
            best.inertia = run.inertia;
            best.inertia_trace = std::move(run.trace);
            best.restart = r;
        }
    }
    canonicalize(best);
    return best;
}

std::string_view to_string(RegionLabel r) {
    switch (r) {
        case RegionLabel::A: return "A";
        case RegionLabel::B: return "B";
        case RegionLabel::C: return "C";
        case RegionLabel::Other: return "other";
    }
    return "other";
}

int ClusteringResult::cluster_of(const std::string& model) const {
    for (std::size_t i = 0; i < model_names.size(); ++i) {
        if (model_names[i] == model) return assignments[i];
    }
    return -1;
}

std::size_t elbow_index(std::span<const std::pair<int, double>> curve) {
    if (curve.empty()) throw ValidationError("elbow: empty curve");
    if (curve.size() < 3) return 0;

    const double k0 = curve.front().first;
    const double k_span = curve.back().first - k0;
    double lo = curve.front().second, hi = curve.front().second;
    for (const auto& [k, v] : curve) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo) || !(k_span > 0.0)) return 1;

    auto nx = [&](std::size_t i) { return (curve[i].first - k0) / k_span; };
    auto ny = [&](std::size_t i) { return (curve[i].second - lo) / (hi - lo); };
    const double x0 = nx(0), y0 = ny(0);
    const double dx = nx(curve.size() - 1) - x0, dy = ny(curve.size() - 1) - y0;
    const double len = std::hypot(dx, dy);

    constexpr double kTieTolerance = 1e-12;
    std::size_t best = 1;
    double best_d = -1.0;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double d = std::abs(dx * (ny(i) - y0) - dy * (nx(i) - x0)) / len;
        if (d > best_d + kTieTolerance) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

ClusteringResult elbow_select(const Eigen::MatrixXd& points, std::vector<std::string> model_names,
                              int k_min, int k_max, std::uint64_t seed, const KMeansOptions& options) {
    if (k_min > k_max) throw ValidationError("elbow_select: empty k range");
    if (k_min < 1 || k_max > points.rows())
        throw ValidationError("elbow_select: k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                              "] not within [1, " + std::to_string(points.rows()) + "]");
    if (model_names.size() != static_cast<std::size_t>(points.rows()))
        throw ValidationError("elbow_select: model names do not match points");

    std::vector<KMeansResult> fits;
    ClusteringResult out;
    for (int k = k_min; k <= k_max; ++k) {
        fits.push_back(kmeans_fit(points, k, seed, options));
        out.inertia_curve.emplace_back(k, fits.back().inertia);
    }
    const auto chosen = elbow_index(out.inertia_curve);
    auto& fit = fits[chosen];
    out.k = out.inertia_curve[chosen].first;
    out.model_names = std::move(model_names);
    out.assignments = std::move(fit.assignments);
    out.centroids = std::move(fit.centroids);
    out.inertia = fit.inertia;
    for (int c = 0; c < out.k; ++c) out.region_labels[c] = RegionLabel::Other;
    return out;
}

std::map<int, RegionLabel> label_regions(const ClusteringResult& clustering, const LceEmbedding& embedding) {
    const std::set<std::string> a(clustering.model_names.begin(), clustering.model_names.end());
    const std::set<std::string> b(embedding.model_names.begin(), embedding.model_names.end());
    if (a != b || a.size() != clustering.model_names.size())
        throw ValidationError("label_regions: clustering and embedding cover different models");

    std::map<int, RegionLabel> labels;
    for (int c = 0; c < clustering.k; ++c) labels[c] = RegionLabel::Other;
    if (clustering.k != 3 || embedding.components() < 2) return labels;

    std::array<Eigen::Vector2d, 3> centre{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    std::array<int, 3> members{0, 0, 0};
    for (std::size_t i = 0; i < clustering.model_names.size(); ++i) {
        const int c = clustering.assignments[i];
        const int row = embedding.model_index(clustering.model_names[i]);
        centre[static_cast<std::size_t>(c)] += Eigen::Vector2d(embedding.scores(row, 0), embedding.scores(row, 1));
        ++members[static_cast<std::size_t>(c)];
    }
    for (std::size_t c = 0; c < 3; ++c) {
        if (members[c] == 0) return labels;
        centre[c] /= static_cast<double>(members[c]);
    }

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return centre[x].sum() < centre[y].sum(); });
    if (centre[order[0]].sum() == centre[order[1]].sum()) return labels;

    const int lowest = order[0];
    const int r1 = order[1], r2 = order[2];
    int b_idx = -1, c_idx = -1;
    if (centre[r1].x() > centre[r2].x() && centre[r1].y() < centre[r2].y()) {
        b_idx = r1;
        c_idx = r2;
    } else if (centre[r2].x() > centre[r1].x() && centre[r2].y() < centre[r1].y()) {
        b_idx = r2;
        c_idx = r1;
    } else {
        return labels;
    }
    labels[lowest] = RegionLabel::A;
    labels[b_idx] = RegionLabel::B;
    labels[c_idx] = RegionLabel::C;
    return labels;
}

void write_clusters_csv(std::ostream& out, const ClusteringResult& c) {
    out << "model,cluster,region_label\n";
    for (std::size_t i = 0; i < c.model_names.size(); ++i) {
        const int cl = c.assignments[i];
        auto it = c.region_labels.find(cl);
        const auto label = it == c.region_labels.end() ? RegionLabel::Other : it->second;
        out << csv_escape(c.model_names[i]) << ',' << cl << ',' << to_string(label) << '\n';
    }
}

void write_inertia_csv(std::ostream& out, const ClusteringResult& c) {
    out << "k,inertia\n";
    for (const auto& [k, v] : c.inertia_curve) out << k << ',' << format_fixed(v, 12) << '\n';
}

}  // namespace lce
