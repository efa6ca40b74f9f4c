#include "lce/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "lce/errors.hpp"
#include "lce/format.hpp"

namespace lce {

namespace {

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
    if (x.size() < 3) throw ValidationError("pearson: need at least three points");
    if (is_constant(x) || is_constant(y)) throw ComputationError("pearson: zero variance");

    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw ComputationError("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double correlate(std::span<const double> x, std::span<const double> y, CorrelationMethod method) {
    return method == CorrelationMethod::Pearson ? pearson(x, y) : spearman(x, y);
}

// ---------------------------------------------------------------------------

PerformanceTable::PerformanceTable(std::vector<PerformanceRecord> records) : records_(std::move(records)) {
    std::set<std::tuple<std::string, std::string, std::string, std::string>> keys;
    for (const auto& r : records_) {
        if (r.model.empty() || r.task.empty() || r.dataset.empty() || r.metric.empty())
            throw ValidationError("performance: empty key field");
        if (!(r.value >= 0.0 && r.value <= 1.0))
            throw ValidationError("performance: value " + format_real(r.value) + " for " + r.model + " " + r.task +
                                  "/" + r.dataset + "/" + r.metric + " outside [0,1]");
        if (!keys.emplace(r.model, r.task, r.dataset, r.metric).second)
            throw ValidationError("performance: duplicate record for " + r.model + " " + r.task + "/" +
                                  r.dataset + "/" + r.metric);
    }
}

PerformanceTable PerformanceTable::from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("performance CSV: empty input");
    const auto header = csv_split(line);
    if (header != std::vector<std::string>{"model", "task", "dataset", "metric", "value"})
        throw ValidationError("performance CSV: header must be model,task,dataset,metric,value");
    std::vector<PerformanceRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 5)
            throw ValidationError("performance CSV line " + std::to_string(line_no) + ": expected 5 fields");
        PerformanceRecord r{trim(f[0]), trim(f[1]), trim(f[2]), trim(f[3]), 0.0};
        try {
            std::size_t used = 0;
            const auto text = trim(f[4]);
            r.value = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ValidationError("performance CSV line " + std::to_string(line_no) + ": bad value '" + f[4] + "'");
        }
        records.push_back(std::move(r));
    }
    return PerformanceTable(std::move(records));
}

PerformanceTable PerformanceTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open performance file " + path.string());
    return from_csv(in);
}

std::vector<PerfGroup> PerformanceTable::groups() const {
    std::set<PerfGroup> gs;
    for (const auto& r : records_) gs.insert({r.task, r.dataset, r.metric});
    return {gs.begin(), gs.end()};
}

std::vector<PerformanceRecord> PerformanceTable::group_records(const PerfGroup& g) const {
    std::vector<PerformanceRecord> out;
    for (const auto& r : records_) {
        if (r.task == g.task && r.dataset == g.dataset && r.metric == g.metric) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.model < b.model; });
    return out;
}

// ---------------------------------------------------------------------------

CorrelationReport axis_category_correlations(const LceEmbedding& embedding,
                                             std::span<const DissectProfile> profiles, CorrelationMethod method) {
    std::map<std::string, const DissectProfile*> by_name;
    for (const auto& p : profiles) by_name[p.model_name] = &p;

    const auto n = embedding.model_names.size();
    // features[f][i]: feature f of embedding model i
    std::array<std::vector<double>, 8> features;
    std::array<std::string, 8> names;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = by_name.find(embedding.model_names[i]);
        if (it == by_name.end())
            throw ValidationError("axis_category_correlations: no profile for model " + embedding.model_names[i]);
        std::size_t f = 0;
        for (auto mode : {AbstractionMode::All, AbstractionMode::Unique}) {
            const auto abs = abstract_profile(*it->second, mode);
            for (auto cat : kCategories) {
                names[f] = std::string(to_string(cat)) + "_" + std::string(to_string(mode));
                features[f].push_back(static_cast<double>(abs[cat]));
                ++f;
            }
        }
    }

    CorrelationReport report;
    if (n < 3) {
        report.warnings.push_back("only " + std::to_string(n) + " models; correlations need at least 3");
        return report;
    }
    for (std::size_t f = 0; f < features.size(); ++f) {
        if (is_constant(features[f])) {
            report.warnings.push_back("feature " + names[f] + " is constant across models");
            continue;
        }
        for (int c = 0; c < embedding.components(); ++c) {
            std::vector<double> col(embedding.scores.col(c).data(), embedding.scores.col(c).data() + n);
            if (is_constant(col)) {
                report.warnings.push_back("component " + std::to_string(c + 1) + " is constant");
                continue;
            }
            report.rows.push_back({names[f], c, correlate(features[f], col, method), n});
        }
    }
    return report;
}

CorrelationReport axis_performance_correlations(const LceEmbedding& embedding, const PerformanceTable& perf,
                                                CorrelationMethod method) {
    CorrelationReport report;
    for (const auto& g : perf.groups()) {
        std::vector<double> values;
        std::vector<int> rows;
        for (const auto& r : perf.group_records(g)) {
            const int row = embedding.model_index(r.model);
            if (row < 0) continue;
            values.push_back(r.value);
            rows.push_back(row);
        }
        if (values.size() < 3) {
            report.warnings.push_back(g.key() + ": only " + std::to_string(values.size()) +
                                      " models shared with the embedding");
            continue;
        }
        if (is_constant(values)) {
            report.warnings.push_back(g.key() + ": performance is constant");
            continue;
        }
        for (int c = 0; c < embedding.components(); ++c) {
            std::vector<double> scores;
            scores.reserve(rows.size());
            for (int row : rows) scores.push_back(embedding.scores(row, c));
            if (is_constant(scores)) {
                report.warnings.push_back(g.key() + ": component " + std::to_string(c + 1) + " is constant");
                continue;
            }
            report.rows.push_back({g.key(), c, correlate(scores, values, method), values.size()});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

double knn_mean(std::span<const std::array<double, 2>> coords, std::span<const double> values,
                std::span<const std::string> names, std::array<double, 2> probe, int k) {
    if (coords.size() != values.size() || coords.size() != names.size())
        throw ValidationError("knn: input sizes differ");
    if (k < 1 || static_cast<std::size_t>(k) > coords.size())
        throw ValidationError("knn: k=" + std::to_string(k) + " but only " + std::to_string(coords.size()) +
                              " models available");
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double dx = coords[i][0] - probe[0], dy = coords[i][1] - probe[1];
        dist.emplace_back(dx * dx + dy * dy, i);
    }
    std::sort(dist.begin(), dist.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return names[a.second] < names[b.second];
    });
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += values[dist[static_cast<std::size_t>(i)].second];
    return sum / static_cast<double>(k);
}

PerformanceField knn_field(const LceEmbedding& embedding, const PerformanceTable& perf, const PerfGroup& group,
                           std::array<int, 2> axes, int k, int resolution) {
    for (int a : axes) {
        if (a < 0 || a >= embedding.components())
            throw ValidationError("knn_field: axis " + std::to_string(a) + " out of range");
    }
    if (resolution < 2) throw ValidationError("knn_field: resolution must be >= 2");

    std::vector<std::array<double, 2>> coords;
    std::vector<double> values;
    std::vector<std::string> names;
    for (const auto& r : perf.group_records(group)) {
        const int row = embedding.model_index(r.model);
        if (row < 0) continue;
        coords.push_back({embedding.scores(row, axes[0]), embedding.scores(row, axes[1])});
        values.push_back(r.value);
        names.push_back(r.model);
    }
    if (k < 1 || static_cast<std::size_t>(k) > coords.size())
        throw ValidationError("knn_field: k=" + std::to_string(k) + " larger than the " +
                              std::to_string(coords.size()) + " models with records for " + group.key());

    std::array<double, 2> lo{coords[0][0], coords[0][1]}, hi = lo;
    for (const auto& c : coords) {
        for (int d = 0; d < 2; ++d) {
            lo[d] = std::min(lo[d], c[d]);
            hi[d] = std::max(hi[d], c[d]);
        }
    }
    for (int d = 0; d < 2; ++d) {
        const double span = hi[d] - lo[d];
        const double pad = span > 0.0 ? 0.05 * span : 0.5;
        lo[d] -= pad;
        hi[d] += pad;
    }

    PerformanceField field;
    field.group = group;
    field.axes = axes;
    field.k_neighbors = k;
    field.resolution = resolution;
    field.grid.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
    const double step_x = (hi[0] - lo[0]) / (resolution - 1);
    const double step_y = (hi[1] - lo[1]) / (resolution - 1);
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const std::array<double, 2> probe{lo[0] + ix * step_x, lo[1] + iy * step_y};
            field.grid.push_back({probe[0], probe[1], knn_mean(coords, values, names, probe, k)});
        }
    }
    return field;
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
    out << "feature,component,r,n_points\n";
    for (const auto& row : report.rows)
        out << csv_escape(row.feature) << ',' << (row.component + 1) << ',' << format_fixed(row.r, 9) << ','
            << row.n_points << '\n';
}

void write_field_csv(std::ostream& out, const PerformanceField& field) {
    out << "x,y,value\n";
    for (const auto& p : field.grid)
        out << format_fixed(p.x, 9) << ',' << format_fixed(p.y, 9) << ',' << format_fixed(p.value, 9) << '\n';
}

}  // namespace lce
