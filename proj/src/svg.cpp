#include "lce/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lce/errors.hpp"
#include "lce/format.hpp"

namespace lce {

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) { return format_fixed(v, 2); }

// Light (#f7fbff) to dark (#08306b) blue.
std::string blue_scale(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto lerp = [t](int a, int b) { return static_cast<int>(a + (b - a) * t + 0.5); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", lerp(0xf7, 0x08), lerp(0xfb, 0x30), lerp(0xff, 0x6b));
    return buf;
}

std::string svg_open(int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n";
}

}  // namespace

std::string emit_scatter(const LceEmbedding& embedding, const ClusteringResult& clustering, std::array<int, 2> axes) {
    for (int a : axes) {
        if (a < 0 || a >= embedding.components())
            throw ValidationError("emit_scatter: axis " + std::to_string(a) + " out of range");
    }
    constexpr int W = 720, H = 520, L = 70, R = 160, T = 30, B = 60;
    const auto n = embedding.scores.rows();

    double lo[2], hi[2];
    for (int d = 0; d < 2; ++d) {
        const auto col = embedding.scores.col(axes[d]);
        lo[d] = n > 0 ? col.minCoeff() : 0.0;
        hi[d] = n > 0 ? col.maxCoeff() : 1.0;
        const double span = hi[d] - lo[d];
        const double pad = span > 0.0 ? 0.08 * span : 0.5;
        lo[d] -= pad;
        hi[d] += pad;
    }
    auto px = [&](double v) { return L + (v - lo[0]) / (hi[0] - lo[0]) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - lo[1]) / (hi[1] - lo[1]) * (H - T - B); };

    std::ostringstream s;
    s << svg_open(W, H);
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
    s << "<rect class=\"frame\" x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\""
      << (H - T - B) << "\" fill=\"none\" stroke=\"#444444\"/>\n";

    auto axis_label = [&](int a) {
        return "PC" + std::to_string(a + 1) + " (" + format_fixed(100.0 * embedding.explained_variance_ratio[a], 1) +
               "% var)";
    };
    s << "<text class=\"axis-label\" x=\"" << num((L + W - R) / 2.0) << "\" y=\"" << (H - 20)
      << "\" text-anchor=\"middle\">" << axis_label(axes[0]) << "</text>\n";
    s << "<text class=\"axis-label\" x=\"20\" y=\"" << num((T + H - B) / 2.0) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << num((T + H - B) / 2.0) << ")\">" << axis_label(axes[1]) << "</text>\n";

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& name = embedding.model_names[static_cast<std::size_t>(i)];
        const int cl = clustering.cluster_of(name);
        const char* colour = cl < 0 ? "#000000" : kPalette[static_cast<std::size_t>(cl) % kPalette.size()];
        const double x = px(embedding.scores(i, axes[0])), y = py(embedding.scores(i, axes[1]));
        s << "<circle class=\"point\" cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"5\" fill=\"" << colour
          << "\"/>\n";
        s << "<text class=\"label\" x=\"" << num(x + 7) << "\" y=\"" << num(y - 7) << "\">" << xml_escape(name)
          << "</text>\n";
    }

    s << "<g class=\"legend\">\n";
    for (int c = 0; c < clustering.k; ++c) {
        auto it = clustering.region_labels.find(c);
        const auto label = it == clustering.region_labels.end() ? RegionLabel::Other : it->second;
        const std::string text =
            label == RegionLabel::Other ? "cluster " + std::to_string(c) : std::string(to_string(label));
        const int y = T + 10 + 18 * c;
        s << "<rect x=\"" << (W - R + 20) << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
          << kPalette[static_cast<std::size_t>(c) % kPalette.size()] << "\"/>";
        s << "<text class=\"legend-entry\" x=\"" << (W - R + 36) << "\" y=\"" << (y + 9) << "\">" << text
          << "</text>\n";
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

std::string emit_heatmap(const EnsembleGainMatrix& matrix) {
    const auto n = static_cast<int>(matrix.model_names.size());
    constexpr int cell = 48, L = 130, T = 40, legend_h = 70;
    const int W = L + n * cell + 20;
    const int H = T + n * cell + 110 + legend_h;

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double g = matrix.gain(i, j);
            lo = any ? std::min(lo, g) : g;
            hi = any ? std::max(hi, g) : g;
            any = true;
        }
    }
    auto colour = [&](double g) { return blue_scale(hi > lo ? (g - lo) / (hi - lo) : 0.5); };

    std::ostringstream s;
    s << svg_open(W, H);
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
    s << "<text class=\"title\" x=\"" << L << "\" y=\"20\">" << xml_escape(matrix.dataset)
      << ": ensemble gain (diagonal = accuracy)</text>\n";
    for (int i = 0; i < n; ++i) {
        s << "<text class=\"row-name\" x=\"" << (L - 6) << "\" y=\"" << (T + i * cell + cell / 2 + 4)
          << "\" text-anchor=\"end\">" << xml_escape(matrix.model_names[static_cast<std::size_t>(i)]) << "</text>\n";
        const int cx = L + i * cell + cell / 2, cy = T + n * cell + 8;
        s << "<text class=\"col-name\" x=\"" << cx << "\" y=\"" << cy << "\" text-anchor=\"end\" transform=\"rotate(-60 "
          << cx << ' ' << cy << ")\">" << xml_escape(matrix.model_names[static_cast<std::size_t>(i)]) << "</text>\n";
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int x = L + j * cell, y = T + i * cell;
            const bool diag = i == j;
            const double v = diag ? matrix.solo_accuracy[i] : matrix.gain(i, j);
            if (diag) {
                s << "<rect class=\"cell diagonal\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
                  << "\" height=\"" << cell << "\" fill=\"#d9d9d9\" stroke=\"#000000\" stroke-dasharray=\"3,2\"/>";
            } else {
                s << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
                  << cell << "\" fill=\"" << colour(v) << "\" stroke=\"#ffffff\"/>";
            }
            const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
            const char* ink = !diag && t > 0.6 ? "#ffffff" : "#000000";
            s << "<text class=\"value\" x=\"" << (x + cell / 2) << "\" y=\"" << (y + cell / 2 + 4)
              << "\" text-anchor=\"middle\" fill=\"" << ink << "\">" << num(v) << "</text>\n";
        }
    }

    const int ly = H - legend_h + 10;
    s << "<defs><linearGradient id=\"gain-scale\"><stop offset=\"0\" stop-color=\"" << blue_scale(0.0)
      << "\"/><stop offset=\"1\" stop-color=\"" << blue_scale(1.0) << "\"/></linearGradient></defs>\n";
    s << "<g class=\"legend\"><rect x=\"" << L << "\" y=\"" << ly << "\" width=\"160\" height=\"12\" fill=\"url(#gain-scale)\"/>";
    s << "<text class=\"scale-min\" x=\"" << L << "\" y=\"" << (ly + 26) << "\">min " << format_fixed(lo, 4)
      << "</text>";
    s << "<text class=\"scale-max\" x=\"" << (L + 160) << "\" y=\"" << (ly + 26) << "\" text-anchor=\"end\">max "
      << format_fixed(hi, 4) << "</text></g>\n";
    s << "</svg>\n";
    return s.str();
}

std::string emit_elbow(const ClusteringResult& clustering) {
    constexpr int W = 480, H = 320, L = 70, R = 20, T = 20, B = 50;
    const auto& curve = clustering.inertia_curve;
    std::ostringstream s;
    s << svg_open(W, H);
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
    if (curve.empty()) {
        s << "</svg>\n";
        return s.str();
    }
    double lo = curve.front().second, hi = lo;
    for (const auto& [k, v] : curve) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double k0 = curve.front().first;
    const double k_span = std::max(1, curve.back().first - curve.front().first);
    auto px = [&](double k) { return L + (k - k0) / k_span * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - lo) / (hi - lo) * (H - T - B); };

    s << "<polyline class=\"curve\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curve.size(); ++i)
        s << (i ? " " : "") << num(px(curve[i].first)) << ',' << num(py(curve[i].second));
    s << "\"/>\n";
    for (const auto& [k, v] : curve) {
        const bool chosen = k == clustering.k;
        s << "<circle class=\"" << (chosen ? "elbow" : "k") << "\" cx=\"" << num(px(k)) << "\" cy=\"" << num(py(v))
          << "\" r=\"" << (chosen ? 6 : 3) << "\" fill=\"" << (chosen ? "#d62728" : "#1f77b4") << "\"/>\n";
        s << "<text x=\"" << num(px(k)) << "\" y=\"" << (H - B + 16) << "\" text-anchor=\"middle\">" << k
          << "</text>\n";
    }
    s << "<text class=\"axis-label\" x=\"" << ((L + W - R) / 2) << "\" y=\"" << (H - 12)
      << "\" text-anchor=\"middle\">k</text>\n";
    s << "<text class=\"axis-label\" x=\"16\" y=\"" << ((T + H - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << ((T + H - B) / 2) << ")\">inertia</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace lce
