#include "lce/concept_matrix.hpp"

#include <algorithm>

#include "lce/errors.hpp"
#include "lce/format.hpp"

namespace lce {

ConceptSuperset::ConceptSuperset(std::vector<Concept> concepts) : concepts_(std::move(concepts)) {
    std::sort(concepts_.begin(), concepts_.end(), [](const Concept& a, const Concept& b) {
        if (a.category != b.category) return index_of(a.category) < index_of(b.category);
        return a.name < b.name;
    });
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        if (!index_.emplace(concepts_[i].name, i).second)
            throw ValidationError("duplicate concept '" + concepts_[i].name + "' in superset");
        ++totals_[index_of(concepts_[i].category)];
    }
}

std::optional<std::size_t> ConceptSuperset::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ConceptSuperset build_superset(std::span<const DissectProfile> profiles) {
    if (profiles.empty()) throw ValidationError("build_superset: no profiles");
    std::map<std::string, ConceptCategory> seen;
    for (const auto& p : profiles) {
        for (const auto& u : p.units) {
            if (!u.assigned()) continue;
            auto [it, inserted] = seen.emplace(*u.concept_name, *u.category);
            if (!inserted && it->second != *u.category)
                throw ValidationError("concept '" + *u.concept_name + "' appears as both " +
                                      std::string(to_string(it->second)) + " and " +
                                      std::string(to_string(*u.category)) + " (model " +
                                      p.model_name + ")");
        }
    }
    if (seen.empty()) throw ValidationError("build_superset: no assigned concepts in any profile");
    std::vector<Concept> concepts;
    concepts.reserve(seen.size());
    for (const auto& [name, cat] : seen) concepts.push_back({name, cat});
    return ConceptSuperset(std::move(concepts));
}

ConceptMatrix build_matrix(std::span<const DissectProfile> profiles, const ConceptSuperset& superset) {
    ConceptMatrix m;
    m.superset = superset;
    const auto rows = static_cast<Eigen::Index>(profiles.size());
    const auto cols = static_cast<Eigen::Index>(superset.size());
    m.raw_counts = Eigen::MatrixXi::Zero(rows, cols);
    m.normalized = Eigen::MatrixXd::Zero(rows, cols);

    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& p = profiles[static_cast<std::size_t>(i)];
        m.model_names.push_back(p.model_name);
        m.layer_widths.push_back(p.layer_width);
        for (const auto& u : p.units) {
            if (!u.assigned()) continue;
            auto j = superset.find(*u.concept_name);
            if (!j) throw ValidationError("model " + p.model_name + ": concept '" +
                                          *u.concept_name + "' missing from superset");
            if (superset.concepts()[*j].category != *u.category)
                throw ValidationError("model " + p.model_name + ": concept '" + *u.concept_name +
                                      "' has a different category in the superset");
            ++m.raw_counts(i, static_cast<Eigen::Index>(*j));
        }
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
        const auto total = static_cast<double>(
            superset.total(superset.concepts()[static_cast<std::size_t>(j)].category));
        for (Eigen::Index i = 0; i < rows; ++i)
            m.normalized(i, j) = static_cast<double>(m.raw_counts(i, j)) / total;
    }
    return m;
}

namespace {

void write_header(std::ostream& out, const ConceptSuperset& s) {
    out << "model";
    for (const auto& c : s.concepts()) out << ',' << csv_escape(c.name);
    out << '\n';
}

}  // namespace

void write_normalized_csv(std::ostream& out, const ConceptMatrix& m) {
    write_header(out, m.superset);
    for (Eigen::Index i = 0; i < m.normalized.rows(); ++i) {
        out << csv_escape(m.model_names[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.normalized.cols(); ++j) out << ',' << format_fixed(m.normalized(i, j), 9);
        out << '\n';
    }
}

void write_raw_counts_csv(std::ostream& out, const ConceptMatrix& m) {
    write_header(out, m.superset);
    for (Eigen::Index i = 0; i < m.raw_counts.rows(); ++i) {
        out << csv_escape(m.model_names[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.raw_counts.cols(); ++j) out << ',' << m.raw_counts(i, j);
        out << '\n';
    }
}

void write_superset_csv(std::ostream& out, const ConceptSuperset& s) {
    out << "concept,category\n";
    for (const auto& c : s.concepts()) out << csv_escape(c.name) << ',' << to_string(c.category) << '\n';
}

}  // namespace lce
