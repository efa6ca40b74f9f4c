#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lce/profile.hpp"

namespace lce {

struct Concept {
    std::string name;
    ConceptCategory category = ConceptCategory::Object;

    bool operator==(const Concept&) const = default;
};

/// Union of every assigned concept across a set of profiles. Concepts are
/// ordered by category (object, part, material, color) and then by name.
class ConceptSuperset {
public:
    ConceptSuperset() = default;
    explicit ConceptSuperset(std::vector<Concept> concepts);

    const std::vector<Concept>& concepts() const { return concepts_; }
    std::size_t size() const { return concepts_.size(); }
    const CategoryCounts& category_totals() const { return totals_; }
    std::size_t total(ConceptCategory c) const { return totals_[index_of(c)]; }
    std::optional<std::size_t> find(const std::string& name) const;

private:
    std::vector<Concept> concepts_;
    CategoryCounts totals_{};
    std::map<std::string, std::size_t> index_;
};

/// Models x concepts count matrix and its category-normalized form.
struct ConceptMatrix {
    std::vector<std::string> model_names;
    std::vector<std::size_t> layer_widths;
    ConceptSuperset superset;
    Eigen::MatrixXi raw_counts;   // D(model, concept)
    Eigen::MatrixXd normalized;   // raw / category total of the concept
};

/// Throws ValidationError when one concept name carries two categories or
/// when no profile has any assigned unit.
ConceptSuperset build_superset(std::span<const DissectProfile> profiles);

/// Throws ValidationError when a profile assigns a concept missing from the
/// superset.
ConceptMatrix build_matrix(std::span<const DissectProfile> profiles, const ConceptSuperset& superset);

/// `model,<concepts...>` header, normalized values with 9 decimals.
void write_normalized_csv(std::ostream& out, const ConceptMatrix& m);
void write_raw_counts_csv(std::ostream& out, const ConceptMatrix& m);
/// `concept,category` listing in column order.
void write_superset_csv(std::ostream& out, const ConceptSuperset& s);

}  // namespace lce
