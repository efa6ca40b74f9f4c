#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lce {

enum class ConceptCategory { Object = 0, Part = 1, Material = 2, Color = 3 };

inline constexpr std::array<ConceptCategory, 4> kCategories{
    ConceptCategory::Object, ConceptCategory::Part, ConceptCategory::Material,
    ConceptCategory::Color};

inline constexpr std::size_t index_of(ConceptCategory c) { return static_cast<std::size_t>(c); }

/// Lowercase wire name: "object", "part", "material", "color".
std::string_view to_string(ConceptCategory c);

/// Inverse of to_string; throws ValidationError on anything else.
ConceptCategory parse_category(std::string_view name);

/// Per-category counters indexed by ConceptCategory.
using CategoryCounts = std::array<std::size_t, 4>;

/// One unit of the dissected layer. A unit without a concept is unassigned;
/// category is present exactly when concept_name is.
struct UnitAssignment {
    std::size_t unit_id = 0;
    std::optional<std::string> concept_name;
    std::optional<ConceptCategory> category;
    double iou = 0.0;

    bool assigned() const { return concept_name.has_value(); }
    bool operator==(const UnitAssignment&) const = default;
};

/// Concept assignments of one model layer.
struct DissectProfile {
    std::string model_name;
    std::string layer_name;
    std::size_t layer_width = 0;
    std::vector<UnitAssignment> units;

    std::size_t assigned_count() const;
    bool operator==(const DissectProfile&) const = default;
};

enum class AbstractionMode { All, Unique };

std::string_view to_string(AbstractionMode m);

/// Four-value summary of a profile by concept category.
struct AbstractedProfile {
    AbstractionMode mode = AbstractionMode::All;
    CategoryCounts counts{};

    std::size_t operator[](ConceptCategory c) const { return counts[index_of(c)]; }
};

/// Parse and validate a profile document (JSON). Concept names are trimmed.
/// Throws ValidationError on malformed input, unknown categories, duplicate
/// unit ids, iou outside [0,1] or unit ids >= layer_width.
DissectProfile parse_profile(std::string_view document);

DissectProfile load_profile(const std::filesystem::path& path);

/// Serialize back to the profile JSON schema (two-space indented).
std::string to_json(const DissectProfile& profile);

/// Clear the concept of every unit whose iou is below `threshold`. Units are
/// kept so the layer width bookkeeping survives.
DissectProfile filter_by_iou(const DissectProfile& profile, double threshold);

AbstractedProfile abstract_profile(const DissectProfile& profile, AbstractionMode mode);

inline constexpr double kDefaultIouThreshold = 0.04;

}  // namespace lce
