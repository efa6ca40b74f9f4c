#pragma once

#include <array>
#include <string>

#include "lce/clustering.hpp"
#include "lce/embedding.hpp"
#include "lce/ensemble.hpp"

namespace lce {

/// Scatter of model scores on two components, one labeled circle per model,
/// coloured by cluster, with a legend entry per cluster.
std::string emit_scatter(const LceEmbedding& embedding, const ClusteringResult& clustering,
                         std::array<int, 2> axes = {0, 1});

/// Pairwise gain heatmap. Off-diagonal colour runs light to dark between the
/// observed min and max gain; the diagonal (solo accuracy) is drawn grey.
std::string emit_heatmap(const EnsembleGainMatrix& matrix);

/// Inertia against k with the chosen k marked.
std::string emit_elbow(const ClusteringResult& clustering);

}  // namespace lce
