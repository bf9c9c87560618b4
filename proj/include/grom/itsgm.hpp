#pragma once

#include <utility>
#include <vector>

#include "grom/grassmann.hpp"
#include "grom/interp1d.hpp"

namespace grom {

enum class ReferenceRule { ClosestTrainingPoint, FixedIndex };

struct ItsgmConfig {
  InterpKind interpolator = InterpKind::Lagrange;
  double idw_power = 3.0;
  int neighbor_count = 3;
  ReferenceRule reference_rule = ReferenceRule::ClosestTrainingPoint;
  int fixed_reference_index = 0;
};

// Interpolation in the tangent space of the Grassmann manifold.
//
// A reference subspace y_r is chosen (nearest training parameter by default,
// ties toward the smaller parameter), the neighbor_count nearest training
// subspaces are mapped to its tangent space via the log map, the tangent
// matrices are interpolated entrywise at the query, and the result is mapped
// back with the exp map. The reference is always part of the neighbor set:
// under FixedIndex it is added when the nearest-k selection misses it.
//
// Node exactness: at a training parameter inside the neighbor set, the
// interpolated tangent equals that point's log exactly (node-exact weights),
// so the result spans the training subspace up to roundtrip rounding.
//
// Throws ValidationError for duplicate parameters or fewer points than
// neighbor_count, and NumericalError (naming the offending parameter) when a
// training subspace sits at the reference's cut locus.
StiefelPoint itsgm_interpolate(const std::vector<std::pair<double, StiefelPoint>>& points,
                               double query, const ItsgmConfig& config);

}  // namespace grom
