#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sampling/domain.hpp"

namespace bspinn::sample {

enum class PointRole { kInterior, kBoundary, kInitial, kEvaluation };

std::string_view role_name(PointRole role);

/// Sampled or gridded points, count x dim row-major.
struct PointSet {
  PointRole role = PointRole::kInterior;
  int dim = 0;
  std::vector<double> data;
  std::uint64_t seed = 0;
  std::string sampler;
  /// Boundary points only: face index per point (2*axis + (side == hi)).
  std::vector<int> faces;

  std::size_t size() const {
    return dim == 0 ? 0 : data.size() / static_cast<std::size_t>(dim);
  }
  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  std::span<double> point(std::size_t i) {
    return {data.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  /// One point per row; header names the coordinates (x0,... or x,y,t).
  std::string to_csv(std::span<const std::string> names = {}) const;
};

}  // namespace bspinn::sample
