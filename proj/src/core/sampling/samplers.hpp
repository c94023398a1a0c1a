#pragma once

#include "sampling/pointset.hpp"
#include "util/rng.hpp"

namespace bspinn::sample {

/// n i.i.d. uniform interior points. Time coordinates (if any) land in
/// (t_lo, t_hi]; space coordinates in [lo, hi).
PointSet uniform_sample(const BoxDomain& domain, std::size_t n,
                        std::uint64_t seed);

/// Latin hypercube: per dimension, exactly one point in each of the n
/// equal strata (uniform inside the stratum, random permutation per axis).
PointSet lhs_sample(const BoxDomain& domain, std::size_t n,
                    std::uint64_t seed);

/// Uniform points on each spatial face (one coordinate pinned to its
/// bound); per_face points on each of the 2*space_dim faces.
PointSet boundary_sample(const BoxDomain& domain, std::size_t per_face,
                         std::uint64_t seed);

/// Uniform spatial points with t = 0 exactly (domain must have time).
PointSet initial_sample(const BoxDomain& domain, std::size_t n,
                        std::uint64_t seed);

/// Tensor product of linspace-with-endpoints per dimension; total nodes =
/// product of nodes_per_dim (the last dimension varies fastest).
PointSet grid_nodes(const BoxDomain& domain, std::span<const int> nodes_per_dim);

}  // namespace bspinn::sample
