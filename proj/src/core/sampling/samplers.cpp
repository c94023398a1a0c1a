#include "sampling/samplers.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "util/text.hpp"

namespace bspinn::sample {

std::string_view role_name(PointRole role) {
  switch (role) {
    case PointRole::kInterior: return "interior";
    case PointRole::kBoundary: return "boundary";
    case PointRole::kInitial: return "initial";
    case PointRole::kEvaluation: return "evaluation";
  }
  return "?";
}

std::string PointSet::to_csv(std::span<const std::string> names) const {
  std::ostringstream out;
  for (int d = 0; d < dim; ++d) {
    if (d) out << ',';
    if (d < static_cast<int>(names.size())) {
      out << names[d];
    } else {
      out << 'x' << d;
    }
  }
  out << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = point(i);
    for (int d = 0; d < dim; ++d) {
      if (d) out << ',';
      out << util::format_double(p[d]);
    }
    out << '\n';
  }
  return out.str();
}

namespace {

double draw_coord(util::Rng& rng, const BoxDomain& domain, int d) {
  if (domain.has_time && d == domain.time_index()) {
    return rng.uniform_open_low(domain.lo[d], domain.hi[d]);
  }
  return rng.uniform(domain.lo[d], domain.hi[d]);
}

}  // namespace

PointSet uniform_sample(const BoxDomain& domain, std::size_t n,
                        std::uint64_t seed) {
  domain.validate();
  if (n == 0) throw InvalidArgument("uniform_sample: n must be > 0");
  util::Rng rng(seed);
  PointSet set;
  set.role = PointRole::kInterior;
  set.dim = domain.dim();
  set.seed = seed;
  set.sampler = "uniform";
  set.data.resize(n * static_cast<std::size_t>(set.dim));
  for (std::size_t i = 0; i < n; ++i) {
    auto p = set.point(i);
    for (int d = 0; d < set.dim; ++d) p[d] = draw_coord(rng, domain, d);
  }
  return set;
}

PointSet lhs_sample(const BoxDomain& domain, std::size_t n,
                    std::uint64_t seed) {
  domain.validate();
  if (n == 0) throw InvalidArgument("lhs_sample: n must be > 0");
  util::Rng rng(seed);
  PointSet set;
  set.role = PointRole::kInterior;
  set.dim = domain.dim();
  set.seed = seed;
  set.sampler = "lhs";
  set.data.resize(n * static_cast<std::size_t>(set.dim));

  std::vector<std::size_t> perm(n);
  for (int d = 0; d < set.dim; ++d) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Fisher-Yates with the stream engine.
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.index(i + 1)]);
    }
    const double width = (domain.hi[d] - domain.lo[d]) / static_cast<double>(n);
    const bool time_dim = domain.has_time && d == domain.time_index();
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      // Strata are (k*w, (k+1)*w] for the time dimension, [k*w, (k+1)*w)
      // otherwise; both keep exactly one point per stratum.
      const double offset = time_dim ? (1.0 - u) : u;
      set.point(i)[d] =
          domain.lo[d] + (static_cast<double>(perm[i]) + offset) * width;
    }
  }
  return set;
}

PointSet boundary_sample(const BoxDomain& domain, std::size_t per_face,
                         std::uint64_t seed) {
  domain.validate();
  util::Rng rng(seed);
  PointSet set;
  set.role = PointRole::kBoundary;
  set.dim = domain.dim();
  set.seed = seed;
  set.sampler = "uniform-face";
  const int faces = 2 * domain.space_dim();
  set.data.resize(per_face * static_cast<std::size_t>(faces) *
                  static_cast<std::size_t>(set.dim));
  set.faces.resize(per_face * static_cast<std::size_t>(faces));
  std::size_t idx = 0;
  for (int axis = 0; axis < domain.space_dim(); ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double pinned = side == 0 ? domain.lo[axis] : domain.hi[axis];
      for (std::size_t i = 0; i < per_face; ++i, ++idx) {
        auto p = set.point(idx);
        for (int d = 0; d < set.dim; ++d) {
          p[d] = d == axis ? pinned : draw_coord(rng, domain, d);
        }
        set.faces[idx] = 2 * axis + side;
      }
    }
  }
  return set;
}

PointSet initial_sample(const BoxDomain& domain, std::size_t n,
                        std::uint64_t seed) {
  domain.validate();
  if (!domain.has_time) {
    throw InvalidArgument("initial_sample: domain has no time coordinate");
  }
  if (n == 0) throw InvalidArgument("initial_sample: n must be > 0");
  util::Rng rng(seed);
  PointSet set;
  set.role = PointRole::kInitial;
  set.dim = domain.dim();
  set.seed = seed;
  set.sampler = "uniform-initial";
  set.data.resize(n * static_cast<std::size_t>(set.dim));
  for (std::size_t i = 0; i < n; ++i) {
    auto p = set.point(i);
    for (int d = 0; d < set.dim - 1; ++d) p[d] = rng.uniform(domain.lo[d], domain.hi[d]);
    p[set.dim - 1] = 0.0;
  }
  return set;
}

PointSet grid_nodes(const BoxDomain& domain,
                    std::span<const int> nodes_per_dim) {
  domain.validate();
  if (static_cast<int>(nodes_per_dim.size()) != domain.dim()) {
    throw InvalidArgument("grid_nodes: counts must match the dimension");
  }
  std::size_t total = 1;
  for (int m : nodes_per_dim) {
    if (m < 2) throw InvalidArgument("grid_nodes: need >= 2 nodes per dimension");
    total *= static_cast<std::size_t>(m);
  }
  PointSet set;
  set.role = PointRole::kEvaluation;
  set.dim = domain.dim();
  set.sampler = "grid";
  set.data.resize(total * static_cast<std::size_t>(set.dim));
  for (std::size_t i = 0; i < total; ++i) {
    auto p = set.point(i);
    std::size_t rest = i;
    for (int d = set.dim - 1; d >= 0; --d) {
      const std::size_t m = static_cast<std::size_t>(nodes_per_dim[d]);
      const std::size_t k = rest % m;
      rest /= m;
      p[d] = domain.lo[d] + (domain.hi[d] - domain.lo[d]) *
                                (static_cast<double>(k) /
                                 static_cast<double>(m - 1));
    }
  }
  return set;
}

}  // namespace bspinn::sample
