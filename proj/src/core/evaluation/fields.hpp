#pragma once

#include "network/forward.hpp"
#include "sampling/pointset.hpp"
#include "util/threadpool.hpp"

namespace bspinn::eval {

/// Network outputs at every point (size x output_dim row-major); chunked
/// over the pool with a fixed partition.
std::vector<double> predict(const net::NetworkSpec& spec,
                            std::span<const double> params,
                            const sample::PointSet& points,
                            util::ThreadPool& pool);

/// One scalar field per channel over the grid, the shared bias, and the
/// reconstruction (sum of channels + bias).
struct ChannelFields {
  std::vector<std::vector<double>> channels;
  std::vector<double> sum_check;
  double bias = 0.0;
};
ChannelFields channel_fields(const net::NetworkSpec& spec,
                             std::span<const double> params,
                             const sample::PointSet& grid, int fnn_group_size,
                             util::ThreadPool& pool);

/// Comma-separated field rows: coords..., value[, value...].
std::string field_csv(const sample::PointSet& points,
                      std::span<const double> values, int value_dim,
                      std::span<const std::string> names = {});

}  // namespace bspinn::eval
