#include "evaluation/fields.hpp"

#include <sstream>

#include "util/text.hpp"

namespace bspinn::eval {

namespace {

constexpr std::size_t kChunks = 32;

}  // namespace

std::vector<double> predict(const net::NetworkSpec& spec,
                            std::span<const double> params,
                            const sample::PointSet& points,
                            util::ThreadPool& pool) {
  const auto program = net::NetworkProgram::build(spec);
  const std::size_t n = points.size();
  std::vector<double> out(n * static_cast<std::size_t>(spec.output_dim));
  const std::size_t chunks = std::min<std::size_t>(kChunks, std::max<std::size_t>(n, 1));
  pool.run(chunks, [&](std::size_t c) {
    net::NetworkEvaluator eval(program, params);
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      const auto y = eval.predict(points.point(i));
      std::copy(y.begin(), y.end(),
                out.begin() + static_cast<std::ptrdiff_t>(
                                  i * static_cast<std::size_t>(spec.output_dim)));
    }
  });
  return out;
}

ChannelFields channel_fields(const net::NetworkSpec& spec,
                             std::span<const double> params,
                             const sample::PointSet& grid, int fnn_group_size,
                             util::ThreadPool& pool) {
  if (spec.kind == net::NetworkSpec::Kind::kFnn && fnn_group_size <= 0) {
    throw InvalidArgument("channel_fields: FNN requires a group size");
  }
  const auto program = net::NetworkProgram::build(spec, fnn_group_size);
  const std::size_t n_channels = program->channel_contributions.size();
  const std::size_t n = grid.size();

  ChannelFields fields;
  fields.channels.assign(n_channels, std::vector<double>(n, 0.0));
  fields.sum_check.assign(n, 0.0);
  {
    net::NetworkEvaluator eval(program, params);
    double bias = 0.0;
    if (n > 0) eval.predict_channels(grid.point(0), &bias);
    fields.bias = bias;
  }

  const std::size_t chunks = std::min<std::size_t>(kChunks, std::max<std::size_t>(n, 1));
  pool.run(chunks, [&](std::size_t c) {
    net::NetworkEvaluator eval(program, params);
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      double bias = 0.0;
      const auto contrib = eval.predict_channels(grid.point(i), &bias);
      double sum = bias;
      for (std::size_t ch = 0; ch < n_channels; ++ch) {
        fields.channels[ch][i] = contrib[ch];
        sum += contrib[ch];
      }
      fields.sum_check[i] = sum;
    }
  });
  return fields;
}

std::string field_csv(const sample::PointSet& points,
                      std::span<const double> values, int value_dim,
                      std::span<const std::string> names) {
  if (value_dim < 1 ||
      values.size() != points.size() * static_cast<std::size_t>(value_dim)) {
    throw InvalidArgument("field_csv: value count mismatch");
  }
  std::ostringstream out;
  for (int d = 0; d < points.dim; ++d) {
    if (d) out << ',';
    if (d < static_cast<int>(names.size())) {
      out << names[d];
    } else {
      out << 'x' << d;
    }
  }
  for (int k = 0; k < value_dim; ++k) {
    out << ",v" << k;
  }
  out << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points.point(i);
    for (int d = 0; d < points.dim; ++d) {
      if (d) out << ',';
      out << util::format_double(p[d]);
    }
    for (int k = 0; k < value_dim; ++k) {
      out << ',' << util::format_double(values[i * value_dim + k]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace bspinn::eval
