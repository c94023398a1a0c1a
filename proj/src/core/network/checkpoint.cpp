#include "network/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <sstream>

#include "util/base64.hpp"
#include "util/text.hpp"

namespace bspinn::net {

namespace {

constexpr std::string_view kMagic = "bspinn-checkpoint-v1";

std::vector<std::uint8_t> to_le_bytes(std::span<const double> values) {
  std::vector<std::uint8_t> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(values[i]);
    for (int k = 0; k < 8; ++k) {
      bytes[i * 8 + k] = static_cast<std::uint8_t>((u >> (8 * k)) & 0xff);
    }
  }
  return bytes;
}

std::vector<double> from_le_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 8 != 0) {
    throw ParseError("checkpoint: parameter payload is not a multiple of 8 bytes");
  }
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) {
      u |= static_cast<std::uint64_t>(bytes[i * 8 + k]) << (8 * k);
    }
    values[i] = std::bit_cast<double>(u);
  }
  return values;
}

}  // namespace

std::string checkpoint_to_string(const ParamStore& params, std::uint64_t seed,
                                 long long epoch) {
  const NetworkSpec& spec = params.spec();
  std::ostringstream out;
  out << kMagic << "\n";
  out << "arch = " << spec.arch_string() << "\n";
  out << "input_dim = " << spec.input_dim << "\n";
  out << "output_dim = " << spec.output_dim << "\n";
  out << "activation = " << activation_name(spec.activation) << "\n";
  out << "residual_blocks = " << spec.residual_blocks << "\n";
  out << "seed = " << seed << "\n";
  out << "epoch = " << epoch << "\n";
  out << "param_count = " << params.size() << "\n";
  out << "params =\n";
  const std::string blob = util::base64_encode(to_le_bytes(params.values()));
  for (std::size_t i = 0; i < blob.size(); i += 76) {
    out << blob.substr(i, 76) << "\n";
  }
  out << "end\n";
  return out.str();
}

void save_checkpoint(const std::string& path, const ParamStore& params,
                     std::uint64_t seed, long long epoch) {
  util::write_file(path, checkpoint_to_string(params, seed, epoch));
}

Checkpoint checkpoint_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || util::trim(line) != kMagic) {
    throw ParseError("checkpoint: bad magic line");
  }

  std::map<std::string, std::string> fields;
  while (std::getline(in, line)) {
    const auto trimmed = util::trim(line);
    if (trimmed == "params =") break;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("checkpoint: bad header line: '" + std::string(trimmed) + "'");
    }
    fields[std::string(util::trim(trimmed.substr(0, eq)))] =
        std::string(util::trim(trimmed.substr(eq + 1)));
  }

  const auto field = [&](const char* key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw ParseError(std::string("checkpoint: missing field '") + key + "'");
    }
    return it->second;
  };

  const NetworkSpec spec = NetworkSpec::parse_arch(
      field("arch"), static_cast<int>(util::parse_int(field("input_dim"))),
      static_cast<int>(util::parse_int(field("output_dim"))),
      parse_activation(field("activation")),
      static_cast<int>(util::parse_int(field("residual_blocks"))));

  std::string blob;
  bool terminated = false;
  while (std::getline(in, line)) {
    const auto trimmed = util::trim(line);
    if (trimmed == "end") {
      terminated = true;
      break;
    }
    blob.append(trimmed);
  }
  if (!terminated) throw ParseError("checkpoint: missing 'end' terminator");

  Checkpoint ckpt;
  ckpt.seed = util::parse_uint64(field("seed"));
  ckpt.epoch = util::parse_int(field("epoch"));
  ckpt.params = ParamStore(spec);

  const auto values = from_le_bytes(util::base64_decode(blob));
  const auto declared = util::parse_int(field("param_count"));
  if (static_cast<long long>(values.size()) != declared ||
      values.size() != ckpt.params.size()) {
    throw ParseError("checkpoint: parameter count mismatch");
  }
  std::memcpy(ckpt.params.values().data(), values.data(),
              values.size() * sizeof(double));
  return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
  try {
    return checkpoint_from_string(util::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace bspinn::net
