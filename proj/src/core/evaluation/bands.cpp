#include "evaluation/bands.hpp"

#include <algorithm>
#include <sstream>

#include "util/text.hpp"

namespace bspinn::eval {

LossBand loss_band(std::span<const train::RunRecord> records) {
  std::vector<const train::RunRecord*> ok;
  for (const auto& r : records) {
    if (!r.failed) ok.push_back(&r);
  }
  if (ok.empty()) throw InvalidArgument("loss_band: no successful records");
  const std::size_t epochs = ok[0]->history.size();
  for (const auto* r : ok) {
    if (r->history.size() != epochs) {
      throw InvalidArgument("loss_band: misaligned histories");
    }
  }

  LossBand band;
  band.epochs.reserve(epochs);
  std::vector<double> column(ok.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t k = 0; k < ok.size(); ++k) {
      if (ok[k]->history[e].epoch != ok[0]->history[e].epoch) {
        throw InvalidArgument("loss_band: misaligned histories");
      }
      column[k] = ok[k]->history[e].parts.total;
    }
    std::sort(column.begin(), column.end());
    band.epochs.push_back(ok[0]->history[e].epoch);
    band.min.push_back(column.front());
    band.max.push_back(column.back());
    const std::size_t mid = column.size() / 2;
    band.median.push_back(column.size() % 2 == 1
                              ? column[mid]
                              : 0.5 * (column[mid - 1] + column[mid]));
  }
  return band;
}

std::string LossBand::to_csv() const {
  std::ostringstream out;
  out << "epoch,min,median,max\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    out << epochs[i] << ',' << util::format_double(min[i]) << ','
        << util::format_double(median[i]) << ',' << util::format_double(max[i])
        << '\n';
  }
  return out.str();
}

}  // namespace bspinn::eval
