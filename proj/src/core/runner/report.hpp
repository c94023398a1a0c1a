#pragma once

#include <string>

namespace bspinn::run {

/// Aggregates every summary.csv found under root into one table
/// (per architecture directory: seed count, mean +/- std, best error).
std::string build_report(const std::string& root);

}  // namespace bspinn::run
