#include "problems/problem.hpp"

namespace bspinn::prob {

ProblemDef make_problem(std::string_view name, const ProblemParams& params) {
  const auto no_params = [&](const char* which) {
    if (params.kappa || params.dim || params.c || params.box) {
      throw InvalidArgument(std::string(which) +
                            ": kappa/dim/c/domain overrides are not applicable");
    }
  };
  if (name == "fnfit") {
    no_params("fnfit");
    return make_fnfit();
  }
  if (name == "burgers1d") {
    no_params("burgers1d");
    return make_burgers();
  }
  if (name == "euler2d") {
    no_params("euler2d");
    return make_euler();
  }
  if (name == "helmholtz2d") return make_helmholtz2d(params);
  if (name == "helmholtz3d") return make_helmholtz3d(params);
  if (name == "poisson10d") return make_poisson(params);
  throw InvalidArgument("unknown problem: '" + std::string(name) + "'");
}

std::vector<std::string> problem_names() {
  return {"fnfit",       "burgers1d",   "euler2d",
          "helmholtz2d", "helmholtz3d", "poisson10d"};
}

}  // namespace bspinn::prob
