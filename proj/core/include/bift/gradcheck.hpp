#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bift/layers.hpp"
#include "bift/tape.hpp"

namespace bift {

// Central-difference gradient verification, f64 only. For each checked
// coordinate: numeric = (L(th+eps) - L(th-eps)) / (2 eps), and
// rel_err = |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
struct FiniteDiffResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_coord = -1;
  int64_t coords_checked = 0;
};

// `build` must be a pure function of the parameters in `ps` (same graph,
// same constants every call). With max_coords_per_param = 0 every
// coordinate is checked; otherwise a deterministic random subset of that
// size per parameter (coord_seed picks the subset).
FiniteDiffResult finite_diff_check(ParamStore<double>& ps,
                                   const std::function<int(Tape<double>&)>& build,
                                   double eps = 1e-4, int64_t max_coords_per_param = 0,
                                   uint64_t coord_seed = 1);

// One named entry of the gradient suite.
struct GradCheckCase {
  std::string name;
  std::function<FiniteDiffResult(uint64_t seed)> run;
};

// Every differentiable op, each on small random f64 instances.
std::vector<GradCheckCase> op_gradcheck_cases();

// End-to-end composite graphs: each conditioning scheme's generator (and the
// discriminator) at dims <= (2,4,8,8), loss through the full network.
std::vector<GradCheckCase> scheme_gradcheck_cases();

struct GradCheckReport {
  struct Row {
    std::string name;
    double max_rel_err;
  };
  std::vector<Row> rows;
  double tolerance = 1e-5;
  bool passed() const {
    for (const auto& r : rows)
      if (!(r.max_rel_err < tolerance)) return false;
    return true;
  }
};

// Runs the full suite (ops + schemes) with the given seed.
GradCheckReport run_gradcheck(uint64_t seed, double tolerance = 1e-5);

}  // namespace bift
