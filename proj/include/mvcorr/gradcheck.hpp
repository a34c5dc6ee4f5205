#pragma once

#include <functional>

#include "mvcorr/params.hpp"

namespace mvcorr {

/// Central-difference comparison of an analytic gradient. `value` must
/// re-evaluate the scalar objective from the (perturbed) parameters;
/// `analytic` is read once up front so the caller may hand over live gradient
/// buffers. Per-entry relative error is |a - fd| / max(1, |a|, |fd|).
struct GradCheckReport {
  double max_rel_err = 0;
  Index worst_entry = -1;  // flat index across blocks
  double analytic = 0, numeric = 0;
};

GradCheckReport finite_diff_check(const std::vector<ParamBlock>& params,
                                  const std::function<double()>& value,
                                  const std::vector<ParamBlock>& analytic,
                                  double step = 1e-5);

}  // namespace mvcorr
