#include "mvcorr/gradcheck.hpp"

#include <cmath>
#include <vector>

namespace mvcorr {

GradCheckReport finite_diff_check(const std::vector<ParamBlock>& params,
                                  const std::function<double()>& value,
                                  const std::vector<ParamBlock>& analytic,
                                  double step) {
  if (total_size(params) != total_size(analytic)) {
    throw DimensionError("finite_diff_check: parameter/gradient sizes differ");
  }
  // Snapshot the analytic gradient: re-evaluating `value` below may refresh
  // the buffers it lives in.
  std::vector<double> grad;
  grad.reserve(total_size(analytic));
  for (const ParamBlock& b : analytic) {
    grad.insert(grad.end(), b.data, b.data + b.size);
  }

  GradCheckReport report;
  Index flat = 0;
  for (const ParamBlock& b : params) {
    for (Index i = 0; i < b.size; ++i, ++flat) {
      const double saved = b.data[i];
      b.data[i] = saved + step;
      const double plus = value();
      b.data[i] = saved - step;
      const double minus = value();
      b.data[i] = saved;

      const double fd = (plus - minus) / (2.0 * step);
      const double a = grad[static_cast<size_t>(flat)];
      const double rel = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_entry = flat;
        report.analytic = a;
        report.numeric = fd;
      }
    }
  }
  return report;
}

}  // namespace mvcorr
