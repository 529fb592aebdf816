#pragma once

#include <stdexcept>
#include <string>

namespace diracstab {

struct OutsideGap : std::runtime_error {
  explicit OutsideGap(const std::string& what) : std::runtime_error(what) {}
};
struct InadmissiblePair : std::invalid_argument {
  explicit InadmissiblePair(const std::string& what) : std::invalid_argument(what) {}
};
struct NoConvergence : std::runtime_error {
  double last_residual;
  NoConvergence(const std::string& what, double residual)
      : std::runtime_error(what), last_residual(residual) {}
};
struct InsufficientFamily : std::invalid_argument {
  explicit InsufficientFamily(const std::string& what) : std::invalid_argument(what) {}
};
struct TailUnderflow : std::runtime_error {
  explicit TailUnderflow(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};
struct NoConvergenceQR : std::runtime_error {
  int failing_index;
  NoConvergenceQR(const std::string& what, int index)
      : std::runtime_error(what), failing_index(index) {}
};
struct MissingAlpha0 : std::invalid_argument {
  explicit MissingAlpha0(const std::string& what) : std::invalid_argument(what) {}
};
struct NotAnEmbedding : std::invalid_argument {
  explicit NotAnEmbedding(const std::string& what) : std::invalid_argument(what) {}
};
struct NotHyperbolic : std::runtime_error {
  explicit NotHyperbolic(const std::string& what) : std::runtime_error(what) {}
};
struct IntegrationFailure : std::runtime_error {
  explicit IntegrationFailure(const std::string& what) : std::runtime_error(what) {}
};
struct ContourTouchesEssential : std::invalid_argument {
  explicit ContourTouchesEssential(const std::string& what) : std::invalid_argument(what) {}
};
struct NotSmallBranch : std::runtime_error {
  explicit NotSmallBranch(const std::string& what) : std::runtime_error(what) {}
};
struct NonmonotoneWeight : std::invalid_argument {
  explicit NonmonotoneWeight(const std::string& what) : std::invalid_argument(what) {}
};
struct HypothesisFails : std::invalid_argument {
  explicit HypothesisFails(const std::string& what) : std::invalid_argument(what) {}
};
struct ThresholdLambda : std::invalid_argument {
  explicit ThresholdLambda(const std::string& what) : std::invalid_argument(what) {}
};
struct ConfigInvalid : std::invalid_argument {
  std::string field;
  ConfigInvalid(const std::string& field_path, const std::string& what)
      : std::invalid_argument(field_path + ": " + what), field(field_path) {}
};

}  // namespace diracstab
