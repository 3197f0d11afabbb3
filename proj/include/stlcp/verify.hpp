#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlcp/conformal.hpp"
#include "stlcp/formula.hpp"
#include "stlcp/predictors.hpp"
#include "stlcp/semantics.hpp"

namespace stlcp {

enum class Method { Direct, Indirect };

const char* method_name(Method method) noexcept;
Method parse_method(std::string_view name);

/// A monitoring instance: formula enabled at tau0, observations up to t.
struct MonitorSetup {
  Formula formula;
  Schema schema;
  Step tau0 = 0;
  Step t = 0;

  HorizonSpec timing() const;
};

/// Calibrated prediction region. Direct: one constant on the robustness
/// error. Indirect: one radius per prediction step t+1..t+H.
struct Calibration {
  Method method = Method::Direct;
  double delta = 0.0;
  std::size_t k = 0;
  Step tau0 = 0;
  Step t = 0;
  Step horizon = 0;
  Norm norm = Norm::L2;
  std::string formula_hash;  // empty for indirect (regions do not depend on the formula)
  std::vector<RegionConstant> regions;
  std::vector<double> scores;  // direct nonconformity scores, kept for reporting

  std::size_t rank() const noexcept { return regions.empty() ? 0 : regions.front().rank; }
};

struct Verdict {
  Method method = Method::Direct;
  double robustness = 0.0;  // rho_hat (direct) or worst-case rho_bar (indirect)
  std::vector<RegionConstant> regions;
  bool guaranteed = false;
  double delta = 0.0;  // certified failure probability; 0 when decided from observations
  Step t = 0;
  Step tau0 = 0;
  Step horizon = 0;
  std::string formula_hash;
  bool decided_by_observation = false;
  std::vector<PredicateDiagnostic> diagnostics;  // indirect only
};

/// R_i = rho(xhat_i, tau0) - rho(x_i, tau0) for each validation trajectory.
std::vector<double> direct_scores(const Predictor& predictor, std::span<const Trajectory> val,
                                  const MonitorSetup& setup);

Calibration calibrate_direct(const Predictor& predictor, std::span<const Trajectory> val,
                             const MonitorSetup& setup, double delta);

/// Guaranteed iff rho_hat > C (strict).
Verdict verify_direct(const Trajectory& observed, const Predictor& predictor,
                      const MonitorSetup& setup, const Calibration& calibration);

/// scores[i][j] = ||x_j(t+1+i) - xhat_j(t+1+i)||.
std::vector<std::vector<double>> indirect_scores(const Predictor& predictor,
                                                 std::span<const Trajectory> val, Step t,
                                                 Step horizon, Norm norm);

Calibration calibrate_indirect(const Predictor& predictor, std::span<const Trajectory> val, Step t,
                               Step horizon, double delta, Norm norm);

/// Guaranteed iff the worst-case robustness over the prediction balls is
/// > 0 (strict). The formula must be in positive normal form.
Verdict verify_indirect(const Trajectory& observed, const Predictor& predictor,
                        const MonitorSetup& setup, const Calibration& calibration);

struct DeltaSearchResult {
  double delta = 0.0;
  Verdict verdict;
};

/// Smallest grid delta whose verdict is guaranteed. `grid` ascending in (0, 1).
std::optional<DeltaSearchResult> min_delta_search(Method method, const Predictor& predictor,
                                                  std::span<const Trajectory> val,
                                                  const Trajectory& observed,
                                                  const MonitorSetup& setup,
                                                  std::span<const double> grid,
                                                  Norm norm = Norm::L2);

}  // namespace stlcp
