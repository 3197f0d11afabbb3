#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stlcp/formula.hpp"
#include "stlcp/predictors.hpp"
#include "stlcp/verify.hpp"

namespace stlcp {

enum class SystemKind { DriftSine, SwitchingNoise, FallingRecovery };

const char* system_name(SystemKind kind) noexcept;
SystemKind parse_system(std::string_view name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Synthetic stochastic system. Field meaning per kind:
///
///   drift-sine (x):      x = x0 + drift*s + A sin(frequency*s + phase) + noise * W_s
///   switching-noise (x, y): x = drift*s + noise*e; y = y0 + mode*slope*max(0, s - switch)
///                        + noise*e', mode = +1 with probability mode_probability, else -1
///   falling-recovery (h): h = h0 - depth * (s/dip) * exp(1 - s/dip) + noise * W_s
///
/// W is a Gaussian random walk (W_0 = 0), e i.i.d. standard normal.
/// `initial` samples x0 / y0 / h0, `timing` the phase / switch time / dip
/// time, `magnitude` the amplitude / slope / depth, all uniformly.
struct SyntheticSystem {
  SystemKind kind = SystemKind::DriftSine;
  Step length = 60;
  double noise_scale = 0.05;
  Range initial{0.5, 1.5};
  Range timing{0.0, 6.283185307179586};
  Range magnitude{0.5, 0.5};
  double drift = 0.02;
  double frequency = 0.2;
  double mode_probability = 0.5;

  static SyntheticSystem preset(SystemKind kind);
  Schema schema() const;
};

/// K i.i.d. trajectories with ids "0".."K-1". Trajectory i uses its own
/// generator derived from (seed, i), so output does not depend on K.
std::vector<Trajectory> generate(const SyntheticSystem& system, std::size_t count,
                                 std::uint64_t seed);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
  double marker = 0.0;  // region constant C
};

Histogram histogram_export(const std::vector<double>& scores, double marker, std::size_t bins);
std::string histogram_csv(const Histogram& h);

struct EvalConfig {
  Method method = Method::Direct;
  SyntheticSystem system;
  Formula formula = Formula::truth();
  Step tau0 = 0;
  Step t = 0;
  double delta = 0.05;
  std::size_t n_train = 700;
  std::size_t n_val = 200;
  std::size_t n_test = 100;
  std::uint64_t seed = 1;
  PredictorKind predictor = PredictorKind::Autoregressive;
  std::size_t ar_order = 3;
  Norm norm = Norm::L2;
  std::size_t histogram_bins = 20;
};

struct TestOutcome {
  std::string id;
  double robustness = 0.0;            // rho_hat (direct) or rho_bar (indirect)
  double predicted_robustness = 0.0;  // rho(xhat, tau0)
  double true_robustness = 0.0;       // rho(x, tau0)
  bool guaranteed = false;
  bool satisfied = false;
  bool covered = false;  // the calibrated region inequality held
};

struct EvalReport {
  Method method = Method::Direct;
  std::size_t guaranteed_satisfied = 0;
  std::size_t guaranteed_violated = 0;
  std::size_t unguaranteed_satisfied = 0;
  std::size_t unguaranteed_violated = 0;
  std::size_t covered = 0;
  std::size_t test_size = 0;
  bool infinite_region = false;
  Calibration calibration;
  Histogram histogram;
  std::vector<TestOutcome> outcomes;

  double coverage() const noexcept {
    return test_size ? static_cast<double>(covered) / static_cast<double>(test_size) : 0.0;
  }
};

/// generate -> split -> fit -> calibrate -> verify every test trajectory.
EvalReport evaluate(const EvalConfig& config);

/// Key-value summary of a report, one `key=value` per line.
std::string report_summary(const EvalReport& report);
/// Per-test-trajectory CSV.
std::string outcomes_csv(const EvalReport& report);

}  // namespace stlcp
