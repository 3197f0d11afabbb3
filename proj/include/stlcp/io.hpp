#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stlcp/predictors.hpp"
#include "stlcp/semantics.hpp"
#include "stlcp/verify.hpp"

namespace stlcp {

struct Dataset {
  Schema schema;
  std::vector<Trajectory> trajectories;
};

/// CSV with header `traj_id,tau,<component names>`, rows sorted by
/// (traj_id, tau) with tau = 0, 1, ... per trajectory.
Dataset parse_trajectories_csv(std::string_view text);
std::string trajectories_csv(const Dataset& data);

/// One JSON object per line: {"id": ..., "states": [[...], ...]} with an
/// optional "names" array; components default to x1..xn.
Dataset parse_trajectories_jsonl(std::string_view text);

/// Dispatches on extension: .jsonl / .json are JSON lines, anything else CSV.
Dataset read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const Dataset& data);

/// Header `traj_id,t,tau,<components>`; per (traj_id, t) the tau values are
/// t+1, t+2, ... in order.
PredictionTable parse_prediction_table(std::string_view text);
std::string prediction_table_csv(const PredictionTable& table);
PredictionTable read_prediction_table(const std::filesystem::path& path);

/// Flat `key=value` text; `#` starts a comment line.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);

std::string predictor_artifact(const Predictor& predictor);
Predictor parse_predictor_artifact(std::string_view text,
                                   const std::filesystem::path& base_dir = {});

/// Self-describing calibration record; decimal values round-trip exactly.
std::string calibration_artifact(const Calibration& calibration);
Calibration parse_calibration_artifact(std::string_view text);

/// Single-line `key=value ...` verdict record.
std::string verdict_record(const Verdict& verdict, std::string_view config_hash = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

double parse_double(std::string_view text);
Step parse_step(std::string_view text);

}  // namespace stlcp
