#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hpwl/solver.hpp"

namespace hpwl {

// Round-trippable decimal formatting shared by every writer, so identical
// runs produce byte-identical files.
std::string format_double(double v);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// rank,feature_index,feature_name,score — one row per feature, best first.
void write_ranking_csv(const std::filesystem::path& path, const FeatureRanking& ranking,
                       const std::optional<std::vector<std::string>>& feature_names);

/// iteration,objective,err — one row per outer iteration.
void write_trace_csv(const std::filesystem::path& path, const SolverState& state);

}  // namespace hpwl
