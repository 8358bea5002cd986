#include "hpwl/io.hpp"

#include <cstdio>
#include <fstream>

#include "hpwl/errors.hpp"

namespace hpwl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_ranking_csv(const std::filesystem::path& path, const FeatureRanking& ranking,
                       const std::optional<std::vector<std::string>>& feature_names) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "rank,feature_index,feature_name,score\n";
  for (size_t r = 0; r < ranking.order.size(); ++r) {
    const int idx = ranking.order[r];
    const std::string name = feature_names && static_cast<size_t>(idx) < feature_names->size()
                                 ? (*feature_names)[static_cast<size_t>(idx)]
                                 : "f" + std::to_string(idx);
    out << r << ',' << idx << ',' << name << ',' << format_double(ranking.scores(idx)) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const SolverState& state) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "iteration,objective,err\n";
  for (size_t i = 0; i < state.objective_trace.size(); ++i)
    out << (i + 1) << ',' << format_double(state.objective_trace[i]) << ','
        << format_double(state.err_trace[i]) << '\n';
}

}  // namespace hpwl
