#include "hpwl/eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <string>

#include <json.hpp>

#include "hpwl/errors.hpp"
#include "hpwl/io.hpp"
#include "hpwl/log.hpp"

namespace hpwl {

Eigen::VectorXi knn_predict(const Eigen::MatrixXd& train_x, const Eigen::VectorXi& train_y,
                            const Eigen::MatrixXd& test_x, int k_neighbors) {
  const Eigen::Index n_train = train_x.rows();
  if (n_train == 0) throw ConfigError("knn_predict needs a non-empty training set");
  if (train_y.size() != n_train) throw ConfigError("training labels do not match training rows");
  if (k_neighbors < 1 || k_neighbors > n_train)
    throw ConfigError("k_neighbors must be in [1, |train|]");

  Eigen::VectorXi predictions(test_x.rows());
  std::vector<Eigen::Index> order(static_cast<size_t>(n_train));
  for (Eigen::Index t = 0; t < test_x.rows(); ++t) {
    Eigen::VectorXd sq_dist(n_train);
    for (Eigen::Index i = 0; i < n_train; ++i)
      sq_dist(i) = (train_x.row(i) - test_x.row(t)).squaredNorm();

    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::partial_sort(order.begin(), order.begin() + k_neighbors, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        if (sq_dist(a) != sq_dist(b)) return sq_dist(a) < sq_dist(b);
                        return a < b;  // distance ties prefer the lower training index
                      });

    std::map<int, int> votes;
    for (int j = 0; j < k_neighbors; ++j) ++votes[train_y(order[static_cast<size_t>(j)])];
    int best_label = votes.begin()->first;
    int best_count = votes.begin()->second;
    for (const auto& [label, count] : votes) {
      if (count > best_count) {  // vote ties keep the smallest label (map order)
        best_count = count;
        best_label = label;
      }
    }
    predictions(t) = best_label;
  }
  return predictions;
}

double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& expected) {
  if (predicted.size() != expected.size() || predicted.size() == 0)
    throw ConfigError("accuracy needs two equal-length non-empty label vectors");
  return static_cast<double>((predicted.array() == expected.array()).count()) /
         static_cast<double>(predicted.size());
}

std::vector<int> sweep_feature_counts(Eigen::Index d) {
  std::vector<int> counts;
  for (int f = 10; f <= 200; f += 10)
    if (f <= d) counts.push_back(f);
  if (counts.empty() && d >= 1) counts.push_back(static_cast<int>(d));
  return counts;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Eigen::VectorXi take_labels(const Eigen::VectorXi& y, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

Eigen::MatrixXd take_top_features(const Eigen::MatrixXd& x, const std::vector<int>& order,
                                  int count) {
  Eigen::MatrixXd out(x.rows(), count);
  for (int j = 0; j < count; ++j) out.col(j) = x.col(order[static_cast<size_t>(j)]);
  return out;
}

}  // namespace

SweepResult run_sweep(const DataMatrix& x, const HpwlParams& params, Variant variant,
                      const std::vector<std::uint64_t>& seeds, int knn_k,
                      bool standardize_features) {
  if (!x.labels) throw ConfigError("the sweep protocol needs a labeled dataset");
  if (seeds.empty()) throw ConfigError("the sweep protocol needs at least one seed");

  SweepResult result;
  result.variant = variant;
  result.seeds = seeds;
  result.knn_k = knn_k;
  result.feature_counts = sweep_feature_counts(x.cols());
  if (x.cols() < 200)
    log_warn("feature counts above d=" + std::to_string(x.cols()) + " are skipped");

  const auto counts = result.feature_counts;
  result.accuracies.resize(static_cast<Eigen::Index>(seeds.size()),
                           static_cast<Eigen::Index>(counts.size()));

  for (size_t rep = 0; rep < seeds.size(); ++rep) {
    const Split split = split_half(x, seeds[rep]);
    Eigen::MatrixXd train_x = take_rows(x.values, split.train_indices);
    Eigen::MatrixXd test_x = take_rows(x.values, split.test_indices);
    const Eigen::VectorXi train_y = take_labels(*x.labels, split.train_indices);
    const Eigen::VectorXi test_y = take_labels(*x.labels, split.test_indices);

    if (standardize_features) {
      const Standardizer scaler = Standardizer::fit(train_x);
      train_x = scaler.apply(train_x);
      test_x = scaler.apply(test_x);
    }

    // The selector sees training features only; labels never reach it.
    DataMatrix train_features;
    train_features.values = train_x;
    const FeatureRanking ranking = fit(train_features, params, seeds[rep], variant);

    for (size_t ci = 0; ci < counts.size(); ++ci) {
      const int f = counts[ci];
      const Eigen::MatrixXd train_f = take_top_features(train_x, ranking.order, f);
      const Eigen::MatrixXd test_f = take_top_features(test_x, ranking.order, f);
      const int k_eff = std::min<int>(knn_k, static_cast<int>(train_f.rows()));
      const Eigen::VectorXi predicted = knn_predict(train_f, train_y, test_f, k_eff);
      result.accuracies(static_cast<Eigen::Index>(rep), static_cast<Eigen::Index>(ci)) =
          accuracy(predicted, test_y);
    }
  }

  const Eigen::Index reps = result.accuracies.rows();
  result.mean = result.accuracies.colwise().mean();
  result.stddev.resize(result.accuracies.cols());
  for (Eigen::Index c = 0; c < result.accuracies.cols(); ++c) {
    const double var =
        (result.accuracies.col(c).array() - result.mean(c)).square().sum() / double(reps);
    result.stddev(c) = std::sqrt(var);
  }
  return result;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "variant,seed,feature_count,accuracy\n";
  for (Eigen::Index rep = 0; rep < result.accuracies.rows(); ++rep)
    for (Eigen::Index c = 0; c < result.accuracies.cols(); ++c)
      out << to_string(result.variant) << ',' << result.seeds[static_cast<size_t>(rep)] << ','
          << result.feature_counts[static_cast<size_t>(c)] << ','
          << format_double(result.accuracies(rep, c)) << '\n';
}

void write_summary_json(const std::filesystem::path& path, const SweepResult& result) {
  nlohmann::ordered_json j;
  j["variant"] = to_string(result.variant);
  j["seeds"] = result.seeds;
  j["knn_k"] = result.knn_k;
  j["feature_counts"] = result.feature_counts;
  std::vector<double> mean(result.mean.data(), result.mean.data() + result.mean.size());
  std::vector<double> stddev(result.stddev.data(), result.stddev.data() + result.stddev.size());
  j["mean_accuracy"] = mean;
  j["std_accuracy"] = stddev;

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace hpwl
