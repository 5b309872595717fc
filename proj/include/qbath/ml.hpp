// Copyright 2026 The qbath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QBATH_ML_HPP
#define QBATH_ML_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qbath/core.hpp"

namespace qbath::ml {

/// Feature rows paired with named target columns.
struct Dataset {
  RealMatrix features;
  RealMatrix targets;
  std::vector<std::string> target_names;
  std::vector<long> run_ids;

  Eigen::Index rows() const { return features.rows(); }
  /// Throws DomainError on row-count mismatch or non-finite entries.
  void validate() const;
  /// Rows in the given order.
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
  /// Column index of a target name, or -1.
  int target_index(const std::string& name) const;
};

struct PcaModel {
  RealVector mean;
  RealMatrix components;  ///< n_components x n_features, orthonormal rows
  RealVector explained_variance;
  /// Set when fewer components than requested were available.
  bool truncated = false;

  Eigen::Index n_components() const { return components.rows(); }
  Eigen::Index n_features() const { return components.cols(); }
};

/// Population-covariance PCA (1/m normalization). Components whose eigenvalue is below 1e-12 of
/// the largest are dropped and `truncated` is set. Each component's largest-magnitude entry is positive.
PcaModel pca_fit(const RealMatrix& x, int n_components);

/// (X - mean) components^T.
RealMatrix pca_transform(const PcaModel& model, const RealMatrix& x);

/// mean + Z components.
RealMatrix pca_inverse_transform(const PcaModel& model, const RealMatrix& z);

struct GbtHyper {
  int n_estimators = 300;
  int max_depth = 6;
  double learning_rate = 0.02;
  double subsample = 0.9;
};

/// Regression tree stored as a flat node list; feature < 0 marks a leaf.
struct Tree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;  ///< x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double predict(const RealVector& x) const;
  int depth() const;
};

struct Ensemble {
  double base = 0.0;
  std::vector<Tree> trees;
};

struct GbtModel {
  GbtHyper hyper;
  int n_features = 0;
  std::vector<Ensemble> ensembles;  ///< one per target column
};

/// Independent squared-error boosting per target column.
GbtModel gbt_fit(const RealMatrix& x, const RealMatrix& y, const GbtHyper& hyper, std::uint64_t seed);

RealMatrix gbt_predict(const GbtModel& model, const RealMatrix& x);

/// Single regression tree on (x, residual) restricted to `rows`.
Tree fit_tree(const RealMatrix& x, const RealVector& residual, const std::vector<Eigen::Index>& rows, int max_depth);

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct TargetScore {
  double mse = 0.0;
  double r2 = 0.0;
  bool r2_defined = true;  ///< false when the truth column has zero variance (r2 is then NaN)
};

std::vector<TargetScore> evaluate(const RealMatrix& pred, const RealMatrix& truth);

/// PCA followed by boosted trees, with the target labels it was trained on.
struct Pipeline {
  PcaModel pca;
  GbtModel gbt;
  std::vector<std::string> target_names;

  RealMatrix predict(const RealMatrix& features) const;
};

Pipeline fit_pipeline(const Dataset& train, int n_components, const GbtHyper& hyper, std::uint64_t seed);

inline constexpr const char* kModelSchema = "qbath-model/1";

/// Plain-text serialization: schema tag, PCA mean/variances/components, then per target the
/// base value and every tree as "node feature threshold left right value" lines.
void save_pipeline(const Pipeline& p, std::ostream& out);
Pipeline load_pipeline(std::istream& in);

}  // namespace qbath::ml

#endif  // QBATH_ML_HPP
