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

#include "qbath/ml.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qbath::ml {
namespace {

constexpr double kRankTolerance = 1e-12;

void fix_sign(Eigen::Ref<RealVector> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

SplitChoice best_split(const RealMatrix& x, const RealVector& r, const std::vector<Eigen::Index>& rows) {
  SplitChoice best;
  const std::size_t n = rows.size();
  double total = 0.0;
  double total_sq = 0.0;
  for (Eigen::Index i : rows) {
    total += r(i);
    total_sq += r(i) * r(i);
  }
  const double parent_sse = total_sq - total * total / static_cast<double>(n);
  const double min_gain = 1e-12 * std::max(parent_sse, std::numeric_limits<double>::min());

  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a, f) < x(b, f); });
    double left_sum = 0.0;
    double left_sq = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double v = r(order[k]);
      left_sum += v;
      left_sq += v * v;
      const double lo = x(order[k], f);
      const double hi = x(order[k + 1], f);
      if (!(hi > lo)) continue;
      const auto nl = static_cast<double>(k + 1);
      const auto nr = static_cast<double>(n - k - 1);
      const double right_sum = total - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse = (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
      const double gain = parent_sse - sse;
      if (gain > min_gain && gain > best.gain) {
        best.feature = static_cast<int>(f);
        best.threshold = lo + 0.5 * (hi - lo);
        best.gain = gain;
      }
    }
  }
  return best;
}

int grow(Tree& tree, const RealMatrix& x, const RealVector& r, const std::vector<Eigen::Index>& rows, int depth,
         int max_depth) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  double sum = 0.0;
  for (Eigen::Index i : rows) sum += r(i);
  tree.nodes[static_cast<std::size_t>(id)].value = sum / static_cast<double>(rows.size());
  if (depth >= max_depth || rows.size() < 2) return id;

  const SplitChoice split = best_split(x, r, rows);
  if (split.feature < 0) return id;
  std::vector<Eigen::Index> left;
  std::vector<Eigen::Index> right;
  for (Eigen::Index i : rows) (x(i, split.feature) <= split.threshold ? left : right).push_back(i);
  const int l = grow(tree, x, r, left, depth + 1, max_depth);
  const int rr = grow(tree, x, r, right, depth + 1, max_depth);
  Tree::Node& node = tree.nodes[static_cast<std::size_t>(id)];
  node.feature = split.feature;
  node.threshold = split.threshold;
  node.left = l;
  node.right = rr;
  return id;
}

int node_depth(const Tree& t, int id) {
  const Tree::Node& n = t.nodes[static_cast<std::size_t>(id)];
  if (n.feature < 0) return 0;
  return 1 + std::max(node_depth(t, n.left), node_depth(t, n.right));
}

void write_vector(std::ostream& out, const char* tag, const RealVector& v) {
  out << tag;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
  out << '\n';
}

std::istringstream next_record(std::istream& in, const std::string& expected) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag != expected) throw ParseError("model file: expected '" + expected + "', found '" + tag + "'");
    return fields;
  }
  throw ParseError("model file: unexpected end of input, expected '" + expected + "'");
}

RealVector read_vector(std::istream& in, const std::string& tag, Eigen::Index n) {
  std::istringstream fields = next_record(in, tag);
  RealVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(fields >> v(i))) throw ParseError("model file: short '" + tag + "' record");
  }
  return v;
}

}  // namespace

void Dataset::validate() const {
  if (features.rows() != targets.rows()) throw DomainError("feature and target row counts differ");
  if (static_cast<Eigen::Index>(target_names.size()) != targets.cols()) {
    throw DomainError("target names do not match the target columns");
  }
  if (!run_ids.empty() && static_cast<Eigen::Index>(run_ids.size()) != features.rows()) {
    throw DomainError("run ids do not match the row count");
  }
  if (!features.allFinite() || !targets.allFinite()) throw DomainError("dataset contains non-finite values");
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.target_names = target_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()), targets.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto dst = static_cast<Eigen::Index>(k);
    out.features.row(dst) = features.row(rows[k]);
    out.targets.row(dst) = targets.row(rows[k]);
    if (!run_ids.empty()) out.run_ids.push_back(run_ids[static_cast<std::size_t>(rows[k])]);
  }
  return out;
}

int Dataset::target_index(const std::string& name) const {
  const auto it = std::find(target_names.begin(), target_names.end(), name);
  return it == target_names.end() ? -1 : static_cast<int>(it - target_names.begin());
}

PcaModel pca_fit(const RealMatrix& x, int n_components) {
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  if (m < 2) throw DomainError("PCA needs at least 2 rows");
  if (n_components < 1 || n_components > std::min(m, n)) {
    throw DomainError("n_components must lie in [1, min(rows, cols)]");
  }
  PcaModel model;
  model.mean = x.colwise().mean().transpose();
  const RealMatrix xc = x.rowwise() - model.mean.transpose();

  RealVector values;
  RealMatrix vectors;  // n x r, columns are components
  if (m < n) {
    // Dual form: eigenvectors of the m x m Gram matrix share the nonzero spectrum.
    const RealMatrix gram = (xc * xc.transpose()) / static_cast<double>(m);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(gram);
    values = solver.eigenvalues().reverse();
    const RealMatrix u = solver.eigenvectors().rowwise().reverse();
    vectors.resize(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      if (values(k) > 0.0) {
        vectors.col(k) = xc.transpose() * u.col(k) / std::sqrt(static_cast<double>(m) * values(k));
      } else {
        vectors.col(k).setZero();
      }
    }
  } else {
    const RealMatrix cov = (xc.transpose() * xc) / static_cast<double>(m);
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(cov);
    values = solver.eigenvalues().reverse();
    vectors = solver.eigenvectors().rowwise().reverse();
  }

  const double top = std::max(values(0), 0.0);
  Eigen::Index rank = 0;
  while (rank < values.size() && values(rank) > kRankTolerance * top && top > 0.0) ++rank;
  Eigen::Index k = n_components;
  if (rank < k) {
    model.truncated = true;
    k = std::max<Eigen::Index>(rank, 1);
  }
  model.components.resize(k, n);
  model.explained_variance.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    RealVector v = vectors.col(c);
    if (v.norm() > 0.0) v.normalize();
    fix_sign(v);
    model.components.row(c) = v.transpose();
    model.explained_variance(c) = std::max(values(c), 0.0);
  }
  return model;
}

RealMatrix pca_transform(const PcaModel& model, const RealMatrix& x) {
  if (x.cols() != model.n_features()) {
    throw DomainError("PCA expects " + std::to_string(model.n_features()) + " columns, got " +
                      std::to_string(x.cols()));
  }
  return (x.rowwise() - model.mean.transpose()) * model.components.transpose();
}

RealMatrix pca_inverse_transform(const PcaModel& model, const RealMatrix& z) {
  if (z.cols() != model.n_components()) throw DomainError("PCA inverse expects n_components columns");
  return (z * model.components).rowwise() + model.mean.transpose();
}

double Tree::predict(const RealVector& x) const {
  int id = 0;
  while (true) {
    const Node& n = nodes[static_cast<std::size_t>(id)];
    if (n.feature < 0) return n.value;
    id = x(n.feature) <= n.threshold ? n.left : n.right;
  }
}

int Tree::depth() const { return nodes.empty() ? 0 : node_depth(*this, 0); }

Tree fit_tree(const RealMatrix& x, const RealVector& residual, const std::vector<Eigen::Index>& rows, int max_depth) {
  if (rows.empty()) throw DomainError("tree needs at least one row");
  Tree t;
  grow(t, x, residual, rows, 0, max_depth);
  return t;
}

GbtModel gbt_fit(const RealMatrix& x, const RealMatrix& y, const GbtHyper& hyper, std::uint64_t seed) {
  const Eigen::Index m = x.rows();
  if (m < 2) throw DomainError("boosting needs at least 2 rows");
  if (y.rows() != m) throw DomainError("feature and target row counts differ");
  if (hyper.n_estimators < 0 || hyper.max_depth < 0) throw DomainError("n_estimators and max_depth must be >= 0");
  if (!(hyper.subsample > 0.0 && hyper.subsample <= 1.0)) throw DomainError("subsample must lie in (0, 1]");

  GbtModel model;
  model.hyper = hyper;
  model.n_features = static_cast<int>(x.cols());
  const auto draw = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hyper.subsample * m)));
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    Ensemble e;
    e.base = y.col(t).mean();
    RealVector pred = RealVector::Constant(m, e.base);
    std::vector<Eigen::Index> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    for (int round = 0; round < hyper.n_estimators; ++round) {
      const RealVector residual = y.col(t) - pred;
      std::vector<Eigen::Index> rows = all;
      if (draw < rows.size()) {
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(draw);
        std::sort(rows.begin(), rows.end());
      }
      Tree tree = fit_tree(x, residual, rows, hyper.max_depth);
      for (Eigen::Index i = 0; i < m; ++i) pred(i) += hyper.learning_rate * tree.predict(x.row(i).transpose());
      e.trees.push_back(std::move(tree));
    }
    model.ensembles.push_back(std::move(e));
  }
  return model;
}

RealMatrix gbt_predict(const GbtModel& model, const RealMatrix& x) {
  if (x.cols() != model.n_features) {
    throw DomainError("model expects " + std::to_string(model.n_features) + " features, got " +
                      std::to_string(x.cols()));
  }
  RealMatrix out(x.rows(), static_cast<Eigen::Index>(model.ensembles.size()));
  for (std::size_t t = 0; t < model.ensembles.size(); ++t) {
    const Ensemble& e = model.ensembles[t];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const RealVector row = x.row(i).transpose();
      double v = e.base;
      for (const Tree& tree : e.trees) v += model.hyper.learning_rate * tree.predict(row);
      out(i, static_cast<Eigen::Index>(t)) = v;
    }
  }
  return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DomainError("train_fraction must lie in (0, 1)");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ds.rows())));
  const std::vector<Eigen::Index> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<Eigen::Index> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {ds.subset(train), ds.subset(test)};
}

std::vector<TargetScore> evaluate(const RealMatrix& pred, const RealMatrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) throw DomainError("prediction shape mismatch");
  if (truth.rows() == 0) throw DomainError("nothing to evaluate");
  std::vector<TargetScore> scores(static_cast<std::size_t>(truth.cols()));
  for (Eigen::Index t = 0; t < truth.cols(); ++t) {
    TargetScore& s = scores[static_cast<std::size_t>(t)];
    const double ss_res = (pred.col(t) - truth.col(t)).squaredNorm();
    const double ss_tot = (truth.col(t).array() - truth.col(t).mean()).matrix().squaredNorm();
    s.mse = ss_res / static_cast<double>(truth.rows());
    if (ss_tot > 0.0) {
      s.r2 = 1.0 - ss_res / ss_tot;
    } else {
      s.r2 = std::numeric_limits<double>::quiet_NaN();
      s.r2_defined = false;
    }
  }
  return scores;
}

RealMatrix Pipeline::predict(const RealMatrix& features) const { return gbt_predict(gbt, pca_transform(pca, features)); }

Pipeline fit_pipeline(const Dataset& train, int n_components, const GbtHyper& hyper, std::uint64_t seed) {
  train.validate();
  Pipeline p;
  p.pca = pca_fit(train.features, n_components);
  p.gbt = gbt_fit(pca_transform(p.pca, train.features), train.targets, hyper, seed);
  p.target_names = train.target_names;
  return p;
}

void save_pipeline(const Pipeline& p, std::ostream& out) {
  out.precision(17);
  out << kModelSchema << '\n';
  out << "pca " << p.pca.n_features() << ' ' << p.pca.n_components() << '\n';
  write_vector(out, "mean", p.pca.mean);
  write_vector(out, "explained", p.pca.explained_variance);
  for (Eigen::Index c = 0; c < p.pca.n_components(); ++c) {
    write_vector(out, "component", p.pca.components.row(c).transpose());
  }
  const GbtHyper& h = p.gbt.hyper;
  out << "gbt " << p.gbt.ensembles.size() << ' ' << p.gbt.n_features << ' ' << h.n_estimators << ' ' << h.max_depth
      << ' ' << h.learning_rate << ' ' << h.subsample << '\n';
  for (std::size_t t = 0; t < p.gbt.ensembles.size(); ++t) {
    const Ensemble& e = p.gbt.ensembles[t];
    const std::string name = t < p.target_names.size() ? p.target_names[t] : "target_" + std::to_string(t);
    out << "target " << name << ' ' << e.base << ' ' << e.trees.size() << '\n';
    for (const Tree& tree : e.trees) {
      out << "tree " << tree.nodes.size() << '\n';
      for (const Tree::Node& n : tree.nodes) {
        out << "node " << n.feature << ' ' << n.threshold << ' ' << n.left << ' ' << n.right << ' ' << n.value << '\n';
      }
    }
  }
  out << "end\n";
  if (!out) throw IoError("failed to write model");
}

Pipeline load_pipeline(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && line.empty()) {
  }
  if (line != kModelSchema) throw ParseError("model file: unsupported schema tag '" + line + "'");
  Pipeline p;
  Eigen::Index n_features = 0;
  Eigen::Index n_components = 0;
  {
    std::istringstream f = next_record(in, "pca");
    if (!(f >> n_features >> n_components) || n_features < 1 || n_components < 1) {
      throw ParseError("model file: bad 'pca' record");
    }
  }
  p.pca.mean = read_vector(in, "mean", n_features);
  p.pca.explained_variance = read_vector(in, "explained", n_components);
  p.pca.components.resize(n_components, n_features);
  for (Eigen::Index c = 0; c < n_components; ++c) {
    p.pca.components.row(c) = read_vector(in, "component", n_features).transpose();
  }
  std::size_t n_targets = 0;
  {
    std::istringstream f = next_record(in, "gbt");
    GbtHyper& h = p.gbt.hyper;
    if (!(f >> n_targets >> p.gbt.n_features >> h.n_estimators >> h.max_depth >> h.learning_rate >> h.subsample)) {
      throw ParseError("model file: bad 'gbt' record");
    }
  }
  for (std::size_t t = 0; t < n_targets; ++t) {
    std::istringstream f = next_record(in, "target");
    std::string name;
    Ensemble e;
    std::size_t n_trees = 0;
    if (!(f >> name >> e.base >> n_trees)) throw ParseError("model file: bad 'target' record");
    for (std::size_t k = 0; k < n_trees; ++k) {
      std::size_t n_nodes = 0;
      if (!(next_record(in, "tree") >> n_nodes) || n_nodes == 0) throw ParseError("model file: bad 'tree' record");
      Tree tree;
      tree.nodes.resize(n_nodes);
      for (std::size_t id = 0; id < n_nodes; ++id) {
        Tree::Node& n = tree.nodes[id];
        std::istringstream nf = next_record(in, "node");
        if (!(nf >> n.feature >> n.threshold >> n.left >> n.right >> n.value)) {
          throw ParseError("model file: bad 'node' record");
        }
        const auto limit = static_cast<int>(n_nodes);
        const auto self = static_cast<int>(id);
        if (n.feature >= 0 && (n.left <= self || n.left >= limit || n.right <= self || n.right >= limit ||
                               n.feature >= p.gbt.n_features)) {
          throw ParseError("model file: node references out of range");
        }
      }
      e.trees.push_back(std::move(tree));
    }
    p.target_names.push_back(name);
    p.gbt.ensembles.push_back(std::move(e));
  }
  next_record(in, "end");
  if (p.gbt.n_features != n_components) throw ParseError("model file: PCA width does not match the trees");
  return p;
}

}  // namespace qbath::ml
