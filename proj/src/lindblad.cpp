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

#include "qbath/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qbath {
namespace {

constexpr double kPatternTol = 0.0;

void check_dims(const OperatorMatrix& h, std::span<const CollapseOperator> collapse, const ComplexMatrix& rho) {
  if (h.rows() != h.cols() || rho.rows() != rho.cols() || h.rows() != rho.rows()) {
    throw DomainError("Hamiltonian and state dimensions do not match");
  }
  for (const CollapseOperator& c : collapse) {
    if (c.op.rows() != h.rows() || c.op.cols() != h.cols()) {
      throw DomainError("collapse operator dimension does not match the Hamiltonian");
    }
  }
}

Eigen::SparseMatrix<Complex, Eigen::ColMajor> to_sparse(const ComplexMatrix& m) {
  return m.sparseView(Complex{0.0, 0.0}, kPatternTol);
}

// True when every row and every column of m has at most one nonzero.
bool is_monomial(const ComplexMatrix& m) {
  std::vector<int> row_count(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    int col_count = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != Complex{0.0, 0.0}) {
        if (++col_count > 1 || ++row_count[static_cast<std::size_t>(i)] > 1) return false;
      }
    }
  }
  return true;
}

}  // namespace

const char* channel_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Dephasing:
      return "dephasing";
    case ChannelKind::Emission:
      return "emission";
    case ChannelKind::Absorption:
      return "absorption";
  }
  return "unknown";
}

std::vector<CollapseOperator> build_collapse_operators(const BathTopology& topo) {
  topo.validate();
  std::vector<CollapseOperator> out;
  for (const NodeRate& d : topo.dephasing) {
    if (d.rate == 0.0) continue;
    out.push_back({{ChannelKind::Dephasing, d.site, d.rate},
                   std::sqrt(d.rate) * lift_pauli(PauliAxis::Z, d.site, topo.n_qubits)});
  }
  for (const NodeRate& th : topo.thermal) {
    if (th.rate == 0.0) continue;
    const double n_th = thermal_occupation(topo.beta, topo.omega[static_cast<std::size_t>(th.site)]);
    const double down = th.rate * (1.0 + n_th);
    const double up = th.rate * n_th;
    out.push_back({{ChannelKind::Emission, th.site, down}, std::sqrt(down) * lift_lowering(th.site, topo.n_qubits)});
    if (up > 0.0) {
      out.push_back({{ChannelKind::Absorption, th.site, up}, std::sqrt(up) * lift_raising(th.site, topo.n_qubits)});
    }
  }
  return out;
}

ComplexMatrix lindblad_rhs(const OperatorMatrix& h, std::span<const CollapseOperator> collapse,
                           const ComplexMatrix& rho) {
  check_dims(h, collapse, rho);
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const CollapseOperator& c : collapse) {
    const ComplexMatrix ldag_l = c.op.adjoint() * c.op;
    out += c.op * rho * c.op.adjoint() - 0.5 * (ldag_l * rho + rho * ldag_l);
  }
  return out;
}

void TimeGrid::validate() const {
  if (n_points < 2) throw DomainError("time grid needs at least 2 points");
  if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end)) {
    throw DomainError("time grid needs finite t_end > t_start");
  }
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) t[static_cast<std::size_t>(k)] = time(k);
  return t;
}

int Trajectory::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return static_cast<int>(j);
  }
  return -1;
}

std::vector<double> Trajectory::series(const std::string& name) const {
  const int j = index_of(name);
  if (j < 0) throw DomainError("no observable named '" + name + "'");
  std::vector<double> out(static_cast<std::size_t>(expectations.rows()));
  for (Eigen::Index k = 0; k < expectations.rows(); ++k) out[static_cast<std::size_t>(k)] = expectations(k, j).real();
  return out;
}

LindbladGenerator::LindbladGenerator(const OperatorMatrix& h, std::span<const CollapseOperator> collapse)
    : dim_(h.rows()) {
  check_dims(h, collapse, ComplexMatrix::Zero(h.rows(), h.cols()));
  ComplexMatrix heff = h;
  for (const CollapseOperator& c : collapse) {
    const ComplexMatrix ldag_l = c.op.adjoint() * c.op;
    heff -= 0.5 * kI * ldag_l;
    if (is_monomial(c.op)) {
      MonomialJump jump;
      for (Eigen::Index j = 0; j < c.op.cols(); ++j) {
        for (Eigen::Index i = 0; i < c.op.rows(); ++i) {
          if (c.op(i, j) != Complex{0.0, 0.0}) {
            jump.rows.push_back(i);
            jump.cols.push_back(j);
            jump.values.push_back(c.op(i, j));
          }
        }
      }
      monomial_.push_back(std::move(jump));
    } else {
      general_.push_back(to_sparse(c.op));
    }
  }
  heff_ = to_sparse(heff);
  heff_.makeCompressed();

  const ComplexMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  max_frequency_ = solver.eigenvalues().maxCoeff() - solver.eigenvalues().minCoeff();
}

void LindbladGenerator::apply(const ComplexMatrix& x, ComplexMatrix& out, bool hermitian_input) const {
  out.resize(dim_, dim_);
  if (hermitian_input) {
    ComplexMatrix k = heff_ * x;
    out.noalias() = -kI * k;
    out.noalias() += kI * k.adjoint();
  } else {
    const ComplexMatrix left = heff_ * x;
    const ComplexMatrix right_adj = heff_ * x.adjoint();
    out.noalias() = -kI * left;
    out.noalias() += kI * right_adj.adjoint();
  }
  for (const MonomialJump& jump : monomial_) {
    const std::size_t n = jump.rows.size();
    for (std::size_t b = 0; b < n; ++b) {
      const Eigen::Index rb = jump.rows[b];
      const Eigen::Index cb = jump.cols[b];
      const Complex vb = std::conj(jump.values[b]);
      for (std::size_t a = 0; a < n; ++a) {
        out(jump.rows[a], rb) += jump.values[a] * vb * x(jump.cols[a], cb);
      }
    }
  }
  for (std::size_t k = 0; k < general_.size(); ++k) {
    // L X L^dagger = L (L X^dagger)^dagger
    const ComplexMatrix lxd = general_[k] * x.adjoint();
    const ComplexMatrix xld = lxd.adjoint();
    out.noalias() += general_[k] * xld;
  }
}

int rk4_substeps(const LindbladGenerator& gen, const TimeGrid& grid, const EvolveOptions& options) {
  if (options.substeps > 0) return options.substeps;
  const double dt = grid.dt();
  const double w = options.omega_max > 0.0 ? options.omega_max : gen.max_frequency();
  if (!(w > 0.0)) return 1;
  const double h_max = options.step_factor / w;
  return std::max(1, static_cast<int>(std::ceil(dt / h_max - 1e-12)));
}

namespace {

// One RK4 step of size h applied in place. Scratch buffers are reused across steps.
struct Rk4Workspace {
  ComplexMatrix k1, k2, k3, k4, tmp;
};

void rk4_step(const LindbladGenerator& gen, ComplexMatrix& x, double h, bool hermitian, Rk4Workspace& w) {
  gen.apply(x, w.k1, hermitian);
  w.tmp = x + (0.5 * h) * w.k1;
  gen.apply(w.tmp, w.k2, hermitian);
  w.tmp = x + (0.5 * h) * w.k2;
  gen.apply(w.tmp, w.k3, hermitian);
  w.tmp = x + h * w.k3;
  gen.apply(w.tmp, w.k4, hermitian);
  x += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
  if (hermitian) {
    w.tmp = 0.5 * (x + x.adjoint());
    x.swap(w.tmp);
  }
}

}  // namespace

Trajectory evolve(const OperatorMatrix& h, std::span<const CollapseOperator> collapse, const DensityMatrix& rho0,
                  const TimeGrid& grid, std::span<const Observable> observables, const EvolveOptions& options) {
  grid.validate();
  check_dims(h, collapse, rho0.matrix());
  for (const Observable& o : observables) {
    if (o.op.rows() != h.rows() || o.op.cols() != h.cols()) {
      throw DomainError("observable '" + o.name + "' has the wrong dimension");
    }
  }
  const LindbladGenerator gen(h, collapse);

  Trajectory traj;
  traj.grid = grid;
  for (const Observable& o : observables) traj.names.push_back(o.name);
  traj.expectations = ComplexMatrix::Zero(grid.n_points, static_cast<Eigen::Index>(observables.size()));
  traj.trace_error.assign(static_cast<std::size_t>(grid.n_points), 0.0);
  traj.min_eigenvalue.assign(static_cast<std::size_t>(grid.n_points), std::numeric_limits<double>::quiet_NaN());
  traj.substeps = rk4_substeps(gen, grid, options);
  traj.step = grid.dt() / traj.substeps;

  // Transposed observables give Tr[rho O] as a plain coefficient-wise sum.
  std::vector<ComplexMatrix> obs_t;
  obs_t.reserve(observables.size());
  for (const Observable& o : observables) obs_t.push_back(o.op.transpose());

  ComplexMatrix rho = rho0.matrix();
  Rk4Workspace work;
  auto record = [&](int k) {
    const double t = grid.time(k);
    const auto idx = static_cast<std::size_t>(k);
    traj.trace_error[idx] = std::abs(rho.trace() - Complex{1.0, 0.0});
    if (traj.trace_error[idx] > options.trace_tolerance) {
      std::ostringstream msg;
      msg << "trace drifted by " << traj.trace_error[idx] << " at grid step " << k << " (t = " << t << ")";
      throw IntegrationError(msg.str(), k);
    }
    if (options.positivity_stride > 0 && (k % options.positivity_stride == 0 || k == grid.n_points - 1)) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
      traj.min_eigenvalue[idx] = solver.eigenvalues().minCoeff();
      if (traj.min_eigenvalue[idx] < -options.positivity_tolerance) {
        std::ostringstream msg;
        msg << "state lost positivity (min eigenvalue " << traj.min_eigenvalue[idx] << ") at grid step " << k
            << " (t = " << t << ")";
        throw IntegrationError(msg.str(), k);
      }
    }
    for (std::size_t j = 0; j < obs_t.size(); ++j) {
      traj.expectations(k, static_cast<Eigen::Index>(j)) = rho.cwiseProduct(obs_t[j]).sum();
    }
    if (options.store_states) traj.states.push_back(rho);
    if (options.on_sample) options.on_sample(k, t, rho);
  };

  record(0);
  for (int k = 1; k < grid.n_points; ++k) {
    for (int s = 0; s < traj.substeps; ++s) rk4_step(gen, rho, traj.step, true, work);
    record(k);
  }
  return traj;
}

void propagate_operator(const LindbladGenerator& gen, const ComplexMatrix& x0, const TimeGrid& grid,
                        const EvolveOptions& options,
                        const std::function<void(int, double, const ComplexMatrix&)>& on_sample) {
  grid.validate();
  if (x0.rows() != gen.dim() || x0.cols() != gen.dim()) throw DomainError("operator dimension mismatch");
  const int substeps = rk4_substeps(gen, grid, options);
  const double h = grid.dt() / substeps;
  ComplexMatrix x = x0;
  Rk4Workspace work;
  on_sample(0, grid.time(0), x);
  for (int k = 1; k < grid.n_points; ++k) {
    for (int s = 0; s < substeps; ++s) rk4_step(gen, x, h, false, work);
    on_sample(k, grid.time(k), x);
  }
}

}  // namespace qbath
