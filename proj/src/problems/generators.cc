//
// Copyright 2026 The PFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "absl/strings/str_cat.h"
#include "pfl/kernels/kernels.h"
#include "pfl/problems/losses.h"
#include "pfl/problems/problems.h"

namespace pfl {
namespace {

// draw_index values separating generator sub-streams.
enum : uint64_t {
  kDrawBasis = 1,
  kDrawCenters = 2,
  kDrawRecords = 3,
  kDrawTruth = 4,
  kDrawShift = 5,
};

RandomStream GenStream(uint64_t seed, uint64_t silo, uint64_t what) {
  return DeriveStream(seed, {AlgorithmTag::kGenerator, 0, silo, Purpose::kData, what});
}

Eigen::MatrixXd RandomOrthogonal(int d, RandomStream& rng) {
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.Gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

double MaxRecordNorm(const FederatedDataset& data) {
  double m = 0.0;
  for (int i = 0; i < data.num_silos(); ++i) {
    for (int j = 0; j < data.records_per_silo(); ++j) {
      m = std::max(m, std::sqrt(kernels::SquaredNorm(data.record(i, j).x)));
    }
  }
  return m;
}

ModelPoint GrandMean(const FederatedDataset& data) {
  const int d = data.d_features();
  ModelPoint mean(d, 0.0);
  for (int i = 0; i < data.num_silos(); ++i) {
    std::vector<double> silo(d, 0.0);
    for (int j = 0; j < data.records_per_silo(); ++j) {
      kernels::Axpy(1.0, data.record(i, j).x, silo);
    }
    kernels::Axpy(1.0 / data.records_per_silo(), silo, mean);
  }
  kernels::Scale(1.0 / data.num_silos(), mean);
  return mean;
}

struct LinearStats {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd moment;
  double max_norm_sq = 0.0;
};

LinearStats ComputeLinearStats(const FederatedDataset& data) {
  const int d = data.d_features();
  LinearStats s{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d), 0.0};
  for (int i = 0; i < data.num_silos(); ++i) {
    for (int j = 0; j < data.records_per_silo(); ++j) {
      const RecordView r = data.record(i, j);
      Eigen::Map<const Eigen::VectorXd> a(r.x.data(), d);
      s.hessian.noalias() += a * a.transpose();
      s.moment += r.y * a;
      s.max_norm_sq = std::max(s.max_norm_sq, a.squaredNorm());
    }
  }
  const double total =
      static_cast<double>(data.num_silos()) * data.records_per_silo();
  s.hessian /= total;
  s.moment /= total;
  return s;
}

double LogisticLipschitz(const FederatedDataset& data, double radius) {
  double L = 0.0;
  for (int i = 0; i < data.num_silos(); ++i) {
    for (int j = 0; j < data.records_per_silo(); ++j) {
      const double a = std::sqrt(kernels::SquaredNorm(data.record(i, j).x));
      L = std::max(L, a / (1.0 + std::exp(-a * radius)));
    }
  }
  return L;
}

// Least-squares constants and optimum from the data.
absl::StatusOr<ProblemInstance> FinishLeastSquares(FederatedDataset data,
                                                   double radius_hint) {
  const int d = data.d_features();
  const LinearStats st = ComputeLinearStats(data);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.hessian);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double lam_max = lam.maxCoeff();
  const double tol = 1e-10 * std::max(lam_max, 1e-300);
  double mu = 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    if (lam(k) > tol) {
      inv(k) = 1.0 / lam(k);
      if (mu == 0.0 || lam(k) < mu) mu = lam(k);
    }
  }
  if (mu == 0.0) return absl::InvalidArgumentError("design matrix is zero");
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd wstar = v * inv.asDiagonal() * v.transpose() * st.moment;

  ProblemInstance p;
  p.family = "least_squares";
  auto f0 = std::make_shared<LeastSquaresLoss>(d);
  ModelPoint minimizer(wstar.data(), wstar.data() + d);
  const double radius =
      radius_hint > 0.0 ? radius_hint : 2.0 * wstar.norm() + 1.0;
  double L = 0.0;
  for (int i = 0; i < data.num_silos(); ++i) {
    for (int j = 0; j < data.records_per_silo(); ++j) {
      const RecordView r = data.record(i, j);
      const double a = std::sqrt(kernels::SquaredNorm(r.x));
      L = std::max(L, a * (a * radius + std::abs(r.y)));
    }
  }
  p.loss = CompositeLoss{f0, L, st.max_norm_sq, ZeroReg{}};
  const double f_star = EmpiricalSmoothRisk(*f0, data, minimizer);
  p.known = KnownOptimum{f_star, minimizer, mu, st.max_norm_sq,
                         st.max_norm_sq / mu};
  p.descriptor["domain_radius"] = radius;
  p.descriptor["hessian_lambda_max"] = lam_max;
  p.dataset = std::move(data);
  return p;
}

}  // namespace

ProblemInstance WithRegularizer(ProblemInstance problem, RegularizerSpec f1) {
  if (!std::holds_alternative<ZeroReg>(f1)) problem.known.reset();
  problem.loss.f1 = f1;
  return problem;
}

absl::StatusOr<ProblemInstance> MakeQuadratic(const QuadraticOptions& o) {
  if (!(o.mu > 0.0 && o.mu <= o.beta)) {
    return absl::InvalidArgumentError("quadratic needs 0 < mu <= beta");
  }
  if (o.num_silos < 1 || o.records_per_silo < 1 || o.dim < 1) {
    return absl::InvalidArgumentError("quadratic needs N, n, d >= 1");
  }
  const int d = o.dim;
  RandomStream basis_rng = GenStream(o.seed, 0, kDrawBasis);
  const Eigen::MatrixXd q = RandomOrthogonal(d, basis_rng);
  Eigen::VectorXd lam(d);
  for (int k = 0; k < d; ++k) {
    lam(k) = d == 1 ? o.mu : o.mu + (o.beta - o.mu) * k / (d - 1.0);
  }
  const Eigen::MatrixXd a_mat = q * lam.asDiagonal() * q.transpose();
  std::vector<double> a(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a[i * d + j] = 0.5 * (a_mat(i, j) + a_mat(j, i));
  }

  std::vector<std::vector<double>> features(o.num_silos);
  for (int i = 0; i < o.num_silos; ++i) {
    RandomStream crng = GenStream(o.seed, i, kDrawCenters);
    std::vector<double> center(d);
    for (double& c : center) c = o.hetero_scale * crng.Gaussian();
    RandomStream rrng = GenStream(o.seed, i, kDrawRecords);
    std::vector<double> offsets(static_cast<size_t>(o.records_per_silo) * d);
    for (double& v : offsets) v = o.record_spread * rrng.Gaussian();
    std::vector<double> mean(d, 0.0);
    for (int j = 0; j < o.records_per_silo; ++j) {
      kernels::Axpy(1.0, std::span<const double>(offsets).subspan(j * d, d), mean);
    }
    kernels::Scale(1.0 / o.records_per_silo, mean);
    features[i].resize(offsets.size());
    for (int j = 0; j < o.records_per_silo; ++j) {
      for (int k = 0; k < d; ++k) {
        features[i][j * d + k] = center[k] + (offsets[j * d + k] - mean[k]);
      }
    }
  }
  auto data = FederatedDataset::Create(d, std::move(features), {});
  if (!data.ok()) return data.status();

  ProblemInstance p;
  p.family = "quadratic";
  auto f0 = std::make_shared<QuadraticLoss>(d, std::move(a));
  const double max_x = MaxRecordNorm(*data);
  const double radius = 2.0 * max_x;
  p.loss = CompositeLoss{f0, o.beta * (radius + max_x), o.beta, ZeroReg{}};
  ModelPoint minimizer = GrandMean(*data);
  const double f_star = EmpiricalSmoothRisk(*f0, *data, minimizer);
  p.known = KnownOptimum{f_star, minimizer, o.mu, o.beta, o.beta / o.mu};
  p.descriptor = {{"num_silos", o.num_silos},
                  {"records_per_silo", o.records_per_silo},
                  {"dim", d},
                  {"mu", o.mu},
                  {"beta", o.beta},
                  {"hetero_scale", o.hetero_scale},
                  {"record_spread", o.record_spread},
                  {"seed", static_cast<double>(o.seed)},
                  {"domain_radius", radius},
                  {"lipschitz_L", p.loss.lipschitz_L}};
  p.dataset = std::move(*data);
  const double spread = o.record_spread;
  const double hetero = o.hetero_scale;
  const uint64_t seed = o.seed;
  p.population = [d, spread, hetero, seed](int silo, RandomStream& rng,
                                           std::vector<double>& x, double& y) {
    RandomStream crng = GenStream(seed, silo, kDrawCenters);
    x.resize(d);
    for (int k = 0; k < d; ++k) x[k] = hetero * crng.Gaussian();
    for (int k = 0; k < d; ++k) x[k] += spread * rng.Gaussian();
    y = 0.0;
  };
  return p;
}

absl::StatusOr<ProblemInstance> MakeLeastSquares(const LeastSquaresOptions& o) {
  if (o.num_silos < 1 || o.records_per_silo < 1 || o.dim < 1) {
    return absl::InvalidArgumentError("least squares needs N, n, d >= 1");
  }
  if (o.rank_deficit < 0 || o.rank_deficit >= o.dim) {
    return absl::InvalidArgumentError("need 0 <= rank_deficit < d");
  }
  const int d = o.dim;
  const int rank = d - o.rank_deficit;
  RandomStream basis_rng = GenStream(o.seed, 0, kDrawBasis);
  const Eigen::MatrixXd q = RandomOrthogonal(d, basis_rng);
  const Eigen::MatrixXd basis = q.leftCols(rank);
  RandomStream truth_rng = GenStream(o.seed, 0, kDrawTruth);
  Eigen::VectorXd w_true(d);
  for (int k = 0; k < d; ++k) w_true(k) = truth_rng.Gaussian();

  std::vector<std::vector<double>> features(o.num_silos), labels(o.num_silos);
  for (int i = 0; i < o.num_silos; ++i) {
    RandomStream srng = GenStream(o.seed, i, kDrawShift);
    Eigen::VectorXd shift(rank);
    for (int k = 0; k < rank; ++k) shift(k) = o.hetero_scale * srng.Gaussian();
    RandomStream rrng = GenStream(o.seed, i, kDrawRecords);
    features[i].resize(static_cast<size_t>(o.records_per_silo) * d);
    labels[i].resize(o.records_per_silo);
    for (int j = 0; j < o.records_per_silo; ++j) {
      Eigen::VectorXd z(rank);
      for (int k = 0; k < rank; ++k) z(k) = shift(k) + rrng.Gaussian();
      const Eigen::VectorXd a = basis * z / std::sqrt(static_cast<double>(rank));
      for (int k = 0; k < d; ++k) features[i][j * d + k] = a(k);
      labels[i][j] = a.dot(w_true) + o.label_noise * rrng.Gaussian();
    }
  }
  auto data = FederatedDataset::Create(d, std::move(features), std::move(labels));
  if (!data.ok()) return data.status();
  auto p = FinishLeastSquares(std::move(*data), 0.0);
  if (!p.ok()) return p.status();
  p->descriptor.insert({{"num_silos", o.num_silos},
                        {"records_per_silo", o.records_per_silo},
                        {"dim", d},
                        {"rank_deficit", o.rank_deficit},
                        {"hetero_scale", o.hetero_scale},
                        {"label_noise", o.label_noise},
                        {"seed", static_cast<double>(o.seed)},
                        {"lipschitz_L", p->loss.lipschitz_L}});
  return p;
}

absl::StatusOr<ProblemInstance> MakeLogistic(const LogisticOptions& o) {
  if (o.num_silos < 1 || o.records_per_silo < 1 || o.dim < 1) {
    return absl::InvalidArgumentError("logistic needs N, n, d >= 1");
  }
  if (!(o.radius > 0.0)) return absl::InvalidArgumentError("radius must be > 0");
  const int d = o.dim;
  RandomStream basis_rng = GenStream(o.seed, 0, kDrawBasis);
  std::vector<double> u(d);
  for (double& v : u) v = basis_rng.Gaussian();
  kernels::Scale(o.separation / std::sqrt(kernels::SquaredNorm(u)), u);
  const double noise = 1.0 / std::sqrt(static_cast<double>(d));

  // Silo shifts only under label_by_silo; the shared case has none.
  auto silo_shift = [d, o, noise](int silo) {
    std::vector<double> s(d, 0.0);
    if (!o.label_by_silo) return s;
    RandomStream srng = GenStream(o.seed, silo, kDrawShift);
    for (double& v : s) v = 0.5 * noise * srng.Gaussian();
    return s;
  };
  auto draw = [d, o, u, noise](int silo, const std::vector<double>& shift,
                               RandomStream& rng, double* x, double& y) {
    if (o.label_by_silo) {
      y = silo % 2 == 0 ? 1.0 : -1.0;
    } else {
      y = rng.Bernoulli(0.5) ? 1.0 : -1.0;
    }
    for (int k = 0; k < d; ++k) x[k] = y * u[k] + shift[k] + noise * rng.Gaussian();
  };

  std::vector<std::vector<double>> features(o.num_silos), labels(o.num_silos);
  for (int i = 0; i < o.num_silos; ++i) {
    const std::vector<double> shift = silo_shift(i);
    RandomStream rrng = GenStream(o.seed, i, kDrawRecords);
    features[i].resize(static_cast<size_t>(o.records_per_silo) * d);
    labels[i].resize(o.records_per_silo);
    for (int j = 0; j < o.records_per_silo; ++j) {
      draw(i, shift, rrng, &features[i][j * d], labels[i][j]);
    }
  }
  auto data = FederatedDataset::Create(d, std::move(features), std::move(labels));
  if (!data.ok()) return data.status();

  ProblemInstance p;
  p.family = "logistic";
  const LinearStats st = ComputeLinearStats(*data);
  p.loss = CompositeLoss{std::make_shared<LogisticLoss>(d),
                         LogisticLipschitz(*data, o.radius),
                         st.max_norm_sq / 4.0, BallReg{o.radius}};
  p.descriptor = {{"num_silos", o.num_silos},
                  {"records_per_silo", o.records_per_silo},
                  {"dim", d},
                  {"label_by_silo", o.label_by_silo ? 1.0 : 0.0},
                  {"radius", o.radius},
                  {"separation", o.separation},
                  {"seed", static_cast<double>(o.seed)},
                  {"lipschitz_L", p.loss.lipschitz_L},
                  {"smooth_beta", p.loss.smooth_beta}};
  p.dataset = std::move(*data);
  p.population = [draw, silo_shift, d](int silo, RandomStream& rng,
                                       std::vector<double>& x, double& y) {
    x.resize(d);
    draw(silo, silo_shift(silo), rng, x.data(), y);
  };
  return p;
}

absl::StatusOr<ProblemInstance> ProblemFromDataset(FederatedDataset dataset,
                                                   const std::string& family,
                                                   double radius) {
  const int d = dataset.d_features();
  if (family == "least_squares") {
    if (!dataset.has_labels()) {
      return absl::InvalidArgumentError("least_squares needs labels");
    }
    return FinishLeastSquares(std::move(dataset), radius);
  }
  if (family == "logistic") {
    if (!dataset.has_labels()) return absl::InvalidArgumentError("logistic needs labels");
    if (!(radius > 0.0)) return absl::InvalidArgumentError("logistic needs radius > 0");
    for (int i = 0; i < dataset.num_silos(); ++i) {
      for (double y : dataset.silo_labels(i)) {
        if (y != 1.0 && y != -1.0) {
          return absl::InvalidArgumentError("logistic labels must be +1 or -1");
        }
      }
    }
    ProblemInstance p;
    p.family = "logistic";
    const LinearStats st = ComputeLinearStats(dataset);
    p.loss = CompositeLoss{std::make_shared<LogisticLoss>(d),
                           LogisticLipschitz(dataset, radius),
                           st.max_norm_sq / 4.0, BallReg{radius}};
    p.descriptor = {{"radius", radius}, {"lipschitz_L", p.loss.lipschitz_L}};
    p.dataset = std::move(dataset);
    return p;
  }
  if (family == "quadratic") {
    std::vector<double> eye(static_cast<size_t>(d) * d, 0.0);
    for (int k = 0; k < d; ++k) eye[k * d + k] = 1.0;
    ProblemInstance p;
    p.family = "quadratic";
    const double max_x = MaxRecordNorm(dataset);
    const double r = radius > 0.0 ? radius : 2.0 * max_x;
    auto f0 = std::make_shared<QuadraticLoss>(d, std::move(eye));
    p.loss = CompositeLoss{f0, r + max_x, 1.0, ZeroReg{}};
    ModelPoint minimizer = GrandMean(dataset);
    const double f_star = EmpiricalSmoothRisk(*f0, dataset, minimizer);
    p.known = KnownOptimum{f_star, minimizer, 1.0, 1.0, 1.0};
    p.descriptor = {{"domain_radius", r}, {"lipschitz_L", p.loss.lipschitz_L}};
    p.dataset = std::move(dataset);
    return p;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown loss family '", family, "'"));
}

}  // namespace pfl
