#include "imdp/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imdp/nnls.hpp"

namespace imdp {
namespace {

constexpr double kFirstMomentTolerance = 1e-8;
constexpr double kRadiusConstant = 6.0;

struct Scratch {
  std::vector<Vector> points;
  std::vector<Vector> offsets;
  std::vector<Neighbor> nn;
  std::vector<double> D, E, e, B, c, x;
  NnlsWorkspace nnls;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

void append_unique(std::vector<StateId>& ids, StateId id) {
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
}

void points_of(const DiscreteModel& model, const std::vector<StateId>& ids, std::vector<Vector>& pts) {
  pts.resize(ids.size());
  const int d = model.dim_x();
  for (std::size_t j = 0; j < ids.size(); ++j) {
    pts[j].resize(d);
    std::copy_n(model.state_data(ids[j]), d, pts[j].data());
  }
}

bool consistent_weights_into(const Vector& z, const StepMoments& m, double tau, std::span<const Vector> support,
                             double tolerance, std::vector<double>& probs, Scratch& sc) {
  const int d = static_cast<int>(z.size());
  const int s = static_cast<int>(support.size());
  if (s == 0) return false;

  double scale = std::max(m.shift.norm(), std::sqrt(std::max(m.covariance.diagonal().maxCoeff(), 0.0)));
  for (const auto& p : support) scale = std::max(scale, (p - z).norm());
  if (!(scale > 0.0)) scale = 1.0;

  const int me = 1 + d;
  const int mb = d * (d + 1) / 2;
  sc.D.resize(std::size_t(d) * s);
  sc.E.resize(std::size_t(me) * s);
  sc.B.resize(std::size_t(mb) * s);
  sc.e.resize(std::size_t(me));
  sc.c.resize(std::size_t(mb));
  sc.x.resize(std::size_t(s));
  for (int j = 0; j < s; ++j) {
    double* dj = sc.D.data() + std::size_t(j) * d;
    for (int i = 0; i < d; ++i) dj[i] = (support[j][i] - z[i]) / scale;
    double* ej = sc.E.data() + std::size_t(j) * me;
    ej[0] = 1.0;
    std::copy(dj, dj + d, ej + 1);
    double* bj = sc.B.data() + std::size_t(j) * mb;
    int r = 0;
    for (int i = 0; i < d; ++i)
      for (int k = i; k < d; ++k, ++r) bj[r] = (i == k ? 1.0 : std::sqrt(2.0)) * dj[i] * dj[k];
  }
  sc.e[0] = 1.0;
  for (int i = 0; i < d; ++i) sc.e[1 + i] = m.shift[i] / scale;
  const double inv2 = 1.0 / (scale * scale);
  int r = 0;
  for (int i = 0; i < d; ++i)
    for (int k = i; k < d; ++k, ++r)
      sc.c[r] = (i == k ? 1.0 : std::sqrt(2.0)) * (m.covariance(i, k) + m.shift[i] * m.shift[k]) * inv2;

  // max |entry| >= ||B x - c||_2 / d in these units.
  const double give_up = 1.01 * d * tolerance * tau * inv2 + 1e-12;
  if (!solve_equality_nnls(sc.E.data(), me, sc.e.data(), sc.B.data(), mb, sc.c.data(), s, sc.x.data(), sc.nnls, 1e4,
                           give_up))
    return false;
  double total = 0.0;
  for (double v : sc.x) total += v;
  if (!(total > 0.0)) return false;
  probs.resize(std::size_t(s));
  for (int j = 0; j < s; ++j) probs[j] = std::max(sc.x[j], 0.0) / total;

  const MomentResidual res = moment_residual(z, m, support, probs);
  return res.first <= kFirstMomentTolerance && res.second <= tolerance * tau;
}

void gaussian_weights_into(const Vector& mean, const Matrix& covariance, std::span<const Vector> support,
                           std::vector<double>& w) {
  w.assign(support.size(), 0.0);
  if (support.empty()) return;
  const int d = static_cast<int>(mean.size());
  const double trace = covariance.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < support.size(); ++j) {
      const double dist = (support[j] - mean).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    w[best] = 1.0;
    return;
  }
  Matrix cov = covariance;
  const double floor = 1e-12 * trace / d;
  if (d == 1) {
    cov(0, 0) = std::max(cov(0, 0), floor);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < floor) cov += floor * Matrix::Identity(d, d);
  }
  const Matrix precision = cov.llt().solve(Matrix::Identity(d, d));
  double max_log = -std::numeric_limits<double>::infinity();
  double dz[kMaxDim];
  for (std::size_t j = 0; j < support.size(); ++j) {
    for (int i = 0; i < d; ++i) dz[i] = support[j][i] - mean[i];
    double q = 0.0;
    for (int i = 0; i < d; ++i) {
      double row = 0.0;
      for (int k = 0; k < d; ++k) row += precision(i, k) * dz[k];
      q += dz[i] * row;
    }
    w[j] = -0.5 * q;
    max_log = std::max(max_log, w[j]);
  }
  double total = 0.0;
  for (auto& x : w) {
    x = std::exp(x - max_log);
    total += x;
  }
  for (auto& x : w) x /= total;
}

}  // namespace

StepMoments StepMoments::of(const ControlProblem& problem, const Vector& z, const Vector& v, double tau) {
  const Vector f = problem.drift(z, v);
  const Matrix F = problem.diffusion(z, v);
  return {f * tau, (F * F.transpose()) * tau};
}

double StepMoments::support_radius(double tau) const {
  const int d = static_cast<int>(shift.size());
  double lambda_max = 0.0;
  if (d == 1) {
    lambda_max = covariance(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance, Eigen::EigenvaluesOnly);
    lambda_max = eig.eigenvalues().maxCoeff();
  }
  const double log_term = std::max(1.0, std::log(1.0 / tau));
  return kRadiusConstant * (shift.norm() + std::sqrt(std::max(lambda_max, 0.0)) * std::sqrt(d * log_term));
}

MomentResidual moment_residual(const Vector& z, const StepMoments& m, std::span<const Vector> support,
                               std::span<const double> probs) {
  const int d = static_cast<int>(z.size());
  double first[kMaxDim] = {};
  double second[kMaxDim * kMaxDim] = {};
  double dz[kMaxDim];
  for (std::size_t j = 0; j < support.size(); ++j) {
    const double p = probs[j];
    if (p == 0.0) continue;
    for (int i = 0; i < d; ++i) {
      dz[i] = support[j][i] - z[i];
      first[i] += p * dz[i];
    }
    for (int i = 0; i < d; ++i)
      for (int k = i; k < d; ++k) second[i * d + k] += p * dz[i] * dz[k];
  }
  MomentResidual out;
  double f2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double e = first[i] - m.shift[i];
    f2 += e * e;
    for (int k = i; k < d; ++k) {
      const double target = m.covariance(i, k) + m.shift[i] * m.shift[k];
      out.second = std::max(out.second, std::abs(second[i * d + k] - target));
    }
  }
  out.first = std::sqrt(f2);
  return out;
}

std::optional<std::vector<double>> consistent_weights(const Vector& z, const StepMoments& m, double tau,
                                                      std::span<const Vector> support, double tolerance) {
  std::vector<double> probs;
  if (!consistent_weights_into(z, m, tau, support, tolerance, probs, scratch())) return std::nullopt;
  return probs;
}

std::vector<double> gaussian_weights(const Vector& mean, const Matrix& covariance, std::span<const Vector> support) {
  std::vector<double> w;
  gaussian_weights_into(mean, covariance, support, w);
  return w;
}

bool try_consistent_transition(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                               const Vector& v, double tau, const AlgoParams& params, TransitionDistribution& out,
                               std::optional<std::size_t> support_size) {
  if (model.size() == 0) return false;
  const int d = problem.dim_x();
  const StepMoments moments = StepMoments::of(problem, z, v, tau);
  const Vector mean = z + moments.shift;
  // Every state lies in the box, so no mixture of them can have its mean outside.
  if (!problem.state_box().contains(mean)) return false;
  const double radius = moments.support_radius(tau);
  Scratch& sc = scratch();

  // Stencil directions: eigenvectors of the step covariance.
  auto& offsets = sc.offsets;
  offsets.clear();
  if (d == 1) {
    const double h = std::sqrt(2.0 * std::max(moments.covariance(0, 0), 0.0));
    offsets.push_back(Vector::Constant(1, h));
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(moments.covariance);
    for (int k = 0; k < d; ++k) {
      const double h = std::sqrt(2.0 * d * std::max(eig.eigenvalues()[k], 0.0));
      offsets.push_back(h * eig.eigenvectors().col(k));
    }
  }

  const std::size_t base = support_size.value_or(static_cast<std::size_t>(2 * d + 2));
  const std::size_t cap = std::max<std::size_t>(base, static_cast<std::size_t>(8 * d));
  auto& ids = out.support;
  auto& nn = sc.nn;
  for (std::size_t s = base; s <= cap; s *= 2) {
    const std::size_t per_side = std::max<std::size_t>(1, (s - std::min<std::size_t>(s, 2)) / (2 * d));
    const std::size_t centre = std::max<std::size_t>(1, s > 2 * d * per_side ? s - 2 * d * per_side : 1);
    ids.clear();
    model.all_index().nearest(mean, centre, nn);
    // sum p |y - m|^2 >= min |y - m|^2, so a too-distant nearest state rules
    // out every support.
    if (s == base && !nn.empty()) {
      const double slack = d * params.moment_tolerance * tau + 2.0 * kFirstMomentTolerance * moments.shift.norm() + 1e-12;
      if (nn.front().distance * nn.front().distance > moments.covariance.trace() + slack) return false;
    }
    for (const auto& n : nn) append_unique(ids, n.id);
    for (const auto& h : offsets) {
      for (double sign : {1.0, -1.0}) {
        model.all_index().nearest(mean + sign * h, per_side, nn);
        for (const auto& n : nn) append_unique(ids, n.id);
      }
    }
    std::erase_if(ids, [&](StateId id) {
      return (Eigen::Map<const Eigen::VectorXd>(model.state_data(id), d) - z).norm() > radius;
    });
    if (!ids.empty()) {
      points_of(model, ids, sc.points);
      if (consistent_weights_into(z, moments, tau, sc.points, params.moment_tolerance, out.probs, sc)) {
        out.source = z;
        out.control = v;
        out.duration = tau;
        out.backend = TransitionBackend::kConsistent;
        return true;
      }
    }
    if (s == cap) break;
    if (s * 2 > cap) s = cap / 2;  // one final attempt at the cap
  }
  return false;
}

std::optional<TransitionDistribution> try_consistent_transition(const ControlProblem& problem,
                                                                const DiscreteModel& model, const Vector& z,
                                                                const Vector& v, double tau,
                                                                const AlgoParams& params,
                                                                std::optional<std::size_t> support_size) {
  TransitionDistribution t;
  if (!try_consistent_transition(problem, model, z, v, tau, params, t, support_size)) return std::nullopt;
  return t;
}

TransitionDistribution consistent_transition(const ControlProblem& problem, const DiscreteModel& model,
                                             const Vector& z, const Vector& v, double tau, const AlgoParams& params,
                                             std::optional<std::size_t> support_size) {
  auto t = try_consistent_transition(problem, model, z, v, tau, params, support_size);
  if (!t) throw InfeasibleTransition();
  return std::move(*t);
}

std::size_t gaussian_support_size(std::size_t states) {
  if (states < 2) return 4;
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2.0 * std::log(static_cast<double>(states)))));
}

void gaussian_transition(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                         const Vector& v, double tau, TransitionDistribution& out,
                         std::optional<std::size_t> support_size) {
  if (model.size() == 0) throw std::invalid_argument("transition needs at least one state");
  const StepMoments moments = StepMoments::of(problem, z, v, tau);
  const Vector mean = z + moments.shift;
  const std::size_t s = support_size.value_or(gaussian_support_size(model.size()));
  Scratch& sc = scratch();
  model.all_index().nearest(mean, s, sc.nn);
  const double radius = moments.support_radius(tau);
  const int d = problem.dim_x();

  auto& ids = out.support;
  ids.clear();
  for (const auto& n : sc.nn) {
    if ((Eigen::Map<const Eigen::VectorXd>(model.state_data(n.id), d) - z).norm() <= radius) ids.push_back(n.id);
  }
  // A chain needs a successor even when every sample lies beyond the radius.
  if (ids.empty()) ids.push_back(sc.nn.front().id);
  points_of(model, ids, sc.points);
  gaussian_weights_into(mean, moments.covariance, sc.points, out.probs);
  out.source = z;
  out.control = v;
  out.duration = tau;
  out.backend = TransitionBackend::kGaussian;
}

TransitionDistribution gaussian_transition(const ControlProblem& problem, const DiscreteModel& model,
                                           const Vector& z, const Vector& v, double tau,
                                           std::optional<std::size_t> support_size) {
  TransitionDistribution t;
  gaussian_transition(problem, model, z, v, tau, t, support_size);
  return t;
}

void compute_transition(const ControlProblem& problem, const DiscreteModel& model, const Vector& z,
                        const Vector& v, double tau, const AlgoParams& params, TransitionDistribution& out) {
  if (params.backend == TransitionBackend::kConsistent &&
      try_consistent_transition(problem, model, z, v, tau, params, out))
    return;
  gaussian_transition(problem, model, z, v, tau, out);
}

TransitionDistribution compute_transition(const ControlProblem& problem, const DiscreteModel& model,
                                          const Vector& z, const Vector& v, double tau, const AlgoParams& params) {
  TransitionDistribution t;
  compute_transition(problem, model, z, v, tau, params, t);
  return t;
}

}  // namespace imdp
