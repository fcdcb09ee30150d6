#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace imdp {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Scratch buffers reused across solves.
struct NnlsWorkspace {
  std::vector<double> a, b, s, sp, w, resid, qr, kkt, rhs;
  std::vector<int> cols;
  std::vector<char> passive;
};

/// Lawson-Hanson active-set solver for min ||A x - b||_2 subject to x >= 0.
NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = 0);

/// min ||B x - c|| subject to E x = e and x >= 0. The active set comes from a
/// heavily weighted NNLS; the equalities are then re-solved exactly on it.
Eigen::VectorXd solve_equality_nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& e, const Eigen::MatrixXd& B,
                                    const Eigen::VectorXd& c, double equality_weight = 1e4);

/// Same on raw column-major E (me x n) and B (mb x n); writes n values to x.
/// Returns false early when even the relaxed problem leaves ||B x - c|| above
/// `give_up`, in which case x is not a solution.
bool solve_equality_nnls(const double* E, int me, const double* e, const double* B, int mb, const double* c, int n,
                         double* x, NnlsWorkspace& ws, double equality_weight = 1e4,
                         double give_up = std::numeric_limits<double>::infinity());

}  // namespace imdp
