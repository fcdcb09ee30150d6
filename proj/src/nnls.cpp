#include "imdp/nnls.hpp"

#include <algorithm>
#include <cmath>

namespace imdp {
namespace {

// Column-major m x n view.
struct ColMajor {
  const double* data;
  int m;
  int n;
  const double* col(int j) const { return data + static_cast<std::size_t>(j) * m; }
};

// Least squares on the columns `cols` of A by Householder QR. Columns that
// are numerically dependent on earlier ones get a zero coefficient.
void passive_solve(ColMajor A, const std::vector<int>& cols, const double* b, double* out, std::vector<double>& work) {
  const int m = A.m;
  const int k = static_cast<int>(cols.size());
  work.resize(static_cast<std::size_t>(m) * (k + 1) + static_cast<std::size_t>(k));
  double* Q = work.data();
  double* r = Q + static_cast<std::size_t>(m) * k;
  double* pivot_row = r + m;
  double scale = 0.0;
  for (int j = 0; j < k; ++j) {
    const double* a = A.col(cols[j]);
    double* q = Q + static_cast<std::size_t>(j) * m;
    for (int i = 0; i < m; ++i) {
      q[i] = a[i];
      scale = std::max(scale, std::abs(a[i]));
    }
  }
  std::copy(b, b + m, r);
  const double eps = 1e-13 * std::max(scale, 1e-300);
  int row = 0;
  for (int j = 0; j < k; ++j) {
    pivot_row[j] = -1.0;
    if (row >= m) continue;
    double* q = Q + static_cast<std::size_t>(j) * m;
    double norm2 = 0.0;
    for (int i = row; i < m; ++i) norm2 += q[i] * q[i];
    const double norm = std::sqrt(norm2);
    if (norm <= eps) continue;
    const double alpha = q[row] > 0.0 ? -norm : norm;
    q[row] -= alpha;
    double vnorm2 = 0.0;
    for (int i = row; i < m; ++i) vnorm2 += q[i] * q[i];
    auto reflect = [&](double* y) {
      double dot = 0.0;
      for (int i = row; i < m; ++i) dot += q[i] * y[i];
      const double f = 2.0 * dot / vnorm2;
      for (int i = row; i < m; ++i) y[i] -= f * q[i];
    };
    for (int jj = j + 1; jj < k; ++jj) reflect(Q + static_cast<std::size_t>(jj) * m);
    reflect(r);
    q[row] = alpha;
    pivot_row[j] = row;
    ++row;
  }
  for (int j = k - 1; j >= 0; --j) {
    const int pr = static_cast<int>(pivot_row[j]);
    if (pr < 0) {
      out[j] = 0.0;
      continue;
    }
    double v = r[pr];
    for (int jj = j + 1; jj < k; ++jj) v -= Q[static_cast<std::size_t>(jj) * m + pr] * out[jj];
    out[j] = v / Q[static_cast<std::size_t>(j) * m + pr];
  }
}

// w = A^T (b - A x)
void gradient(ColMajor A, const double* b, const double* x, double* resid, double* w) {
  std::copy(b, b + A.m, resid);
  for (int j = 0; j < A.n; ++j) {
    if (x[j] == 0.0) continue;
    const double* a = A.col(j);
    for (int i = 0; i < A.m; ++i) resid[i] -= a[i] * x[j];
  }
  for (int j = 0; j < A.n; ++j) {
    const double* a = A.col(j);
    double dot = 0.0;
    for (int i = 0; i < A.m; ++i) dot += a[i] * resid[i];
    w[j] = dot;
  }
}

int lawson_hanson(ColMajor A, const double* b, double* x, int max_iterations, bool* converged, NnlsWorkspace& ws) {
  const int n = A.n;
  const int m = A.m;
  if (max_iterations <= 0) max_iterations = 3 * n + 10;
  std::fill(x, x + n, 0.0);
  ws.passive.assign(static_cast<std::size_t>(n), 0);
  auto& passive = ws.passive;
  double amax = 1.0, bmax = 1.0;
  for (std::size_t i = 0; i < std::size_t(m) * n; ++i) amax = std::max(amax, std::abs(A.data[i]));
  for (int i = 0; i < m; ++i) bmax = std::max(bmax, std::abs(b[i]));
  const double tol = 1e-12 * amax * bmax;

  auto& cols = ws.cols;
  ws.sp.resize(static_cast<std::size_t>(n));
  ws.s.resize(static_cast<std::size_t>(n));
  ws.w.resize(static_cast<std::size_t>(n));
  ws.resid.resize(static_cast<std::size_t>(m));
  auto& s = ws.s;
  auto& w = ws.w;
  int iterations = 0;
  *converged = false;
  gradient(A, b, x, ws.resid.data(), w.data());
  while (iterations < max_iterations) {
    int t = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        t = j;
      }
    }
    if (t < 0) {
      *converged = true;
      break;
    }
    passive[t] = 1;
    for (;;) {
      ++iterations;
      cols.clear();
      for (int j = 0; j < n; ++j)
        if (passive[j]) cols.push_back(j);
      passive_solve(A, cols, b, ws.sp.data(), ws.qr);
      std::fill(s.begin(), s.end(), 0.0);
      for (std::size_t k = 0; k < cols.size(); ++k) s[cols[k]] = ws.sp[k];
      bool feasible = true;
      for (int j : cols)
        if (s[j] <= 0.0) feasible = false;
      if (feasible) {
        std::copy(s.begin(), s.end(), x);
        break;
      }
      double alpha = 1.0;
      for (int j : cols)
        if (s[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - s[j]));
      bool dropped = false;
      for (int j = 0; j < n; ++j) {
        x[j] += alpha * (s[j] - x[j]);
        if (passive[j] && x[j] <= 1e-15) {
          passive[j] = 0;
          x[j] = 0.0;
          dropped = true;
        }
      }
      if (!dropped || iterations >= max_iterations) break;
    }
    gradient(A, b, x, ws.resid.data(), w.data());
  }
  return iterations;
}

// Solves the dense n x n row-major system M y = r in place (partial
// pivoting). Returns false when a pivot vanishes.
bool dense_solve(std::vector<double>& M, std::vector<double>& r, int n) {
  auto at = [&](int i, int j) -> double& { return M[static_cast<std::size_t>(i) * n + j]; };
  double scale = 0.0;
  for (double v : M) scale = std::max(scale, std::abs(v));
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(at(i, c)) > std::abs(at(p, c))) p = i;
    if (std::abs(at(p, c)) <= 1e-300 + 1e-15 * scale) return false;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(at(p, j), at(c, j));
      std::swap(r[p], r[c]);
    }
    for (int i = c + 1; i < n; ++i) {
      const double f = at(i, c) / at(c, c);
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) at(i, j) -= f * at(c, j);
      r[i] -= f * r[c];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = r[i];
    for (int j = i + 1; j < n; ++j) v -= at(i, j) * r[j];
    r[i] = v / at(i, i);
  }
  return true;
}

}  // namespace

NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations) {
  NnlsWorkspace ws;
  NnlsResult out;
  out.x.resize(A.cols());
  out.iterations = lawson_hanson({A.data(), int(A.rows()), int(A.cols())}, b.data(), out.x.data(), max_iterations,
                                 &out.converged, ws);
  out.residual_norm = (A * out.x - b).norm();
  return out;
}

namespace {

// Equality-constrained least squares on the columns in ws.cols through its
// KKT system; columns that turn negative are dropped until feasible. Returns
// false when the reduced system cannot meet the equalities.
bool refine_on_columns(const double* E, int me, const double* e, const double* B, int mb, const double* c, int n,
                       double* x, NnlsWorkspace& ws, bool allow_drop = true) {
  auto Eat = [&](int i, int j) { return E[std::size_t(j) * me + i]; };
  auto Bat = [&](int i, int j) { return B[std::size_t(j) * mb + i]; };
  auto& cols = ws.cols;
  auto& K = ws.kkt;
  auto& r = ws.rhs;
  while (!cols.empty()) {
    const int np = static_cast<int>(cols.size());
    const int dim = np + me;
    K.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    r.assign(static_cast<std::size_t>(dim), 0.0);
    double trace = 0.0;
    for (int a = 0; a < np; ++a) {
      for (int bb = a; bb < np; ++bb) {
        double v = 0.0;
        for (int i = 0; i < mb; ++i) v += Bat(i, cols[a]) * Bat(i, cols[bb]);
        K[std::size_t(a) * dim + bb] = v;
        K[std::size_t(bb) * dim + a] = v;
      }
      trace += K[std::size_t(a) * dim + a];
      double v = 0.0;
      for (int i = 0; i < mb; ++i) v += Bat(i, cols[a]) * c[i];
      r[a] = v;
      for (int i = 0; i < me; ++i) {
        K[std::size_t(a) * dim + np + i] = Eat(i, cols[a]);
        K[std::size_t(np + i) * dim + a] = Eat(i, cols[a]);
      }
    }
    const double mu = 1e-12 * std::max(1.0, trace / np);
    for (int a = 0; a < np; ++a) K[std::size_t(a) * dim + a] += mu;
    for (int i = 0; i < me; ++i) r[np + i] = e[i];
    if (!dense_solve(K, r, dim)) return false;
    double eq_err = 0.0;
    for (int i = 0; i < me; ++i) {
      double v = -e[i];
      for (int a = 0; a < np; ++a) v += Eat(i, cols[a]) * r[a];
      eq_err = std::max(eq_err, std::abs(v));
    }
    if (!(eq_err <= 1e-10)) return false;
    int worst = 0;
    for (int a = 1; a < np; ++a)
      if (r[a] < r[worst]) worst = a;
    if (r[worst] >= -1e-13) {
      std::fill(x, x + n, 0.0);
      for (int a = 0; a < np; ++a) x[cols[a]] = std::max(r[a], 0.0);
      return true;
    }
    if (!allow_drop) return false;
    cols.erase(cols.begin() + worst);
  }
  return false;
}

// The KKT solution on every column, when it is already nonnegative.
bool unconstrained_is_feasible(const double* E, int me, const double* e, const double* B, int mb, const double* c,
                               int n, double* x, NnlsWorkspace& ws) {
  ws.cols.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) ws.cols[j] = j;
  return refine_on_columns(E, me, e, B, mb, c, n, x, ws, false);
}

}  // namespace

bool solve_equality_nnls(const double* E, int me, const double* e, const double* B, int mb, const double* c, int n,
                         double* x, NnlsWorkspace& ws, double equality_weight, double give_up) {
  if (unconstrained_is_feasible(E, me, e, B, mb, c, n, x, ws)) return true;
  const int m = me + mb;
  ws.a.resize(static_cast<std::size_t>(m) * n);
  ws.b.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < me; ++i) ws.a[std::size_t(j) * m + i] = equality_weight * E[std::size_t(j) * me + i];
    for (int i = 0; i < mb; ++i) ws.a[std::size_t(j) * m + me + i] = B[std::size_t(j) * mb + i];
  }
  for (int i = 0; i < me; ++i) ws.b[i] = equality_weight * e[i];
  for (int i = 0; i < mb; ++i) ws.b[me + i] = c[i];
  bool converged = false;
  lawson_hanson({ws.a.data(), m, n}, ws.b.data(), x, 0, &converged, ws);
  // Any exactly feasible point costs at least the relaxed optimum.
  if (converged && std::isfinite(give_up)) {
    double r2 = 0.0;
    for (int i = 0; i < mb; ++i) {
      double v = -c[i];
      for (int j = 0; j < n; ++j) v += B[std::size_t(j) * mb + i] * x[j];
      r2 += v * v;
    }
    if (std::sqrt(r2) > give_up) return false;
  }

  ws.cols.clear();
  for (int j = 0; j < n; ++j)
    if (x[j] > 0.0) ws.cols.push_back(j);
  // On failure the weighted solution stands.
  refine_on_columns(E, me, e, B, mb, c, n, x, ws);
  return true;
}

Eigen::VectorXd solve_equality_nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& e, const Eigen::MatrixXd& B,
                                    const Eigen::VectorXd& c, double equality_weight) {
  NnlsWorkspace ws;
  Eigen::VectorXd x(E.cols());
  solve_equality_nnls(E.data(), int(E.rows()), e.data(), B.data(), int(B.rows()), c.data(), int(E.cols()), x.data(),
                      ws, equality_weight);
  return x;
}

}  // namespace imdp
