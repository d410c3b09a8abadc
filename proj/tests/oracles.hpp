#pragma once

// Reference implementations used only by the tests. They share no code with
// the library solvers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// All basic feasible solutions of {P >= 0, P1 = a, P'1 = b}, found by trying
// every set of n + m - 1 cells and solving the equality system on it.
inline std::vector<Matrix> transport_vertices(const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const int cells = n * m;
  const int basis = n + m - 1;
  std::vector<Matrix> out;
  std::vector<int> pick(static_cast<std::size_t>(cells), 0);
  std::fill(pick.end() - std::min(basis, cells), pick.end(), 1);
  do {
    std::vector<int> chosen;
    for (int c = 0; c < cells; ++c) {
      if (pick[static_cast<std::size_t>(c)]) chosen.push_back(c);
    }
    Matrix sys = Matrix::Zero(n + m, static_cast<int>(chosen.size()));
    Vector rhs(n + m);
    rhs << a, b;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const int i = chosen[k] / m;
      const int j = chosen[k] % m;
      sys(i, static_cast<int>(k)) = 1.0;
      sys(n + j, static_cast<int>(k)) = 1.0;
    }
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.rank() != static_cast<int>(chosen.size())) continue;
    const Vector x = lu.solve(rhs);
    if ((sys * x - rhs).cwiseAbs().maxCoeff() > 1e-12) continue;
    if (x.minCoeff() < -1e-12) continue;
    Matrix p = Matrix::Zero(n, m);
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      p(chosen[k] / m, chosen[k] % m) = std::max(x[static_cast<int>(k)], 0.0);
    }
    out.push_back(p);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return out;
}

inline double vertex_min(const Vector& a, const Vector& b, const Matrix& cost) {
  double best = std::numeric_limits<double>::infinity();
  for (const Matrix& p : transport_vertices(a, b)) best = std::min(best, (p.array() * cost.array()).sum());
  return best;
}

inline double vertex_max(const Vector& a, const Vector& b, const Matrix& cost) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Matrix& p : transport_vertices(a, b)) best = std::max(best, (p.array() * cost.array()).sum());
  return best;
}

// First extreme point (by index) attaining min w'x within 1e-9.
inline int argmin_vertex(const Matrix& w, const Vector& x) {
  const Vector obj = w * x;
  const double lo = obj.minCoeff();
  for (int k = 0; k < obj.size(); ++k) {
    if (obj[k] <= lo + 1e-9) return k;
  }
  return 0;
}

// l(x, y) = y'w*(x) - min_w y'w, computed by scanning the vertices.
inline double spo(const Matrix& w, const Vector& x, const Vector& y) {
  const int kx = argmin_vertex(w, x);
  const int ky = argmin_vertex(w, y);
  if (kx == ky) return 0.0;
  return std::max(w.row(kx).dot(y) - w.row(ky).dot(y), 0.0);
}

inline Matrix spo_matrix(const Matrix& w, const Matrix& xs, const Matrix& ys) {
  Matrix c(xs.rows(), ys.rows());
  for (int i = 0; i < xs.rows(); ++i) {
    for (int j = 0; j < ys.rows(); ++j) c(i, j) = spo(w, xs.row(i).transpose(), ys.row(j).transpose());
  }
  return c;
}

// Small random instance for property tests.
struct Instance {
  Matrix vertices;  // |S| x d
  Matrix x;         // mu atoms
  Vector a;
  Matrix y;         // nu atoms
  Vector b;
};

inline Vector random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = e(rng);
  return w / w.sum();
}

inline Matrix random_points(std::mt19937_64& rng, int n, int d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix p(n, d);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) p(i, c) = g(rng);
  }
  return p;
}

inline Instance random_instance(std::mt19937_64& rng, int max_dim = 4, int max_vertices = 8,
                                int max_support = 60) {
  std::uniform_int_distribution<int> dim(1, max_dim);
  std::uniform_int_distribution<int> verts(2, max_vertices);
  std::uniform_int_distribution<int> support(1, max_support);
  Instance inst;
  const int d = dim(rng);
  inst.vertices = random_points(rng, verts(rng), d, 1.5);
  const int n = support(rng);
  const int m = support(rng);
  inst.x = random_points(rng, n, d);
  inst.y = random_points(rng, m, d);
  std::normal_distribution<double> shift(0.0, 0.5);
  for (int c = 0; c < d; ++c) inst.y.col(c).array() += shift(rng);
  inst.a = random_simplex(rng, n);
  inst.b = random_simplex(rng, m);
  return inst;
}

}  // namespace oracle
