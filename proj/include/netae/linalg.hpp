#pragma once

#include <cmath>
#include <vector>

namespace netae {

using Vector = std::vector<double>;

// dense row-major matrix, 64-bit throughout
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  static Matrix identity(int n);

  bool operator==(const Matrix&) const = default;
};

enum class Activation { sigmoid, tanh, relu };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// out = m * v, accumulated left-to-right per row so results are deterministic
void matvec_into(const Matrix& m, const Vector& v, Vector& out);
// io += m * v
void matvec_add(const Matrix& m, const Vector& v, Vector& io);
Vector matvec(const Matrix& m, const Vector& v);

Vector elementwise(const Vector& v, Activation fn);

// mean squared error, (1/len) * sum((a_i - b_i)^2)
double mse(const Vector& a, const Vector& b);

}  // namespace netae
