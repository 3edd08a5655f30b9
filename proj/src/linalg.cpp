#include "netae/linalg.hpp"

#include <string>

#include "netae/errors.hpp"

namespace netae {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

void matvec_into(const Matrix& m, const Vector& v, Vector& out) {
  if (m.cols != static_cast<int>(v.size())) {
    throw DataError("matvec: dimension mismatch, matrix cols " + std::to_string(m.cols) +
                    " vs vector length " + std::to_string(v.size()));
  }
  out.assign(static_cast<std::size_t>(m.rows), 0.0);
  const double* row = m.data.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    double acc = 0.0;
    for (int c = 0; c < m.cols; ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
}

void matvec_add(const Matrix& m, const Vector& v, Vector& io) {
  if (m.cols != static_cast<int>(v.size()) || m.rows != static_cast<int>(io.size())) {
    throw DataError("matvec_add: dimension mismatch");
  }
  const double* row = m.data.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    double acc = 0.0;
    for (int c = 0; c < m.cols; ++c) acc += row[c] * v[c];
    io[r] += acc;
  }
}

Vector matvec(const Matrix& m, const Vector& v) {
  Vector out;
  matvec_into(m, v, out);
  return out;
}

Vector elementwise(const Vector& v, Activation fn) {
  Vector out(v.size());
  switch (fn) {
    case Activation::sigmoid:
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = relu(v[i]);
      break;
  }
  return out;
}

double mse(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DataError("mse: length mismatch, " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  if (a.empty()) throw DataError("mse: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace netae
