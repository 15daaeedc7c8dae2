#include "scrt/matrix.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "scrt/errors.hpp"

namespace scrt {

namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw ShapeError("matrix data size " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows_) + "*" + std::to_string(cols_));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<float>> rows) {
  Matrix m;
  for (const auto& r : rows) {
    if (m.rows_ == 0) m.cols_ = r.size();
    if (r.size() != m.cols_) throw ShapeError("ragged initializer rows");
    m.data_.insert(m.data_.end(), r.begin(), r.end());
    ++m.rows_;
  }
  return m;
}

Matrix Matrix::slice_rows(std::size_t r0, std::size_t r1) const {
  if (r0 > r1 || r1 > rows_) throw ShapeError("row slice out of range");
  Matrix out(r1 - r0, cols_);
  std::copy(data_.begin() + r0 * cols_, data_.begin() + r1 * cols_, out.data_.begin());
  return out;
}

void Matrix::append_row(std::span<const float> row) {
  if (rows_ == 0 && cols_ == 0) cols_ = row.size();
  if (row.size() != cols_)
    throw ShapeError("appended row width " + std::to_string(row.size()) + " != " +
                     std::to_string(cols_));
  data_.insert(data_.end(), row.begin(), row.end());
  ++rows_;
}

void Matrix::append_rows(const Matrix& m) {
  if (m.rows_ == 0) return;
  if (rows_ == 0 && cols_ == 0) cols_ = m.cols_;
  if (m.cols_ != cols_) throw ShapeError("appended rows width mismatch");
  data_.insert(data_.end(), m.data_.begin(), m.data_.end());
  rows_ += m.rows_;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul shape mismatch: " + shape_str(a) + " * " + shape_str(b));
  Matrix out(a.rows(), b.cols());
  std::vector<double> acc(b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const float* arow = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double av = arow[k];
      const float* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) acc[j] += av * static_cast<double>(brow[j]);
    }
    float* orow = out.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) orow[j] = static_cast<float>(acc[j]);
  }
  return out;
}

Matrix linear(const Matrix& m, const Matrix& w, std::span<const float> bias) {
  if (m.cols() != w.cols())
    throw ShapeError("linear shape mismatch: " + shape_str(m) + " vs weight " + shape_str(w));
  if (!bias.empty() && bias.size() != w.rows())
    throw ShapeError("linear bias length " + std::to_string(bias.size()) + " != " +
                     std::to_string(w.rows()));
  Matrix out(m.rows(), w.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const float* x = m.row(i);
    float* orow = out.row(i);
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const float* wr = w.row(o);
      double acc = bias.empty() ? 0.0 : static_cast<double>(bias[o]);
      for (std::size_t k = 0; k < m.cols(); ++k)
        acc += static_cast<double>(x[k]) * static_cast<double>(wr[k]);
      orow[o] = static_cast<float>(acc);
    }
  }
  return out;
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  if (m.cols() == 0) throw ShapeError("softmax_rows: zero columns");
  std::vector<double> ex(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const float* x = m.row(i);
    float mx = -std::numeric_limits<float>::infinity();
    for (std::size_t j = 0; j < m.cols(); ++j) mx = std::max(mx, x[j]);
    if (std::isinf(mx) && mx < 0)
      throw NumericError("softmax_rows: row " + std::to_string(i) + " is entirely -inf");
    double denom = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      ex[j] = std::exp(static_cast<double>(x[j]) - static_cast<double>(mx));
      denom += ex[j];
    }
    float* orow = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) orow[j] = static_cast<float>(ex[j] / denom);
  }
  return out;
}

Matrix layer_norm(const Matrix& m, std::span<const float> gain, std::span<const float> bias,
                  float eps) {
  if (gain.size() != m.cols() || bias.size() != m.cols())
    throw ShapeError("layer_norm gain/bias length must equal column count");
  if (m.cols() == 0) throw ShapeError("layer_norm: zero columns");
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const float* x = m.row(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) mean += x[j];
    mean /= static_cast<double>(m.cols());
    double var = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double d = x[j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(m.cols());
    const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));
    float* orow = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j)
      orow[j] = static_cast<float>((x[j] - mean) * inv * gain[j] + bias[j]);
  }
  return out;
}

Matrix depthwise_conv1d_padded(const Matrix& m, const Matrix& kernels) {
  if (kernels.rows() != m.cols())
    throw ShapeError("depthwise kernels rows " + std::to_string(kernels.rows()) +
                     " != channels " + std::to_string(m.cols()));
  if (kernels.cols() == 0) throw ConfigError("depthwise kernel width must be positive");
  const std::size_t width = kernels.cols();
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(width / 2);
  Matrix out(m.rows(), m.cols());
  for (std::size_t t = 0; t < m.rows(); ++t) {
    float* orow = out.row(t);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const float* k = kernels.row(c);
      double acc = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) +
                                   static_cast<std::ptrdiff_t>(j) - pad;
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(m.rows())) continue;
        acc += static_cast<double>(m.at(static_cast<std::size_t>(src), c)) *
               static_cast<double>(k[j]);
      }
      orow[c] = static_cast<float>(acc);
    }
  }
  return out;
}

Matrix depthwise_conv1d(const Matrix& m, const Matrix& kernels) {
  if (kernels.cols() % 2 == 0)
    throw ConfigError("depthwise_conv1d: kernel width " + std::to_string(kernels.cols()) +
                      " must be odd");
  return depthwise_conv1d_padded(m, kernels);
}

std::vector<float> mean_pool_rows(const Matrix& m) {
  if (m.rows() == 0) throw ShapeError("mean_pool_rows: empty input");
  std::vector<double> acc(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const float* x = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) acc[j] += x[j];
  }
  std::vector<float> out(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    out[j] = static_cast<float>(acc[j] / static_cast<double>(m.rows()));
  return out;
}

Matrix swish(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    const double x = m.data()[i];
    out.data()[i] = static_cast<float>(x * sigmoid(x));
  }
  return out;
}

Matrix glu(const Matrix& m) {
  if (m.cols() % 2 != 0) throw ShapeError("glu: column count must be even");
  const std::size_t half = m.cols() / 2;
  Matrix out(m.rows(), half);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const float* x = m.row(i);
    float* orow = out.row(i);
    for (std::size_t j = 0; j < half; ++j)
      orow[j] = static_cast<float>(static_cast<double>(x[j]) * sigmoid(x[half + j]));
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b))
    throw ShapeError("add shape mismatch: " + shape_str(a) + " vs " + shape_str(b));
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

Matrix concat_rows(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  out.append_rows(b);
  return out;
}

Matrix concat_rows(const Matrix& a, const Matrix& b, const Matrix& c) {
  Matrix out = concat_rows(a, b);
  out.append_rows(c);
  return out;
}

}  // namespace scrt
