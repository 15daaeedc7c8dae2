#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace scrt {

/// Dense row-major f32 matrix. Values are stored in 32-bit floats; every
/// reduction over them (dot products, softmax denominators, variances, means)
/// accumulates in 64-bit with a fixed left-to-right order so that repeated
/// runs are bit-identical.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);
  static Matrix from_rows(std::initializer_list<std::initializer_list<float>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return rows_ == 0; }

  float& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  float at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  float* row(std::size_t r) { return data_.data() + r * cols_; }
  const float* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<const float> row_span(std::size_t r) const { return {row(r), cols_}; }
  std::span<float> row_span(std::size_t r) { return {row(r), cols_}; }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool operator==(const Matrix& o) const = default;

  /// Rows [r0, r1) as a copy.
  Matrix slice_rows(std::size_t r0, std::size_t r1) const;
  void append_row(std::span<const float> row);
  void append_rows(const Matrix& m);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

/// a (n×k) times b (k×m). Throws ShapeError on mismatched inner dims.
Matrix matmul(const Matrix& a, const Matrix& b);

/// m (n×in) times w (out×in) transposed, plus optional bias (length out or empty).
Matrix linear(const Matrix& m, const Matrix& w, std::span<const float> bias);

/// Row-wise softmax. -inf entries map to exactly 0; a row that is entirely
/// -inf throws NumericError.
Matrix softmax_rows(const Matrix& m);

/// Per-row normalization with population variance: gain * (x - mean) / sqrt(var + eps) + bias.
Matrix layer_norm(const Matrix& m, std::span<const float> gain, std::span<const float> bias,
                  float eps);

/// Per-channel 1-d convolution over rows (time) with zero "same" padding.
/// m is time×channels, kernels is channels×width. Width must be odd.
Matrix depthwise_conv1d(const Matrix& m, const Matrix& kernels);

/// Same-padding depthwise convolution without the parity restriction. Taps
/// cover [t - width/2, t + width - 1 - width/2]; identical to
/// depthwise_conv1d for odd widths.
Matrix depthwise_conv1d_padded(const Matrix& m, const Matrix& kernels);

/// Column means over all rows. Throws ShapeError for zero rows.
std::vector<float> mean_pool_rows(const Matrix& m);

/// x * sigmoid(x), elementwise.
Matrix swish(const Matrix& m);

/// Gated linear unit over column halves: first_half * sigmoid(second_half).
/// Throws ShapeError on odd column count.
Matrix glu(const Matrix& m);

Matrix add(const Matrix& a, const Matrix& b);
Matrix concat_rows(const Matrix& a, const Matrix& b);
Matrix concat_rows(const Matrix& a, const Matrix& b, const Matrix& c);

}  // namespace scrt
