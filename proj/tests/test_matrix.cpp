#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "scrt/errors.hpp"
#include "scrt/matrix.hpp"
#include "scrt/synth.hpp"

using scrt::Matrix;

TEST_CASE("matrix construction and access") {
  Matrix m(2, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.size() == 6);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(m.at(r, c) == 0.0f);
    }
  }
  m.at(1, 2) = 5.0f;
  CHECK(m.at(1, 2) == 5.0f);

  Matrix from_data(2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
  CHECK(from_data.at(0, 1) == 2.0f);
  CHECK(from_data.at(1, 0) == 3.0f);

  Matrix lit = Matrix::from_rows({{1.0f, 2.0f}, {3.0f, 4.0f}});
  CHECK(lit == from_data);

  CHECK_THROWS_AS(Matrix(2, 2, {1.0f}), scrt::ShapeError);
  CHECK(Matrix().empty());
}

TEST_CASE("matrix row views and slicing") {
  Matrix m = Matrix::from_rows({{1.0f, 2.0f}, {3.0f, 4.0f}, {5.0f, 6.0f}});
  auto r1 = m.row_span(1);
  CHECK(r1.size() == 2);
  CHECK(r1[0] == 3.0f);

  Matrix mid = m.slice_rows(1, 3);
  CHECK(mid.rows() == 2);
  CHECK(mid.at(0, 0) == 3.0f);
  CHECK(mid.at(1, 1) == 6.0f);

  Matrix grown;
  std::vector<float> row = {7.0f, 8.0f};
  grown.append_row(row);
  CHECK(grown.rows() == 1);
  CHECK(grown.cols() == 2);
  grown.append_rows(m.slice_rows(0, 2));
  CHECK(grown.rows() == 3);
  CHECK(grown.at(2, 1) == 4.0f);

  std::vector<float> bad = {1.0f, 2.0f, 3.0f};
  CHECK_THROWS_AS(grown.append_row(bad), scrt::ShapeError);
}

TEST_CASE("matmul identity and hand values") {
  Matrix id = Matrix::from_rows({{1.0f, 0.0f}, {0.0f, 1.0f}});
  Matrix a = Matrix::from_rows({{1.0f, 2.0f}, {3.0f, 4.0f}});
  CHECK(scrt::matmul(id, a) == a);
  CHECK(scrt::matmul(a, id) == a);

  Matrix row = Matrix::from_rows({{1.0f, 2.0f}});
  Matrix col = Matrix::from_rows({{3.0f}, {4.0f}});
  Matrix prod = scrt::matmul(row, col);
  CHECK(prod.rows() == 1);
  CHECK(prod.cols() == 1);
  CHECK(prod.at(0, 0) == 11.0f);

  Matrix zeros(2, 2);
  CHECK(scrt::matmul(zeros, a) == zeros);
  CHECK(scrt::matmul(a, zeros) == zeros);

  Matrix wide(2, 3);
  CHECK_THROWS_AS(scrt::matmul(wide, a), scrt::ShapeError);
}

TEST_CASE("linear applies transposed weights plus bias") {
  Matrix x = Matrix::from_rows({{1.0f, 2.0f}, {3.0f, 4.0f}});
  Matrix w_id = Matrix::from_rows({{1.0f, 0.0f}, {0.0f, 1.0f}});
  std::vector<float> zero_bias = {0.0f, 0.0f};
  CHECK(scrt::linear(x, w_id, zero_bias) == x);

  // One output row of W picks an input column; bias shifts it.
  Matrix w = Matrix::from_rows({{0.0f, 1.0f}, {2.0f, 0.0f}});
  std::vector<float> bias = {10.0f, -1.0f};
  Matrix y = scrt::linear(x, w, bias);
  CHECK(y.at(0, 0) == 12.0f);
  CHECK(y.at(0, 1) == 1.0f);
  CHECK(y.at(1, 0) == 14.0f);
  CHECK(y.at(1, 1) == 5.0f);
}

TEST_CASE("softmax rows on hand inputs") {
  Matrix m = Matrix::from_rows({{0.0f, 0.0f}});
  Matrix s = scrt::softmax_rows(m);
  CHECK(s.at(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s.at(0, 1) == doctest::Approx(0.5).epsilon(1e-6));

  Matrix two = Matrix::from_rows({{std::log(2.0f), 0.0f}});
  Matrix s2 = scrt::softmax_rows(two);
  CHECK(s2.at(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(s2.at(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  const float ninf = -std::numeric_limits<float>::infinity();
  Matrix masked = Matrix::from_rows({{5.0f, ninf, ninf}});
  Matrix s3 = scrt::softmax_rows(masked);
  CHECK(s3.at(0, 0) == 1.0f);
  CHECK(s3.at(0, 1) == 0.0f);
  CHECK(s3.at(0, 2) == 0.0f);

  Matrix dead = Matrix::from_rows({{ninf, ninf}});
  CHECK_THROWS_AS(scrt::softmax_rows(dead), scrt::NumericError);
}

TEST_CASE("layer norm hand values") {
  std::vector<float> gain = {1.0f, 1.0f};
  std::vector<float> bias = {0.0f, 0.0f};

  Matrix constant = Matrix::from_rows({{3.0f, 3.0f}});
  Matrix n0 = scrt::layer_norm(constant, gain, bias, 1e-5f);
  CHECK(n0.at(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(n0.at(0, 1) == doctest::Approx(0.0).epsilon(1e-6));

  Matrix unit = Matrix::from_rows({{1.0f, -1.0f}});
  Matrix n1 = scrt::layer_norm(unit, gain, bias, 1e-12f);
  CHECK(n1.at(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(n1.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));

  Matrix shifted = Matrix::from_rows({{3.0f, 1.0f}});
  Matrix n2 = scrt::layer_norm(shifted, gain, bias, 1e-12f);
  CHECK(n2.at(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(n2.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));

  // Gain and bias apply after normalization.
  std::vector<float> g2 = {2.0f, 2.0f};
  std::vector<float> b2 = {1.0f, 1.0f};
  Matrix n3 = scrt::layer_norm(shifted, g2, b2, 1e-12f);
  CHECK(n3.at(0, 0) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(n3.at(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("depthwise convolution hand values") {
  Matrix x = Matrix::from_rows({{1.0f}, {2.0f}, {3.0f}});

  Matrix k_one = Matrix::from_rows({{1.0f}});
  CHECK(scrt::depthwise_conv1d(x, k_one) == x);

  Matrix k_delta = Matrix::from_rows({{0.0f, 1.0f, 0.0f}});
  CHECK(scrt::depthwise_conv1d(x, k_delta) == x);

  Matrix k_sum = Matrix::from_rows({{1.0f, 1.0f, 1.0f}});
  Matrix y = scrt::depthwise_conv1d(x, k_sum);
  CHECK(y.at(0, 0) == 3.0f);
  CHECK(y.at(1, 0) == 6.0f);
  CHECK(y.at(2, 0) == 5.0f);

  Matrix k_even(1, 4, {0.0f, 0.0f, 1.0f, 0.0f});
  CHECK_THROWS_AS(scrt::depthwise_conv1d(x, k_even), scrt::ConfigError);

  // The padded variant accepts even widths; taps cover [t - w/2, t + w - 1 - w/2].
  Matrix y_even = scrt::depthwise_conv1d_padded(x, k_even);
  CHECK(y_even == x);
}

TEST_CASE("depthwise convolution is linear") {
  Matrix a = scrt::synth_matrix(41, 10, 4, -1.0f, 1.0f);
  Matrix b = scrt::synth_matrix(42, 10, 4, -1.0f, 1.0f);
  Matrix k = scrt::synth_matrix(43, 4, 5, -1.0f, 1.0f);
  Matrix combo(10, 4);
  for (std::size_t i = 0; i < combo.size(); ++i) {
    combo.data()[i] = 0.75f * a.data()[i] - 0.5f * b.data()[i];
  }
  Matrix lhs = scrt::depthwise_conv1d_padded(combo, k);
  Matrix ya = scrt::depthwise_conv1d_padded(a, k);
  Matrix yb = scrt::depthwise_conv1d_padded(b, k);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    CHECK(lhs.data()[i] ==
          doctest::Approx(0.75f * ya.data()[i] - 0.5f * yb.data()[i]).epsilon(1e-5));
  }
}

TEST_CASE("mean pooling over rows") {
  Matrix single = Matrix::from_rows({{2.0f, 7.0f}});
  std::vector<float> p1 = scrt::mean_pool_rows(single);
  CHECK(p1[0] == 2.0f);
  CHECK(p1[1] == 7.0f);

  Matrix two = Matrix::from_rows({{1.0f, 3.0f}, {3.0f, 5.0f}});
  std::vector<float> p2 = scrt::mean_pool_rows(two);
  CHECK(p2[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(p2[1] == doctest::Approx(4.0).epsilon(1e-7));

  Matrix copies = Matrix::from_rows({{1.5f, -2.5f}, {1.5f, -2.5f}, {1.5f, -2.5f}});
  std::vector<float> p3 = scrt::mean_pool_rows(copies);
  CHECK(p3[0] == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(p3[1] == doctest::Approx(-2.5).epsilon(1e-7));
}

TEST_CASE("activation hand values") {
  Matrix z = Matrix::from_rows({{0.0f, 1.0f, -1.0f}});
  Matrix s = scrt::swish(z);
  CHECK(s.at(0, 0) == 0.0f);
  const double sig1 = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(s.at(0, 1) == doctest::Approx(sig1).epsilon(1e-6));
  CHECK(s.at(0, 2) == doctest::Approx(-(1.0 - sig1)).epsilon(1e-6));

  Matrix g = Matrix::from_rows({{4.0f, 0.0f}});
  Matrix gated = scrt::glu(g);
  CHECK(gated.cols() == 1);
  CHECK(gated.at(0, 0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("row concatenation preserves order") {
  Matrix a = Matrix::from_rows({{1.0f, 2.0f}});
  Matrix b = Matrix::from_rows({{3.0f, 4.0f}, {5.0f, 6.0f}});
  Matrix ab = scrt::concat_rows(a, b);
  CHECK(ab.rows() == 3);
  CHECK(ab.at(0, 0) == 1.0f);
  CHECK(ab.at(2, 1) == 6.0f);

  Matrix empty;
  Matrix eb = scrt::concat_rows(empty, b);
  CHECK(eb == b);

  Matrix abc = scrt::concat_rows(a, empty, b);
  CHECK(abc == ab);
}
