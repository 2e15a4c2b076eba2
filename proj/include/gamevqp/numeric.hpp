// Copyright 2026 The GameVQP Authors. All Rights Reserved.
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

#ifndef GAMEVQP_NUMERIC_HPP_
#define GAMEVQP_NUMERIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gamevqp/error.hpp"

namespace gamevqp {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && data_.empty()) cols_ = values.size();
    if (values.size() != cols_) throw DimensionError("row length does not match matrix width");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  Matrix select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto src = row(indices[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Accumulated relative to the first sample, so identical inputs return that
// value exactly.
inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double ref = xs[0];
  double sum = 0.0;
  for (double x : xs) sum += x - ref;
  return ref + sum / static_cast<double>(xs.size());
}

// Sum of squared deviations from the mean (two-pass).
inline double sum_squared_deviation(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss;
}

inline double population_std(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::sqrt(sum_squared_deviation(xs) / static_cast<double>(xs.size()));
}

inline double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return std::sqrt(sum_squared_deviation(xs) / static_cast<double>(xs.size() - 1));
}

// Even-length lists return the mean of the two central order statistics.
inline double median(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

// Population kurtosis m4 / m2^2 (3 for a Gaussian). Zero-variance input gives 0.
inline double kurtosis(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d2 = (x - m) * (x - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(xs.size());
  m4 /= static_cast<double>(xs.size());
  return m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
}

}  // namespace gamevqp

#endif  // GAMEVQP_NUMERIC_HPP_
