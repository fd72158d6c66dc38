#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>

namespace cce {

/// Interior metrics are 4-dimensional, boundary metrics 3-dimensional. All
/// pointwise arrays are stored at the maximal size with an explicit `dim`.
inline constexpr int kMaxDim = 4;

template <typename T>
using Vec = std::array<T, kMaxDim>;

template <typename T>
using Mat = std::array<std::array<T, kMaxDim>, kMaxDim>;

using Point = Vec<double>;
using Matrix = Mat<double>;

/// Γ^k_{ij} stored as [k][i][j].
using Rank3 = std::array<Matrix, kMaxDim>;

/// Lowered rank-4 tensor T_{ijkl} stored as [i][j][k][l].
using Rank4 = std::array<std::array<Matrix, kMaxDim>, kMaxDim>;

template <typename T>
constexpr Mat<T> zero_matrix() {
  Mat<T> m{};
  for (auto& row : m) row.fill(T(0.0));
  return m;
}

inline Point make_point(std::initializer_list<double> xs) {
  Point p{};
  std::size_t i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

}  // namespace cce
