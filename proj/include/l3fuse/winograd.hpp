#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace l3f {

using Rational = boost::multiprecision::cpp_rational;

// Dense row-major matrix of exact rationals.
struct RationalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> values;

  RationalMatrix() = default;
  RationalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c) {}

  Rational& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return values[i * cols + j];
  }

  std::vector<double> to_double() const;
  std::vector<float> to_float() const;
};

// Winograd transform matrices for correlating a T x T input tile with a
// K x K kernel, producing a T' x T' output tile (T' = T - K + 1):
//
//   out = A^T [ (G w G^T) .* (B x B^T) ] A
//
// with A: T x T', B: T x T, G: T x K. Built by Toom-Cook interpolation over
// T - 1 finite nodes plus the point at infinity.
class WinogradBasis {
 public:
  int tile() const noexcept { return tile_; }
  int kernel() const noexcept { return kernel_; }
  int out_tile() const noexcept { return tile_ - kernel_ + 1; }
  const std::vector<Rational>& points() const noexcept { return points_; }

  const RationalMatrix& exact_a() const noexcept { return a_; }
  const RationalMatrix& exact_b() const noexcept { return b_; }
  const RationalMatrix& exact_g() const noexcept { return g_; }

  // Row-major 64-bit and 32-bit copies of the same matrices.
  std::span<const double> a64() const noexcept { return a64_; }
  std::span<const double> b64() const noexcept { return b64_; }
  std::span<const double> g64() const noexcept { return g64_; }
  std::span<const float> a() const noexcept { return a32_; }
  std::span<const float> b() const noexcept { return b32_; }
  std::span<const float> g() const noexcept { return g32_; }

 private:
  friend WinogradBasis make_basis(int, int, std::span<const Rational>);

  int tile_ = 0;
  int kernel_ = 0;
  std::vector<Rational> points_;
  RationalMatrix a_, b_, g_;
  std::vector<double> a64_, b64_, g64_;
  std::vector<float> a32_, b32_, g32_;
};

inline constexpr int kMinTile = 4;
inline constexpr int kMaxTile = 8;

// Throws InvalidParameter for T <= K, K < 1, T > 8 or a wrong node count,
// and for duplicate nodes.
WinogradBasis make_basis(int tile, int kernel, std::span<const Rational> points);
// Uses default_points(tile).
WinogradBasis make_basis(int tile, int kernel);

// Fixed node sets for T in [4, 8]:
//   {0, 1, -1, 2, -2, 1/2, -1/2} truncated to T - 1 entries.
std::vector<Rational> default_points(int tile);

// Parses "p1,p2,..." where each entry is an integer or "num/den".
std::vector<Rational> parse_points(std::string_view text);

// JSON text with the node set and each matrix as rational strings and doubles.
std::string dump_basis(const WinogradBasis& basis);

}  // namespace l3f
