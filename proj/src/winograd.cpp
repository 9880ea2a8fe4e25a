#include "l3fuse/winograd.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "l3fuse/errors.hpp"

namespace l3f {

namespace {

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

Rational power(const Rational& base, std::size_t exponent) {
  Rational result = 1;
  for (std::size_t i = 0; i < exponent; ++i) result *= base;
  return result;
}

// Coefficients (ascending degree) of prod_{k in roots} (x - root).
std::vector<Rational> monic_from_roots(const std::vector<Rational>& roots) {
  std::vector<Rational> coeffs{1};
  for (const Rational& root : roots) {
    std::vector<Rational> next(coeffs.size() + 1);
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
      next[d + 1] += coeffs[d];
      next[d] -= root * coeffs[d];
    }
    coeffs = std::move(next);
  }
  return coeffs;
}

}  // namespace

std::vector<double> RationalMatrix::to_double() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](const Rational& r) { return r.convert_to<double>(); });
  return out;
}

std::vector<float> RationalMatrix::to_float() const {
  std::vector<float> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](const Rational& r) {
    return static_cast<float>(r.convert_to<double>());
  });
  return out;
}

// Correlation of x (length T) with w (length K) is the transpose of the
// linear convolution h (length T') * w. With V the evaluation matrix of
// degree T-1 polynomials at the nodes (infinity taking the leading
// coefficient), convolution is V^-1 [(E w) .* (F h)] and correlation is
// F^T [(E w) .* (V^-T x)]. Here A = F, G = E and B = V^-T. The columns of
// V^-1 are the Lagrange basis N_i(x) / f_i for finite nodes and
// M(x) = prod (x - a_k) for infinity; diagonal scalings are moved between G
// and B so that B stays integral-ish: B row i = sign(f_i) N_i, G row i =
// a_i^j / |f_i|, and the infinity row is negated in both B and A.
WinogradBasis make_basis(int tile, int kernel, std::span<const Rational> points) {
  if (kernel < 1) throw InvalidParameter("kernel size must be >= 1");
  if (tile <= kernel)
    throw InvalidParameter("tile size " + std::to_string(tile) +
                           " must exceed kernel size " + std::to_string(kernel));
  if (tile > kMaxTile)
    throw InvalidParameter("tile size " + std::to_string(tile) +
                           " above the supported maximum of 8");
  const auto n = static_cast<std::size_t>(tile);
  const auto k = static_cast<std::size_t>(kernel);
  const std::size_t m = n - k + 1;
  if (points.size() != n - 1)
    throw InvalidParameter("expected " + std::to_string(n - 1) +
                           " interpolation points, got " +
                           std::to_string(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw InvalidParameter("duplicate interpolation point " +
                               to_string(points[i]));

  WinogradBasis basis;
  basis.tile_ = tile;
  basis.kernel_ = kernel;
  basis.points_.assign(points.begin(), points.end());
  basis.a_ = RationalMatrix(n, m);
  basis.b_ = RationalMatrix(n, n);
  basis.g_ = RationalMatrix(n, k);

  const std::size_t finite = n - 1;
  for (std::size_t i = 0; i < finite; ++i) {
    std::vector<Rational> others;
    Rational f = 1;
    for (std::size_t j = 0; j < finite; ++j) {
      if (j == i) continue;
      others.push_back(points[j]);
      f *= points[i] - points[j];
    }
    const Rational magnitude = f < 0 ? Rational(-f) : f;
    const int sign = f < 0 ? -1 : 1;

    const std::vector<Rational> lagrange = monic_from_roots(others);
    for (std::size_t d = 0; d < lagrange.size(); ++d)
      basis.b_(i, d) = sign * lagrange[d];
    for (std::size_t j = 0; j < k; ++j)
      basis.g_(i, j) = power(points[i], j) / magnitude;
    for (std::size_t j = 0; j < m; ++j) basis.a_(i, j) = power(points[i], j);
  }

  const std::vector<Rational> all(points.begin(), points.end());
  const std::vector<Rational> leading = monic_from_roots(all);
  for (std::size_t d = 0; d < leading.size(); ++d)
    basis.b_(finite, d) = -leading[d];
  basis.g_(finite, k - 1) = 1;
  basis.a_(finite, m - 1) = -1;

  basis.a64_ = basis.a_.to_double();
  basis.b64_ = basis.b_.to_double();
  basis.g64_ = basis.g_.to_double();
  basis.a32_ = basis.a_.to_float();
  basis.b32_ = basis.b_.to_float();
  basis.g32_ = basis.g_.to_float();
  return basis;
}

WinogradBasis make_basis(int tile, int kernel) {
  if (tile <= kernel)
    throw InvalidParameter("tile size " + std::to_string(tile) +
                           " must exceed kernel size " + std::to_string(kernel));
  const std::vector<Rational> points = default_points(tile);
  return make_basis(tile, kernel, points);
}

std::vector<Rational> default_points(int tile) {
  if (tile < kMinTile || tile > kMaxTile)
    throw InvalidParameter("no default interpolation points for tile size " +
                           std::to_string(tile) + " (supported: 4..8)");
  const std::vector<Rational> nodes{0, 1, -1, 2, -2, Rational(1, 2), Rational(-1, 2)};
  return {nodes.begin(), nodes.begin() + (tile - 1)};
}

std::vector<Rational> parse_points(std::string_view text) {
  std::vector<Rational> points;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    try {
      points.emplace_back(item);
    } catch (const std::exception&) {
      throw InvalidParameter("cannot parse interpolation point '" + item + "'");
    }
  }
  return points;
}

std::string dump_basis(const WinogradBasis& basis) {
  auto matrix_json = [](const RationalMatrix& m) {
    nlohmann::json exact = nlohmann::json::array();
    nlohmann::json approx = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
      nlohmann::json er = nlohmann::json::array();
      nlohmann::json ar = nlohmann::json::array();
      for (std::size_t j = 0; j < m.cols; ++j) {
        er.push_back(to_string(m(i, j)));
        ar.push_back(m(i, j).convert_to<double>());
      }
      exact.push_back(er);
      approx.push_back(ar);
    }
    return nlohmann::json{{"rows", m.rows}, {"cols", m.cols},
                          {"exact", exact}, {"values", approx}};
  };
  nlohmann::json points = nlohmann::json::array();
  for (const Rational& p : basis.points()) points.push_back(to_string(p));
  nlohmann::json doc{{"tile", basis.tile()},
                     {"kernel", basis.kernel()},
                     {"out_tile", basis.out_tile()},
                     {"points", points},
                     {"convention", "out = A^T [(G w G^T) .* (B x B^T)] A"},
                     {"A", matrix_json(basis.exact_a())},
                     {"B", matrix_json(basis.exact_b())},
                     {"G", matrix_json(basis.exact_g())}};
  return doc.dump(2);
}

}  // namespace l3f
