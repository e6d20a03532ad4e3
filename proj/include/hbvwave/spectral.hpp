#pragma once

// Dense small-matrix spectral utilities: Gershgorin row discs, disjoint disc
// components and an unsymmetric eigenvalue solver (Hessenberg + Francis QR).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "hbvwave/errors.hpp"

namespace hbvwave {

/// Real n x n matrix, 2 <= n <= 16, stored row-major.
class SquareMatrix {
public:
  static constexpr std::size_t kMinDim = 2;
  static constexpr std::size_t kMaxDim = 16;

  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) { check_dim(n); }

  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SquareMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n_) throw InvalidArgument("matrix rows must all have length n");
      std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * n_));
      ++i;
    }
    check_finite();
  }

  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    SquareMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.n_) throw InvalidArgument("matrix rows must all have length n");
      for (std::size_t j = 0; j < m.n_; ++j) m(i, j) = rows[i][j];
    }
    m.check_finite();
    return m;
  }

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static SquareMatrix diagonal(std::span<const double> d) {
    SquareMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
  }

  /// Maximum absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (double v : row(i)) s += std::abs(v);
      best = std::max(best, s);
    }
    return best;
  }

  void check_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) throw InvalidArgument("matrix entries must be finite");
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
  static void check_dim(std::size_t n) {
    if (n < kMinDim || n > kMaxDim) throw InvalidArgument("matrix dimension must lie in [2, 16]");
  }

  std::size_t n_;
  std::vector<double> data_;
};

/// Closed disc {z : |z - center| <= radius} in the complex plane; centers are real here.
struct Disc {
  double center = 0.0;
  double radius = 0.0;

  double lower() const noexcept { return center - radius; }
  double upper() const noexcept { return center + radius; }

  bool contains(std::complex<double> z, double tol = 0.0) const {
    return std::abs(z - std::complex<double>(center, 0.0)) <= radius + tol;
  }

  bool overlaps(const Disc& other) const {
    return std::abs(center - other.center) <= radius + other.radius;
  }

  friend bool operator==(const Disc&, const Disc&) = default;
};

/// Deleted absolute row sums R_i' = sum_{j != i} |a_ij|.
inline std::vector<double> deleted_row_sums(const SquareMatrix& a) {
  std::vector<double> sums(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != i) sums[i] += std::abs(a(i, j));
  return sums;
}

inline std::vector<Disc> gershgorin_discs(const SquareMatrix& a) {
  a.check_finite();
  const std::vector<double> radii = deleted_row_sums(a);
  std::vector<Disc> discs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) discs[i] = Disc{a(i, i), radii[i]};
  return discs;
}

/// Disc indices grouped into connected components of the overlap relation.
/// Tangent discs count as overlapping, so discs in different groups are strictly apart.
struct DiscPartition {
  std::vector<std::vector<std::size_t>> groups;

  std::size_t group_of(std::size_t disc) const {
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (std::find(groups[g].begin(), groups[g].end(), disc) != groups[g].end()) return g;
    throw InvalidArgument("disc index not in partition");
  }
};

inline DiscPartition connected_components(std::span<const Disc> discs) {
  const std::size_t n = discs.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (discs[i].overlaps(discs[j])) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::optional<std::size_t>> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (!slot[root]) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[*slot[root]].push_back(i);
  }
  auto leftmost = [&](const std::vector<std::size_t>& g) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i : g) lo = std::min(lo, discs[i].lower());
    return lo;
  };
  std::stable_sort(groups.begin(), groups.end(),
                   [&](const auto& x, const auto& y) { return leftmost(x) < leftmost(y); });
  return DiscPartition{std::move(groups)};
}

/// True when the union of discs in `group` contains z (within tol).
inline bool group_contains(std::span<const Disc> discs, std::span<const std::size_t> group,
                           std::complex<double> z, double tol = 0.0) {
  return std::any_of(group.begin(), group.end(),
                     [&](std::size_t i) { return discs[i].contains(z, tol); });
}

namespace detail {

inline void reduce_to_hessenberg(std::vector<double>& h, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return h[i * n + j]; };
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += at(i, k) * at(i, k);
    if (tail == 0.0) continue;  // column already in Hessenberg form
    const double x0 = at(k + 1, k);
    const double norm = std::sqrt(tail + x0 * x0);
    const double alpha = x0 > 0.0 ? -norm : norm;
    std::fill(v.begin(), v.end(), 0.0);
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = at(i, k);
    const double vnorm2 = v[k + 1] * v[k + 1] + tail;
    // H <- P H P with P = I - 2 v v^T / (v^T v)
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * at(i, j);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) at(i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += at(i, j) * v[j];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= f * v[j];
    }
    at(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) at(i, k) = 0.0;
  }
}

inline double copysign_nonzero(double magnitude, double sign_of) {
  return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout).
inline std::vector<std::complex<double>> hessenberg_qr(std::vector<double>& h, std::size_t n) {
  constexpr double kDeflate = 1e-12;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return h[i * n + j]; };

  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i > 0 ? i - 1 : 0); j < n; ++j) anorm += std::abs(at(i, j));

  std::vector<double> wr(n, 0.0), wi(n, 0.0);
  const std::size_t budget = 500 * n;
  std::size_t total = 0;
  double shift = 0.0;
  std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n) - 1;

  while (nn >= 0) {
    std::size_t its = 0;
    std::ptrdiff_t l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(at(l, l - 1)) <= kDeflate * s) {
          at(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = at(nn, nn);
      if (l == nn) {  // one root found
        wr[nn] = x + shift;
        wi[nn] = 0.0;
        --nn;
        its = 0;
      } else {
        double y = at(nn - 1, nn - 1);
        double w = at(nn, nn - 1) * at(nn - 1, nn);
        if (l == nn - 1) {  // two roots found
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += shift;
          if (q >= 0.0) {
            z = p + copysign_nonzero(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -z;
            wi[nn] = z;
          }
          nn -= 2;
          its = 0;
        } else {
          if (total >= budget) throw NoConvergence(total);
          if (its == 10 || its == 20) {  // exceptional shift
            shift += x;
            for (std::ptrdiff_t i = 0; i <= nn; ++i) at(i, i) -= x;
            const double s = std::abs(at(nn, nn - 1)) + std::abs(at(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++total;
          std::ptrdiff_t m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = at(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / at(m + 1, m) + at(m, m + 1);
            q = at(m + 1, m + 1) - z - r - s;
            r = at(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(at(m - 1, m - 1)) + std::abs(z) + std::abs(at(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (std::ptrdiff_t i = m + 2; i <= nn; ++i) {
            at(i, i - 2) = 0.0;
            if (i != m + 2) at(i, i - 3) = 0.0;
          }
          for (std::ptrdiff_t k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = at(k, k - 1);
              q = at(k + 1, k - 1);
              r = (k != nn - 1) ? at(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = copysign_nonzero(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) at(k, k - 1) = -at(k, k - 1);
            } else {
              at(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (std::ptrdiff_t j = k; j <= nn; ++j) {
              p = at(k, j) + q * at(k + 1, j);
              if (k != nn - 1) {
                p += r * at(k + 2, j);
                at(k + 2, j) -= p * z;
              }
              at(k + 1, j) -= p * y;
              at(k, j) -= p * x;
            }
            const std::ptrdiff_t mmin = std::min(nn, k + 3);
            for (std::ptrdiff_t i = l; i <= mmin; ++i) {
              p = x * at(i, k) + y * at(i, k + 1);
              if (k != nn - 1) {
                p += z * at(i, k + 2);
                at(i, k + 2) -= p * r;
              }
              at(i, k + 1) -= p * q;
              at(i, k) -= p;
            }
          }
        }
      }
    } while (nn >= 0 && l < nn - 1);
  }

  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

// Solves m x = rhs by LU with partial pivoting; pivots below zero_pivot are bumped up to it.
inline void lu_solve_in_place(std::vector<double> m, std::size_t n, std::vector<double>& rhs,
                              double zero_pivot) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      std::swap(rhs[k], rhs[piv]);
    }
    if (std::abs(at(k, k)) < zero_pivot) at(k, k) = at(k, k) < 0.0 ? -zero_pivot : zero_pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = at(i, k) / at(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) at(i, j) -= f * at(k, j);
      rhs[i] -= f * rhs[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= at(k, j) * rhs[j];
    rhs[k] = s / at(k, k);
  }
}

}  // namespace detail

/// All n eigenvalues with multiplicity, sorted by real part then imaginary part.
inline std::vector<std::complex<double>> eigenvalues(const SquareMatrix& a) {
  a.check_finite();
  const std::size_t n = a.size();
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h[i * n + j] = a(i, j);
  detail::reduce_to_hessenberg(h, n);
  auto eig = detail::hessenberg_qr(h, n);
  std::sort(eig.begin(), eig.end(), [](const auto& x, const auto& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return eig;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(const SquareMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j);
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[piv * n + k])) piv = i;
    if (m[piv * n + k] == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[piv * n + j]);
      det = -det;
    }
    det *= m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i * n + k] / m[k * n + k];
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return det;
}

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  ///< unit 2-norm
};

/// ||A v - lambda v||_2.
inline double eigen_residual(const SquareMatrix& a, double lambda, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double r = -lambda * v[i];
    for (std::size_t j = 0; j < a.size(); ++j) r += a(i, j) * v[j];
    sum += r * r;
  }
  return std::sqrt(sum);
}

/// Eigenvector for a real eigenvalue by inverse iteration. The sign is fixed so that
/// component `positive_component` (default: the largest in magnitude) is positive.
inline EigenPair real_eigenvector(const SquareMatrix& a, double lambda,
                                  std::optional<std::size_t> positive_component = std::nullopt) {
  const std::size_t n = a.size();
  const double scale = std::max(a.norm_inf(), 1.0);
  std::vector<double> shifted(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) shifted[i * n + j] = a(i, j) - (i == j ? lambda : 0.0);

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  const double tol = 1e-9 * a.norm_inf();
  double residual = 0.0;
  for (int iter = 0; iter < 8; ++iter) {
    detail::lu_solve_in_place(shifted, n, v, scale * std::numeric_limits<double>::epsilon());
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NoConvergence(static_cast<std::size_t>(iter + 1));
    for (double& x : v) x /= norm;
    residual = eigen_residual(a, lambda, v);
    if (residual <= tol && iter >= 1) break;
  }
  if (residual > tol) throw NoConvergence(8);

  std::size_t idx = 0;
  if (positive_component && *positive_component < n) {
    idx = *positive_component;
  } else {
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[idx])) idx = i;
  }
  if (v[idx] < 0.0)
    for (double& x : v) x = -x;
  return EigenPair{lambda, std::move(v)};
}

/// Real eigenvalues with positive real part and their eigenvectors, ascending.
/// Complex eigenvalues with positive real part are returned through `complex_unstable`.
inline std::vector<EigenPair> unstable_eigenpairs(const SquareMatrix& a,
                                                  std::optional<std::size_t> positive_component,
                                                  std::size_t* complex_unstable = nullptr) {
  std::vector<EigenPair> out;
  std::size_t complex_count = 0;
  for (const auto& z : eigenvalues(a)) {
    if (!(z.real() > 0.0)) continue;
    if (z.imag() != 0.0) {
      ++complex_count;
      continue;
    }
    out.push_back(real_eigenvector(a, z.real(), positive_component));
  }
  if (complex_unstable) *complex_unstable = complex_count;
  return out;
}

/// The unique eigenvalue with positive real part (which must be real) and its unit eigenvector.
inline EigenPair unstable_eigenvector(const SquareMatrix& a,
                                      std::optional<std::size_t> positive_component = std::nullopt) {
  std::size_t complex_count = 0;
  auto pairs = unstable_eigenpairs(a, positive_component, &complex_count);
  const std::size_t total = pairs.size() + complex_count;
  if (total == 0) throw NoUnstableDirection();
  if (total > 1) throw MultipleUnstableDirections(total);
  return std::move(pairs.front());
}

}  // namespace hbvwave
