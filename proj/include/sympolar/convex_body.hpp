#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sympolar/common.hpp"

namespace sympolar {

namespace detail {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status;
  double value;
};

/// Dense two-phase simplex for min c'y s.t. Ay = b, y >= 0 (Bland's rule).
/// Sized for this library's use: a handful of equality rows, up to a few
/// hundred columns.
inline LpResult solve_standard_lp(const Mat& a_in, const Vec& b_in,
                                  const Vec& c_in) {
  const int m = static_cast<int>(a_in.rows());
  const int n = static_cast<int>(a_in.cols());
  constexpr double kPivTol = 1e-11;
  constexpr double kOptTol = 1e-9;

  // Tableau rows: [A | I_artificial | b], with b flipped nonnegative.
  const int width = n + m + 1;
  std::vector<double> t(static_cast<std::size_t>(m) * width, 0.0);
  std::vector<int> basis(m);
  std::vector<int> live_rows(m);
  auto at = [&](int i, int j) -> double& {
    return t[static_cast<std::size_t>(i) * width + j];
  };
  for (int i = 0; i < m; ++i) {
    const double sgn = b_in(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) at(i, j) = sgn * a_in(i, j);
    at(i, n + i) = 1.0;
    at(i, width - 1) = sgn * b_in(i);
    basis[i] = n + i;
    live_rows[i] = i;
  }

  int rows = m;
  std::vector<double> red(width - 1, 0.0);
  double obj = 0.0;

  auto recompute_reduced = [&](const Vec* cost, bool phase1) {
    // red_j = c_j - sum_i c_B(i) T(i,j)
    for (int j = 0; j < width - 1; ++j) {
      double cj = 0.0;
      if (phase1) {
        cj = (j >= n) ? 1.0 : 0.0;
      } else {
        cj = (j < n) ? (*cost)(j) : 0.0;
      }
      red[j] = cj;
    }
    obj = 0.0;
    for (int r = 0; r < rows; ++r) {
      const int i = live_rows[r];
      double cb;
      if (phase1)
        cb = basis[i] >= n ? 1.0 : 0.0;
      else
        cb = basis[i] < n ? (*cost)(basis[i]) : 0.0;
      if (cb == 0.0) continue;
      for (int j = 0; j < width - 1; ++j) red[j] -= cb * at(i, j);
      obj += cb * at(i, width - 1);
    }
  };

  auto pivot = [&](int pr, int pc) {
    const double piv = at(pr, pc);
    for (int j = 0; j < width; ++j) at(pr, j) /= piv;
    for (int r = 0; r < rows; ++r) {
      const int i = live_rows[r];
      if (i == pr) continue;
      const double f = at(i, pc);
      if (f == 0.0) continue;
      for (int j = 0; j < width; ++j) at(i, j) -= f * at(pr, j);
    }
    const double fr = red[pc];
    if (fr != 0.0) {
      for (int j = 0; j < width - 1; ++j) red[j] -= fr * at(pr, j);
      obj -= fr * at(pr, width - 1);
    }
    basis[pr] = pc;
  };

  auto run_simplex = [&](bool allow_artificial) -> LpStatus {
    const int col_limit = allow_artificial ? width - 1 : n;
    for (int iter = 0; iter < 20000; ++iter) {
      int entering = -1;
      for (int j = 0; j < col_limit; ++j) {
        if (red[j] < -kOptTol) {  // Bland: first negative index
          entering = j;
          break;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;
      int leave_row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r) {
        const int i = live_rows[r];
        const double aij = at(i, entering);
        if (aij > kPivTol) {
          const double ratio = at(i, width - 1) / aij;
          if (ratio < best_ratio - 1e-15 ||
              (ratio < best_ratio + 1e-15 &&
               (leave_row < 0 || basis[i] < basis[leave_row]))) {
            best_ratio = ratio;
            leave_row = i;
          }
        }
      }
      if (leave_row < 0) return LpStatus::kUnbounded;
      pivot(leave_row, entering);
    }
    throw NumericalError("simplex: iteration limit exceeded");
  };

  // Phase 1.
  recompute_reduced(nullptr, true);
  LpStatus st = run_simplex(true);
  if (st != LpStatus::kOptimal || obj > kOptTol)
    return {LpStatus::kInfeasible, 0.0};

  // Drive artificials out of the basis; drop redundant rows.
  for (int r = 0; r < rows;) {
    const int i = live_rows[r];
    if (basis[i] < n) {
      ++r;
      continue;
    }
    int pc = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(at(i, j)) > 1e-9) {
        pc = j;
        break;
      }
    }
    if (pc >= 0) {
      pivot(i, pc);
      ++r;
    } else {
      live_rows.erase(live_rows.begin() + r);
      --rows;
    }
  }

  // Phase 2.
  recompute_reduced(&c_in, false);
  st = run_simplex(false);
  if (st == LpStatus::kUnbounded) return {LpStatus::kUnbounded, 0.0};
  double value = 0.0;
  for (int r = 0; r < rows; ++r) {
    const int i = live_rows[r];
    if (basis[i] < n) value += c_in(basis[i]) * at(i, width - 1);
  }
  return {LpStatus::kOptimal, value};
}

}  // namespace detail

/// Centrally symmetric convex body with origin in the interior. Variants:
///   Ball       {x : |x| <= r}
///   Ellipsoid  {x : Ax.x <= 1}, A symmetric positive definite
///   Box        prod_j [-a_j, a_j]
///   PolytopeV  conv{v_i}, vertex set closed under negation
///   PolytopeH  {x : u_i.x <= 1 for all i}, normal set closed under negation
class ConvexBody {
 public:
  enum class Variant { kBall, kEllipsoid, kBox, kPolytopeV, kPolytopeH };

  static ConvexBody ball(int dim, double radius) {
    if (dim < 1) throw DimensionError("ball: dim must be >= 1");
    if (!(radius > kDegenerateTol) || !std::isfinite(radius))
      throw DimensionError("ball: radius must be positive and non-degenerate");
    ConvexBody b(Variant::kBall, dim);
    b.radius_ = radius;
    return b;
  }

  static ConvexBody ellipsoid(Mat shape) {
    if (shape.rows() != shape.cols() || shape.rows() < 1)
      throw DimensionError("ellipsoid: shape matrix must be square");
    if (!is_symmetric(shape))
      throw DimensionError("ellipsoid: shape matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(shape));
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
      throw DimensionError(
          "ellipsoid: shape matrix must be positive definite with condition "
          "number <= 1e12");
    ConvexBody b(Variant::kEllipsoid, static_cast<int>(shape.rows()));
    b.shape_ = symmetrize(shape);
    return b;
  }

  static ConvexBody box(Vec half_widths) {
    if (half_widths.size() < 1) throw DimensionError("box: empty half-widths");
    for (Eigen::Index j = 0; j < half_widths.size(); ++j)
      if (!(half_widths(j) > kDegenerateTol) || !std::isfinite(half_widths(j)))
        throw DimensionError("box: half-widths must exceed the degeneracy floor");
    ConvexBody b(Variant::kBox, static_cast<int>(half_widths.size()));
    b.half_widths_ = std::move(half_widths);
    return b;
  }

  /// Vertices are the columns of `vertices`.
  static ConvexBody polytope_v(Mat vertices) {
    validate_symmetric_set(vertices.transpose(), "polytope_v vertex");
    ConvexBody b(Variant::kPolytopeV, static_cast<int>(vertices.rows()));
    b.points_ = std::move(vertices);
    return b;
  }

  /// Constraints are the rows of `normals`: u_i . x <= 1.
  static ConvexBody polytope_h(Mat normals) {
    validate_symmetric_set(normals, "polytope_h normal");
    ConvexBody b(Variant::kPolytopeH, static_cast<int>(normals.cols()));
    b.points_ = std::move(normals);
    return b;
  }

  Variant variant() const { return variant_; }
  int dim() const { return dim_; }

  double radius() const { return radius_; }
  const Mat& shape() const { return shape_; }
  const Vec& half_widths() const { return half_widths_; }
  const Mat& vertices() const { return points_; }  // columns (PolytopeV)
  const Mat& normals() const { return points_; }   // rows (PolytopeH)

 private:
  ConvexBody(Variant v, int dim) : variant_(v), dim_(dim) {}

  // Each generator (row) must have its negation in the set, the set must have
  // full rank (origin interior / boundedness) and stay above the degeneracy
  // floor.
  static void validate_symmetric_set(const Mat& rows, const char* what) {
    const Eigen::Index m = rows.rows();
    const Eigen::Index n = rows.cols();
    if (m < 2 || n < 1)
      throw DimensionError(std::string(what) + " set: too few generators");
    if (!rows.allFinite())
      throw DimensionError(std::string(what) + " set: non-finite entries");
    double scale = rows.cwiseAbs().maxCoeff();
    if (scale < kDegenerateTol)
      throw DimensionError(std::string(what) + " set: degenerate generators");
    for (Eigen::Index i = 0; i < m; ++i) {
      bool matched = false;
      for (Eigen::Index k = 0; k < m && !matched; ++k)
        matched = (rows.row(i) + rows.row(k)).cwiseAbs().maxCoeff() <=
                  1e-9 * std::max(1.0, scale);
      if (!matched)
        throw DimensionError(std::string(what) +
                             " set: not closed under negation");
    }
    Eigen::JacobiSVD<Mat> svd(rows);
    if (svd.singularValues().minCoeff() <=
        1e-12 * svd.singularValues().maxCoeff())
      throw DimensionError(std::string(what) +
                           " set: generators do not span the space");
  }

  Variant variant_;
  int dim_;
  double radius_ = 0.0;
  Vec half_widths_;
  Mat shape_;
  Mat points_;
};

/// Support function h_X(u) = sup_{x in X} u.x.
inline double support_function(const ConvexBody& x, const Vec& u) {
  if (u.size() != x.dim())
    throw DimensionError("support_function: direction dimension mismatch");
  if (!u.allFinite())
    throw DimensionError("support_function: non-finite direction");
  switch (x.variant()) {
    case ConvexBody::Variant::kBall:
      return x.radius() * u.norm();
    case ConvexBody::Variant::kEllipsoid:
      return std::sqrt(std::max(0.0, u.dot(x.shape().llt().solve(u))));
    case ConvexBody::Variant::kBox:
      return x.half_widths().dot(u.cwiseAbs());
    case ConvexBody::Variant::kPolytopeV:
      return (x.vertices().transpose() * u).maxCoeff();
    case ConvexBody::Variant::kPolytopeH: {
      // max u.x s.t. Cx <= 1 equals, by LP duality, min 1'y : C'y = u, y >= 0.
      const Mat a = x.normals().transpose();
      const Vec ones = Vec::Ones(a.cols());
      const auto lp = detail::solve_standard_lp(a, u, ones);
      if (lp.status != detail::LpStatus::kOptimal)
        throw NumericalError(
            "support_function: unbounded feasible set (malformed PolytopeH)");
      return lp.value;
    }
  }
  throw Error("support_function: unreachable");
}

/// Minkowski gauge of x with respect to the body: the smallest t >= 0 with
/// x in t*X. Inside iff gauge <= 1.
inline double gauge(const ConvexBody& x, const Vec& point) {
  if (point.size() != x.dim())
    throw DimensionError("gauge: point dimension mismatch");
  switch (x.variant()) {
    case ConvexBody::Variant::kBall:
      return point.norm() / x.radius();
    case ConvexBody::Variant::kEllipsoid:
      return std::sqrt(std::max(0.0, point.dot(x.shape() * point)));
    case ConvexBody::Variant::kBox:
      return (point.cwiseAbs().cwiseQuotient(x.half_widths())).maxCoeff();
    case ConvexBody::Variant::kPolytopeH:
      return std::max(0.0, (x.normals() * point).maxCoeff());
    case ConvexBody::Variant::kPolytopeV: {
      // gauge = min 1'mu : V mu = point, mu >= 0.
      if (point.cwiseAbs().maxCoeff() == 0.0) return 0.0;
      const Vec ones = Vec::Ones(x.vertices().cols());
      const auto lp = detail::solve_standard_lp(x.vertices(), point, ones);
      if (lp.status != detail::LpStatus::kOptimal)
        throw NumericalError("gauge: degenerate vertex set");
      return lp.value;
    }
  }
  throw Error("gauge: unreachable");
}

/// Membership up to additive `tol` on each defining inequality.
inline bool contains(const ConvexBody& x, const Vec& point, double tol = 0.0) {
  if (point.size() != x.dim())
    throw DimensionError("contains: point dimension mismatch");
  switch (x.variant()) {
    case ConvexBody::Variant::kBall:
      return point.norm() <= x.radius() + tol;
    case ConvexBody::Variant::kBox:
      return ((point.cwiseAbs() - x.half_widths()).array() <= tol).all();
    case ConvexBody::Variant::kPolytopeH:
      return ((x.normals() * point).array() <= 1.0 + tol).all();
    case ConvexBody::Variant::kEllipsoid:
    case ConvexBody::Variant::kPolytopeV:
      return gauge(x, point) <= 1.0 + tol;
  }
  throw Error("contains: unreachable");
}

/// Boundary point of X in direction d (d nonzero): d / gauge(X, d).
inline Vec boundary_point(const ConvexBody& x, const Vec& direction) {
  const double g = gauge(x, direction);
  if (g <= 0.0) throw DimensionError("boundary_point: zero direction");
  return direction / g;
}

namespace detail {

// A PolytopeH whose rows are exactly the 2^n sign patterns of one positive
// weight vector w describes the cross body {x : sum_j w_j |x_j| <= 1}.
inline std::optional<Vec> cross_form_weights(const Mat& normals) {
  const Eigen::Index m = normals.rows();
  const Eigen::Index n = normals.cols();
  if (n > 20 || m != (Eigen::Index{1} << n)) return std::nullopt;
  const Vec w = normals.row(0).cwiseAbs().transpose();
  if (w.minCoeff() <= kDegenerateTol) return std::nullopt;
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::uint32_t mask = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = normals(i, j);
      if (std::abs(std::abs(v) - w(j)) > 1e-12 * std::max(1.0, w(j)))
        return std::nullopt;
      if (v > 0.0) mask |= (1u << j);
    }
    if (seen[mask]) return std::nullopt;
    seen[mask] = true;
  }
  return w;
}

// A PolytopeV whose vertices are exactly {+-c_j e_j} is the axis-aligned
// cross-polytope.
inline std::optional<Vec> cross_form_spokes(const Mat& vertices) {
  const Eigen::Index n = vertices.rows();
  const Eigen::Index m = vertices.cols();
  if (m != 2 * n) return std::nullopt;
  Vec c = Vec::Zero(n);
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec v = vertices.col(i);
    Eigen::Index axis = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(v(j)) > 1e-14) {
        if (axis >= 0) return std::nullopt;
        axis = j;
      }
    }
    if (axis < 0) return std::nullopt;
    const double mag = std::abs(v(axis));
    if (c(axis) == 0.0)
      c(axis) = mag;
    else if (std::abs(c(axis) - mag) > 1e-12 * std::max(1.0, mag))
      return std::nullopt;
    ++count[static_cast<std::size_t>(axis)];
  }
  for (Eigen::Index j = 0; j < n; ++j)
    if (count[static_cast<std::size_t>(j)] != 2 || c(j) <= kDegenerateTol)
      return std::nullopt;
  return c;
}

/// Vertices of {x : Cx <= 1} by active-set enumeration; restricted to n <= 3
/// where the subset count stays trivial.
inline Mat enumerate_h_vertices(const Mat& c_rows) {
  const int m = static_cast<int>(c_rows.rows());
  const int n = static_cast<int>(c_rows.cols());
  if (n > 3)
    throw UnsupportedDualError(
        "vertex enumeration of an H-polytope is supported for n <= 3 only");
  std::vector<Vec> found;
  std::vector<int> idx(n);
  auto consider = [&](const std::vector<int>& sel) {
    Mat a(n, n);
    Vec b = Vec::Ones(n);
    for (int r = 0; r < n; ++r) a.row(r) = c_rows.row(sel[r]);
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) return;
    const Vec v = lu.solve(b);
    if (((c_rows * v).array() > 1.0 + 1e-9).any()) return;
    for (const Vec& w : found)
      if ((w - v).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, v.norm()))
        return;
    found.push_back(v);
  };
  // Iterate over all size-n subsets of the constraint rows.
  std::vector<int> sel(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      consider(sel);
      return;
    }
    for (int i = start; i <= m - (n - depth); ++i) {
      sel[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  if (found.empty())
    throw NumericalError("enumerate_h_vertices: no vertices found");
  Mat out(n, static_cast<Eigen::Index>(found.size()));
  for (std::size_t k = 0; k < found.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = found[k];
  return out;
}

/// Keep only extreme points of conv{columns} (LP membership test per point).
inline Mat prune_to_extreme_points(const Mat& pts) {
  const int n = static_cast<int>(pts.rows());
  const int m = static_cast<int>(pts.cols());
  std::vector<int> keep;
  for (int k = 0; k < m; ++k) {
    Mat a(n + 1, m - 1);
    int col = 0;
    for (int i = 0; i < m; ++i) {
      if (i == k) continue;
      a.block(0, col, n, 1) = pts.col(i);
      a(n, col) = 1.0;
      ++col;
    }
    Vec b(n + 1);
    b.head(n) = pts.col(k);
    b(n) = 1.0;
    const auto lp = solve_standard_lp(a, b, Vec::Zero(m - 1));
    if (lp.status == LpStatus::kInfeasible) keep.push_back(k);
  }
  if (keep.empty())
    throw NumericalError("prune_to_extreme_points: degenerate hull");
  Mat out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = pts.col(keep[i]);
  return out;
}

}  // namespace detail

/// hbar-polar dual X^h = {p : sup_{x in X} p.x <= hbar}.
inline ConvexBody polar_dual(const ConvexBody& x, double hbar) {
  if (!(hbar > 0.0)) throw DimensionError("polar_dual: hbar must be positive");
  const int n = x.dim();
  switch (x.variant()) {
    case ConvexBody::Variant::kBall:
      return ConvexBody::ball(n, hbar / x.radius());
    case ConvexBody::Variant::kEllipsoid:
      return ConvexBody::ellipsoid(sym_power(x.shape(), -1.0) / (hbar * hbar));
    case ConvexBody::Variant::kBox: {
      // {p : sum_j a_j |p_j| <= hbar}: one constraint row per sign pattern.
      if (n > 12)
        throw UnsupportedDualError("polar_dual: box dual limited to n <= 12");
      const Eigen::Index m = Eigen::Index{1} << n;
      Mat rows(m, n);
      for (Eigen::Index i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          rows(i, j) = ((i >> j) & 1 ? 1.0 : -1.0) * x.half_widths()(j) / hbar;
      return ConvexBody::polytope_h(std::move(rows));
    }
    case ConvexBody::Variant::kPolytopeV:
      return ConvexBody::polytope_h(x.vertices().transpose() / hbar);
    case ConvexBody::Variant::kPolytopeH: {
      if (auto w = detail::cross_form_weights(x.normals()))
        return ConvexBody::box(hbar * (*w));
      if (n > 3)
        throw UnsupportedDualError(
            "polar_dual: PolytopeH dual needs vertex enumeration, supported "
            "for n <= 3 only");
      const Mat extreme = detail::prune_to_extreme_points(
          Mat(x.normals().transpose()));
      return ConvexBody::polytope_v(hbar * extreme);
    }
  }
  throw Error("polar_dual: unreachable");
}

/// Exact image LX of the body under an invertible linear map.
inline ConvexBody linear_image(const ConvexBody& x, const Mat& l) {
  if (l.rows() != l.cols() || l.rows() != x.dim())
    throw DimensionError("linear_image: map dimension mismatch");
  Eigen::FullPivLU<Mat> lu(l);
  if (!lu.isInvertible()) throw NumericalError("linear_image: singular map");
  const Mat l_inv = lu.inverse();
  const int n = x.dim();
  switch (x.variant()) {
    case ConvexBody::Variant::kBall: {
      const Mat gram = l * l.transpose();
      const double c2 = gram(0, 0);
      if (max_abs(gram - c2 * Mat::Identity(n, n)) <= 1e-12 * std::abs(c2))
        return ConvexBody::ball(n, x.radius() * std::sqrt(c2));
      return ConvexBody::ellipsoid(
          symmetrize(l_inv.transpose() * l_inv / (x.radius() * x.radius())));
    }
    case ConvexBody::Variant::kEllipsoid:
      return ConvexBody::ellipsoid(
          symmetrize(l_inv.transpose() * x.shape() * l_inv));
    case ConvexBody::Variant::kBox: {
      const Mat off = l - Mat(l.diagonal().asDiagonal());
      if (max_abs(off) <= 1e-15 * std::max(1.0, max_abs(l)))
        return ConvexBody::box(l.diagonal().cwiseAbs().cwiseProduct(
            x.half_widths()));
      if (n > 12)
        throw UnsupportedDualError(
            "linear_image: box corner expansion limited to n <= 12");
      const Eigen::Index m = Eigen::Index{1} << n;
      Mat corners(n, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          corners(j, i) = ((i >> j) & 1 ? 1.0 : -1.0) * x.half_widths()(j);
      return ConvexBody::polytope_v(l * corners);
    }
    case ConvexBody::Variant::kPolytopeV:
      return ConvexBody::polytope_v(l * x.vertices());
    case ConvexBody::Variant::kPolytopeH:
      return ConvexBody::polytope_h(x.normals() * l_inv);
  }
  throw Error("linear_image: unreachable");
}

struct VolumeEstimate {
  enum class Method { kExact, kMonteCarlo };
  double value = 0.0;
  double std_error = 0.0;  // zero iff exact
  Method method = Method::kExact;
  std::int64_t samples = 0;
};

namespace detail {

inline VolumeEstimate mc_volume(const ConvexBody& x, std::int64_t samples,
                                std::uint64_t seed) {
  if (samples < 1000)
    throw DimensionError("volume: Monte Carlo needs at least 1000 samples");
  const int n = x.dim();
  Vec hw(n);
  for (int j = 0; j < n; ++j) hw(j) = support_function(x, Vec::Unit(n, j));
  const double box_vol = std::pow(2.0, n) * hw.prod();

  // Outside prefilter: a point with d.x > h_X(d) for a known direction d is
  // certainly outside; saves an LP per rejected sample for PolytopeV.
  Mat dirs;
  Vec dir_support;
  if (x.variant() == ConvexBody::Variant::kPolytopeV) {
    dirs = x.vertices();
    dirs.colwise().normalize();
    dir_support.resize(dirs.cols());
    for (Eigen::Index k = 0; k < dirs.cols(); ++k)
      dir_support(k) = support_function(x, dirs.col(k));
  }

  Rng rng(seed);
  std::int64_t inside = 0;
  Vec pt(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) pt(j) = rng.uniform(-hw(j), hw(j));
    if (dirs.size() > 0 &&
        ((dirs.transpose() * pt - dir_support).array() > 0.0).any())
      continue;
    if (gauge(x, pt) <= 1.0) ++inside;
  }
  const double p = static_cast<double>(inside) / static_cast<double>(samples);
  VolumeEstimate est;
  est.value = box_vol * p;
  est.std_error =
      box_vol * std::sqrt(std::max(0.0, p * (1.0 - p)) /
                          static_cast<double>(samples));
  est.method = VolumeEstimate::Method::kMonteCarlo;
  est.samples = samples;
  return est;
}

}  // namespace detail

/// Euclidean volume. Closed forms for balls, ellipsoids, boxes and
/// cross-polytopes (as produced by box duals); Monte Carlo rejection sampling
/// in the support-function bounding box for general polytopes.
inline VolumeEstimate volume(const ConvexBody& x, std::int64_t mc_samples = 1000000,
                             std::uint64_t seed = 42) {
  const int n = x.dim();
  VolumeEstimate est;
  switch (x.variant()) {
    case ConvexBody::Variant::kBall:
      est.value = ball_volume(n, x.radius());
      return est;
    case ConvexBody::Variant::kEllipsoid: {
      Eigen::SelfAdjointEigenSolver<Mat> es(x.shape());
      est.value = ball_volume(n, 1.0) / std::sqrt(es.eigenvalues().prod());
      return est;
    }
    case ConvexBody::Variant::kBox:
      est.value = std::pow(2.0, n) * x.half_widths().prod();
      return est;
    case ConvexBody::Variant::kPolytopeH:
      if (auto w = detail::cross_form_weights(x.normals())) {
        est.value = std::pow(2.0, n) / factorial(n) / w->prod();
        return est;
      }
      return detail::mc_volume(x, mc_samples, seed);
    case ConvexBody::Variant::kPolytopeV:
      if (auto c = detail::cross_form_spokes(x.vertices())) {
        est.value = std::pow(2.0, n) / factorial(n) * c->prod();
        return est;
      }
      return detail::mc_volume(x, mc_samples, seed);
  }
  throw Error("volume: unreachable");
}

/// Mahler volume v(X) = Vol(X) Vol(X^hbar); Monte Carlo errors propagate in
/// quadrature.
inline VolumeEstimate mahler_volume(const ConvexBody& x, double hbar,
                                    std::int64_t mc_samples = 1000000,
                                    std::uint64_t seed = 42) {
  const ConvexBody dual = polar_dual(x, hbar);
  const VolumeEstimate v1 = volume(x, mc_samples, seed);
  const VolumeEstimate v2 = volume(dual, mc_samples, seed + 1);
  VolumeEstimate est;
  est.value = v1.value * v2.value;
  est.std_error = std::sqrt(v1.value * v1.value * v2.std_error * v2.std_error +
                            v2.value * v2.value * v1.std_error * v1.std_error);
  const bool exact = v1.method == VolumeEstimate::Method::kExact &&
                     v2.method == VolumeEstimate::Method::kExact;
  est.method = exact ? VolumeEstimate::Method::kExact
                     : VolumeEstimate::Method::kMonteCarlo;
  est.samples = std::max(v1.samples, v2.samples);
  return est;
}

namespace detail {

inline Mat ellipsoid_shape_of(const ConvexBody& x) {
  if (x.variant() == ConvexBody::Variant::kBall)
    return Mat::Identity(x.dim(), x.dim()) / (x.radius() * x.radius());
  return x.shape();
}

// Extreme points when the body has an enumerable generator description.
inline std::optional<Mat> extreme_points(const ConvexBody& x) {
  switch (x.variant()) {
    case ConvexBody::Variant::kPolytopeV:
      return x.vertices();
    case ConvexBody::Variant::kBox: {
      const int n = x.dim();
      if (n > 12) return std::nullopt;
      const Eigen::Index m = Eigen::Index{1} << n;
      Mat corners(n, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          corners(j, i) = ((i >> j) & 1 ? 1.0 : -1.0) * x.half_widths()(j);
      return corners;
    }
    case ConvexBody::Variant::kPolytopeH:
      if (x.dim() <= 3) return enumerate_h_vertices(x.normals());
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace detail

/// Largest lambda with lambda * inner contained in outer. Exact closed forms:
/// generalized eigenvalue pencil for ellipsoid pairs, support evaluation over
/// the outer's constraints, gauge evaluation over the inner's extreme points,
/// and polar-vertex enumeration (n <= 3) for smooth bodies inside V-polytopes.
inline double inclusion_scale(const ConvexBody& inner, const ConvexBody& outer) {
  if (inner.dim() != outer.dim())
    throw DimensionError("inclusion_scale: dimension mismatch");
  const int n = inner.dim();

  // Outer described by constraints: lambda = 1 / max_i h_inner(u_i).
  if (outer.variant() == ConvexBody::Variant::kPolytopeH) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < outer.normals().rows(); ++i)
      m = std::max(m, support_function(inner, outer.normals().row(i).transpose()));
    return 1.0 / m;
  }
  if (outer.variant() == ConvexBody::Variant::kBox) {
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      m = std::max(m, support_function(inner, Vec::Unit(n, j)) /
                          outer.half_widths()(j));
    return 1.0 / m;
  }

  // Inner with enumerable extreme points: lambda = 1 / max_v gauge_outer(v).
  if (auto pts = detail::extreme_points(inner)) {
    double m = 0.0;
    for (Eigen::Index k = 0; k < pts->cols(); ++k)
      m = std::max(m, gauge(outer, pts->col(k)));
    return 1.0 / m;
  }

  const bool inner_ellipsoidal =
      inner.variant() == ConvexBody::Variant::kBall ||
      inner.variant() == ConvexBody::Variant::kEllipsoid;
  const bool outer_ellipsoidal =
      outer.variant() == ConvexBody::Variant::kBall ||
      outer.variant() == ConvexBody::Variant::kEllipsoid;

  if (inner_ellipsoidal && outer_ellipsoidal) {
    const Mat a_in = detail::ellipsoid_shape_of(inner);
    const Mat a_out = detail::ellipsoid_shape_of(outer);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(a_out, a_in);
    if (ges.info() != Eigen::Success)
      throw NumericalError("inclusion_scale: pencil solve failed");
    return 1.0 / std::sqrt(ges.eigenvalues().maxCoeff());
  }

  if (inner_ellipsoidal && outer.variant() == ConvexBody::Variant::kPolytopeV) {
    if (n > 3)
      throw UnsupportedDualError(
          "inclusion_scale: smooth body inside a V-polytope is supported for "
          "n <= 3 only");
    // sup_{x in inner} gauge_outer(x) = max h_inner over vertices of the
    // outer's standard polar {p : v_i . p <= 1}.
    const Mat polar_vertices =
        detail::enumerate_h_vertices(Mat(outer.vertices().transpose()));
    double m = 0.0;
    for (Eigen::Index k = 0; k < polar_vertices.cols(); ++k)
      m = std::max(m, support_function(inner, polar_vertices.col(k)));
    return 1.0 / m;
  }

  throw UnsupportedDualError("inclusion_scale: unsupported body pair");
}

}  // namespace sympolar
