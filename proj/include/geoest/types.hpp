#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace geoest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultMembershipTol = 1e-9;

struct MatrixShape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  bool operator==(const MatrixShape&) const = default;
};

/// A real signal of length n. Matrix signals carry their (d1, d2) shape and
/// are stored column-major in the flat vector.
class Signal {
 public:
  Signal() = default;
  explicit Signal(Vector values);
  Signal(Vector values, MatrixShape shape);

  static Signal from_matrix(const Matrix& m);
  static Signal zeros(Eigen::Index n) { return Signal(Vector::Zero(n)); }

  Eigen::Index dim() const { return values_.size(); }
  const Vector& values() const { return values_; }
  const std::optional<MatrixShape>& shape() const { return shape_; }
  bool is_matrix() const { return shape_.has_value(); }

  /// Column-major view; throws ContractViolation for vector signals.
  Eigen::Map<const Matrix> as_matrix() const;

  double norm() const { return values_.norm(); }

 private:
  Vector values_;
  std::optional<MatrixShape> shape_;
};

struct SparseCone {
  Eigen::Index s = 0;
};
struct LowRankCone {
  Eigen::Index d1 = 0;
  Eigen::Index d2 = 0;
  Eigen::Index r = 0;
};
struct L1Ball {
  double radius = 1.0;
};
struct EuclideanBall {
  double radius = 1.0;
};
struct FullSpace {};

/// The feasible set K: a closed star-shaped subset of R^n.
class FeasibleSet {
 public:
  using Variant = std::variant<SparseCone, LowRankCone, L1Ball, EuclideanBall, FullSpace>;

  static FeasibleSet sparse_cone(Eigen::Index n, Eigen::Index s);
  static FeasibleSet low_rank_cone(Eigen::Index d1, Eigen::Index d2, Eigen::Index r);
  static FeasibleSet l1_ball(Eigen::Index n, double radius);
  static FeasibleSet euclidean_ball(Eigen::Index n, double radius);
  static FeasibleSet full_space(Eigen::Index n);

  Eigen::Index dim() const { return n_; }
  const Variant& variant() const { return v_; }

  bool is_cone() const;
  bool is_bounded() const;
  /// Diameter sup ||x - y||; nullopt when unbounded.
  std::optional<double> diameter() const;
  /// lambda * K for lambda > 0 (cones and the full space are unchanged).
  FeasibleSet scaled(double lambda) const;

  std::string name() const;

 private:
  FeasibleSet(Eigen::Index n, Variant v) : n_(n), v_(std::move(v)) {}
  Eigen::Index n_ = 0;
  Variant v_;
};

/// Odd, non-decreasing scalar link f.
class LinkFunction {
 public:
  enum class Kind { Identity, Sign, OddMonomial, LinearCombination };

  static LinkFunction identity() { return LinkFunction(Kind::Identity); }
  static LinkFunction sign() { return LinkFunction(Kind::Sign); }
  static LinkFunction odd_monomial(int k);
  static LinkFunction linear_combination(std::vector<double> weights,
                                         std::vector<LinkFunction> parts);

  Kind kind() const { return kind_; }
  int exponent() const { return exponent_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<LinkFunction>& parts() const { return parts_; }

  double operator()(double u) const;
  /// True when the link (or any part) jumps at 0.
  bool discontinuous_at_zero() const;

  std::string name() const;

 private:
  explicit LinkFunction(Kind k) : kind_(k) {}
  Kind kind_ = Kind::Identity;
  int exponent_ = 1;
  std::vector<double> weights_;
  std::vector<LinkFunction> parts_;
};

double eval_link(const LinkFunction& f, double u);

struct NoiseDist {
  enum class Kind { None, Gaussian, Logistic };
  Kind kind = Kind::None;
  /// nu for Gaussian (standard deviation), scale for Logistic.
  double scale = 0.0;

  static NoiseDist none() { return {}; }
  static NoiseDist gaussian(double nu);
  static NoiseDist logistic(double scale);

  double variance() const;
  bool is_none() const { return kind == Kind::None; }
  std::string name() const;
};

/// y_i = f(<a_i, x> + eps_i) + delta_i
struct ObservationModel {
  LinkFunction link = LinkFunction::identity();
  NoiseDist pre_noise;
  NoiseDist post_noise;
};

struct ParamStdErr {
  double mu = 0.0;
  double sigma = 0.0;
  double eta = 0.0;
};

/// mu = E y<a,xbar>, sigma^2 = Var(y<a,xbar>), eta^2 = E y^2, lambda = |x|/mu.
struct ModelParams {
  double mu = 0.0;
  double sigma = 0.0;
  double eta = 0.0;
  std::optional<double> lambda;
  std::optional<double> psi;
  std::optional<double> c_f;
  std::string method;
  std::optional<ParamStdErr> std_errors;
};

/// Membership test up to `tol` (see FeasibleSet docs for the per-variant rule).
bool contains(const FeasibleSet& set, const Signal& v, double tol = kDefaultMembershipTol);

}  // namespace geoest
