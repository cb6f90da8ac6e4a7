#include "geoest/types.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "geoest/errors.hpp"

namespace geoest {

namespace {

void require_finite(const Vector& v) {
  if (!v.allFinite()) throw ContractViolation("Signal: entries must be finite");
}

}  // namespace

Signal::Signal(Vector values) : values_(std::move(values)) {
  if (values_.size() < 1) throw ContractViolation("Signal: dimension must be >= 1");
  require_finite(values_);
}

Signal::Signal(Vector values, MatrixShape shape) : values_(std::move(values)), shape_(shape) {
  if (values_.size() < 1) throw ContractViolation("Signal: dimension must be >= 1");
  if (shape.rows < 1 || shape.cols < 1 || shape.rows * shape.cols != values_.size())
    throw ContractViolation("Signal: shape does not match number of entries");
  require_finite(values_);
}

Signal Signal::from_matrix(const Matrix& m) {
  Vector flat = Eigen::Map<const Vector>(m.data(), m.size());
  return Signal(std::move(flat), MatrixShape{m.rows(), m.cols()});
}

Eigen::Map<const Matrix> Signal::as_matrix() const {
  if (!shape_) throw ContractViolation("Signal::as_matrix: signal has no matrix shape");
  return Eigen::Map<const Matrix>(values_.data(), shape_->rows, shape_->cols);
}

// ---------------------------------------------------------------------------

FeasibleSet FeasibleSet::sparse_cone(Eigen::Index n, Eigen::Index s) {
  if (n < 1) throw ContractViolation("SparseCone: n must be >= 1");
  if (s < 0 || s > n) throw ContractViolation("SparseCone: need 0 <= s <= n");
  return FeasibleSet(n, SparseCone{s});
}

FeasibleSet FeasibleSet::low_rank_cone(Eigen::Index d1, Eigen::Index d2, Eigen::Index r) {
  if (d1 < 1 || d2 < 1) throw ContractViolation("LowRankCone: d1, d2 must be >= 1");
  if (r < 1 || r > std::min(d1, d2)) throw ContractViolation("LowRankCone: need 1 <= r <= min(d1, d2)");
  return FeasibleSet(d1 * d2, LowRankCone{d1, d2, r});
}

FeasibleSet FeasibleSet::l1_ball(Eigen::Index n, double radius) {
  if (n < 1) throw ContractViolation("L1Ball: n must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ContractViolation("L1Ball: radius must be > 0");
  return FeasibleSet(n, L1Ball{radius});
}

FeasibleSet FeasibleSet::euclidean_ball(Eigen::Index n, double radius) {
  if (n < 1) throw ContractViolation("EuclideanBall: n must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ContractViolation("EuclideanBall: radius must be > 0");
  return FeasibleSet(n, EuclideanBall{radius});
}

FeasibleSet FeasibleSet::full_space(Eigen::Index n) {
  if (n < 1) throw ContractViolation("FullSpace: n must be >= 1");
  return FeasibleSet(n, FullSpace{});
}

bool FeasibleSet::is_cone() const {
  return std::holds_alternative<SparseCone>(v_) || std::holds_alternative<LowRankCone>(v_) ||
         std::holds_alternative<FullSpace>(v_);
}

bool FeasibleSet::is_bounded() const {
  return std::holds_alternative<L1Ball>(v_) || std::holds_alternative<EuclideanBall>(v_);
}

std::optional<double> FeasibleSet::diameter() const {
  if (auto* b = std::get_if<L1Ball>(&v_)) return 2.0 * b->radius;
  if (auto* b = std::get_if<EuclideanBall>(&v_)) return 2.0 * b->radius;
  return std::nullopt;
}

FeasibleSet FeasibleSet::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw ContractViolation("FeasibleSet::scaled: lambda must be > 0");
  if (auto* b = std::get_if<L1Ball>(&v_)) return l1_ball(n_, b->radius * lambda);
  if (auto* b = std::get_if<EuclideanBall>(&v_)) return euclidean_ball(n_, b->radius * lambda);
  return *this;
}

std::string FeasibleSet::name() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) os << "SparseCone(n=" << n_ << ", s=" << k.s << ")";
        else if constexpr (std::is_same_v<T, LowRankCone>)
          os << "LowRankCone(" << k.d1 << "x" << k.d2 << ", r=" << k.r << ")";
        else if constexpr (std::is_same_v<T, L1Ball>) os << "L1Ball(n=" << n_ << ", R=" << k.radius << ")";
        else if constexpr (std::is_same_v<T, EuclideanBall>)
          os << "EuclideanBall(n=" << n_ << ", R=" << k.radius << ")";
        else os << "FullSpace(n=" << n_ << ")";
      },
      v_);
  return os.str();
}

// ---------------------------------------------------------------------------

LinkFunction LinkFunction::odd_monomial(int k) {
  if (k < 1 || k % 2 == 0) throw ContractViolation("OddMonomial: exponent must be an odd positive integer");
  LinkFunction f(Kind::OddMonomial);
  f.exponent_ = k;
  return f;
}

LinkFunction LinkFunction::linear_combination(std::vector<double> weights, std::vector<LinkFunction> parts) {
  if (weights.empty() || weights.size() != parts.size())
    throw ContractViolation("LinearCombination: weights and parts must be non-empty and of equal length");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw ContractViolation("LinearCombination: weights must be > 0");
  LinkFunction f(Kind::LinearCombination);
  f.weights_ = std::move(weights);
  f.parts_ = std::move(parts);
  return f;
}

double LinkFunction::operator()(double u) const {
  switch (kind_) {
    case Kind::Identity:
      return u;
    case Kind::Sign:
      return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
    case Kind::OddMonomial: {
      double r = u;
      for (int i = 1; i < exponent_; ++i) r *= u;
      return r;
    }
    case Kind::LinearCombination: {
      double acc = 0.0;
      for (std::size_t j = 0; j < parts_.size(); ++j) acc += weights_[j] * parts_[j](u);
      return acc;
    }
  }
  return 0.0;
}

bool LinkFunction::discontinuous_at_zero() const {
  if (kind_ == Kind::Sign) return true;
  for (const auto& p : parts_)
    if (p.discontinuous_at_zero()) return true;
  return false;
}

std::string LinkFunction::name() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::Sign:
      return "sign";
    case Kind::OddMonomial:
      return "odd_monomial(" + std::to_string(exponent_) + ")";
    case Kind::LinearCombination: {
      std::ostringstream os;
      os << "linear_combination(";
      for (std::size_t j = 0; j < parts_.size(); ++j) {
        if (j) os << " + ";
        os << weights_[j] << "*" << parts_[j].name();
      }
      os << ")";
      return os.str();
    }
  }
  return "?";
}

double eval_link(const LinkFunction& f, double u) { return f(u); }

NoiseDist NoiseDist::gaussian(double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ContractViolation("Gaussian noise: nu must be >= 0");
  return {Kind::Gaussian, nu};
}

NoiseDist NoiseDist::logistic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ContractViolation("Logistic noise: scale must be > 0");
  return {Kind::Logistic, scale};
}

double NoiseDist::variance() const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::Gaussian:
      return scale * scale;
    case Kind::Logistic:
      return scale * scale * M_PI * M_PI / 3.0;
  }
  return 0.0;
}

std::string NoiseDist::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::None:
      return "none";
    case Kind::Gaussian:
      os << "gaussian(" << scale << ")";
      break;
    case Kind::Logistic:
      os << "logistic(" << scale << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

bool contains(const FeasibleSet& set, const Signal& v, double tol) {
  if (v.dim() != set.dim())
    throw ContractViolation("contains: signal dimension " + std::to_string(v.dim()) +
                            " does not match set dimension " + std::to_string(set.dim()));
  if (tol < 0.0) throw ContractViolation("contains: tol must be >= 0");
  const Vector& x = v.values();
  return std::visit(
      [&](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SparseCone>) {
          Eigen::Index above = (x.array().abs() > tol).count();
          return above <= k.s;
        } else if constexpr (std::is_same_v<T, LowRankCone>) {
          Eigen::Map<const Matrix> m(x.data(), k.d1, k.d2);
          Eigen::JacobiSVD<Matrix> svd(m);
          const Vector& sv = svd.singularValues();
          const double cut = tol * (sv(0) + 1.0);
          for (Eigen::Index i = k.r; i < sv.size(); ++i)
            if (sv(i) > cut) return false;
          return true;
        } else if constexpr (std::is_same_v<T, L1Ball>) {
          return x.lpNorm<1>() <= k.radius + tol;
        } else if constexpr (std::is_same_v<T, EuclideanBall>) {
          return x.norm() <= k.radius + tol;
        } else {
          return true;
        }
      },
      set.variant());
}

}  // namespace geoest
