#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "frameflow/linalg.hpp"

namespace frameflow {

/// Evaluation of a chart field outside its domain.
class DomainError : public std::domain_error {
 public:
  DomainError(Vec x, const std::string& what) : std::domain_error(what), x_(std::move(x)) {}
  const Vec& point() const { return x_; }

 private:
  Vec x_;
};

/// Gamma^k_{ij} at one point; no symmetry is imposed by the container.
class Christoffel {
 public:
  explicit Christoffel(int n) : n_(n) { data_.fill(0.0); }
  int dim() const { return n_; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double max_abs_difference(const Christoffel& other) const;

 private:
  static std::size_t index(int k, int i, int j) {
    return static_cast<std::size_t>((k * kMaxDim + i) * kMaxDim + j);
  }
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_;
};

using MetricField = std::function<Mat(const Vec&)>;
using ChristoffelField = std::function<Christoffel(const Vec&)>;
using DomainPredicate = std::function<bool(const Vec&)>;
using DistanceFunction = std::function<double(const Vec&, const Vec&)>;

/// Single global coordinate chart of a Riemannian manifold with its
/// Levi-Civita connection.
class Chart {
 public:
  enum class Kind { euclidean, hyperbolic2, custom };

  static Chart euclidean(int n);
  static Chart hyperbolic2();
  /// Christoffel symbols default to central differences of the metric.
  static Chart custom(std::string name, int n, MetricField metric, DomainPredicate in_domain, Vec origin,
                      ChristoffelField christoffel = {}, DistanceFunction distance = {});

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  const Vec& origin() const { return origin_; }

  bool in_domain(const Vec& x) const;
  Mat metric(const Vec& x) const;
  Christoffel christoffel(const Vec& x) const;
  /// M(k, j) = sum_i v^i Gamma^k_{ij}(x); parallel transport reads du = -M u dt.
  Mat connection(const Vec& x, const Vec& v) const;

  bool has_distance() const { return kind_ != Kind::custom || static_cast<bool>(distance_); }
  /// Model-space Riemannian distance.
  double distance(const Vec& p, const Vec& q) const;

 private:
  Chart() = default;
  void require_domain(const Vec& x) const;

  Kind kind_ = Kind::euclidean;
  std::string name_;
  int n_ = 0;
  Vec origin_;
  MetricField metric_;
  ChristoffelField christoffel_;
  DomainPredicate in_domain_;
  DistanceFunction distance_;
};

/// Named charts: "euclidean:<n>", "hyperbolic2", or "custom:<name>" looked up
/// in the registry.
class ChartRegistry {
 public:
  void add(Chart chart);
  const Chart* find(std::string_view name) const;

 private:
  std::map<std::string, Chart, std::less<>> custom_;
};

std::shared_ptr<const Chart> resolve_chart(std::string_view name, const ChartRegistry* registry = nullptr);

Christoffel numeric_christoffel(const MetricField& metric, const Vec& x, double h_fd = 1e-5);

/// Frame at x; column l holds the components u_l^j of the l-th frame vector.
struct FramePoint {
  Vec x;
  Mat u;
};

/// max |u^T G(x) u - I|
double frame_defect(const Chart& chart, const FramePoint& fp);
/// | |v|_{G(x)} - 1 |
double speed_defect(const Chart& chart, const Vec& x, const Vec& v);

struct HorizontalVelocity {
  Vec v;
  Mat udot;
};

/// Chart components of the basic horizontal field H_u(e): v = u e and the
/// transport u'_l^k = -sum_{i,j} v^i Gamma^k_{ij} u_l^j.
HorizontalVelocity horizontal_velocity(const Chart& chart, const FramePoint& fp, const Vec& e);

/// Modified Gram-Schmidt in the metric G(x). Throws std::invalid_argument on
/// a rank-deficient frame.
Mat gram_schmidt_metric(const Chart& chart, const Vec& x, const Mat& u);

/// Upper half-plane distance, computed as 2 asinh(|p - q| / (2 sqrt(p2 q2))).
double hyperbolic_distance(const Vec& p, const Vec& q);

}  // namespace frameflow
