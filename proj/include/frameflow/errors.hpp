#pragma once

#include <stdexcept>
#include <string>

#include "frameflow/linalg.hpp"

namespace frameflow {

/// Invalid or inconsistent configuration; maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A chart point left the chart domain during integration. Carries the
/// process time and the offending coordinates.
class DomainExit : public std::runtime_error {
 public:
  DomainExit(double t, Vec x, const std::string& what) : std::runtime_error(what), t_(t), x_(std::move(x)) {}
  double time() const { return t_; }
  const Vec& point() const { return x_; }

 private:
  double t_;
  Vec x_;
};

/// Numerical failure other than a domain exit (e.g. too many aborted paths);
/// maps to CLI exit code 3.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frameflow
