#pragma once

#include <Eigen/Dense>
#include <vector>

#include "debias/stats.hpp"

namespace debias {

/// Positive-part James-Stein shrinkage toward the grand mean of the
/// estimates. Requires p >= 3.
EstimateVector james_stein(const EstimateVector& e);

struct IrlsConfig {
  int max_iter = 100;
  double tol = 1e-8;     // relative deviance change
  double ridge = 1e-10;  // stabilizer on the normal equations
};

/// Natural cubic spline basis on a fixed knot sequence: linear beyond the
/// boundary knots, continuous second derivative inside. With K knots the
/// basis has K-1 functions (the constant is excluded; regression designs add
/// their own intercept).
class NaturalCubicSpline {
 public:
  using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

  explicit NaturalCubicSpline(std::vector<double> knots);

  int dim() const { return static_cast<int>(knots_.size()) - 1; }
  void basis_row(double x, RowRef out) const;
  void derivative_row(double x, RowRef out) const;

 private:
  std::vector<double> knots_;  // ascending, distinct
};

/// Smooth log-density of the estimates, fitted as a Poisson log-linear model
/// of histogram counts on a spline basis. log_density is the fitted log
/// bin-count curve (its integral over the fit range matches total count times
/// bin width); derivative is the analytic spline derivative.
class MarginalDensityFit {
 public:
  double log_density(double x) const;  // throws OutOfFitRange outside the fit range
  double derivative(double x) const;

  double range_lo() const { return lo_; }
  double range_hi() const { return hi_; }

  Eigen::VectorXd bin_edges;             // bins+1
  Eigen::VectorXi counts;                // bins
  Eigen::MatrixXd basis;                 // bins x (df+1) design, intercept first
  Eigen::VectorXd coefficients;          // df+1
  std::vector<double> deviance_trace;    // accepted IRLS deviances

 private:
  friend MarginalDensityFit fit_lindsey(const EstimateVector&, int, int, const IrlsConfig&);
  MarginalDensityFit(NaturalCubicSpline spline, double lo, double hi);

  NaturalCubicSpline spline_;
  double lo_, hi_;  // fit range in estimate units
};

/// Histogram over [min-0.5, max+0.5] with equal-width bins, then an IRLS
/// Poisson fit of counts on a natural cubic spline in the bin centers with
/// df degrees of freedom (knots equally spaced across the fit range).
MarginalDensityFit fit_lindsey(const EstimateVector& e, int bins, int df, const IrlsConfig& cfg);

inline MarginalDensityFit fit_lindsey(const EstimateVector& e) { return fit_lindsey(e, 120, 5, IrlsConfig{}); }

/// Empirical Bayes correction: each estimate moves by the slope of the fitted
/// log marginal density at its own value.
EstimateVector tweedie(const EstimateVector& e, const MarginalDensityFit& fit);

}  // namespace debias
