#include "debias/baselines.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "debias/errors.hpp"

namespace debias {

EstimateVector james_stein(const EstimateVector& e) {
  const int p = e.size();
  if (p < 3) throw TooFewFeatures("James-Stein needs p >= 3");
  const double mean = e.values.mean();
  const Eigen::VectorXd centered = e.values.array() - mean;
  const double ss = centered.squaredNorm();
  const double factor = ss > 0.0 ? std::max(0.0, 1.0 - (p - 2) / ss) : 0.0;
  EstimateVector out;
  out.statistic = e.statistic;
  out.kind = EstimateKind::Adjusted;
  out.values = mean + factor * centered.array();
  return out;
}

namespace {

double truncated_cube(double x) { return x > 0.0 ? x * x * x : 0.0; }
double truncated_square(double x) { return x > 0.0 ? x * x : 0.0; }

}  // namespace

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 3) throw InvalidArgument("natural cubic spline needs at least 3 knots");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw InvalidArgument("spline knots must be strictly increasing");
  }
}

// Basis functions: x, then d_m(x) - d_{K-1}(x) for m = 1..K-2, where
// d_m(x) = [(x - k_m)_+^3 - (x - k_K)_+^3] / (k_K - k_m). Second and third
// derivatives vanish beyond the boundary knots, so the curve is linear there.
void NaturalCubicSpline::basis_row(double x, RowRef out) const {
  const std::size_t K = knots_.size();
  const double last = knots_[K - 1];
  const double cube_last = truncated_cube(x - last);
  auto d = [&](std::size_t m) { return (truncated_cube(x - knots_[m]) - cube_last) / (last - knots_[m]); };
  out(0) = x;
  const double d_penult = d(K - 2);
  for (std::size_t m = 0; m + 2 < K; ++m) out(static_cast<Eigen::Index>(m) + 1) = d(m) - d_penult;
}

void NaturalCubicSpline::derivative_row(double x, RowRef out) const {
  const std::size_t K = knots_.size();
  const double last = knots_[K - 1];
  const double sq_last = truncated_square(x - last);
  auto dd = [&](std::size_t m) {
    return 3.0 * (truncated_square(x - knots_[m]) - sq_last) / (last - knots_[m]);
  };
  out(0) = 1.0;
  const double dd_penult = dd(K - 2);
  for (std::size_t m = 0; m + 2 < K; ++m) out(static_cast<Eigen::Index>(m) + 1) = dd(m) - dd_penult;
}

MarginalDensityFit::MarginalDensityFit(NaturalCubicSpline spline, double lo, double hi)
    : spline_(std::move(spline)), lo_(lo), hi_(hi) {}

double MarginalDensityFit::log_density(double x) const {
  if (x < lo_ || x > hi_) throw OutOfFitRange("value outside the fitted density range");
  const double u = (x - lo_) / (hi_ - lo_);
  Eigen::RowVectorXd row(spline_.dim());
  spline_.basis_row(u, row);
  return coefficients(0) + row.dot(coefficients.tail(coefficients.size() - 1));
}

double MarginalDensityFit::derivative(double x) const {
  if (x < lo_ || x > hi_) throw OutOfFitRange("value outside the fitted density range");
  const double u = (x - lo_) / (hi_ - lo_);
  Eigen::RowVectorXd row(spline_.dim());
  spline_.derivative_row(u, row);
  return row.dot(coefficients.tail(coefficients.size() - 1)) / (hi_ - lo_);
}

namespace {

double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) > 0.0) dev += y(i) * std::log(y(i) / mu(i)) - (y(i) - mu(i));
    else dev += mu(i);
  }
  return 2.0 * dev;
}

}  // namespace

MarginalDensityFit fit_lindsey(const EstimateVector& e, int bins, int df, const IrlsConfig& cfg) {
  const int p = e.size();
  if (p < 10) throw InvalidArgument("density fit needs at least 10 estimates");
  if (bins < 4) throw InvalidArgument("density fit needs at least 4 bins");
  if (df < 3) throw InvalidArgument("density fit needs df >= 3");
  if (cfg.max_iter < 1 || cfg.tol <= 0.0) throw InvalidArgument("bad IRLS configuration");

  const double min = e.values.minCoeff();
  const double max = e.values.maxCoeff();
  if (!(max > min)) throw EmptyRange("estimates have no spread; cannot fit a density");
  const double lo = min - 0.5;
  const double hi = max + 0.5;
  const double width = (hi - lo) / bins;

  Eigen::VectorXi counts = Eigen::VectorXi::Zero(bins);
  for (int j = 0; j < p; ++j) {
    int b = static_cast<int>((e.values(j) - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++counts(b);
  }

  // knots equally spaced across the fit range, in [0,1] fit units
  std::vector<double> knots;
  for (int i = 0; i <= df; ++i) knots.push_back(static_cast<double>(i) / df);

  NaturalCubicSpline spline(std::move(knots));
  const int d = spline.dim() + 1;  // intercept + spline columns

  Eigen::MatrixXd design(bins, d);
  design.col(0).setOnes();
  for (int b = 0; b < bins; ++b) {
    const double center = lo + (b + 0.5) * width;
    const double u = (center - lo) / (hi - lo);
    spline.basis_row(u, design.row(b).tail(d - 1));
  }

  const Eigen::VectorXd y = counts.cast<double>();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  theta(0) = std::log(y.mean() + 0.1);
  Eigen::VectorXd eta = design * theta;
  Eigen::VectorXd mu = eta.array().exp();
  double dev = poisson_deviance(y, mu);

  MarginalDensityFit fit(std::move(spline), lo, hi);
  fit.deviance_trace.push_back(dev);

  int bad_steps = 0;
  bool converged = false;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const Eigen::VectorXd w = mu.cwiseMax(1e-10);
    const Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(w);
    const Eigen::MatrixXd wx = w.asDiagonal() * design;
    Eigen::MatrixXd normal = design.transpose() * wx;
    normal.diagonal().array() += cfg.ridge;
    const Eigen::VectorXd rhs = wx.transpose() * z;
    Eigen::VectorXd proposal = normal.ldlt().solve(rhs);

    // step halving keeps the accepted deviance path non-increasing
    double new_dev = 0.0;
    Eigen::VectorXd new_eta, new_mu;
    bool accepted = false;
    Eigen::VectorXd step = proposal - theta;
    for (int h = 0; h < 30; ++h) {
      new_eta = design * (theta + step);
      new_mu = new_eta.array().exp();
      if (new_mu.allFinite()) {
        new_dev = poisson_deviance(y, new_mu);
        if (new_dev <= dev + 1e-12) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (++bad_steps >= 3) throw IrlsDiverged("IRLS deviance failed to decrease 3 times");
      continue;
    }
    bad_steps = 0;
    theta += step;
    eta = std::move(new_eta);
    mu = std::move(new_mu);
    const double drop = dev - new_dev;
    dev = new_dev;
    fit.deviance_trace.push_back(dev);
    if (drop <= cfg.tol * (std::abs(dev) + 0.1)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw IrlsDiverged("IRLS hit the iteration limit before the deviance settled");

  fit.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) fit.bin_edges(b) = lo + b * width;
  fit.counts = counts;
  fit.basis = std::move(design);
  fit.coefficients = std::move(theta);
  return fit;
}

EstimateVector tweedie(const EstimateVector& e, const MarginalDensityFit& fit) {
  EstimateVector out;
  out.statistic = e.statistic;
  out.kind = EstimateKind::Adjusted;
  out.values.resize(e.size());
  for (int j = 0; j < e.size(); ++j) {
    out.values(j) = e.values(j) + fit.derivative(e.values(j));
  }
  return out;
}

}  // namespace debias
