#include "nssl/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nssl/errors.hpp"

namespace nssl {

std::string DistributionCurve::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "sigma,measure_above\n";
  for (const auto& b : breakpoints) out << b.sigma << "," << b.measure_above << "\n";
  return out.str();
}

void TimeSeries::validate() const {
  if (times.size() != values.size())
    throw ParameterError("time series times/values size mismatch");
  if (times.empty()) throw DomainError("time series is empty");
  if (!(window_end > window_begin))
    throw ParameterError("time series window must have positive length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw DomainError("time series contains non-finite entries");
    if (values[i] < 0.0) throw DomainError("time series values must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ParameterError("time series times must be strictly increasing");
  }
  if (times.front() < window_begin - 1e-12 * (window_end - window_begin) ||
      times.back() > window_end + 1e-12 * (window_end - window_begin))
    throw ParameterError("time series samples outside the window");
}

std::vector<double> TimeSeries::weights() const {
  const std::size_t n = times.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? window_begin : 0.5 * (times[i - 1] + times[i]);
    const double hi =
        i + 1 == n ? window_end : 0.5 * (times[i] + times[i + 1]);
    w[i] = std::fmax(0.0, hi - lo);
  }
  return w;
}

namespace {

DistributionCurve build_curve(std::vector<std::pair<double, double>>& vw) {
  DistributionCurve curve;
  std::sort(vw.begin(), vw.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double above = 0.0;
  std::size_t i = 0;
  while (i < vw.size()) {
    const double v = vw[i].first;
    double group = 0.0;
    while (i < vw.size() && vw[i].first == v) {
      group += vw[i].second;
      ++i;
    }
    curve.breakpoints.push_back({v, above});
    above += group;
  }
  curve.total_measure = above;
  std::reverse(curve.breakpoints.begin(), curve.breakpoints.end());
  return curve;
}

}  // namespace

DistributionCurve distribution(const BallQuadrature& quad,
                               const std::vector<double>& values) {
  if (quad.size() == 0)
    throw DomainError("distribution over an empty region");
  std::vector<std::pair<double, double>> vw;
  vw.reserve(quad.size());
  for (std::size_t i = 0; i < quad.size(); ++i)
    vw.emplace_back(std::fabs(values[quad.nodes()[i]]), quad.weights()[i]);
  return build_curve(vw);
}

DistributionCurve distribution(const ScalarSlice& slice,
                               const BallSpec& ball) {
  BallQuadrature quad(slice.geom, ball);
  return distribution(quad, slice.values);
}

DistributionCurve distribution(const std::vector<double>& values,
                               const std::vector<double>& weights) {
  if (values.size() != weights.size())
    throw ParameterError("distribution values/weights size mismatch");
  if (values.empty()) throw DomainError("distribution of an empty set");
  std::vector<std::pair<double, double>> vw;
  vw.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] >= 0.0))
      throw ParameterError("distribution weights must be >= 0");
    vw.emplace_back(std::fabs(values[i]), weights[i]);
  }
  return build_curve(vw);
}

DistributionCurve distribution(const TimeSeries& series) {
  series.validate();
  const std::vector<double> w = series.weights();
  std::vector<std::pair<double, double>> vw;
  vw.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    vw.emplace_back(series.values[i], w[i]);
  return build_curve(vw);
}

double weak_norm(const DistributionCurve& curve, double p) {
  if (!(p >= 1.0)) throw ParameterError("weak_norm requires p >= 1");
  double best = 0.0;
  double below = curve.total_measure;  // measure of {|f| >= sigma_k}
  for (const auto& b : curve.breakpoints) {
    if (b.sigma > 0.0 && below > 0.0) {
      const double cand =
          std::isinf(p) ? b.sigma : b.sigma * std::pow(below, 1.0 / p);
      best = std::fmax(best, cand);
    }
    below = b.measure_above;
  }
  return best;
}

double weak_norm(const ScalarSlice& slice, const BallSpec& ball, double p) {
  return weak_norm(distribution(slice, ball), p);
}

double lorentz_rs_norm(const DistributionCurve& curve, double r, double s) {
  if (!(r >= 1.0) || std::isinf(r))
    throw ParameterError("lorentz_rs_norm requires finite r >= 1");
  if (!(s >= 1.0) || std::isinf(s))
    throw ParameterError("lorentz_rs_norm requires finite s >= 1");
  double acc = 0.0;
  double prev_sigma = 0.0;
  double below = curve.total_measure;
  for (const auto& b : curve.breakpoints) {
    if (b.sigma > prev_sigma && below > 0.0)
      acc += std::pow(below, s / r) *
             (std::pow(b.sigma, s) - std::pow(prev_sigma, s)) / s;
    prev_sigma = b.sigma;
    below = b.measure_above;
  }
  return std::pow(r * acc, 1.0 / s);
}

TailRegime tail_regime_for(double p) {
  if (p < 2.0) throw ParameterError("tail split requires p >= 2");
  if (p < 3.0) return TailRegime::Subcritical;
  if (p <= 6.0) return TailRegime::Mid;
  return TailRegime::High;
}

double tail_split_exponent(double p, TailRegime regime) {
  switch (regime) {
    case TailRegime::Subcritical:
      return 3.0 * p / (2.0 * p - 3.0);
    case TailRegime::Mid:
      return p / (p - 2.0);
    case TailRegime::High:
      return 1.5;
  }
  throw ParameterError("bad tail regime");
}

double tail_split_bound(double p, double r, double M, TailRegime regime) {
  if (!(r > 0.0)) throw ParameterError("tail split requires r > 0");
  if (!(M >= 0.0)) throw ParameterError("tail split requires M >= 0");
  switch (regime) {
    case TailRegime::Subcritical: {
      if (!(p >= 2.0 && p < 3.0))
        throw ParameterError("subcritical regime covers 2 <= p < 3");
      const double alpha = 3.0 * p / (2.0 * p - 3.0);
      return (4.0 - 6.0 / p) * std::pow(r, p / (2.0 * p - 3.0)) *
             std::pow(M, alpha);
    }
    case TailRegime::Mid: {
      if (!(p >= 3.0 && p <= 6.0))
        throw ParameterError("mid regime covers 3 <= p <= 6");
      return 2.0 * r * std::pow(M, p / (p - 2.0));
    }
    case TailRegime::High: {
      if (std::isinf(p))
        return 4.0 * std::sqrt(r) * std::pow(M, 1.5);
      if (!(p > 6.0))
        throw ParameterError("high regime covers 6 < p <= infinity");
      const double coeff = 1.0 + 3.0 * (p - 2.0) / (p + 6.0);
      const double rexp = 2.0 - (3.0 * p - 6.0) / (2.0 * p);
      return coeff * std::pow(r, rexp) * std::pow(M, 1.5);
    }
  }
  throw ParameterError("bad tail regime");
}

}  // namespace nssl
