#include "nssl/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "nssl/errors.hpp"
#include "nssl/lorentz.hpp"
#include "nssl/morrey.hpp"
#include "nssl/quadrature.hpp"

namespace nssl {

// Frozen outputs of `nssl verify` on the bundled synthetic corpus, rounded
// up from the measured maxima with margin. Embedding ratio: 2.20 on the
// inverse-radial profile (its closed form), 1.79 over the random corpus.
// Decay-relation ratio: 0.35 over mixed corpora, scale pairs, and exponents.
// Rerun the verify subcommand after touching the norm or invariant code and
// re-freeze here if a measured ratio approaches its constant.
const double C_EMB_CALIBRATED = 2.5;
const double C_CAL_CALIBRATED = 4.0;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::RegularIndicated:
      return "regular_indicated";
    case Verdict::Inconclusive:
      return "inconclusive";
    case Verdict::ConcentrationDetected:
      return "concentration_detected";
  }
  throw ParameterError("unknown verdict");
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::EpsRegularityOscillation:
      return "eps_regularity_oscillation";
    case Criterion::EpsRegularityPlain:
      return "eps_regularity_plain";
    case Criterion::Wolf:
      return "wolf";
    case Criterion::ConcentrationP3:
      return "concentration_p3";
    case Criterion::ConcentrationGeneral:
      return "concentration_general";
  }
  throw ParameterError("unknown criterion");
}

std::string DetectionVerdict::to_json(const std::string& config_hash) const {
  nlohmann::json j;
  j["criterion"] = to_string(criterion);
  j["t0"] = t0;
  j["x0"] = {x0.x, x0.y, x0.z};
  j["r"] = r;
  j["p"] = p;
  j["nu"] = nu;
  j["measured"] = measured;
  j["threshold"] = threshold;
  j["verdict"] = to_string(verdict);
  nlohmann::json jt = nlohmann::json::array();
  for (const auto& [name, value] : trace) jt.push_back({name, value});
  j["trace"] = jt;
  nlohmann::json js = nlohmann::json::array();
  for (const auto& [t, q] : series) js.push_back({t, q});
  j["series"] = js;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  return j.dump();  // non-finite values render as null
}

double DetectorConfig::resolved_delta_star() const {
  return delta_star > 0.0 ? delta_star : delta / C_EMB_CALIBRATED;
}

double DetectorConfig::resolved_wolf_eps() const {
  return wolf_eps > 0.0 ? wolf_eps : std::cbrt(eps_star);
}

double DetectorConfig::resolved_c_cal() const {
  return c_cal > 0.0 ? c_cal : C_CAL_CALIBRATED;
}

double c_decay_rhs(double p, double r, double rho,
                   const InvariantReport& at_rho, double M, double c_cal) {
  if (!(p >= 2.0)) throw ParameterError("decay relation requires p >= 2");
  if (!(r > 0.0) || !(r < rho))
    throw ParameterError("decay relation requires 0 < r < rho");
  const double common = c_cal * (r / rho) * at_rho.C;
  const double inv = rho / r;
  if (p < 3.0)
    return common + c_cal * inv * inv *
                        std::pow(at_rho.B, (9.0 - 3.0 * p) / (6.0 - p)) *
                        std::pow(M, 3.0 * p / (6.0 - p));
  if (p <= 6.0)
    return common + c_cal * inv * std::pow(at_rho.A, (p - 3.0) / (p - 2.0)) *
                        std::pow(M, p / (p - 2.0));
  return common + c_cal * std::pow(inv, 1.5) * std::pow(at_rho.A, 0.75) *
                      std::pow(M, 1.5);
}

double g_value(const InvariantReport& report) {
  return report.A + report.B + std::pow(report.C, 7.0 / 6.0) +
         std::pow(report.D, 8.0 / 7.0);
}

IterationState iterate_decay(double g0, double c_cal, double forcing,
                             int k_max) {
  if (!(g0 >= 0.0)) throw ParameterError("iteration requires G0 >= 0");
  if (!(c_cal >= 1.0)) throw ParameterError("iteration requires C_cal >= 1");
  if (!(forcing >= 0.0)) throw ParameterError("iteration requires forcing >= 0");
  if (k_max < 0) throw ParameterError("iteration requires k_max >= 0");

  IterationState st;
  st.c_cal = c_cal;
  st.forcing = forcing;
  st.theta = std::fmin(0.5, std::pow(c_cal, -7.0));
  st.g_sequence.reserve(static_cast<std::size_t>(k_max) + 1);
  st.g_sequence.push_back(g0);
  for (int k = 1; k <= k_max; ++k)
    st.g_sequence.push_back(st.theta * st.g_sequence.back() + forcing);

  const double tail = forcing / (1.0 - st.theta);
  const double band = 2.0 * tail;
  st.bound_satisfied = true;
  double theta_k = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    const double bound = theta_k * g0 + tail;
    if (st.g_sequence[k] > bound * (1.0 + 1e-12) + 1e-300)
      st.bound_satisfied = false;
    if (st.first_k_in_band < 0 && st.g_sequence[k] <= band)
      st.first_k_in_band = k;
    theta_k *= st.theta;
  }
  return st;
}

namespace {

void require_ball_in_box(const GridGeometry& g, Vec3 x0, double r,
                         const char* who) {
  const double c[3] = {x0.x, x0.y, x0.z};
  for (int a = 0; a < 3; ++a)
    if (c[a] - r < g.box.lo_axis(a) || c[a] + r > g.box.hi_axis(a))
      throw DomainError(std::string(who) + ": ball extends beyond the box");
}

// Sample indices with t_k inside [w0, w1] (snap-tolerant).
std::vector<int> samples_in(const SampledField& f, double w0, double w1) {
  const double snap = 1e-9 * (f.t_end() - f.t_begin());
  std::vector<int> out;
  for (int k = 0; k < f.nt(); ++k) {
    const double t = f.time(k);
    if (t >= w0 - snap && t <= w1 + snap) out.push_back(k);
  }
  return out;
}

double exponent_q(double p) {
  if (p == 2.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 2.0;
  return 2.0 * p / (p - 2.0);
}

double series_time_norm(const TimeSeries& series, double p) {
  const double q = exponent_q(p);
  if (std::isinf(q))
    return *std::max_element(series.values.begin(), series.values.end());
  return weak_norm(distribution(series), q);
}

TimeSeries morrey_profile_series(const SampledField& field, double t0,
                                 Vec3 x0, double p, bool oscillation,
                                 double base_radius, const char* who) {
  if (!(p >= 2.0))
    throw ParameterError(std::string(who) + " requires p >= 2");
  if (!(base_radius > 0.0))
    throw ParameterError(std::string(who) + " requires a positive radius");
  require_ball_in_box(field.geometry(), x0, base_radius, who);
  const double w0 = t0 - base_radius * base_radius;
  if (!field.covers_time(w0) || !field.covers_time(t0))
    throw DomainError(std::string(who) +
                      ": base cylinder time range not covered");
  const std::vector<int> window = samples_in(field, w0, t0);
  if (window.size() < 2)
    throw DomainError(std::string(who) + ": fewer than 2 samples in window");
  TimeSeries series;
  series.window_begin = w0;
  series.window_end = t0;
  for (int k : window) {
    series.times.push_back(field.time(k));
    series.values.push_back(
        morrey_sup(field, field.time(k), x0, base_radius, p, oscillation)
            .supremum);
  }
  return series;
}

}  // namespace

double morrey_time_norm(const SampledField& field, double t0, Vec3 x0,
                        double p, bool oscillation, double base_radius) {
  return series_time_norm(morrey_profile_series(field, t0, x0, p, oscillation,
                                                base_radius,
                                                "morrey_time_norm"),
                          p);
}

DetectionVerdict epsilon_regularity(const SampledField& field, double t0,
                                    Vec3 x0, double p, bool oscillation,
                                    const DetectorConfig& config,
                                    double base_radius) {
  const GridGeometry& g = field.geometry();
  const TimeSeries series = morrey_profile_series(
      field, t0, x0, p, oscillation, base_radius, "epsilon_regularity");

  DetectionVerdict out;
  out.criterion = oscillation ? Criterion::EpsRegularityOscillation
                              : Criterion::EpsRegularityPlain;
  out.t0 = t0;
  out.x0 = x0;
  out.r = base_radius;
  out.p = p;
  out.threshold = config.delta;
  for (std::size_t i = 0; i < series.times.size(); ++i)
    out.series.emplace_back(series.times[i], series.values[i]);

  // Time norm of the Morrey profile series: 1/q = 1/2 - 1/p, with the p = 2
  // endpoint read as the essential sup.
  const double measured = series_time_norm(series, p);
  out.measured = measured;
  out.trace.emplace_back("samples_in_window",
                         static_cast<double>(series.times.size()));
  out.trace.emplace_back("time_norm_exponent", exponent_q(p));

  if (measured > config.delta) {
    out.verdict = Verdict::Inconclusive;
    out.trace.emplace_back("norm_exceeds_delta", 1.0);
    return out;
  }

  // Dyadic descent: find the first scale with C(u, r_k) <= eps_star, then
  // apply the threshold gate. Running out of resolution (in space or in
  // time samples) before the stop is an inconclusive outcome, never a
  // regularity claim.
  const double floor_radius = 2.0 * g.max_spacing();
  double r_star = 0.0, c_star = 0.0;
  bool floored = true;
  int steps = 0;
  for (double rk = base_radius; rk >= floor_radius; rk *= 0.5, ++steps) {
    if (samples_in(field, std::fmax(field.t_begin(), t0 - rk * rk), t0).size() <
        2)
      break;
    const double ck = c_quantity(field, CylinderSpec{t0, x0, rk});
    if (ck <= config.eps_star) {
      r_star = rk;
      c_star = ck;
      floored = false;
      break;
    }
  }
  out.trace.emplace_back("descent_steps", static_cast<double>(steps));
  out.trace.emplace_back("floored", floored ? 1.0 : 0.0);
  if (floored) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  const double wolf_value = std::cbrt(c_star);
  const double wolf_eps = config.resolved_wolf_eps();
  out.trace.emplace_back("r_star", r_star);
  out.trace.emplace_back("c_at_r_star", c_star);
  out.trace.emplace_back("wolf_value", wolf_value);
  out.trace.emplace_back("wolf_eps", wolf_eps);
  out.verdict = wolf_value <= wolf_eps ? Verdict::RegularIndicated
                                       : Verdict::Inconclusive;
  return out;
}

DetectionVerdict wolf_criterion(const SampledField& field, double t0, Vec3 x0,
                                double r, double q, double p,
                                const DetectorConfig& config) {
  if (!(q >= 3.0) || !(p >= 3.0))
    throw ParameterError("wolf criterion requires q, p >= 3");
  if (!(r > 0.0)) throw ParameterError("wolf criterion requires r > 0");
  const GridGeometry& g = field.geometry();
  require_ball_in_box(g, x0, r, "wolf_criterion");
  const double w0 = t0 - r * r;
  if (!field.covers_time(w0) || !field.covers_time(t0))
    throw DomainError("wolf_criterion: cylinder time range not covered");
  const std::vector<int> window = samples_in(field, w0, t0);
  if (window.size() < 2)
    throw DomainError("wolf_criterion: fewer than 2 samples in window");

  DetectionVerdict out;
  out.criterion = Criterion::Wolf;
  out.t0 = t0;
  out.x0 = x0;
  out.r = r;
  out.p = p;

  TimeSeries series;
  series.window_begin = w0;
  series.window_end = t0;
  const BallSpec ball{x0, r};
  for (int k : window) {
    const ScalarSlice speed = field.speed_slice(k);
    double norm;
    if (std::isinf(p))
      norm = integrate_ball(speed, ball, p);
    else
      norm = std::pow(integrate_ball(speed, ball, p), 1.0 / p);
    series.times.push_back(field.time(k));
    series.values.push_back(norm);
    out.series.emplace_back(field.time(k), norm);
  }

  double time_norm = 0.0;
  if (std::isinf(q)) {
    time_norm = *std::max_element(series.values.begin(), series.values.end());
  } else {
    const std::vector<double> w = series.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      acc += w[i] * std::pow(series.values[i], q);
    time_norm = std::pow(acc, 1.0 / q);
  }

  const double exponent = 2.0 / q + 3.0 / p - 1.0;  // inf -> term vanishes
  out.measured = time_norm;
  out.threshold = std::pow(r, exponent) * config.resolved_wolf_eps();
  out.trace.emplace_back("q", q);
  out.trace.emplace_back("scale_exponent", exponent);
  out.trace.emplace_back("wolf_eps", config.resolved_wolf_eps());
  out.verdict = out.measured <= out.threshold ? Verdict::RegularIndicated
                                              : Verdict::Inconclusive;
  return out;
}

namespace {

// Shared scaffolding of the two concentration tests: approach samples below
// t0 and the running-max proxy over their final quarter.
struct ApproachSamples {
  std::vector<int> indices;
  std::size_t proxy_begin = 0;
};

ApproachSamples approach_samples(const SampledField& field, double t0,
                                 const char* who) {
  ApproachSamples as;
  const double snap = 1e-9 * (field.t_end() - field.t_begin());
  for (int k = 0; k < field.nt(); ++k)
    if (field.time(k) < t0 - snap) as.indices.push_back(k);
  if (as.indices.size() < 4)
    throw DomainError(std::string(who) +
                      ": needs at least 4 samples below t0");
  const std::size_t n = as.indices.size();
  as.proxy_begin = n - (n + 3) / 4;  // final quarter, rounded up
  return as;
}

}  // namespace

DetectionVerdict concentration_rate(const SampledField& field, double t0,
                                    Vec3 x0, double r, double p, double nu,
                                    const DetectorConfig& config) {
  if (!(p > 3.0))
    throw ParameterError("concentration rate requires p > 3");
  if (!(nu >= 2.0) || (!std::isinf(p) && !(nu <= 2.0 * p / 3.0)))
    throw ParameterError("concentration rate requires 2 <= nu <= 2p/3");
  if (!(r > 0.0)) throw ParameterError("concentration rate requires r > 0");
  const GridGeometry& g = field.geometry();
  require_ball_in_box(g, x0, r, "concentration_rate");
  const ApproachSamples as = approach_samples(field, t0, "concentration_rate");

  DetectionVerdict out;
  out.criterion = Criterion::ConcentrationGeneral;
  out.t0 = t0;
  out.x0 = x0;
  out.r = r;
  out.p = p;
  out.nu = nu;
  out.threshold = config.resolved_delta_star();

  const double time_exp = 0.5 - 1.0 / nu;  // 1/mu; zero when nu = 2
  const double radius_exp = 2.0 / nu - (std::isinf(p) ? 0.0 : 3.0 / p);
  const double r_factor = std::pow(r, radius_exp);
  const BallSpec ball{x0, r};

  double proxy = 0.0;
  for (std::size_t i = 0; i < as.indices.size(); ++i) {
    const int k = as.indices[i];
    const ScalarSlice speed = field.speed_slice(k);
    const double wn = weak_norm(speed, ball, p);
    const double q = std::pow(t0 - field.time(k), time_exp) * r_factor * wn;
    out.series.emplace_back(field.time(k), q);
    if (i >= as.proxy_begin) proxy = std::fmax(proxy, q);
  }
  out.measured = proxy;
  out.trace.emplace_back("inv_mu", time_exp);
  out.trace.emplace_back("radius_exponent", radius_exp);
  out.trace.emplace_back("samples_below",
                         static_cast<double>(as.indices.size()));
  out.trace.emplace_back("proxy_samples",
                         static_cast<double>(as.indices.size() - as.proxy_begin));
  out.verdict = proxy > out.threshold ? Verdict::ConcentrationDetected
                                      : Verdict::Inconclusive;
  return out;
}

DetectionVerdict concentration_p3(const SampledField& field, double t0,
                                  Vec3 x0, double r,
                                  const DetectorConfig& config) {
  if (!(r > 0.0)) throw ParameterError("concentration test requires r > 0");
  const GridGeometry& g = field.geometry();
  require_ball_in_box(g, x0, r, "concentration_p3");
  const ApproachSamples as = approach_samples(field, t0, "concentration_p3");

  DetectionVerdict out;
  out.criterion = Criterion::ConcentrationP3;
  out.t0 = t0;
  out.x0 = x0;
  out.r = r;
  out.p = 3.0;
  out.threshold = config.resolved_delta_star();

  const BallSpec ball{x0, r};
  BallQuadrature quad(g, ball);
  if (quad.size() == 0)
    throw DomainError("concentration_p3: ball does not intersect the box");

  double proxy = 0.0;
  for (std::size_t i = 0; i < as.indices.size(); ++i) {
    const int k = as.indices[i];
    const Vec3 mean = local_mean(field, field.time(k), ball);
    const double* u1 = field.component_data(0, k);
    const double* u2 = field.component_data(1, k);
    const double* u3 = field.component_data(2, k);
    std::vector<double> osc(quad.size());
    for (std::size_t j = 0; j < quad.size(); ++j) {
      const std::uint32_t n = quad.nodes()[j];
      const Vec3 dev{u1[n] - mean.x, u2[n] - mean.y, u3[n] - mean.z};
      osc[j] = dev.norm();
    }
    const double q = weak_norm(distribution(osc, quad.weights()), 3.0);
    out.series.emplace_back(field.time(k), q);
    if (i >= as.proxy_begin) proxy = std::fmax(proxy, q);
  }
  out.measured = proxy;

  // Cross-check value: p = 2 oscillation Morrey supremum at the last
  // approach sample (the variance-chain quantity).
  const double osc_sup =
      morrey_sup(field, field.time(as.indices.back()), x0, r, 2.0, true)
          .supremum;
  out.trace.emplace_back("osc_sup_p2", osc_sup);
  out.trace.emplace_back("samples_below",
                         static_cast<double>(as.indices.size()));
  out.verdict = proxy > out.threshold ? Verdict::ConcentrationDetected
                                      : Verdict::Inconclusive;
  return out;
}

}  // namespace nssl
