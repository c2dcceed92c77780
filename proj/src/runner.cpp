#include "nssl/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "json.hpp"

#include "nssl/errors.hpp"
#include "nssl/invariants.hpp"
#include "nssl/lorentz.hpp"
#include "nssl/morrey.hpp"
#include "nssl/synth.hpp"
#include "nssl/verify.hpp"

namespace nssl {

namespace {

using nlohmann::json;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("NSSL_LOG");
    if (env == nullptr || *env == '\0') return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "0" || v == "quiet") return 0;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[nssl] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[nssl] " << msg << "\n";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Row-oriented commands write to --output when given, stdout otherwise.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ParameterError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

json parse_lattice(const std::string& text, const char* command) {
  if (text.empty())
    throw ParameterError(std::string(command) + " requires --lattice");
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("invalid lattice JSON: ") + e.what());
  }
}

double number_or_inf(const json& v, const char* what) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    throw ParameterError(std::string(what) + ": unrecognized value \"" + s +
                         "\"");
  }
  if (!v.is_number())
    throw ParameterError(std::string(what) + " entries must be numbers");
  return v.get<double>();
}

std::vector<double> number_list(const json& lattice, const char* key,
                                bool required,
                                std::vector<double> fallback = {}) {
  if (!lattice.contains(key)) {
    if (required)
      throw ParameterError(std::string("lattice is missing \"") + key + "\"");
    return fallback;
  }
  const json& arr = lattice.at(key);
  std::vector<double> out;
  if (arr.is_array()) {
    for (const json& v : arr) out.push_back(number_or_inf(v, key));
  } else {
    out.push_back(number_or_inf(arr, key));
  }
  if (out.empty())
    throw ParameterError(std::string("lattice \"") + key + "\" is empty");
  return out;
}

std::vector<Vec3> center_list(const json& lattice) {
  if (!lattice.contains("x0"))
    throw ParameterError("lattice is missing \"x0\"");
  const json& arr = lattice.at("x0");
  auto one = [](const json& v) -> Vec3 {
    if (!v.is_array() || v.size() != 3)
      throw ParameterError("each x0 must be an array of 3 coordinates");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  };
  std::vector<Vec3> out;
  if (arr.is_array() && !arr.empty() && arr[0].is_array()) {
    for (const json& v : arr) out.push_back(one(v));
  } else {
    out.push_back(one(arr));
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

int run_gen(const RunConfig& config) {
  if (config.input.empty() || config.output.empty())
    throw ParameterError("gen requires --input (spec JSON) and --output");
  GeneratorSpec spec = GeneratorSpec::from_json_string(read_text_file(config.input));
  if (config.seed_given) spec.seed = config.seed;
  log_info("generating " + to_string(spec.kind) + " field");
  const SampledField field = generate(spec);
  save_field(field, config.output);
  log_info("wrote " + config.output);
  return 0;
}

int run_norms(const RunConfig& config) {
  if (config.input.empty()) throw ParameterError("norms requires --input");
  const SampledField field = load_field(config.input);
  const json lattice = parse_lattice(config.lattice_json, "norms");
  const std::vector<double> ts =
      number_list(lattice, "t", false, {field.t_end()});
  const std::vector<Vec3> centers = center_list(lattice);
  const std::vector<double> radii = number_list(lattice, "r", true);
  const std::vector<double> exps = number_list(lattice, "p", true);

  OutputSink sink(config.output);
  std::ostream& out = sink.stream();
  out << "# config_hash=" << config.hash() << "\n";
  out << "t,x,y,z,r,p,weak_lp,morrey,morrey_osc,time_lorentz\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : ts) {
    for (const Vec3& x0 : centers) {
      for (double r : radii) {
        for (double p : exps) {
          double weak = nan, plain = nan, osc = nan, lorentz = nan;
          try {
            const int k = field.sample_at_or_below(t);
            weak = weak_norm(field.speed_slice(k), BallSpec{x0, r}, p);
          } catch (const DomainError&) {
          }
          try {
            plain = morrey_sup(field, t, x0, r, p, false).supremum;
            osc = morrey_sup(field, t, x0, r, p, true).supremum;
          } catch (const DomainError&) {
          }
          try {
            lorentz = morrey_time_norm(field, t, x0, p, true, r);
          } catch (const DomainError&) {
          }
          out << format_double(t) << ',' << format_double(x0.x) << ','
              << format_double(x0.y) << ',' << format_double(x0.z) << ','
              << format_double(r) << ',' << format_double(p) << ','
              << format_double(weak) << ',' << format_double(plain) << ','
              << format_double(osc) << ',' << format_double(lorentz) << "\n";
        }
      }
    }
  }
  return 0;
}

int run_invariants(const RunConfig& config) {
  if (config.input.empty())
    throw ParameterError("invariants requires --input");
  const SampledField field = load_field(config.input);
  const json lattice = parse_lattice(config.lattice_json, "invariants");
  const std::vector<double> ts =
      number_list(lattice, "t0", false, {field.t_end()});
  const std::vector<Vec3> centers = center_list(lattice);
  const std::vector<double> radii = number_list(lattice, "r", true);

  OutputSink sink(config.output);
  std::ostream& out = sink.stream();
  const std::string hash = config.hash();
  for (double t0 : ts) {
    for (const Vec3& x0 : centers) {
      for (double r : radii) {
        json row;
        try {
          const InvariantReport rep = invariants(field, CylinderSpec{t0, x0, r});
          row = json::parse(rep.to_json());
        } catch (const DomainError& e) {
          row = {{"t0", t0},
                 {"x0", {x0.x, x0.y, x0.z}},
                 {"r", r},
                 {"error", e.what()}};
        }
        row["config_hash"] = hash;
        out << row.dump() << "\n";
      }
    }
  }
  return 0;
}

struct ScanJob {
  enum Kind { EpsRegularity, ConcentrationRate, ConcentrationP3, Wolf };
  Kind kind = EpsRegularity;
  double t0 = 0.0;
  Vec3 x0;
  double r = 0.0;
  double p = 0.0;
  double nu = 0.0;
  double q = 0.0;
  bool oscillation = true;
};

int run_scan(const RunConfig& config) {
  if (config.input.empty()) throw ParameterError("scan requires --input");
  const SampledField field = load_field(config.input);
  const json lattice = parse_lattice(config.lattice_json, "scan");
  const std::vector<double> ts =
      number_list(lattice, "t0", false, {field.t_end()});
  const std::vector<Vec3> centers = center_list(lattice);
  const std::vector<double> radii = number_list(lattice, "r", true);
  const std::vector<double> exps = number_list(lattice, "p", true);
  // Concentration tests are opt-in: they can only answer "detected" or
  // "inconclusive", so they run only when the lattice lists nu values.
  const std::vector<double> nus =
      lattice.contains("nu") ? number_list(lattice, "nu", true)
                             : std::vector<double>{};
  const std::vector<double> qs = number_list(lattice, "q", false, {3.0});
  const bool oscillation = lattice.value("oscillation", true);

  bool want_eps = true, want_conc = !nus.empty(), want_wolf = false;
  if (lattice.contains("detectors")) {
    want_eps = want_conc = want_wolf = false;
    for (const json& d : lattice.at("detectors")) {
      const std::string name = d.get<std::string>();
      if (name == "epsilon_regularity") {
        want_eps = true;
      } else if (name == "concentration") {
        want_conc = true;
      } else if (name == "wolf") {
        want_wolf = true;
      } else {
        throw ParameterError("unknown detector \"" + name + "\"");
      }
    }
  }

  std::vector<ScanJob> lattice_jobs;
  for (double t0 : ts) {
    for (const Vec3& x0 : centers) {
      for (double r : radii) {
        for (double p : exps) {
          ScanJob base;
          base.t0 = t0;
          base.x0 = x0;
          base.r = r;
          base.p = p;
          base.oscillation = oscillation;
          if (want_eps) {
            base.kind = ScanJob::EpsRegularity;
            lattice_jobs.push_back(base);
          }
          if (want_conc && p == 3.0) {
            base.kind = ScanJob::ConcentrationP3;
            lattice_jobs.push_back(base);
          }
          if (want_conc && p > 3.0 && !nus.empty()) {
            for (double nu : nus) {
              base.kind = ScanJob::ConcentrationRate;
              base.nu = nu;
              lattice_jobs.push_back(base);
            }
          }
          if (want_wolf && p >= 3.0) {
            for (double q : qs) {
              base.kind = ScanJob::Wolf;
              base.nu = 0.0;
              base.q = q;
              lattice_jobs.push_back(base);
            }
          }
        }
      }
    }
  }
  if (lattice_jobs.empty()) throw ParameterError("scan lattice is empty");

  const DetectorConfig detector = config.detector();
  const std::string hash = config.hash();
  auto execute = [&](const ScanJob& job) -> std::string {
    try {
      DetectionVerdict v;
      switch (job.kind) {
        case ScanJob::EpsRegularity:
          v = epsilon_regularity(field, job.t0, job.x0, job.p, job.oscillation,
                                 detector, job.r);
          break;
        case ScanJob::ConcentrationRate:
          v = concentration_rate(field, job.t0, job.x0, job.r, job.p, job.nu,
                                 detector);
          break;
        case ScanJob::ConcentrationP3:
          v = concentration_p3(field, job.t0, job.x0, job.r, detector);
          break;
        case ScanJob::Wolf:
          v = wolf_criterion(field, job.t0, job.x0, job.r, job.q, job.p,
                             detector);
          break;
      }
      return v.to_json(hash);
    } catch (const std::exception& e) {
      const json row = {{"t0", job.t0},
                        {"x0", {job.x0.x, job.x0.y, job.x0.z}},
                        {"r", job.r},
                        {"p", job.p},
                        {"error", e.what()},
                        {"config_hash", hash}};
      return row.dump();
    }
  };

  int workers = config.jobs;
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(lattice_jobs.size()));
  log_info("scan: " + std::to_string(lattice_jobs.size()) + " verdicts on " +
           std::to_string(workers) + " workers");

  std::vector<std::string> rows(lattice_jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= lattice_jobs.size()) return;
      rows[i] = execute(lattice_jobs[i]);
      log_debug("scan job " + std::to_string(i) + " done");
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  OutputSink sink(config.output);
  for (const std::string& row : rows) sink.stream() << row << "\n";
  return 0;
}

int run_verify(const RunConfig& config) {
  VerifyOptions opts;
  opts.seed = config.seed;
  log_info("running verification suites");
  const VerifyReport report = run_verification(opts);
  std::cout << report.to_text();
  if (!config.output.empty()) {
    json j = json::parse(report.to_json());
    j["config_hash"] = config.hash();
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + config.output);
    out << j.dump(2) << "\n";
  }
  return report.all_passed() ? 0 : 1;
}

}  // namespace

DetectorConfig RunConfig::detector() const {
  DetectorConfig d;
  d.delta = delta;
  d.eps_star = eps_star;
  d.delta_star = delta_star;
  d.c_cal = c_cal;
  return d;
}

std::string RunConfig::hash() const {
  std::ostringstream s;
  s.precision(17);
  s << command << '\n'
    << input << '\n'
    << output << '\n'
    << delta << '\n'
    << eps_star << '\n'
    << delta_star << '\n'
    << c_cal << '\n'
    << jobs << '\n'
    << seed << '\n'
    << lattice_json;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a(s.str());
  return hex.str();
}

int run(const RunConfig& config) {
  try {
    if (config.command == "gen") return run_gen(config);
    if (config.command == "norms") return run_norms(config);
    if (config.command == "invariants") return run_invariants(config);
    if (config.command == "scan") return run_scan(config);
    if (config.command == "verify") return run_verify(config);
    std::cerr << "error: unknown command \"" << config.command << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nssl
