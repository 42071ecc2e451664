#include "ssr/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ssr/errors.hpp"
#include "ssr/numeric.hpp"

namespace ssr {

namespace {

// Reads typed fields from a JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(where_ + "." + key + ": expected a non-negative integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
    return v.get<std::string>();
  }

  const Json& object(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

double gain_field(ObjectReader& r, const std::string& name, double fallback) {
  const bool linear = r.has(name);
  const bool db = r.has(name + "_db");
  if (linear && db) throw ConfigError(r.path(name) + ": give either linear or dB gain, not both");
  if (db) return db_to_linear(r.number(name + "_db", 0.0));
  return r.number(name, fallback);
}

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::kDesk;
  if (s == "full") return Scale::kFull;
  throw ConfigError("scale: expected \"desk\" or \"full\", got \"" + s + "\"");
}

std::string to_string(Scale s) { return s == Scale::kDesk ? "desk" : "full"; }

}  // namespace

Json to_json(const NetworkParams& p) {
  return Json{{"kappa_m_hz", rad_to_hz(p.kappa_m)},
              {"kappa_l_hz", rad_to_hz(p.kappa_l)},
              {"kappa_a_hz", rad_to_hz(p.kappa_a)},
              {"omega_c_hz", rad_to_hz(p.omega_c)},
              {"n_T", p.n_T},
              {"n_A", p.n_A},
              {"G_s", p.G_s},
              {"G_a", p.G_a},
              {"lambda", p.lambda_t}};
}

NetworkParams network_from_json(const Json& j, const NetworkParams& d) {
  ObjectReader r(j, "network");
  NetworkParams p = d;
  p.kappa_m = hz_to_rad(r.number("kappa_m_hz", rad_to_hz(d.kappa_m)));
  p.kappa_l = hz_to_rad(r.number("kappa_l_hz", rad_to_hz(d.kappa_l)));
  p.kappa_a = hz_to_rad(r.number("kappa_a_hz", rad_to_hz(d.kappa_a)));
  p.omega_c = hz_to_rad(r.number("omega_c_hz", rad_to_hz(d.omega_c)));
  p.n_T = r.number("n_T", d.n_T);
  p.n_A = r.number("n_A", d.n_A);
  p.G_s = gain_field(r, "G_s", d.G_s);
  p.G_a = gain_field(r, "G_a", d.G_a);
  const bool has_lambda = r.has("lambda");
  const bool has_eta = r.has("eta");
  if (has_lambda && has_eta) throw ConfigError("network: give either lambda or eta, not both");
  if (has_eta) {
    const double eta = r.number("eta", 1.0);
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("network.eta must lie in [0, 1]");
    p.lambda_t = std::sqrt(eta);
  } else {
    p.lambda_t = r.number("lambda", d.lambda_t);
  }
  r.finish();
  p.validate();
  return p;
}

Json to_json(const SynthConfig& c) {
  return Json{{"bin_width_hz", c.bin_width_hz},
              {"if_band_hz", c.if_band_hz},
              {"subspectra", c.subspectra},
              {"n_spectra", c.n_spectra},
              {"hemt_noise", c.hemt_noise},
              {"lo_offset_hz", c.lo_offset_hz},
              {"faxion",
               {{"power_fraction", c.faxion.power_fraction},
                {"linewidth_hz", c.faxion.linewidth_hz},
                {"start_window_hz", c.faxion.start_window_hz},
                {"step_hz", c.faxion.step_hz},
                {"lineshape", "lorentzian"}}}};
}

SynthConfig synth_from_json(const Json& j, const SynthConfig& d) {
  ObjectReader r(j, "synth");
  SynthConfig c = d;
  c.bin_width_hz = r.number("bin_width_hz", d.bin_width_hz);
  c.if_band_hz = r.number("if_band_hz", d.if_band_hz);
  c.subspectra = r.integer("subspectra", d.subspectra);
  c.n_spectra = r.integer("n_spectra", d.n_spectra);
  c.hemt_noise = r.number("hemt_noise", d.hemt_noise);
  c.lo_offset_hz = r.number("lo_offset_hz", d.lo_offset_hz);
  if (r.has("faxion")) {
    ObjectReader f(r.object("faxion"), "synth.faxion");
    c.faxion.power_fraction = f.number("power_fraction", d.faxion.power_fraction);
    c.faxion.linewidth_hz = f.number("linewidth_hz", d.faxion.linewidth_hz);
    c.faxion.start_window_hz = f.number("start_window_hz", d.faxion.start_window_hz);
    c.faxion.step_hz = f.number("step_hz", d.faxion.step_hz);
    const auto shape = f.string("lineshape", "lorentzian");
    if (shape != "lorentzian") throw ConfigError("synth.faxion.lineshape: only \"lorentzian\" is supported");
    f.finish();
  }
  r.finish();
  return c;
}

Json to_json(const PipelineConfig& c) {
  Json j{{"sg1", {{"degree", c.sg1.degree}, {"half_width", c.sg1.half_width}}},
         {"sg2", {{"degree", c.sg2.degree}, {"half_width", c.sg2.half_width}}},
         {"reject_sigma", c.reject_sigma},
         {"reject_neighbors", c.reject_neighbors},
         {"max_rejected_fraction", c.max_rejected_fraction},
         {"K_r", c.K_r},
         {"K_g", c.K_g},
         {"tuning_shift_hz", c.tuning_shift_hz},
         {"visibility_floor", c.visibility_floor}};
  if (!c.lineshape_weights.empty()) j["lineshape_weights"] = c.lineshape_weights;
  return j;
}

PipelineConfig pipeline_from_json(const Json& j, const PipelineConfig& d) {
  ObjectReader r(j, "pipeline");
  PipelineConfig c = d;
  auto sg = [&](const std::string& key, SgSettings fallback) {
    if (!r.has(key)) return fallback;
    ObjectReader s(r.object(key), "pipeline." + key);
    SgSettings out{s.integer("degree", fallback.degree), s.integer("half_width", fallback.half_width)};
    s.finish();
    return out;
  };
  c.sg1 = sg("sg1", d.sg1);
  c.sg2 = sg("sg2", d.sg2);
  c.reject_sigma = r.number("reject_sigma", d.reject_sigma);
  c.reject_neighbors = r.integer("reject_neighbors", d.reject_neighbors);
  c.max_rejected_fraction = r.number("max_rejected_fraction", d.max_rejected_fraction);
  c.K_r = r.integer("K_r", d.K_r);
  c.K_g = r.integer("K_g", d.K_g);
  c.tuning_shift_hz = r.number("tuning_shift_hz", d.tuning_shift_hz);
  c.visibility_floor = r.number("visibility_floor", d.visibility_floor);
  if (r.has("lineshape_weights")) {
    const auto& w = r.object("lineshape_weights");
    if (!w.is_array()) throw ConfigError("pipeline.lineshape_weights: expected an array");
    c.lineshape_weights.clear();
    for (const auto& x : w) {
      if (!x.is_number()) throw ConfigError("pipeline.lineshape_weights: expected numbers");
      c.lineshape_weights.push_back(x.get<double>());
    }
  }
  r.finish();
  return c;
}

Json to_json(const ScanConfig& c) {
  Json j{{"delta_a_hz", c.delta_a_hz}, {"target_snr", c.target_snr}, {"rel_tol", c.rel_tol}};
  j["half_width_hz"] = c.half_width ? Json(rad_to_hz(*c.half_width)) : Json(nullptr);
  return j;
}

ScanConfig scan_from_json(const Json& j, const ScanConfig& d) {
  ObjectReader r(j, "scan");
  ScanConfig c = d;
  c.delta_a_hz = r.number("delta_a_hz", d.delta_a_hz);
  c.target_snr = r.number("target_snr", d.target_snr);
  c.rel_tol = r.number("rel_tol", d.rel_tol);
  if (r.has("half_width_hz")) c.half_width = hz_to_rad(r.number("half_width_hz", 0.0));
  r.finish();
  c.validate();
  return c;
}

Json to_json(const HaloscopePhysical& h) {
  return Json{{"rho_a_gev_cm3", h.rho_a_gev_cm3}, {"b0_tesla", h.b0_tesla},
              {"g_agg_inv_ev", h.g_agg_inv_ev},   {"delta_a_hz", h.delta_a_hz},
              {"omega_a_hz", rad_to_hz(h.omega_a)}, {"volume_liters", h.volume_liters},
              {"form_factor", h.form_factor}};
}

HaloscopePhysical axion_from_json(const Json& j, const HaloscopePhysical& d) {
  ObjectReader r(j, "axion_physical");
  HaloscopePhysical h = d;
  h.rho_a_gev_cm3 = r.number("rho_a_gev_cm3", d.rho_a_gev_cm3);
  h.b0_tesla = r.number("b0_tesla", d.b0_tesla);
  h.g_agg_inv_ev = r.number("g_agg_inv_ev", d.g_agg_inv_ev);
  h.delta_a_hz = r.number("delta_a_hz", d.delta_a_hz);
  h.omega_a = hz_to_rad(r.number("omega_a_hz", rad_to_hz(d.omega_a)));
  h.volume_liters = r.number("volume_liters", d.volume_liters);
  h.form_factor = r.number("form_factor", d.form_factor);
  r.finish();
  h.validate();
  return h;
}

Json to_json(const ExperimentConfig& c) {
  Json checks{{"consistency_sigma", c.checks.consistency_sigma},
              {"min_retained_fraction", c.checks.min_retained_fraction}};
  checks["em_min"] = c.checks.em_min ? Json(*c.checks.em_min) : Json(nullptr);
  checks["em_max"] = c.checks.em_max ? Json(*c.checks.em_max) : Json(nullptr);
  checks["max_em_standard_error"] =
      c.checks.max_em_standard_error ? Json(*c.checks.max_em_standard_error) : Json(nullptr);
  Json j{{"scale", to_string(c.scale)},
         {"seed", c.seed},
         {"repetitions", c.repetitions},
         {"output_dir", c.output_dir},
         {"threads", c.threads},
         {"persist_repetitions", c.persist_repetitions},
         {"max_failed_fraction", c.max_failed_fraction},
         {"squeezed", to_json(c.squeezed)},
         {"unsqueezed", to_json(c.unsqueezed)},
         {"synth", to_json(c.synth)},
         {"pipeline", to_json(c.pipeline)},
         {"scan", to_json(c.scan)},
         {"checks", checks}};
  j["axion_physical"] = c.axion_physical ? to_json(*c.axion_physical) : Json(nullptr);
  return j;
}

ExperimentConfig experiment_from_json(const Json& j) {
  ObjectReader r(j, "config");
  const Scale scale = scale_from_string(r.string("scale", "desk"));
  const ExperimentConfig d = default_config(scale);
  ExperimentConfig c = d;
  c.seed = r.unsigned64("seed", d.seed);
  c.repetitions = r.integer("repetitions", d.repetitions);
  c.output_dir = r.string("output_dir", d.output_dir);
  const int threads = r.integer("threads", static_cast<int>(d.threads));
  if (threads < 0) throw ConfigError("config.threads must be >= 0");
  c.threads = static_cast<unsigned>(threads);
  c.persist_repetitions = r.boolean("persist_repetitions", d.persist_repetitions);
  c.max_failed_fraction = r.number("max_failed_fraction", d.max_failed_fraction);
  if (r.has("squeezed")) c.squeezed = network_from_json(r.object("squeezed"), d.squeezed);
  if (r.has("unsqueezed")) c.unsqueezed = network_from_json(r.object("unsqueezed"), d.unsqueezed);
  if (r.has("synth")) c.synth = synth_from_json(r.object("synth"), d.synth);
  bool explicit_shift = false;
  if (r.has("pipeline")) {
    const auto& pj = r.object("pipeline");
    explicit_shift = pj.is_object() && pj.contains("tuning_shift_hz");
    c.pipeline = pipeline_from_json(pj, d.pipeline);
  }
  if (!explicit_shift) c.pipeline.tuning_shift_hz = -c.synth.faxion.step_hz;
  if (r.has("scan")) c.scan = scan_from_json(r.object("scan"), d.scan);
  if (r.has("axion_physical")) {
    c.axion_physical = axion_from_json(r.object("axion_physical"), HaloscopePhysical{});
  }
  if (r.has("checks")) {
    ObjectReader k(r.object("checks"), "checks");
    c.checks.consistency_sigma = k.number("consistency_sigma", d.checks.consistency_sigma);
    c.checks.min_retained_fraction = k.number("min_retained_fraction", d.checks.min_retained_fraction);
    if (k.has("em_min")) c.checks.em_min = k.number("em_min", 0.0);
    if (k.has("em_max")) c.checks.em_max = k.number("em_max", 0.0);
    if (k.has("max_em_standard_error")) {
      c.checks.max_em_standard_error = k.number("max_em_standard_error", 0.0);
    }
    k.finish();
  }
  r.finish();
  c.synth.threads = 1;
  c.pipeline.threads = 1;
  c.validate();
  return c;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return experiment_from_json(j);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return experiment_from_json(read_json_file(path));
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a64(to_json(c).dump()); }

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << x;
  return os.str();
}

}  // namespace ssr
