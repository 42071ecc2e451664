#include "ssr/run_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ssr/config_io.hpp"
#include "ssr/errors.hpp"

namespace ssr {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "raw.f64 assumes a little-endian host");

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.precision(17);
  return out;
}

Json stats_json(const StageStats& s) {
  Json j{{"retained_fraction", s.retained_fraction},
         {"rejected_bins", s.rejected_bins},
         {"residual_sigma", s.residual_sigma},
         {"sigma_p", s.sigma_p},
         {"expected_sigma_p", s.expected_sigma_p},
         {"sigma_g", s.sigma_g},
         {"grand_center", s.grand_center},
         {"grand_bins", s.grand_bins}};
  j["faxion_excess"] = s.faxion_excess ? Json(*s.faxion_excess) : Json(nullptr);
  return j;
}

void write_combined(const fs::path& path, const CombinedSpectrum& c) {
  auto out = open_out(path);
  out << "frequency_hz,value,variance,n_contrib\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c.n_contrib[k] == 0) continue;
    out << c.frequency(k) << ',' << c.value[k] << ',' << c.variance[k] << ',' << c.n_contrib[k] << '\n';
  }
}

}  // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::span<const double>>& columns) {
  if (header.size() != columns.size()) throw ConfigError("write_csv: header/column mismatch");
  auto out = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw ConfigError("write_csv: ragged columns");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
    out << '\n';
  }
}

void write_run(const fs::path& dir, const RawSpectrumSet& raw, RawFormat format) {
  fs::create_directories(dir);
  const std::size_t ns = raw.n_spectra();
  const std::size_t nb = raw.n_bins();
  if (format != RawFormat::kBinary) {
    auto out = open_out(dir / "raw.csv");
    for (std::size_t k = 0; k < nb; ++k) out << (k ? "," : "") << raw.frequencies_hz[k];
    out << '\n';
    for (std::size_t i = 0; i < ns; ++i) {
      const auto s = raw.spectrum(i);
      for (std::size_t k = 0; k < nb; ++k) out << (k ? "," : "") << s[k];
      out << '\n';
    }
  }
  if (format != RawFormat::kCsv) {
    std::ofstream out(dir / "raw.f64", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "raw.f64").string());
    std::vector<double> column(ns);
    for (std::size_t k = 0; k < nb; ++k) {
      for (std::size_t i = 0; i < ns; ++i) column[i] = raw.spectra[i * nb + k];
      out.write(reinterpret_cast<const char*>(column.data()),
                static_cast<std::streamsize>(ns * sizeof(double)));
    }
    write_json_file(dir / "raw.f64.json",
                    Json{{"n_spectra", ns}, {"n_bins", nb}, {"dtype", "float64"},
                         {"endianness", "little"}, {"order", "column-major"},
                         {"first_frequency_hz", raw.frequencies_hz.front()},
                         {"bin_width_hz", raw.config.bin_width_hz}});
  }
  write_json_file(dir / "truth.json",
                  Json{{"start_hz", raw.truth.start_hz},
                       {"tone_hz", raw.truth.tone_hz},
                       {"power_fraction", raw.truth.power_fraction},
                       {"run_seed", raw.truth.run_seed}});
  Json synth = to_json(raw.config);
  synth["seed"] = raw.config.seed;
  write_json_file(dir / "config.json", Json{{"synth", synth}, {"network", to_json(raw.params)}});
}

RawSpectrumSet read_run(const fs::path& dir) {
  const auto cfg = read_json_file(dir / "config.json");
  if (!cfg.contains("synth") || !cfg.contains("network")) {
    throw ConfigError((dir / "config.json").string() + ": expected synth and network sections");
  }
  Json synth = cfg.at("synth");
  const std::uint64_t seed = synth.value("seed", std::uint64_t{1});
  synth.erase("seed");
  RawSpectrumSet raw;
  raw.config = synth_from_json(synth, SynthConfig{});
  raw.config.seed = seed;
  raw.params = network_from_json(cfg.at("network"), NetworkParams{});
  raw.config.validate();
  raw.frequencies_hz = if_frequencies(raw.config);
  raw.expected_mean = mean_power_profile(raw.params, raw.config);
  const std::size_t nb = raw.n_bins();
  const auto ns = static_cast<std::size_t>(raw.config.n_spectra);
  raw.spectra.resize(ns * nb);

  if (fs::exists(dir / "raw.f64")) {
    const auto header = read_json_file(dir / "raw.f64.json");
    if (header.value("n_spectra", std::size_t{0}) != ns || header.value("n_bins", std::size_t{0}) != nb) {
      throw ConfigError("raw.f64.json: dimensions disagree with config.json");
    }
    std::ifstream in(dir / "raw.f64", std::ios::binary);
    std::vector<double> column(ns);
    for (std::size_t k = 0; k < nb; ++k) {
      in.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(ns * sizeof(double)));
      if (!in) throw ConfigError("raw.f64: file is truncated");
      for (std::size_t i = 0; i < ns; ++i) raw.spectra[i * nb + k] = column[i];
    }
  } else {
    std::ifstream in(dir / "raw.csv");
    if (!in) throw ConfigError("run directory has neither raw.f64 nor raw.csv: " + dir.string());
    std::string line;
    std::getline(in, line);
    for (std::size_t i = 0; i < ns; ++i) {
      if (!std::getline(in, line)) throw ConfigError("raw.csv: too few rows");
      std::istringstream row(line);
      std::string cell;
      for (std::size_t k = 0; k < nb; ++k) {
        if (!std::getline(row, cell, ',')) throw ConfigError("raw.csv: too few columns");
        raw.spectra[i * nb + k] = std::stod(cell);
      }
    }
  }

  const auto truth = read_json_file(dir / "truth.json");
  raw.truth.start_hz = truth.at("start_hz").get<double>();
  raw.truth.tone_hz = truth.at("tone_hz").get<std::vector<double>>();
  raw.truth.power_fraction = truth.at("power_fraction").get<double>();
  raw.truth.run_seed = truth.value("run_seed", std::uint64_t{0});
  if (raw.truth.tone_hz.size() != ns) throw ConfigError("truth.json: tone list length mismatch");
  return raw;
}

void write_pipeline_result(const fs::path& dir, const PipelineResult& r) {
  fs::create_directories(dir);
  auto out = open_out(dir / "grand.csv");
  out << "frequency_hz,excess_sigma,n_contrib\n";
  const auto& g = r.grand;
  for (std::size_t b = 0; b < g.size(); ++b) {
    if (!std::isfinite(g.excess_sigma[b])) continue;
    out << g.frequency_hz[b] << ',' << g.excess_sigma[b] << ',' << g.n_contrib[b] << '\n';
  }
  write_json_file(dir / "stage_stats.json", stats_json(r.stats));
}

void write_pipeline_dump(const fs::path& dir, const PipelineDump& d, std::size_t n_spectra) {
  fs::create_directories(dir);
  const std::size_t nb = d.mean_spectrum.size();
  if (!d.processed.empty() && nb > 0) {
    auto out = open_out(dir / "processed.csv");
    for (std::size_t k = 0; k < nb; ++k) out << (k ? "," : "") << d.profile.offset_hz(k);
    out << '\n';
    for (std::size_t i = 0; i < n_spectra; ++i) {
      for (std::size_t k = 0; k < nb; ++k) out << (k ? "," : "") << d.processed[i * nb + k];
      out << '\n';
    }
  }
  if (nb > 0) {
    std::vector<double> offsets(nb), keep(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      offsets[k] = d.profile.offset_hz(k);
      keep[k] = d.keep[k];
    }
    write_csv(dir / "stage_mean.csv", {"frequency_hz", "mean", "baseline", "keep", "visibility"},
              {offsets, d.mean_spectrum, d.baseline, keep, d.profile.values});
  }
  write_combined(dir / "stage_combined.csv", d.combined);
  write_combined(dir / "stage_rebinned.csv", d.rebinned);
}

}  // namespace ssr
