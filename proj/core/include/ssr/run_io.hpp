#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ssr/pipeline.hpp"
#include "ssr/synth.hpp"

namespace ssr {

enum class RawFormat { kCsv, kBinary, kBoth };

/// Writes raw.csv (rows = spectra, header = bin frequencies in Hz),
/// raw.f64 (little-endian float64, column-major: all spectra of bin 0 first)
/// with raw.f64.json, truth.json and config.json.
void write_run(const std::filesystem::path& dir, const RawSpectrumSet& raw,
               RawFormat format = RawFormat::kBoth);

/// Reads a run directory written by write_run, preferring raw.f64.
RawSpectrumSet read_run(const std::filesystem::path& dir);

/// Writes grand.csv (frequency_hz, excess_sigma, n_contrib) and
/// stage_stats.json.
void write_pipeline_result(const std::filesystem::path& dir, const PipelineResult& r);

/// processed.csv plus, for dumps, mean/baseline/mask, profile, combined and
/// rebinned stage files.
void write_pipeline_dump(const std::filesystem::path& dir, const PipelineDump& d,
                         std::size_t n_spectra);

/// Column-oriented CSV writer with full double precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::span<const double>>& columns);

}  // namespace ssr
