#pragma once

#include <filesystem>

#include "spikelasso/config.hpp"

namespace spikelasso {

// File-based pipeline stages. Every stage reads only files written by an
// earlier stage (never in-process state), so stages can be re-run in
// isolation. File names inside a run directory are fixed:
//   simulate: truth.json, adjacency.csv, traces.csv, spikes.csv,
//             resolved_config.json
//   detect:   raster_spikes.csv, raster_events.csv, raster_meta.json
//   infer:    ranked_<tag>.csv, path_<tag>.csv, fits_<tag>.json
//   baseline: ranked_xcorr.csv, xcorr_peaks.csv
//   evaluate: curves_<tag>.csv, summary_<tag>.json

void run_simulate_stage(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

void run_detect_stage(const PipelineConfig& cfg, const std::filesystem::path& in_dir,
                      const std::filesystem::path& out_dir);

void run_infer_stage(const PipelineConfig& cfg, const std::filesystem::path& in_dir,
                     const std::filesystem::path& out_dir);

void run_baseline_stage(const PipelineConfig& cfg, const std::filesystem::path& in_dir,
                        const std::filesystem::path& out_dir);

void run_evaluate_stage(const PipelineConfig& cfg,
                        const std::filesystem::path& ranked_csv,
                        const std::filesystem::path& truth_json,
                        const std::filesystem::path& out_dir, const std::string& tag);

/// All stages in order; evaluates both the lasso ranking (under
/// cfg.method_tag) and the cross-correlation baseline.
void run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

} // namespace spikelasso
