#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csamr/features.hpp"
#include "csamr/npt.hpp"
#include "csamr/types.hpp"

namespace csamr::io {

// Record files: one JSON header line (params, modulation, achieved SNR,
// length) followed by little-endian interleaved (re, im) float64 samples.

void write_record(const std::filesystem::path& path,
                  const BasebandRecord& record);
BasebandRecord read_record(const std::filesystem::path& path);

// Spectrum CSV: header "bin,freq_hz,re,im,mag" then one row per bin.

void write_spectrum_csv(const std::filesystem::path& path,
                        const SpectrumEstimate& spectrum);
SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path,
                                   int order = 0);

std::string peaks_to_json(const npt::PeakSet& peaks);

// Feature datasets: header "label,snr_db,seed_index,v0,..,v{3m-1}".

void write_features_csv(const std::filesystem::path& path,
                        const std::vector<features::FeatureVector>& rows);
std::vector<features::FeatureVector> read_features_csv(
    const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Deterministic shortest round-trip formatting for doubles.
std::string format_double(double v);

}  // namespace csamr::io
