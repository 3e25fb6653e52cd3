#include "csamr/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csamr::io {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "record files are little-endian; big-endian hosts need swaps");

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

json snr_to_json(double v) {
  if (std::isinf(v) && v > 0) return nullptr;
  return v;
}

double snr_from_json(const json& j) {
  if (j.is_null()) return kNoiseless;
  return j.get<double>();
}

}  // namespace

void write_record(const std::filesystem::path& path,
                  const BasebandRecord& record) {
  json h;
  h["format"] = "csamr-record";
  h["version"] = 1;
  h["modulation"] = to_string(record.modulation);
  h["fc_hz"] = record.params.fc_hz;
  h["rs_hz"] = record.params.rs_hz;
  h["fs_hz"] = record.params.fs_hz;
  h["alpha"] = record.params.alpha;
  h["n_symbols"] = record.params.n_symbols;
  h["amplitude"] = record.params.amplitude;
  h["snr_db"] = snr_to_json(record.params.snr_db);
  h["seed"] = record.params.seed;
  h["achieved_snr_db"] = snr_to_json(record.achieved_snr_db);
  h["length"] = record.samples.size();

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());
  f << h.dump() << "\n";
  for (const cplx& v : record.samples) {
    const double re = v.real(), im = v.imag();
    f.write(reinterpret_cast<const char*>(&re), sizeof(double));
    f.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

BasebandRecord read_record(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string header;
  if (!std::getline(f, header)) {
    throw std::runtime_error("missing record header: " + path.string());
  }
  const json h = json::parse(header);
  if (h.at("format").get<std::string>() != "csamr-record") {
    throw std::runtime_error("not a record file: " + path.string());
  }
  BasebandRecord rec;
  rec.modulation = modulation_from_string(h.at("modulation"));
  rec.params.fc_hz = h.at("fc_hz").get<double>();
  rec.params.rs_hz = h.at("rs_hz").get<double>();
  rec.params.fs_hz = h.at("fs_hz").get<double>();
  rec.params.alpha = h.at("alpha").get<double>();
  rec.params.n_symbols = h.at("n_symbols").get<int>();
  rec.params.amplitude = h.at("amplitude").get<double>();
  rec.params.snr_db = snr_from_json(h.at("snr_db"));
  rec.params.seed = h.at("seed").get<std::uint64_t>();
  rec.achieved_snr_db = snr_from_json(h.at("achieved_snr_db"));
  const std::size_t n = h.at("length").get<std::size_t>();
  rec.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double re, im;
    f.read(reinterpret_cast<char*>(&re), sizeof(double));
    f.read(reinterpret_cast<char*>(&im), sizeof(double));
    if (!f) throw std::runtime_error("truncated record: " + path.string());
    rec.samples[i] = cplx(re, im);
  }
  return rec;
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const SpectrumEstimate& spectrum) {
  std::ostringstream ss;
  ss << "bin,freq_hz,re,im,mag\n";
  for (std::size_t k = 0; k < spectrum.coeffs.size(); ++k) {
    const cplx& v = spectrum.coeffs[k];
    ss << k << ',' << format_double(spectrum.freq_of_bin(k)) << ','
       << format_double(v.real()) << ',' << format_double(v.imag()) << ','
       << format_double(std::abs(v)) << '\n';
  }
  write_text(path, ss.str());
}

SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path,
                                   int order) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line)) {
    throw std::runtime_error("empty spectrum csv: " + path.string());
  }
  SpectrumEstimate est;
  est.order = order;
  double max_freq = 0.0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    double fields[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ls, tok, ',')) {
        throw std::runtime_error("bad spectrum row: " + line);
      }
      fields[i] = std::stod(tok);
    }
    est.coeffs.emplace_back(fields[2], fields[3]);
    max_freq = fields[1];
  }
  if (est.coeffs.size() > 1) {
    // header stores freq = k*fs/L; recover fs from the last row
    est.fs_hz = max_freq * static_cast<double>(est.coeffs.size()) /
                static_cast<double>(est.coeffs.size() - 1);
  }
  return est;
}

std::string peaks_to_json(const npt::PeakSet& peaks) {
  json j;
  j["eta"] = peaks.eta;
  j["threshold"] = peaks.threshold;
  j["count"] = peaks.peaks.size();
  j["peaks"] = json::array();
  for (const npt::Peak& p : peaks.peaks) {
    j["peaks"].push_back(
        {{"freq_hz", p.freq_hz}, {"bin", p.bin}, {"magnitude", p.magnitude}});
  }
  return j.dump(2);
}

void write_features_csv(const std::filesystem::path& path,
                        const std::vector<features::FeatureVector>& rows) {
  std::ostringstream ss;
  const std::size_t dim = rows.empty() ? 0 : rows.front().values.size();
  ss << "label,snr_db,seed_index";
  for (std::size_t i = 0; i < dim; ++i) ss << ",v" << i;
  ss << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ss << (row.label ? to_string(*row.label) : std::string("?")) << ','
       << format_double(row.snr_db) << ',' << r;
    for (double v : row.values) ss << ',' << format_double(v);
    ss << '\n';
  }
  write_text(path, ss.str());
}

std::vector<features::FeatureVector> read_features_csv(
    const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line)) {
    throw std::runtime_error("empty features csv: " + path.string());
  }
  std::vector<features::FeatureVector> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    features::FeatureVector fv;
    std::getline(ls, tok, ',');
    if (tok != "?") fv.label = modulation_from_string(tok);
    std::getline(ls, tok, ',');
    fv.snr_db = std::stod(tok);
    std::getline(ls, tok, ',');  // seed index, positional
    while (std::getline(ls, tok, ',')) fv.values.push_back(std::stod(tok));
    if (fv.values.size() % 3 != 0) {
      throw std::runtime_error("feature row length is not 3m");
    }
    fv.m = static_cast<int>(fv.values.size() / 3);
    rows.push_back(std::move(fv));
  }
  return rows;
}

}  // namespace csamr::io
