#pragma once

// JSON config parsing and CSV/JSON artifact writing.

#include "qcdiff/amalgam.hpp"
#include "qcdiff/combs.hpp"
#include "qcdiff/diffraction.hpp"
#include "qcdiff/lattice.hpp"
#include "qcdiff/modelset.hpp"

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace qcdiff {

using json = nlohmann::json;

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Reads and parses a JSON file; ConfigError on I/O or syntax problems.
json read_json_file(const std::filesystem::path& path);

/// Field access with ConfigError instead of type/lookup exceptions.
double get_double(const json& j, const std::string& key);
double get_double(const json& j, const std::string& key, double fallback);
int get_int(const json& j, const std::string& key, int fallback);
std::string get_string(const json& j, const std::string& key, const std::string& fallback);
bool get_bool(const json& j, const std::string& key, bool fallback);
std::vector<double> get_doubles(const json& j, const std::string& key);

/// {"d", "m", "basis": rows} or {"preset": "golden" | "integer", ...}. A
/// string is read as a path relative to `base`.
CutProjectScheme scheme_from_json(const json& j, const std::filesystem::path& base = {});
json scheme_to_json(const CutProjectScheme& s);

/// {"kind": "gaussian"|"triangle"|"bspline"|"indicator"|"hermite_gaussian", ...}
/// with optional "center", "modulation", "amplitude".
Profile profile_from_json(const json& j);
/// A profile object, {"kind": "constant", "value": a}, or {"factors": [...], "amplitude": a}.
WeightFunction weight_from_json(const json& j);

/// [lo, hi] for an interval or {"center": [...], "half_widths": [...]}.
Box box_from_json(const json& j);

/// {"growth": "arithmetic", "L0", "max_n"}, {"growth": "geometric", "L0",
/// "ratio", "max_n"} or {"half_widths": [...]}; max_n_override > 0 truncates.
VanHoveSequence sequence_from_json(int dim, const json& j, int max_n_override = 0);

/// 17 significant digits.
std::string format_double(double x);

void write_json(const std::filesystem::path& path, const json& j);
/// Rows coords..., re_weight, im_weight.
void write_comb_csv(const std::filesystem::path& path, const WeightedComb& c);
WeightedComb read_comb_csv(const std::filesystem::path& path, int dim, const Box& window);
/// Rows freq coords..., intensity (plus re/im amplitude columns).
void write_peaks_csv(const std::filesystem::path& path, const PeakList& peaks);
/// Rows s, re, im.
void write_function_csv(const std::filesystem::path& path, const SampledFunction& f);
/// Reads uniformly spaced (s, re, im) rows.
SampledFunction read_function_csv(const std::filesystem::path& path);

/// CSV writer with a fixed header; every value is written with format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(const std::string& s);
  void end_row();

 private:
  void separator();
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace qcdiff
