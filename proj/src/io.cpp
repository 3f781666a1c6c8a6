#include "qcdiff/io.hpp"

#include <cstdio>
#include <sstream>

namespace qcdiff {

namespace fs = std::filesystem;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

const json& field(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing field '" + key + "'");
  return j.at(key);
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("field '" + key + "' must be finite");
  return x;
}

cplx as_complex(const json& v, const std::string& key) {
  if (v.is_array() && v.size() == 2) return {as_double(v[0], key), as_double(v[1], key)};
  return {as_double(v, key), 0.0};
}

// constructors report bad parameters as ParameterError; in a config that is a
// configuration problem
template <class F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

double get_double(const json& j, const std::string& key) { return as_double(field(j, key), key); }

double get_double(const json& j, const std::string& key, double fallback) {
  return j.is_object() && j.contains(key) ? as_double(j.at(key), key) : fallback;
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError("field '" + key + "' must be an integer");
  return v.get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError("field '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<double> get_doubles(const json& j, const std::string& key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw ConfigError("field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(x, key));
  return out;
}

// ---------------------------------------------------------------------------

CutProjectScheme scheme_from_json(const json& j, const fs::path& base) {
  if (j.is_string()) {
    const fs::path p = base / j.get<std::string>();
    return scheme_from_json(read_json_file(p), p.parent_path());
  }
  if (!j.is_object()) throw ConfigError("scheme must be an object or a file name");
  const std::string preset = get_string(j, "preset", "");
  return guarded("scheme", [&] {
    if (preset == "golden") return CutProjectScheme::golden();
    const int d = get_int(j, "d", -1), m = get_int(j, "m", -1);
    if (d < 0 || m < 0) throw ConfigError("scheme needs integer fields d and m");
    if (preset == "integer") return CutProjectScheme::integer(d, m);
    if (!preset.empty()) throw ConfigError("unknown scheme preset '" + preset + "'");
    const auto& rows = field(j, "basis");
    const int n = d + m;
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
      throw ConfigError("basis must have d+m rows");
    Mat b(n, n);
    for (int r = 0; r < n; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
        throw ConfigError("basis rows must have d+m entries");
      for (int c = 0; c < n; ++c) b(r, c) = as_double(rows[r][c], "basis");
    }
    return CutProjectScheme(d, m, b);
  });
}

json scheme_to_json(const CutProjectScheme& s) {
  auto rows = [](const Mat& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      out.push_back(row);
    }
    return out;
  };
  return json{{"d", s.physical_dim()}, {"m", s.internal_dim()}, {"basis", rows(s.basis())},
              {"dual_basis", rows(s.dual_basis())}, {"density", s.density()}};
}

Profile profile_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("profile must be an object");
  const std::string kind = get_string(j, "kind", "");
  return guarded("profile", [&] {
    Profile p = [&] {
      if (kind == "gaussian") return Profile::gaussian(get_double(j, "sigma"));
      if (kind == "triangle") return Profile::triangle(get_double(j, "half_width"));
      if (kind == "bspline") return Profile::bspline(get_int(j, "order", -1), get_double(j, "width"));
      if (kind == "indicator") return Profile::indicator(get_double(j, "lo"), get_double(j, "hi"));
      if (kind == "hermite_gaussian") return Profile::hermite_gaussian(get_double(j, "sigma"));
      throw ConfigError("unknown profile kind '" + kind + "'");
    }();
    if (j.contains("center")) p = p.shifted(get_double(j, "center"));
    if (j.contains("modulation")) p = p.modulated(get_double(j, "modulation"));
    if (j.contains("amplitude")) p = p.times(as_complex(j.at("amplitude"), "amplitude"));
    return p;
  });
}

WeightFunction weight_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("weight must be an object");
  if (get_string(j, "kind", "") == "constant")
    return WeightFunction::constant(j.contains("value") ? as_complex(j.at("value"), "value") : cplx(1.0));
  if (j.contains("factors")) {
    const auto& f = j.at("factors");
    if (!f.is_array()) throw ConfigError("factors must be an array");
    std::vector<Profile> ps;
    for (const auto& x : f) ps.push_back(profile_from_json(x));
    const cplx a = j.contains("amplitude") ? as_complex(j.at("amplitude"), "amplitude") : cplx(1.0);
    return guarded("weight", [&] { return WeightFunction(std::move(ps), a); });
  }
  return WeightFunction::of(profile_from_json(j));
}

Box box_from_json(const json& j) {
  return guarded("box", [&] {
    if (j.is_array() && j.size() == 2 && j[0].is_number()) return Box::interval(as_double(j[0], "box"), as_double(j[1], "box"));
    if (j.is_object() && j.contains("lo")) {
      const auto lo = get_doubles(j, "lo"), hi = get_doubles(j, "hi");
      if (lo.size() != hi.size()) throw ConfigError("box bounds differ in dimension");
      return Box::from_bounds(Eigen::Map<const Vec>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                              Eigen::Map<const Vec>(hi.data(), static_cast<Eigen::Index>(hi.size())));
    }
    const auto c = get_doubles(j, "center"), r = get_doubles(j, "half_widths");
    if (c.size() != r.size()) throw ConfigError("box center and half widths differ in dimension");
    return Box(Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size())),
               Eigen::Map<const Vec>(r.data(), static_cast<Eigen::Index>(r.size())));
  });
}

VanHoveSequence sequence_from_json(int dim, const json& j, int max_n_override) {
  return guarded("sequence", [&] {
    std::vector<double> widths;
    if (j.is_object() && j.contains("half_widths")) {
      widths = get_doubles(j, "half_widths");
    } else {
      const std::string growth = get_string(j, "growth", "arithmetic");
      const double l0 = get_double(j, "L0", 10.0);
      const int max_n = get_int(j, "max_n", 100);
      if (max_n < 1) throw ConfigError("max_n must be >= 1");
      if (growth == "arithmetic")
        widths = VanHoveSequence::arithmetic(dim, l0, max_n).half_widths();
      else if (growth == "geometric")
        widths = VanHoveSequence::geometric(dim, l0, get_double(j, "ratio", 2.0), max_n).half_widths();
      else
        throw ConfigError("unknown growth '" + growth + "'");
    }
    if (max_n_override > 0 && static_cast<std::size_t>(max_n_override) < widths.size())
      widths.resize(static_cast<std::size_t>(max_n_override));
    return VanHoveSequence(dim, std::move(widths));
  });
}

// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
  if (!out_) throw Error("cannot write " + path.string());
  for (const auto& h : header) *this << h;
  end_row();
}

void CsvWriter::separator() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::operator<<(double x) {
  separator();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  separator();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_comb_csv(const fs::path& path, const WeightedComb& c) {
  std::vector<std::string> header;
  for (int k = 0; k < c.dim(); ++k) header.push_back("x" + std::to_string(k));
  header.insert(header.end(), {"re_weight", "im_weight"});
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int k = 0; k < c.dim(); ++k) w << c.points()[i][k];
    w << c.weights()[i].real() << c.weights()[i].imag();
    w.end_row();
  }
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (header && !numeric) {
      header = false;
      continue;
    }
    header = false;
    if (!numeric || row.size() != columns) throw ConfigError("malformed row in " + path.string() + ": " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

WeightedComb read_comb_csv(const fs::path& path, int dim, const Box& window) {
  const auto rows = read_numeric_csv(path, static_cast<std::size_t>(dim) + 2);
  std::vector<Vec> pts;
  std::vector<cplx> w;
  for (const auto& r : rows) {
    pts.push_back(Eigen::Map<const Vec>(r.data(), dim));
    w.emplace_back(r[static_cast<std::size_t>(dim)], r[static_cast<std::size_t>(dim) + 1]);
  }
  return guarded("comb", [&] { return WeightedComb(std::move(pts), std::move(w), window); });
}

void write_peaks_csv(const fs::path& path, const PeakList& peaks) {
  const int d = peaks.peaks.empty() ? 1 : static_cast<int>(peaks.peaks.front().frequency.size());
  std::vector<std::string> header;
  for (int k = 0; k < d; ++k) header.push_back("freq" + std::to_string(k));
  header.insert(header.end(), {"intensity", "re_amplitude", "im_amplitude"});
  CsvWriter w(path, header);
  for (const auto& p : peaks.peaks) {
    for (int k = 0; k < d; ++k) w << p.frequency[k];
    w << p.intensity << p.amplitude.real() << p.amplitude.imag();
    w.end_row();
  }
}

void write_function_csv(const fs::path& path, const SampledFunction& f) {
  if (f.dim() != 1) throw ParameterError("function CSV is one-dimensional");
  CsvWriter w(path, {"s", "re", "im"});
  for (int i = 0; i < f.grid().count[0]; ++i) {
    w << f.grid().node_1d(i) << f.values()[static_cast<std::size_t>(i)].real()
      << f.values()[static_cast<std::size_t>(i)].imag();
    w.end_row();
  }
}

SampledFunction read_function_csv(const fs::path& path) {
  const auto rows = read_numeric_csv(path, 3);
  if (rows.size() < 2) throw ConfigError("function CSV needs at least two rows");
  const double h = (rows.back()[0] - rows.front()[0]) / static_cast<double>(rows.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::abs(rows[i][0] - (rows.front()[0] + h * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(h) * i))
      throw ConfigError("function CSV must be uniformly spaced");
  std::vector<cplx> v;
  for (const auto& r : rows) v.emplace_back(r[1], r[2]);
  return guarded("function", [&] {
    return SampledFunction(Grid::uniform(rows.front()[0], rows.back()[0], static_cast<int>(rows.size())), std::move(v));
  });
}

}  // namespace qcdiff
