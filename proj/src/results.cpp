#include "tensorchan/results.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw IoError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw IoError("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string_view to_string(ResultFormat f) { return f == ResultFormat::kCsv ? "csv" : "json"; }

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::kCsv;
  if (name == "json") return ResultFormat::kJson;
  throw ContractError("unknown format '" + std::string(name) + "' (valid: csv, json)");
}

std::string format_csv(const std::vector<RunRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.estimator + ',' + fmt_double(r.pilot_ratio) + ',' + fmt_double(r.snr_db) + ',' +
           std::to_string(r.n_paths) + ',' + std::to_string(r.run_index) + ',' + fmt_double(r.nmse) + ',' +
           fmt_double(r.nmse_db) + ',' + std::to_string(r.iterations) + ',' + fmt_double(r.wall_time_s) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

std::vector<RunRecord> parse_csv(std::string_view text) {
  std::vector<RunRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw IoError("csv: missing or unexpected header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) throw IoError("csv line " + std::to_string(lineno) + ": expected 10 fields");
    RunRecord r;
    r.estimator = f[0];
    r.pilot_ratio = parse_double(f[1], lineno);
    r.snr_db = parse_double(f[2], lineno);
    r.n_paths = parse_u64(f[3], lineno);
    r.run_index = static_cast<int>(parse_u64(f[4], lineno));
    r.nmse = parse_double(f[5], lineno);
    r.nmse_db = parse_double(f[6], lineno);
    r.iterations = static_cast<int>(parse_u64(f[7], lineno));
    r.wall_time_s = parse_double(f[8], lineno);
    r.seed = parse_u64(f[9], lineno);
    records.push_back(std::move(r));
  }
  return records;
}

std::string format_json(const std::vector<RunRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json j;
    j["estimator"] = r.estimator;
    j["pilot_ratio"] = r.pilot_ratio;
    j["snr_db"] = number_or_null(r.snr_db);
    j["n_paths"] = r.n_paths;
    j["run_index"] = r.run_index;
    j["nmse"] = number_or_null(r.nmse);
    j["nmse_db"] = number_or_null(r.nmse_db);
    j["iterations"] = r.iterations;
    j["wall_time_s"] = r.wall_time_s;
    j["seed"] = r.seed;
    j["observation_hash"] = r.observation_hash;
    j["failed"] = r.failed;
    j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + '\n';
}

std::vector<RunRecord> parse_json(std::string_view text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("json: ") + e.what());
  }
  if (!arr.is_array()) throw IoError("json: expected an array of records");
  std::vector<RunRecord> records;
  try {
    for (const auto& j : arr) {
      RunRecord r;
      r.estimator = j.at("estimator").get<std::string>();
      r.pilot_ratio = j.at("pilot_ratio").get<double>();
      r.snr_db = j.at("snr_db").is_null() ? std::numeric_limits<double>::infinity() : j.at("snr_db").get<double>();
      r.n_paths = j.at("n_paths").get<std::size_t>();
      r.run_index = j.at("run_index").get<int>();
      r.nmse = number_from(j.at("nmse"));
      r.nmse_db = number_from(j.at("nmse_db"));
      r.iterations = j.at("iterations").get<int>();
      r.wall_time_s = j.at("wall_time_s").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.observation_hash = j.value("observation_hash", std::uint64_t{0});
      r.failed = j.value("failed", false);
      r.error = j.value("error", std::string());
      records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("json: ") + e.what());
  }
  return records;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_results(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                   ResultFormat format) {
  write_text(path, format == ResultFormat::kCsv ? format_csv(records) : format_json(records));
}

std::vector<RunRecord> read_results(const std::filesystem::path& path, ResultFormat format) {
  const std::string text = read_text(path);
  try {
    return format == ResultFormat::kCsv ? parse_csv(text) : parse_json(text);
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()) + " (" + path.string() + ")");
  }
}

std::string format_curves_csv(const std::vector<CurvePoint>& curves) {
  std::string out = "estimator,n_paths,snr_db,pilot_ratio,mean_nmse,mean_nmse_db,runs,failures\n";
  for (const auto& c : curves) {
    out += c.estimator + ',' + std::to_string(c.n_paths) + ',' + fmt_double(c.snr_db) + ',' +
           fmt_double(c.pilot_ratio) + ',' + fmt_double(c.mean_nmse) + ',' + fmt_double(c.mean_nmse_db) + ',' +
           std::to_string(c.runs) + ',' + std::to_string(c.failures) + '\n';
  }
  return out;
}

std::string format_thresholds_csv(const std::vector<ThresholdRecord>& thresholds) {
  std::string out = "snr_db,n_paths,rho_min,omega_min,oversampling,dof_cp,dof_tucker\n";
  for (const auto& t : thresholds) {
    out += fmt_double(t.snr_db) + ',' + std::to_string(t.n_paths) + ',' +
           (t.rho_min ? fmt_double(*t.rho_min) : "not_reached") + ',' +
           (t.omega_min ? std::to_string(*t.omega_min) : "") + ',' +
           (t.oversampling ? fmt_double(*t.oversampling) : "") + ',' + std::to_string(t.dof_cp) + ',' +
           std::to_string(t.dof_tucker) + '\n';
  }
  return out;
}

}  // namespace tensorchan
