#include "discbench/bench.hpp"
#include "discbench/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace discbench {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string format_record(const TrialRecord& r) {
  std::ostringstream os;
  os << quote(r.method) << ',' << quote(r.backbone) << ',' << quote(r.dataset) << ',' << r.seed << ','
     << fixed6(r.fraction) << ',' << r.out_dim << ',' << fixed6(r.accuracy) << ',' << fixed6(r.fit_seconds) << ','
     << fixed6(r.train_seconds) << ',' << fixed6(r.total_seconds) << ',' << quote(r.status);
  return os.str();
}

void append_results(const std::filesystem::path& path, const std::vector<TrialRecord>& records) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  if (!fresh) {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != kResultsHeader)
      throw FormatError(path.string() + ": existing file does not carry the results header");
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open " + path.string() + " for appending");
  if (fresh) out << kResultsHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TrialRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw FormatError(path.string() + ": unexpected header '" + line + "'");

  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 11 fields, got " +
                        std::to_string(f.size()));
    try {
      TrialRecord r;
      r.method = f[0];
      r.backbone = f[1];
      r.dataset = f[2];
      r.seed = std::stoull(f[3]);
      r.fraction = std::stod(f[4]);
      r.out_dim = std::stoi(f[5]);
      r.accuracy = std::stod(f[6]);
      r.fit_seconds = std::stod(f[7]);
      r.train_seconds = std::stod(f[8]);
      r.total_seconds = std::stod(f[9]);
      r.status = f[10];
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed numeric field");
    }
  }
  return out;
}

}  // namespace discbench
