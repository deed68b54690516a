#include "crossfire/dataset_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "crossfire/error.h"

namespace crossfire {

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double ParseDouble(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(std::string(context) + ": expected a number, got '" +
                     std::string(text) + "'");
  }
  return value;
}

long long ParseInt(std::string_view text, std::string_view context) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(std::string(context) + ": expected an integer, got '" +
                     std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> SplitCsvLine(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string DatasetCsvHeader(std::size_t n_links) {
  std::string header = "t";
  for (std::size_t i = 0; i < n_links; ++i) {
    header += ",link" + std::to_string(i) + "_flows,link" + std::to_string(i) + "_size";
  }
  return header + ",label";
}

void WriteDatasetCsv(std::ostream& out,
                     const std::vector<sim::TrafficSample>& samples) {
  const std::size_t n_links = samples.empty() ? 0 : samples.front().per_link.size();
  out << DatasetCsvHeader(n_links) << '\n';
  char tbuf[32];
  for (const sim::TrafficSample& s : samples) {
    std::snprintf(tbuf, sizeof(tbuf), "%.3f", s.timestamp);
    out << tbuf;
    for (const sim::LinkObservation& o : s.per_link) {
      out << ',' << o.flow_count << ',' << FormatDouble(o.aggregate_size);
    }
    out << ',' << (s.attack ? 1 : 0) << '\n';
  }
}

void SaveDataset(const std::filesystem::path& path,
                 const std::vector<sim::TrafficSample>& samples) {
  std::ostringstream out;
  WriteDatasetCsv(out, samples);
  WriteFileAtomically(path, out.str());
}

std::vector<sim::TrafficSample> ReadDatasetCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset line 1: missing header");
  const auto header = SplitCsvLine(line);
  if (header.size() < 2 || header.front() != "t" || header.back() != "label" ||
      (header.size() - 2) % 2 != 0) {
    throw ParseError("dataset line 1: malformed header");
  }
  const std::size_t n_links = (header.size() - 2) / 2;
  if (line != DatasetCsvHeader(n_links)) {
    throw ParseError("dataset line 1: header columns out of order");
  }
  std::vector<sim::TrafficSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = "dataset line " + std::to_string(line_no);
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw ParseError(ctx + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    sim::TrafficSample s;
    s.timestamp = ParseDouble(fields[0], ctx);
    s.per_link.resize(n_links);
    for (std::size_t i = 0; i < n_links; ++i) {
      s.per_link[i].flow_count = static_cast<int>(ParseInt(fields[1 + 2 * i], ctx));
      s.per_link[i].aggregate_size = ParseDouble(fields[2 + 2 * i], ctx);
      if (s.per_link[i].flow_count < 0 || s.per_link[i].aggregate_size < 0.0) {
        throw ParseError(ctx + ": negative link feature");
      }
    }
    const long long label = ParseInt(fields.back(), ctx);
    if (label != 0 && label != 1) throw ParseError(ctx + ": label must be 0 or 1");
    s.attack = label == 1;
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<sim::TrafficSample> LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  return ReadDatasetCsv(in);
}

}  // namespace crossfire
