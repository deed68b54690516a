#ifndef CROSSFIRE_DATASET_IO_H
#define CROSSFIRE_DATASET_IO_H

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "crossfire/scenario.h"

namespace crossfire {

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);
// Strict full-string parse; throws ParseError with `context` on failure.
double ParseDouble(std::string_view text, std::string_view context);
long long ParseInt(std::string_view text, std::string_view context);

std::vector<std::string_view> SplitCsvLine(std::string_view line, char sep = ',');

// Writes `contents` to a temporary sibling and renames it over `path`.
void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& contents);

// Dataset CSV: header t,link0_flows,link0_size,...,label; t with three
// decimals, label 0/1, LF line endings.
std::string DatasetCsvHeader(std::size_t n_links);
void WriteDatasetCsv(std::ostream& out, const std::vector<sim::TrafficSample>& samples);
void SaveDataset(const std::filesystem::path& path,
                 const std::vector<sim::TrafficSample>& samples);

// Throws ParseError naming the line on malformed input.
std::vector<sim::TrafficSample> ReadDatasetCsv(std::istream& in);
std::vector<sim::TrafficSample> LoadDataset(const std::filesystem::path& path);

}  // namespace crossfire

#endif  // CROSSFIRE_DATASET_IO_H
