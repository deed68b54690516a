#include "crossfire/model_io.h"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "crossfire/dataset_io.h"
#include "crossfire/error.h"

namespace crossfire::detect {
namespace {

constexpr std::string_view kMagic = "crossfire-model";

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string Next(const std::string& expected) {
    std::string line;
    ++line_no_;
    if (!std::getline(in_, line)) {
      throw ParseError("model line " + std::to_string(line_no_) +
                       ": file truncated, expected " + expected);
    }
    // Every line the writer emits ends in a newline; a missing one means the
    // file was cut mid-line.
    if (in_.eof()) {
      throw ParseError("model line " + std::to_string(line_no_) +
                       ": file truncated inside " + expected);
    }
    return line;
  }
  std::string Where() const { return "model line " + std::to_string(line_no_); }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

std::vector<std::string> Words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

int IntField(const std::map<std::string, std::string>& kv, const std::string& key,
             const std::string& where) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(where + ": missing hyperparameter '" + key + "'");
  return static_cast<int>(ParseInt(it->second, where + " (" + key + ")"));
}

}  // namespace

void WriteModel(std::ostream& out, const DetectorModel& model) {
  out << kMagic << " v1 " << ArchName(model.arch()) << '\n';
  bool first = true;
  for (const auto& [key, value] : model.Hyperparameters()) {
    out << (first ? "" : " ") << key << '=' << value;
    first = false;
  }
  out << '\n';
  const Normalization& norm = model.normalization();
  out << "norm " << norm.min.size();
  for (std::size_t i = 0; i < norm.min.size(); ++i) {
    out << ' ' << FormatDouble(norm.min[i]) << ',' << FormatDouble(norm.max[i]);
  }
  out << '\n';
  const std::vector<std::string> names = model.ParameterNames();
  const std::vector<const nn::Tensor*> params = model.Parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    out << names[p] << ' ';
    const nn::Shape& shape = params[p]->shape();
    for (std::size_t d = 0; d < shape.size(); ++d) out << (d ? "x" : "") << shape[d];
    for (double v : params[p]->values()) out << ' ' << FormatDouble(v);
    out << '\n';
  }
}

void SaveModel(const DetectorModel& model, const std::filesystem::path& path) {
  std::ostringstream out;
  WriteModel(out, model);
  WriteFileAtomically(path, out.str());
}

DetectorModel ReadModel(std::istream& in) {
  LineReader reader(in);
  const std::vector<std::string> header = Words(reader.Next("header"));
  if (header.size() != 3 || header[0] != kMagic) {
    throw ParseError(reader.Where() + ": not a crossfire model header");
  }
  if (header[1] != "v1") {
    throw VersionError(reader.Where() + ": unsupported model version '" + header[1] + "'");
  }
  Arch arch;
  try {
    arch = ParseArch(header[2]);
  } catch (const ConfigError& e) {
    throw ParseError(reader.Where() + ": " + e.what());
  }

  std::map<std::string, std::string> kv;
  for (const std::string& w : Words(reader.Next("hyperparameters"))) {
    const auto eq = w.find('=');
    if (eq == std::string::npos) {
      throw ParseError(reader.Where() + ": expected key=value, got '" + w + "'");
    }
    kv[w.substr(0, eq)] = w.substr(eq + 1);
  }
  const std::string hp_where = reader.Where();
  DetectorOptions options;
  const int n_links = IntField(kv, "n_links", hp_where);
  if (kv.count("threshold")) {
    options.threshold = ParseDouble(kv["threshold"], hp_where + " (threshold)");
  }
  switch (arch) {
    case Arch::kAnn:
      options.ann.hidden = IntField(kv, "hidden", hp_where);
      options.ann.zero_pad = IntField(kv, "zero_pad", hp_where);
      break;
    case Arch::kCnn:
      options.cnn.window = IntField(kv, "window", hp_where);
      options.cnn.temporal_kernels = IntField(kv, "temporal_kernels", hp_where);
      options.cnn.temporal_width = IntField(kv, "temporal_width", hp_where);
      options.cnn.spatial_kernels = IntField(kv, "spatial_kernels", hp_where);
      options.cnn.spatial_rows = IntField(kv, "spatial_rows", hp_where);
      options.cnn.dense_units = IntField(kv, "dense_units", hp_where);
      break;
    case Arch::kLstm:
      options.lstm.window = IntField(kv, "window", hp_where);
      options.lstm.units = IntField(kv, "units", hp_where);
      options.lstm.layers = IntField(kv, "layers", hp_where);
      break;
  }
  if (n_links < 1) throw ParseError(hp_where + ": n_links must be >= 1");
  std::optional<DetectorModel> built;
  try {
    built.emplace(arch, static_cast<std::size_t>(n_links), options, 0);
  } catch (const ConfigError& e) {
    throw ParseError(hp_where + ": " + e.what());
  }
  DetectorModel& model = *built;

  const std::vector<std::string> norm_words = Words(reader.Next("normalization"));
  const std::string norm_where = reader.Where();
  const std::size_t n_features = 1 + 2 * static_cast<std::size_t>(n_links);
  if (norm_words.size() < 2 || norm_words[0] != "norm" ||
      ParseInt(norm_words[1], norm_where) != static_cast<long long>(n_features) ||
      norm_words.size() != 2 + n_features) {
    throw ParseError(norm_where + ": expected 'norm " + std::to_string(n_features) +
                     "' followed by " + std::to_string(n_features) + " min,max pairs");
  }
  Normalization norm;
  for (std::size_t i = 0; i < n_features; ++i) {
    const std::string& pair = norm_words[2 + i];
    const auto comma = pair.find(',');
    if (comma == std::string::npos) throw ParseError(norm_where + ": bad pair '" + pair + "'");
    norm.min.push_back(ParseDouble(std::string_view(pair).substr(0, comma), norm_where));
    norm.max.push_back(ParseDouble(std::string_view(pair).substr(comma + 1), norm_where));
  }
  model.set_normalization(std::move(norm));

  const std::vector<std::string> names = model.ParameterNames();
  std::vector<nn::Tensor*> params = model.Parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const std::vector<std::string> words = Words(reader.Next("parameter " + names[p]));
    const std::string where = reader.Where();
    if (words.size() < 2 || words[0] != names[p]) {
      throw ParseError(where + ": expected parameter '" + names[p] + "'");
    }
    nn::Shape shape;
    for (std::string_view rest = words[1];;) {
      const auto x = rest.find('x');
      shape.push_back(static_cast<std::size_t>(ParseInt(rest.substr(0, x), where)));
      if (x == std::string_view::npos) break;
      rest = rest.substr(x + 1);
    }
    if (shape != params[p]->shape()) {
      throw ParseError(where + ": parameter '" + names[p] + "' has shape " +
                       nn::ShapeToString(shape) + ", architecture needs " +
                       nn::ShapeToString(params[p]->shape()));
    }
    if (words.size() != 2 + params[p]->size()) {
      throw ParseError(where + ": parameter '" + names[p] + "' has " +
                       std::to_string(words.size() - 2) + " values, expected " +
                       std::to_string(params[p]->size()));
    }
    for (std::size_t i = 0; i < params[p]->size(); ++i) {
      (*params[p])[i] = ParseDouble(words[2 + i], where);
    }
  }
  return std::move(*built);
}

DetectorModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model " + path.string());
  return ReadModel(in);
}

}  // namespace crossfire::detect
