#ifndef CROSSFIRE_MODEL_IO_H
#define CROSSFIRE_MODEL_IO_H

#include <filesystem>
#include <iosfwd>

#include "crossfire/detector.h"

namespace crossfire::detect {

// Line-oriented text format:
//   crossfire-model v1 <ann|cnn|lstm>
//   key=value ...                      (architecture hyperparameters)
//   norm <n> min,max min,max ...       (feature normalization)
//   <name> <d0xd1x...> v v v ...       (one line per parameter tensor)
// Values use shortest round-trip decimal text.
void WriteModel(std::ostream& out, const DetectorModel& model);
void SaveModel(const DetectorModel& model, const std::filesystem::path& path);

// Throws VersionError for an unsupported version and ParseError naming the
// offending line for anything malformed or truncated.
DetectorModel ReadModel(std::istream& in);
DetectorModel LoadModel(const std::filesystem::path& path);

}  // namespace crossfire::detect

#endif  // CROSSFIRE_MODEL_IO_H
