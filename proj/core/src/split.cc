#include "crossfire/split.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "crossfire/error.h"
#include "crossfire/rng.h"

namespace crossfire::eval {

Split StratifiedSplit(const std::vector<bool>& labels, double train_fraction,
                      std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> classes[2];
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i] ? 1 : 0].push_back(i);
  Split split;
  Rng rng(MixSeed(seed, 0x5b117));
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t>& members = classes[c];
    if (members.size() < 2) {
      throw ConfigError(std::string("stratified split: the ") +
                        (c ? "attack" : "normal") + " class has " +
                        std::to_string(members.size()) + " windows, need >= 2");
    }
    Shuffle(members, rng);
    // Both sides keep at least one member of every class.
    const auto n_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(
            std::llround(static_cast<double>(members.size()) * train_fraction)),
        1, members.size() - 1);
    split.train.insert(split.train.end(), members.begin(), members.begin() + n_train);
    split.test.insert(split.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace crossfire::eval
