#ifndef CROSSFIRE_SPLIT_H
#define CROSSFIRE_SPLIT_H

#include <cstddef>
#include <cstdint>
#include <vector>

namespace crossfire::eval {

struct Split {
  std::vector<std::size_t> train;  // indices into the input, ascending
  std::vector<std::size_t> test;
};

// Seeded split preserving the attack/normal proportions: each class puts
// round(n_class * train_fraction) members into train. Throws ConfigError for
// a fraction outside (0, 1) or a class with fewer than two members.
Split StratifiedSplit(const std::vector<bool>& labels, double train_fraction,
                      std::uint64_t seed);

}  // namespace crossfire::eval

#endif  // CROSSFIRE_SPLIT_H
