#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "isac/errors.hpp"

namespace isac {

// Ordered set of active chains, stored as strictly increasing 1-based indices
// into a universe of `universe_size` chains. Column selection by this set is
// the product M * S(set) with S the binary selection matrix.
class SelectionSet {
 public:
  SelectionSet() = default;

  SelectionSet(std::vector<std::size_t> indices, std::size_t universe_size)
      : indices_(std::move(indices)), universe_(universe_size) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      if (indices_[k] < 1 || indices_[k] > universe_)
        throw ModelError("SelectionSet: index " + std::to_string(indices_[k]) + " outside [1, " +
                         std::to_string(universe_) + "]");
      if (k > 0 && indices_[k] <= indices_[k - 1])
        throw ModelError("SelectionSet: indices must be strictly increasing");
    }
  }

  static SelectionSet full(std::size_t universe_size) {
    std::vector<std::size_t> idx(universe_size);
    std::iota(idx.begin(), idx.end(), std::size_t{1});
    return {std::move(idx), universe_size};
  }

  // From 0-based positions in any order; duplicates are rejected.
  static SelectionSet from_positions(std::vector<std::size_t> positions, std::size_t universe_size) {
    std::sort(positions.begin(), positions.end());
    for (auto& p : positions) ++p;
    return {std::move(positions), universe_size};
  }

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t universe_size() const { return universe_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool is_full() const { return indices_.size() == universe_; }

  bool contains(std::size_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
  }

  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> out(indices_);
    for (auto& p : out) --p;
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(indices_[k]);
    }
    return s + "}";
  }

  friend bool operator==(const SelectionSet&, const SelectionSet&) = default;

  friend std::ostream& operator<<(std::ostream& os, const SelectionSet& s) { return os << s.to_string(); }

 private:
  std::vector<std::size_t> indices_;
  std::size_t universe_ = 0;
};

}  // namespace isac
