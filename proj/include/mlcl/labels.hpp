#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mlcl/rng.hpp"

namespace mlcl {

// ============================================================================
// Multi-level labels and positive-set construction
// ============================================================================

// One sample's label vector across L levels. For hierarchical data the levels
// are hierarchy levels (level 0 = finest); for multi-label data each level is
// one aspect. cardinalities[l] is the class count at level l.
struct MultiLevelLabel {
  std::vector<int> levels;
  std::vector<int> cardinalities;

  std::size_t n_levels() const { return levels.size(); }
  void validate() const;

  bool operator==(const MultiLevelLabel& other) const = default;
};

// Labels for an augmented batch of 2N views. Views of source sample k sit at
// slots 2k and 2k+1 (0-indexed) and carry identical labels.
struct AugmentedBatchLabels {
  std::vector<MultiLevelLabel> labels;
  std::size_t n_samples = 0;

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

// Positive-pair structure over a batch of n views: mask(i, j) is true iff
// j is a positive for anchor i. weights carries the Jaccard similarity
// s_{i,j} for the global head and is absent for level heads.
struct PositiveSet {
  std::size_t n = 0;
  std::vector<std::uint8_t> mask_data;
  std::optional<std::vector<double>> weights_data;

  bool mask(std::size_t i, std::size_t j) const { return mask_data[i * n + j] != 0; }
  double weight(std::size_t i, std::size_t j) const { return (*weights_data)[i * n + j]; }
  bool has_weights() const { return weights_data.has_value(); }

  std::size_t positive_count(std::size_t i) const;
  void validate() const;
};

// Duplicates each label so both augmented views of a sample share it.
AugmentedBatchLabels expand_to_views(const std::vector<MultiLevelLabel>& labels);

// Positives are pairs agreeing on the given level's label. The plain-vector
// overloads serve batches that are not view-expanded (single-view training).
PositiveSet level_positive_set(const AugmentedBatchLabels& batch, std::size_t level);
PositiveSet level_positive_set(const std::vector<MultiLevelLabel>& view_labels,
                               std::size_t level);

// Jaccard similarity of two label vectors over concatenated per-level one-hot
// encodings: sum(min) / sum(max) = agreements / (2L - agreements).
double jaccard(const MultiLevelLabel& a, const MultiLevelLabel& b);

// Positives are pairs with Jaccard similarity strictly above the threshold;
// weights carry the similarity values.
PositiveSet global_positive_set(const AugmentedBatchLabels& batch, double threshold);
PositiveSet global_positive_set(const std::vector<MultiLevelLabel>& view_labels,
                                double threshold);

// Uniform label noise at one level: each label independently kept with
// probability 1 - rate*(N-1)/N and switched to each other class with
// probability rate/N. Applied before view expansion so paired views agree.
std::vector<MultiLevelLabel> inject_label_noise(const std::vector<MultiLevelLabel>& labels,
                                                std::size_t level, double rate, Rng& rng);

}  // namespace mlcl
