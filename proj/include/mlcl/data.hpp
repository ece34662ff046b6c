#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mlcl/labels.hpp"
#include "mlcl/matrix.hpp"
#include "mlcl/rng.hpp"

namespace mlcl {

// ============================================================================
// Synthetic datasets, feature-space augmentation, CSV interchange
// ============================================================================

struct DatasetMeta {
  std::string kind;  // "hierarchical" | "multilabel" | "csv"
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
};

struct Dataset {
  Matrix features;  // n x D
  std::vector<MultiLevelLabel> labels;
  DatasetMeta meta;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  void validate() const;
};

// Two-level Gaussian hierarchy: superclass centers, subclass centers around
// them, samples around those. Labels are (subclass, superclass); every
// subclass belongs to exactly one superclass. Spreads default to an easy
// superclass / hard subclass regime.
struct HierarchicalSpec {
  std::size_t superclasses = 4;
  std::size_t subclasses_per_super = 5;
  std::size_t per_class = 25;
  std::size_t dim = 16;
  double super_scale = 10.0;
  double sub_scale = 3.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 1;
  // 0 derives the superclass-center stream from seed; pin it explicitly to
  // build transfer pairs that share superclusters but resample subclasses.
  std::uint64_t super_seed = 0;
};
Dataset gen_hierarchical(const HierarchicalSpec& spec);

// Multi-label data with ordinal classes: each sample's feature vector sums
// class_index * direction per level plus noise, so high Jaccard similarity
// means geometric proximity. Labels are drawn uniformly per level.
struct MultilabelSpec {
  std::size_t n_levels = 7;
  std::size_t classes_per_level = 3;
  std::size_t n_samples = 500;
  std::size_t dim = 16;
  double noise_scale = 0.5;
  std::uint64_t seed = 1;
};
Dataset gen_multilabel(const MultilabelSpec& spec);

// One stochastic view of a feature vector: isotropic Gaussian noise, then
// independent coordinate dropout. Draw order is fixed (all noise draws, then
// all dropout draws).
std::vector<double> augment(const double* x, std::size_t dim, double noise_scale,
                            double dropout_prob, Rng& rng);

// CSV schema: header f_0..f_{D-1},level_0..level_{L-1}; features round-trip
// through 17 significant digits, labels are integer class indices. Loading
// infers per-level cardinalities as max index + 1 (floored at 2).
Dataset load_csv(const std::string& path);
void write_csv(const Dataset& ds, const std::string& path);

// Row selection / deterministic splits used by the experiment drivers.
Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows);
std::pair<Dataset, Dataset> split_at(const Dataset& ds, std::size_t first_count);
// Per class at the given level, the first `per_class_first` rows (in dataset
// order) go left, the rest right.
std::pair<Dataset, Dataset> split_per_class(const Dataset& ds, std::size_t level,
                                            std::size_t per_class_first);

}  // namespace mlcl
