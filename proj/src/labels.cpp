#include "mlcl/labels.hpp"

#include <algorithm>

#include "mlcl/common.hpp"

namespace mlcl {

void MultiLevelLabel::validate() const {
  MLCL_CHECK(!levels.empty(), "[MultiLevelLabel] label needs at least one level");
  MLCL_CHECK(levels.size() == cardinalities.size(),
             "[MultiLevelLabel] levels/cardinalities length mismatch: "
                 << levels.size() << " vs " << cardinalities.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    MLCL_CHECK(cardinalities[l] >= 2,
               "[MultiLevelLabel] cardinality at level " << l << " must be >= 2, got "
                                                         << cardinalities[l]);
    MLCL_CHECK(levels[l] >= 0 && levels[l] < cardinalities[l],
               "[MultiLevelLabel] class index " << levels[l] << " out of range at level " << l
                                                << " (cardinality " << cardinalities[l] << ")");
  }
}

namespace {

void check_consistent_shapes(const std::vector<MultiLevelLabel>& labels, const char* where) {
  MLCL_CHECK(!labels.empty(), "[" << where << "] empty label list");
  labels.front().validate();
  for (std::size_t k = 1; k < labels.size(); ++k) {
    labels[k].validate();
    MLCL_CHECK(labels[k].cardinalities == labels.front().cardinalities,
               "[" << where << "] sample " << k
                   << " has inconsistent level structure with sample 0");
  }
}

}  // namespace

void AugmentedBatchLabels::validate() const {
  MLCL_CHECK(labels.size() == 2 * n_samples,
             "[AugmentedBatchLabels] expected " << 2 * n_samples << " view labels, got "
                                                << labels.size());
  check_consistent_shapes(labels, "AugmentedBatchLabels");
  for (std::size_t k = 0; k < n_samples; ++k) {
    MLCL_CHECK(labels[2 * k] == labels[2 * k + 1],
               "[AugmentedBatchLabels] views of sample " << k << " carry different labels");
  }
}

std::size_t PositiveSet::positive_count(std::size_t i) const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < n; ++j) c += mask_data[i * n + j] != 0;
  return c;
}

void PositiveSet::validate() const {
  MLCL_CHECK(mask_data.size() == n * n, "[PositiveSet] mask size mismatch");
  if (weights_data) {
    MLCL_CHECK(weights_data->size() == n * n, "[PositiveSet] weights size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    MLCL_CHECK(!mask(i, i), "[PositiveSet] diagonal entry " << i << " must be false");
    for (std::size_t j = i + 1; j < n; ++j) {
      MLCL_CHECK(mask(i, j) == mask(j, i),
                 "[PositiveSet] mask not symmetric at (" << i << "," << j << ")");
      if (weights_data) {
        const double wij = weight(i, j);
        MLCL_CHECK(wij == weight(j, i),
                   "[PositiveSet] weights not symmetric at (" << i << "," << j << ")");
        MLCL_CHECK(wij >= 0.0 && wij <= 1.0,
                   "[PositiveSet] weight " << wij << " outside [0,1] at (" << i << "," << j
                                           << ")");
        MLCL_CHECK(!(wij > 0.0) || mask(i, j),
                   "[PositiveSet] nonzero weight on non-positive pair (" << i << "," << j << ")");
      }
    }
  }
}

AugmentedBatchLabels expand_to_views(const std::vector<MultiLevelLabel>& labels) {
  check_consistent_shapes(labels, "expand_to_views");
  AugmentedBatchLabels out;
  out.n_samples = labels.size();
  out.labels.reserve(2 * labels.size());
  for (const auto& lab : labels) {
    out.labels.push_back(lab);
    out.labels.push_back(lab);
  }
  return out;
}

PositiveSet level_positive_set(const std::vector<MultiLevelLabel>& view_labels,
                               std::size_t level) {
  check_consistent_shapes(view_labels, "level_positive_set");
  const std::size_t n = view_labels.size();
  MLCL_CHECK(level < view_labels.front().n_levels(),
             "[level_positive_set] level " << level << " out of range (L="
                                           << view_labels.front().n_levels() << ")");
  PositiveSet pos;
  pos.n = n;
  pos.mask_data.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int li = view_labels[i].levels[level];
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && view_labels[j].levels[level] == li) pos.mask_data[i * n + j] = 1;
    }
  }
  return pos;
}

PositiveSet level_positive_set(const AugmentedBatchLabels& batch, std::size_t level) {
  batch.validate();
  return level_positive_set(batch.labels, level);
}

double jaccard(const MultiLevelLabel& a, const MultiLevelLabel& b) {
  a.validate();
  b.validate();
  MLCL_CHECK(a.cardinalities == b.cardinalities,
             "[jaccard] labels have mismatched level structure");
  // Over concatenated one-hots an agreeing level contributes min 1 / max 1,
  // a disagreeing level min 0 / max 2.
  const std::size_t L = a.n_levels();
  std::size_t agree = 0;
  for (std::size_t l = 0; l < L; ++l) agree += a.levels[l] == b.levels[l];
  return static_cast<double>(agree) / static_cast<double>(2 * L - agree);
}

PositiveSet global_positive_set(const std::vector<MultiLevelLabel>& view_labels,
                                double threshold) {
  check_consistent_shapes(view_labels, "global_positive_set");
  MLCL_CHECK(threshold >= 0.0 && threshold < 1.0,
             "[global_positive_set] threshold " << threshold << " outside [0,1)");
  const std::size_t n = view_labels.size();
  PositiveSet pos;
  pos.n = n;
  pos.mask_data.assign(n * n, 0);
  pos.weights_data.emplace(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = jaccard(view_labels[i], view_labels[j]);
      if (s > threshold) {
        pos.mask_data[i * n + j] = pos.mask_data[j * n + i] = 1;
        (*pos.weights_data)[i * n + j] = (*pos.weights_data)[j * n + i] = s;
      }
    }
  }
  return pos;
}

PositiveSet global_positive_set(const AugmentedBatchLabels& batch, double threshold) {
  batch.validate();
  return global_positive_set(batch.labels, threshold);
}

std::vector<MultiLevelLabel> inject_label_noise(const std::vector<MultiLevelLabel>& labels,
                                                std::size_t level, double rate, Rng& rng) {
  check_consistent_shapes(labels, "inject_label_noise");
  MLCL_CHECK(rate >= 0.0 && rate <= 1.0, "[inject_label_noise] rate " << rate << " outside [0,1]");
  MLCL_CHECK(level < labels.front().n_levels(),
             "[inject_label_noise] level " << level << " out of range");
  const int n_classes = labels.front().cardinalities[level];
  std::vector<MultiLevelLabel> out = labels;
  // With probability rate the label is resampled uniformly over all classes,
  // which keeps it with probability 1 - rate*(N-1)/N and moves it to each
  // other class with probability rate/N.
  for (auto& lab : out) {
    if (rng.uniform() < rate) {
      lab.levels[level] = static_cast<int>(rng.uniform_index(n_classes));
    }
  }
  return out;
}

}  // namespace mlcl
