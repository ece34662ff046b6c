#include "mlcl/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlcl/common.hpp"

namespace mlcl {

namespace {

// Stream tags for derived RNG streams. Each generated row r draws from
// Rng(mix(mix(seed, tag), r)), so row content is independent of generation
// order and rows may be produced in parallel.
constexpr std::uint64_t kSuperCenterStream = 0x11;
constexpr std::uint64_t kSubCenterStream = 0x22;
constexpr std::uint64_t kRowStream = 0x33;
constexpr std::uint64_t kDirectionStream = 0x44;

std::vector<double> draw_normal_vec(Rng& rng, std::size_t dim, double scale) {
  std::vector<double> v(dim);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace

void Dataset::validate() const {
  MLCL_CHECK(features.rows() == labels.size(),
             "[Dataset] " << features.rows() << " feature rows vs " << labels.size()
                          << " labels");
  MLCL_CHECK(features.all_finite(), "[Dataset] non-finite feature values");
  for (const auto& lab : labels) lab.validate();
}

Dataset gen_hierarchical(const HierarchicalSpec& spec) {
  const std::size_t n_sub = spec.superclasses * spec.subclasses_per_super;
  MLCL_CHECK(n_sub >= 2, "[gen_hierarchical] need at least 2 subclasses total, got " << n_sub);
  MLCL_CHECK(spec.dim >= 2, "[gen_hierarchical] dim must be >= 2, got " << spec.dim);
  MLCL_CHECK(spec.per_class >= 1, "[gen_hierarchical] per_class must be >= 1");

  const std::uint64_t super_seed =
      spec.super_seed != 0 ? spec.super_seed : Rng::mix(spec.seed, kSuperCenterStream);
  Rng super_rng(super_seed);
  std::vector<std::vector<double>> super_centers;
  super_centers.reserve(spec.superclasses);
  for (std::size_t s = 0; s < spec.superclasses; ++s) {
    super_centers.push_back(draw_normal_vec(super_rng, spec.dim, spec.super_scale));
  }

  Rng sub_rng(Rng::mix(spec.seed, kSubCenterStream));
  std::vector<std::vector<double>> sub_centers;
  sub_centers.reserve(n_sub);
  for (std::size_t s = 0; s < spec.superclasses; ++s) {
    for (std::size_t m = 0; m < spec.subclasses_per_super; ++m) {
      auto offset = draw_normal_vec(sub_rng, spec.dim, spec.sub_scale);
      for (std::size_t c = 0; c < spec.dim; ++c) offset[c] += super_centers[s][c];
      sub_centers.push_back(std::move(offset));
    }
  }

  const std::size_t n = n_sub * spec.per_class;
  Dataset ds;
  ds.features = Matrix(n, spec.dim);
  ds.labels.reserve(n);
  const std::uint64_t row_base = Rng::mix(spec.seed, kRowStream);
  std::size_t row = 0;
  for (std::size_t sub = 0; sub < n_sub; ++sub) {
    const int super = static_cast<int>(sub / spec.subclasses_per_super);
    for (std::size_t j = 0; j < spec.per_class; ++j, ++row) {
      Rng row_rng(Rng::mix(row_base, row));
      double* out = ds.features.row(row);
      for (std::size_t c = 0; c < spec.dim; ++c) {
        out[c] = sub_centers[sub][c] + spec.noise_scale * row_rng.normal();
      }
      ds.labels.push_back(MultiLevelLabel{
          {static_cast<int>(sub), super},
          {static_cast<int>(n_sub), static_cast<int>(spec.superclasses)}});
    }
  }

  ds.meta.kind = "hierarchical";
  ds.meta.seed = spec.seed;
  ds.meta.params = {{"superclasses", double(spec.superclasses)},
                    {"subclasses_per_super", double(spec.subclasses_per_super)},
                    {"per_class", double(spec.per_class)},
                    {"dim", double(spec.dim)},
                    {"super_scale", spec.super_scale},
                    {"sub_scale", spec.sub_scale},
                    {"noise_scale", spec.noise_scale},
                    {"super_seed", double(super_seed)}};
  return ds;
}

Dataset gen_multilabel(const MultilabelSpec& spec) {
  MLCL_CHECK(spec.n_levels >= 2, "[gen_multilabel] need >= 2 levels, got " << spec.n_levels);
  MLCL_CHECK(spec.classes_per_level >= 2,
             "[gen_multilabel] need >= 2 classes per level, got " << spec.classes_per_level);
  MLCL_CHECK(spec.n_samples >= 1, "[gen_multilabel] n_samples must be >= 1");
  MLCL_CHECK(spec.dim >= 2, "[gen_multilabel] dim must be >= 2, got " << spec.dim);

  // Fixed unit direction per level; class c contributes c * u_l.
  Rng dir_rng(Rng::mix(spec.seed, kDirectionStream));
  std::vector<std::vector<double>> dirs;
  dirs.reserve(spec.n_levels);
  for (std::size_t l = 0; l < spec.n_levels; ++l) {
    auto u = draw_normal_vec(dir_rng, spec.dim, 1.0);
    const double norm = std::sqrt(dot(u.data(), u.data(), spec.dim));
    MLCL_RUNTIME_CHECK(norm > 1e-12, "[gen_multilabel] degenerate direction draw");
    for (auto& x : u) x /= norm;
    dirs.push_back(std::move(u));
  }

  Dataset ds;
  ds.features = Matrix(spec.n_samples, spec.dim);
  ds.labels.reserve(spec.n_samples);
  const std::uint64_t row_base = Rng::mix(spec.seed, kRowStream);
  const std::vector<int> cards(spec.n_levels, static_cast<int>(spec.classes_per_level));
  for (std::size_t row = 0; row < spec.n_samples; ++row) {
    Rng row_rng(Rng::mix(row_base, row));
    std::vector<int> levels(spec.n_levels);
    for (auto& c : levels) c = static_cast<int>(row_rng.uniform_index(spec.classes_per_level));
    double* out = ds.features.row(row);
    for (std::size_t c = 0; c < spec.dim; ++c) {
      double v = 0.0;
      for (std::size_t l = 0; l < spec.n_levels; ++l) v += levels[l] * dirs[l][c];
      out[c] = v + spec.noise_scale * row_rng.normal();
    }
    ds.labels.push_back(MultiLevelLabel{std::move(levels), cards});
  }

  ds.meta.kind = "multilabel";
  ds.meta.seed = spec.seed;
  ds.meta.params = {{"n_levels", double(spec.n_levels)},
                    {"classes_per_level", double(spec.classes_per_level)},
                    {"n_samples", double(spec.n_samples)},
                    {"dim", double(spec.dim)},
                    {"noise_scale", spec.noise_scale}};
  return ds;
}

std::vector<double> augment(const double* x, std::size_t dim, double noise_scale,
                            double dropout_prob, Rng& rng) {
  MLCL_CHECK(noise_scale >= 0.0, "[augment] noise_scale must be >= 0, got " << noise_scale);
  MLCL_CHECK(dropout_prob >= 0.0 && dropout_prob < 1.0,
             "[augment] dropout_prob " << dropout_prob << " outside [0,1)");
  std::vector<double> view(dim);
  for (std::size_t c = 0; c < dim; ++c) view[c] = x[c] + noise_scale * rng.normal();
  for (std::size_t c = 0; c < dim; ++c) {
    if (rng.uniform() < dropout_prob) view[c] = 0.0;
  }
  return view;
}

void write_csv(const Dataset& ds, const std::string& path) {
  ds.validate();
  MLCL_CHECK(!ds.labels.empty(), "[write_csv] refusing to write an empty dataset");
  std::ofstream out(path);
  MLCL_RUNTIME_CHECK(out.good(), "[write_csv] cannot open " << path << " for writing");
  const std::size_t d = ds.dim();
  const std::size_t levels = ds.labels.front().n_levels();
  for (std::size_t c = 0; c < d; ++c) out << "f_" << c << ",";
  for (std::size_t l = 0; l < levels; ++l) out << "level_" << l << (l + 1 < levels ? "," : "\n");
  char buf[40];
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(r, c));
      out << buf << ",";
    }
    const auto& lab = ds.labels[r];
    for (std::size_t l = 0; l < levels; ++l) {
      out << lab.levels[l] << (l + 1 < levels ? "," : "\n");
    }
  }
  MLCL_RUNTIME_CHECK(out.good(), "[write_csv] write failed for " << path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  MLCL_RUNTIME_CHECK(in.good(), "[load_csv] cannot open " << path);
  std::string line;
  MLCL_RUNTIME_CHECK(static_cast<bool>(std::getline(in, line)), "[load_csv] " << path
                                                                              << " is empty");
  const auto header = split_line(line);

  std::size_t d = 0;
  while (d < header.size() && header[d] == "f_" + std::to_string(d)) ++d;
  MLCL_RUNTIME_CHECK(d >= 1, "[load_csv] " << path << ": header must start with column f_0");
  std::size_t levels = 0;
  while (d + levels < header.size() && header[d + levels] == "level_" + std::to_string(levels)) {
    ++levels;
  }
  MLCL_RUNTIME_CHECK(levels >= 1,
                     "[load_csv] " << path << ": missing label column level_0 after f_"
                                   << d - 1);
  MLCL_RUNTIME_CHECK(d + levels == header.size(),
                     "[load_csv] " << path << ": unexpected trailing header column '"
                                   << header[d + levels] << "'");

  std::vector<double> values;
  std::vector<std::vector<int>> label_rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    MLCL_RUNTIME_CHECK(cells.size() == d + levels,
                       "[load_csv] " << path << ": row " << row << " has " << cells.size()
                                     << " cells, expected " << d + levels);
    for (std::size_t c = 0; c < d; ++c) {
      std::size_t consumed = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      MLCL_RUNTIME_CHECK(consumed == cells[c].size() && !cells[c].empty(),
                         "[load_csv] " << path << ": row " << row << " column f_" << c
                                       << ": non-numeric cell '" << cells[c] << "'");
      values.push_back(v);
    }
    std::vector<int> labs(levels);
    for (std::size_t l = 0; l < levels; ++l) {
      const std::string& cell = cells[d + l];
      std::size_t consumed = 0;
      int v = 0;
      try {
        v = std::stoi(cell, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      MLCL_RUNTIME_CHECK(consumed == cell.size() && !cell.empty(),
                         "[load_csv] " << path << ": row " << row << " column level_" << l
                                       << ": non-integer cell '" << cell << "'");
      MLCL_RUNTIME_CHECK(v >= 0, "[load_csv] " << path << ": row " << row << " column level_"
                                               << l << ": negative class index " << v);
      labs[l] = v;
    }
    label_rows.push_back(std::move(labs));
  }
  MLCL_RUNTIME_CHECK(!label_rows.empty(), "[load_csv] " << path << " has no data rows");

  std::vector<int> cards(levels, 2);
  for (const auto& labs : label_rows) {
    for (std::size_t l = 0; l < levels; ++l) cards[l] = std::max(cards[l], labs[l] + 1);
  }

  Dataset ds;
  ds.features = Matrix(label_rows.size(), d);
  std::copy(values.begin(), values.end(), ds.features.data().begin());
  ds.labels.reserve(label_rows.size());
  for (auto& labs : label_rows) ds.labels.push_back(MultiLevelLabel{std::move(labs), cards});
  ds.meta.kind = "csv";
  ds.validate();
  return ds;
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.features = Matrix(rows.size(), ds.dim());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    MLCL_CHECK(rows[i] < ds.size(), "[take_rows] row " << rows[i] << " out of range");
    std::copy(ds.features.row(rows[i]), ds.features.row(rows[i]) + ds.dim(),
              out.features.row(i));
    out.labels.push_back(ds.labels[rows[i]]);
  }
  out.meta = ds.meta;
  return out;
}

std::pair<Dataset, Dataset> split_at(const Dataset& ds, std::size_t first_count) {
  MLCL_CHECK(first_count <= ds.size(), "[split_at] split point past dataset end");
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (i < first_count ? left : right).push_back(i);
  }
  return {take_rows(ds, left), take_rows(ds, right)};
}

std::pair<Dataset, Dataset> split_per_class(const Dataset& ds, std::size_t level,
                                            std::size_t per_class_first) {
  MLCL_CHECK(!ds.labels.empty(), "[split_per_class] empty dataset");
  MLCL_CHECK(level < ds.labels.front().n_levels(), "[split_per_class] level out of range");
  std::map<int, std::size_t> seen;
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int cls = ds.labels[i].levels[level];
    (seen[cls]++ < per_class_first ? left : right).push_back(i);
  }
  return {take_rows(ds, left), take_rows(ds, right)};
}

}  // namespace mlcl
