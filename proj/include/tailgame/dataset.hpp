#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tailgame/matrix.hpp"

namespace tailgame {

using LabelId = std::uint32_t;

// Dense features plus a sorted label set per sample.
class MultiLabelDataset {
 public:
  MultiLabelDataset() = default;
  MultiLabelDataset(std::size_t feature_dim, std::size_t num_labels, std::string provenance = {});

  // Labels are sorted and deduplicated. Throws InputError on out-of-range
  // labels, wrong feature length, or non-finite features.
  void add_sample(std::span<const double> features, std::vector<LabelId> labels);

  std::size_t size() const { return offsets_.size() - 1; }
  bool empty() const { return size() == 0; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t num_labels() const { return num_labels_; }
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * feature_dim_, feature_dim_};
  }
  std::span<const LabelId> labels(std::size_t i) const {
    return {labels_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  bool has_label(std::size_t i, LabelId l) const;

  // Rows `indices` gathered into a new dataset.
  MultiLabelDataset subset(std::span<const std::size_t> indices) const;

  // Gathered features (|indices| x d) and 0/1 labels (|indices| x L).
  Matrix feature_matrix(std::span<const std::size_t> indices) const;
  Matrix label_matrix(std::span<const std::size_t> indices) const;
  Matrix feature_matrix() const;
  Matrix label_matrix() const;

  // Number of samples carrying each label.
  std::vector<std::size_t> label_counts() const;

  bool operator==(const MultiLabelDataset& other) const;

 private:
  std::size_t feature_dim_ = 0;
  std::size_t num_labels_ = 0;
  std::string provenance_;
  std::vector<double> features_;
  std::vector<LabelId> labels_;
  std::vector<std::size_t> offsets_{0};
};

struct SynthSpec {
  std::size_t num_labels = 50;
  std::size_t feature_dim = 20;
  std::size_t num_samples = 5000;
  double power_exponent = 1.5;
  double base_prevalence = 0.6;
  bool correlated = true;
  double noise_rate = 0.0;

  // min(1, p0 * rank^-s) for rank >= 1.
  double target_prevalence(std::size_t rank) const;
  void validate() const;
};

// Label l has rank l+1 in the planted power law. Correlated mode plants a
// Gaussian direction per label and marks the round(target * M) top-scoring
// samples positive; independent mode draws Bernoulli(target) bits.
MultiLabelDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

// Sparse text format:
//   header: "num_samples num_features num_labels"
//   line:   "l1,l2,... f1:v1 f2:v2 ..."  (zero-based ids, empty label set = leading space)
MultiLabelDataset read_sparse(std::istream& in, const std::string& source_name = "<stream>");
MultiLabelDataset load_sparse(const std::filesystem::path& path);
void write_sparse(std::ostream& out, const MultiLabelDataset& dataset);
void save_sparse(const std::filesystem::path& path, const MultiLabelDataset& dataset);

// Removes each positive occurrence of the k rarest labels (by this dataset's
// own frequencies, ties -> higher id rarer) with probability q. Samples and
// features are untouched.
MultiLabelDataset downsample_rare(const MultiLabelDataset& dataset, std::size_t k_rarest,
                                  double removal_fraction, std::uint64_t seed);

struct DatasetSplits {
  MultiLabelDataset train;
  MultiLabelDataset val;
  MultiLabelDataset test;
};

// Seeded shuffle, then contiguous slices of round(ratio * M) for train and val;
// test takes the remainder.
DatasetSplits split_dataset(const MultiLabelDataset& dataset, const std::array<double, 3>& ratios,
                            std::uint64_t seed);

}  // namespace tailgame
