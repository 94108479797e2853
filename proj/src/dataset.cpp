#include "tailgame/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string_view>

#include "tailgame/error.hpp"
#include "tailgame/label_space.hpp"
#include "tailgame/rng.hpp"

namespace tailgame {

MultiLabelDataset::MultiLabelDataset(std::size_t feature_dim, std::size_t num_labels,
                                     std::string provenance)
    : feature_dim_(feature_dim), num_labels_(num_labels), provenance_(std::move(provenance)) {}

void MultiLabelDataset::add_sample(std::span<const double> features, std::vector<LabelId> labels) {
  if (features.size() != feature_dim_) {
    throw InputError("feature vector has length " + std::to_string(features.size()) + ", expected " +
                     std::to_string(feature_dim_));
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw InputError("non-finite feature value");
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (!labels.empty() && labels.back() >= num_labels_) {
    throw InputError("label id " + std::to_string(labels.back()) + " out of range for " +
                     std::to_string(num_labels_) + " labels");
  }
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.insert(labels_.end(), labels.begin(), labels.end());
  offsets_.push_back(labels_.size());
}

bool MultiLabelDataset::has_label(std::size_t i, LabelId l) const {
  const auto ls = labels(i);
  return std::binary_search(ls.begin(), ls.end(), l);
}

MultiLabelDataset MultiLabelDataset::subset(std::span<const std::size_t> indices) const {
  MultiLabelDataset out(feature_dim_, num_labels_, provenance_);
  for (std::size_t i : indices) {
    const auto ls = labels(i);
    out.add_sample(features(i), {ls.begin(), ls.end()});
  }
  return out;
}

Matrix MultiLabelDataset::feature_matrix(std::span<const std::size_t> indices) const {
  Matrix x(indices.size(), feature_dim_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto f = features(indices[r]);
    std::copy(f.begin(), f.end(), x.row(r).begin());
  }
  return x;
}

Matrix MultiLabelDataset::label_matrix(std::span<const std::size_t> indices) const {
  Matrix y(indices.size(), num_labels_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    for (LabelId l : labels(indices[r])) y(r, l) = 1.0;
  }
  return y;
}

Matrix MultiLabelDataset::feature_matrix() const {
  Matrix x(size(), feature_dim_);
  std::copy(features_.begin(), features_.end(), x.values().begin());
  return x;
}

Matrix MultiLabelDataset::label_matrix() const {
  std::vector<std::size_t> all(size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return label_matrix(all);
}

std::vector<std::size_t> MultiLabelDataset::label_counts() const {
  std::vector<std::size_t> counts(num_labels_, 0);
  for (LabelId l : labels_) ++counts[l];
  return counts;
}

bool MultiLabelDataset::operator==(const MultiLabelDataset& other) const {
  return feature_dim_ == other.feature_dim_ && num_labels_ == other.num_labels_ &&
         features_ == other.features_ && labels_ == other.labels_ && offsets_ == other.offsets_;
}

// ---------------------------------------------------------------------------
// Synthetic generation

double SynthSpec::target_prevalence(std::size_t rank) const {
  return std::min(1.0, base_prevalence * std::pow(static_cast<double>(rank), -power_exponent));
}

void SynthSpec::validate() const {
  if (num_labels == 0) throw InputError("synthetic spec needs num_labels >= 1");
  if (feature_dim == 0) throw InputError("synthetic spec needs feature_dim >= 1");
  if (num_samples == 0) throw InputError("synthetic spec needs num_samples >= 1");
  if (!(power_exponent > 0.0)) throw InputError("power_exponent must be > 0");
  if (!(base_prevalence > 0.0 && base_prevalence <= 1.0)) throw InputError("base_prevalence must lie in (0,1]");
  if (!(noise_rate >= 0.0 && noise_rate < 0.5)) throw InputError("noise_rate must lie in [0,0.5)");
}

MultiLabelDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t M = spec.num_samples;
  const std::size_t d = spec.feature_dim;
  const std::size_t L = spec.num_labels;
  auto rng = make_rng(seed, Stream::kSynthetic);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Matrix x(M, d);
  for (double& v : x.values()) v = gauss(rng);

  std::vector<std::vector<LabelId>> labels(M);
  std::vector<double> scores(M);
  std::vector<std::size_t> order(M);
  std::vector<double> planted(d);
  for (std::size_t l = 0; l < L; ++l) {
    const double target = spec.target_prevalence(l + 1);
    if (spec.correlated) {
      for (double& w : planted) w = gauss(rng);
      for (std::size_t m = 0; m < M; ++m) {
        const auto row = x.row(m);
        scores[m] = std::inner_product(row.begin(), row.end(), planted.begin(), 0.0);
      }
      const auto positives = static_cast<std::size_t>(std::llround(target * static_cast<double>(M)));
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
      for (std::size_t k = 0; k < std::min(positives, M); ++k) {
        labels[order[k]].push_back(static_cast<LabelId>(l));
      }
    } else {
      for (std::size_t m = 0; m < M; ++m) {
        if (unif(rng) < target) labels[m].push_back(static_cast<LabelId>(l));
      }
    }
  }

  if (spec.noise_rate > 0.0) {
    for (std::size_t m = 0; m < M; ++m) {
      std::vector<bool> bits(L, false);
      for (LabelId l : labels[m]) bits[l] = true;
      labels[m].clear();
      for (std::size_t l = 0; l < L; ++l) {
        const bool flip = unif(rng) < spec.noise_rate;
        if (bits[l] != flip) labels[m].push_back(static_cast<LabelId>(l));
      }
    }
  }

  std::ostringstream note;
  note << "synthetic(L=" << L << ", d=" << d << ", M=" << M << ", s=" << spec.power_exponent
       << ", p0=" << spec.base_prevalence << ", seed=" << seed << ")";
  MultiLabelDataset out(d, L, note.str());
  for (std::size_t m = 0; m < M; ++m) out.add_sample(x.row(m), std::move(labels[m]));
  return out;
}

// ---------------------------------------------------------------------------
// Sparse text format

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw InputError(source + ":" + std::to_string(line_no) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    if (j > i) tokens.push_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

MultiLabelDataset read_sparse(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) parse_fail(source_name, line_no, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = whitespace_tokens(line);
  std::size_t M = 0, d = 0, L = 0;
  if (header.size() != 3 || !parse_number(header[0], M) || !parse_number(header[1], d) ||
      !parse_number(header[2], L)) {
    parse_fail(source_name, line_no, "malformed header, expected \"num_samples num_features num_labels\"");
  }

  MultiLabelDataset out(d, L, source_name);
  std::vector<double> x(d);
  std::vector<bool> seen(d);
  for (std::size_t m = 0; m < M; ++m) {
    ++line_no;
    if (!std::getline(in, line)) parse_fail(source_name, line_no, "expected " + std::to_string(M) + " samples");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view rest(line);
    std::vector<LabelId> labels;
    if (!rest.empty() && rest.front() != ' ' && rest.front() != '\t') {
      const auto cut = rest.find_first_of(" \t");
      const auto label_field = rest.substr(0, cut);
      if (label_field.find(':') == std::string_view::npos) {
        for (auto tok : split_on(label_field, ',')) {
          LabelId l = 0;
          if (!parse_number(tok, l)) parse_fail(source_name, line_no, "malformed label id '" + std::string(tok) + "'");
          if (l >= L) {
            parse_fail(source_name, line_no,
                       "label id " + std::to_string(l) + " out of range for " + std::to_string(L) + " labels");
          }
          labels.push_back(l);
        }
        rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut);
      }
    }
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(seen.begin(), seen.end(), false);
    for (auto tok : whitespace_tokens(rest)) {
      const auto colon = tok.find(':');
      std::size_t idx = 0;
      double v = 0.0;
      if (colon == std::string_view::npos || !parse_number(tok.substr(0, colon), idx) ||
          !parse_number(tok.substr(colon + 1), v)) {
        parse_fail(source_name, line_no, "malformed feature '" + std::string(tok) + "'");
      }
      if (idx >= d) parse_fail(source_name, line_no, "feature index " + std::to_string(idx) + " out of range");
      if (seen[idx]) parse_fail(source_name, line_no, "duplicate feature index " + std::to_string(idx));
      if (!std::isfinite(v)) parse_fail(source_name, line_no, "non-finite feature value");
      seen[idx] = true;
      x[idx] = v;
    }
    out.add_sample(x, std::move(labels));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!whitespace_tokens(line).empty() && line != "\r") parse_fail(source_name, line_no, "unexpected trailing data");
  }
  return out;
}

MultiLabelDataset load_sparse(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file " + path.string());
  return read_sparse(in, path.string());
}

void write_sparse(std::ostream& out, const MultiLabelDataset& dataset) {
  out << dataset.size() << ' ' << dataset.feature_dim() << ' ' << dataset.num_labels() << '\n';
  std::string line;
  for (std::size_t m = 0; m < dataset.size(); ++m) {
    line.clear();
    const auto ls = dataset.labels(m);
    for (std::size_t k = 0; k < ls.size(); ++k) {
      if (k) line.push_back(',');
      line += std::to_string(ls[k]);
    }
    const auto f = dataset.features(m);
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (f[j] == 0.0) continue;
      line.push_back(' ');
      line += std::to_string(j);
      line.push_back(':');
      append_double(line, f[j]);
    }
    out << line << '\n';
  }
}

void save_sparse(const std::filesystem::path& path, const MultiLabelDataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write data file " + path.string());
  write_sparse(out, dataset);
  if (!out) throw InputError("failed writing data file " + path.string());
}

// ---------------------------------------------------------------------------
// Transforms

static MultiLabelDataset drop_labels(const MultiLabelDataset& dataset,
                              const std::vector<std::vector<LabelId>>& removals) {
  MultiLabelDataset out(dataset.feature_dim(), dataset.num_labels(), dataset.provenance());
  for (std::size_t m = 0; m < dataset.size(); ++m) {
    std::vector<LabelId> kept;
    const auto& drop = removals[m];
    for (LabelId l : dataset.labels(m)) {
      if (std::find(drop.begin(), drop.end(), l) == drop.end()) kept.push_back(l);
    }
    out.add_sample(dataset.features(m), std::move(kept));
  }
  return out;
}

MultiLabelDataset downsample_rare(const MultiLabelDataset& dataset, std::size_t k_rarest,
                                  double removal_fraction, std::uint64_t seed) {
  if (k_rarest > dataset.num_labels()) throw InputError("k_rarest exceeds the number of labels");
  if (!(removal_fraction >= 0.0 && removal_fraction <= 1.0)) throw InputError("removal fraction must lie in [0,1]");
  const auto ft = compute_frequencies(dataset);
  const auto order = frequency_order(ft);
  auto rng = make_rng(seed, Stream::kDownsample);
  std::bernoulli_distribution remove(removal_fraction);

  std::vector<std::vector<LabelId>> removals(dataset.size());
  for (std::size_t k = 0; k < k_rarest; ++k) {
    const LabelId l = order[order.size() - 1 - k];
    for (std::size_t m = 0; m < dataset.size(); ++m) {
      if (dataset.has_label(m, l) && remove(rng)) removals[m].push_back(l);
    }
  }
  auto out = drop_labels(dataset, removals);
  out.set_provenance(dataset.provenance() + " downsampled(k=" + std::to_string(k_rarest) + ")");
  return out;
}

DatasetSplits split_dataset(const MultiLabelDataset& dataset, const std::array<double, 3>& ratios,
                            std::uint64_t seed) {
  double total = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw InputError("split ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("split ratios must sum to 1");

  const std::size_t M = dataset.size();
  std::vector<std::size_t> idx(M);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto rng = make_rng(seed, Stream::kSplit);
  std::shuffle(idx.begin(), idx.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * static_cast<double>(M)));
  const auto n_val = static_cast<std::size_t>(std::llround(ratios[1] * static_cast<double>(M)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= M) throw InputError("split produces an empty slice");

  std::span<const std::size_t> all(idx);
  DatasetSplits s;
  s.train = dataset.subset(all.subspan(0, n_train));
  s.val = dataset.subset(all.subspan(n_train, n_val));
  s.test = dataset.subset(all.subspan(n_train + n_val));
  return s;
}

}  // namespace tailgame
