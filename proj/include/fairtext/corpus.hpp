#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairtext/rng.hpp"

namespace fairtext {

// One labeled text: task label y and author-group attribute z, both binary
// (z == 0 is Group I, z == 1 is Group II).
struct Example {
  std::vector<std::string> tokens;
  int y = 0;
  int z = 0;
};

// Lowercase, split off leading/trailing punctuation, then split on
// whitespace. Word-internal punctuation ("can't") is kept.
std::vector<std::string> tokenize(const std::string& text);

struct TsvSchema {
  int text_col = 0;
  int y_col = 1;
  int z_col = 2;
};

// Reads a TSV corpus (text <TAB> y <TAB> z). A header row is skipped when
// the y column is non-numeric. Malformed rows and non-binary labels are
// reported with their 1-based line number.
std::vector<Example> load_tsv(const std::filesystem::path& path,
                              const TsvSchema& schema = {});

void save_tsv(const std::filesystem::path& path,
              const std::vector<Example>& examples);

// Synthetic corpus generator. Five pairwise-disjoint lexicons: two
// label-conditional content lexicons, two group-conditional style lexicons,
// and neutral filler. content_noise is the probability that a content token
// is drawn from the opposite label's lexicon; at 0 the task is exactly
// separable from content alone.
struct SyntheticGenSpec {
  int content_lexicon_size = 30;
  int style_lexicon_size = 20;
  int filler_lexicon_size = 100;
  int content_tokens = 2;    // k
  int style_tokens = 1;      // m
  int filler_tokens = 5;     // f
  double style_injection_prob = 0.9;
  double content_noise = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticLexicons {
  std::vector<std::string> content_pos;
  std::vector<std::string> content_neg;
  std::vector<std::string> style_group1;
  std::vector<std::string> style_group2;
  std::vector<std::string> filler;
};

SyntheticLexicons make_lexicons(const SyntheticGenSpec& spec);

// Pure function of the spec (including its seed).
std::vector<Example> generate_synthetic_pool(const SyntheticGenSpec& spec,
                                             int pool_size);

// Balance-rate-controlled training split. The training set is overall 1:1
// in labels and 1:1 in groups while Group I is `balance_rate` positive
// (Group II is forced to 1 - balance_rate). Validation and test are
// 1:1:1:1 across the four (y, z) cells.
struct CorpusSpec {
  int total_size = 1000;      // training examples
  double balance_rate = 0.5;  // Group I positive fraction
  double label_ratio = 0.5;   // fixed: overall positive fraction
  double group_ratio = 0.5;   // fixed: overall Group I fraction
  int val_size = 400;
  int test_size = 800;

  void validate() const;
  // Cell quota of the training set; y, z in {0, 1}.
  int train_cell_count(int y, int z) const;
};

struct Split {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
  // Pool examples untouched by train/val/test; feeds data augmentation.
  std::vector<Example> reserve;
  // Pool indices backing each subset, for identity checks.
  std::vector<std::size_t> train_ids, val_ids, test_ids, reserve_ids;
};

Split build_balanced_split(const std::vector<Example>& pool,
                           const CorpusSpec& spec, std::uint64_t seed);

// Machine-readable record of how a split was built (seed, spec, achieved
// per-cell counts); round-trips through JSON text.
std::string split_manifest(const CorpusSpec& spec, std::uint64_t seed,
                           const Split& split);

// ---------------------------------------------------------------------------
// Vocabulary and encoding

class Vocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  // Built from the training split only. Tokens below min_freq map to the
  // unknown id; max_size (including the two reserved slots) caps the table,
  // 0 means unlimited. Ordering: frequency desc, then token asc.
  static Vocabulary build(const std::vector<Example>& train, int min_freq = 1,
                          int max_size = 0);

  int id(const std::string& token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(tokens_.size()); }
  // Content hash; checkpoints store it to detect vocabulary mismatch.
  std::uint64_t hash() const;

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct EncodedExample {
  std::vector<int> ids;  // padded to max_len with kPadId
  int length = 0;        // count of real (non-pad) positions
  int y = 0;
  int z = 0;
};

EncodedExample encode(const Example& ex, const Vocabulary& vocab, int max_len);

std::vector<EncodedExample> encode_all(const std::vector<Example>& examples,
                                       const Vocabulary& vocab, int max_len);

// Copies with the task label replaced by the group attribute, for training
// demographic classifiers through the same pipeline.
std::vector<Example> relabel_with_group(const std::vector<Example>& examples);

}  // namespace fairtext
