#include "fairtext/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fairtext/error.hpp"

namespace fairtext {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_numeric_field(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

int parse_binary_label(const std::string& field, const char* which,
                       std::size_t line_no) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw SchemaError(std::string(which) + " label '" + field + "' at line " +
                    std::to_string(line_no) + " is not 0 or 1");
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream ss(text);
  std::string chunk;
  while (ss >> chunk) {
    std::transform(chunk.begin(), chunk.end(), chunk.begin(), [](char c) {
      return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    });
    std::size_t lo = 0;
    std::size_t hi = chunk.size();
    while (lo < hi && !is_word_char(chunk[lo])) {
      tokens.push_back(std::string(1, chunk[lo]));
      ++lo;
    }
    std::vector<std::string> trailing;
    while (hi > lo && !is_word_char(chunk[hi - 1])) {
      trailing.push_back(std::string(1, chunk[hi - 1]));
      --hi;
    }
    if (hi > lo) tokens.push_back(chunk.substr(lo, hi - lo));
    tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());
  }
  return tokens;
}

std::vector<Example> load_tsv(const std::filesystem::path& path,
                              const TsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open corpus file: " + path.string());
  const int max_col = std::max({schema.text_col, schema.y_col, schema.z_col});

  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) <= max_col)
      throw LoadError("line " + std::to_string(line_no) + ": expected at least " +
                      std::to_string(max_col + 1) + " tab-separated columns, got " +
                      std::to_string(fields.size()));
    // Optional header: y column holds a non-numeric field on the first row.
    if (first_row) {
      first_row = false;
      if (!is_numeric_field(fields[static_cast<std::size_t>(schema.y_col)]))
        continue;
    }
    Example ex;
    ex.tokens = tokenize(fields[static_cast<std::size_t>(schema.text_col)]);
    if (ex.tokens.empty())
      throw LoadError("line " + std::to_string(line_no) +
                      ": text tokenizes to zero tokens");
    ex.y = parse_binary_label(fields[static_cast<std::size_t>(schema.y_col)],
                              "task", line_no);
    ex.z = parse_binary_label(fields[static_cast<std::size_t>(schema.z_col)],
                              "group", line_no);
    out.push_back(std::move(ex));
  }
  return out;
}

void save_tsv(const std::filesystem::path& path,
              const std::vector<Example>& examples) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write corpus file: " + path.string());
  for (const Example& ex : examples) {
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << ex.tokens[i];
    }
    out << '\t' << ex.y << '\t' << ex.z << '\n';
  }
}

void SyntheticGenSpec::validate() const {
  if (content_lexicon_size < 1 || style_lexicon_size < 1 ||
      filler_lexicon_size < 1)
    throw ConfigError("synthetic spec: lexicon sizes must be positive");
  if (content_tokens < 1)
    throw ConfigError("synthetic spec: need at least one content token");
  if (style_tokens < 0 || filler_tokens < 0)
    throw ConfigError("synthetic spec: negative token counts");
  if (style_injection_prob < 0.0 || style_injection_prob > 1.0)
    throw ConfigError("synthetic spec: style_injection_prob outside [0,1]");
  if (content_noise < 0.0 || content_noise >= 0.5)
    throw ConfigError("synthetic spec: content_noise must be in [0,0.5)");
}

SyntheticLexicons make_lexicons(const SyntheticGenSpec& spec) {
  spec.validate();
  auto fill = [](std::vector<std::string>& v, const char* prefix, int n) {
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
      v.emplace_back(buf);
    }
  };
  SyntheticLexicons lex;
  fill(lex.content_pos, "pos", spec.content_lexicon_size);
  fill(lex.content_neg, "neg", spec.content_lexicon_size);
  fill(lex.style_group1, "sta", spec.style_lexicon_size);
  fill(lex.style_group2, "stb", spec.style_lexicon_size);
  fill(lex.filler, "fil", spec.filler_lexicon_size);
  return lex;
}

std::vector<Example> generate_synthetic_pool(const SyntheticGenSpec& spec,
                                             int pool_size) {
  spec.validate();
  if (pool_size < 0) throw ConfigError("pool_size must be non-negative");
  const SyntheticLexicons lex = make_lexicons(spec);
  Rng rng(spec.seed);

  auto pick = [&rng](const std::vector<std::string>& words) {
    return words[rng.uniform_int(words.size())];
  };

  std::vector<Example> pool;
  pool.reserve(static_cast<std::size_t>(pool_size));
  for (int i = 0; i < pool_size; ++i) {
    Example ex;
    ex.y = rng.bernoulli(0.5) ? 1 : 0;
    ex.z = rng.bernoulli(0.5) ? 1 : 0;
    for (int c = 0; c < spec.content_tokens; ++c) {
      const bool flip = rng.bernoulli(spec.content_noise);
      const bool positive_word = (ex.y == 1) != flip;
      ex.tokens.push_back(pick(positive_word ? lex.content_pos : lex.content_neg));
    }
    if (rng.bernoulli(spec.style_injection_prob)) {
      for (int s = 0; s < spec.style_tokens; ++s)
        ex.tokens.push_back(pick(ex.z == 0 ? lex.style_group1 : lex.style_group2));
    }
    for (int f = 0; f < spec.filler_tokens; ++f)
      ex.tokens.push_back(pick(lex.filler));
    rng.shuffle(ex.tokens);
    pool.push_back(std::move(ex));
  }
  return pool;
}

void CorpusSpec::validate() const {
  if (balance_rate <= 0.0 || balance_rate >= 1.0)
    throw ConfigError("balance_rate must be in (0,1)");
  if (total_size <= 0 || total_size % 2 != 0)
    throw ConfigError("total_size must be positive and even");
  if (label_ratio != 0.5 || group_ratio != 0.5)
    throw ConfigError("label_ratio and group_ratio are fixed at 0.5");
  if (val_size < 0 || val_size % 4 != 0)
    throw ConfigError("val_size must be divisible by 4");
  if (test_size < 0 || test_size % 4 != 0)
    throw ConfigError("test_size must be divisible by 4");
  for (int y : {0, 1})
    for (int z : {0, 1})
      if (train_cell_count(y, z) < 0)
        throw ConfigError("negative train cell count");
}

int CorpusSpec::train_cell_count(int y, int z) const {
  const int half = total_size / 2;
  // Group I positives set by the balance rate; the other three cells are
  // forced by the overall 1:1 label and group constraints.
  const int g1_pos = static_cast<int>(std::lround(balance_rate * half));
  if (z == 0) return y == 1 ? g1_pos : half - g1_pos;
  return y == 1 ? half - g1_pos : g1_pos;
}

Split build_balanced_split(const std::vector<Example>& pool,
                           const CorpusSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::array<std::vector<std::size_t>, 4> cells;  // index: z*2 + y
  for (std::size_t i = 0; i < pool.size(); ++i)
    cells[static_cast<std::size_t>(pool[i].z * 2 + pool[i].y)].push_back(i);

  Rng rng(seed);
  for (auto& cell : cells) rng.shuffle(cell);

  for (int z : {0, 1})
    for (int y : {0, 1}) {
      const std::size_t need =
          static_cast<std::size_t>(spec.train_cell_count(y, z) +
                                   spec.val_size / 4 + spec.test_size / 4);
      const auto& cell = cells[static_cast<std::size_t>(z * 2 + y)];
      if (cell.size() < need)
        throw CapacityError("cell (y=" + std::to_string(y) +
                            ",z=" + std::to_string(z) + "): need " +
                            std::to_string(need) + " examples, pool has " +
                            std::to_string(cell.size()));
    }

  Split split;
  for (int z : {0, 1})
    for (int y : {0, 1}) {
      auto& cell = cells[static_cast<std::size_t>(z * 2 + y)];
      std::size_t at = 0;
      auto take = [&](std::vector<Example>& dst, std::vector<std::size_t>& ids,
                      std::size_t count) {
        for (std::size_t i = 0; i < count; ++i, ++at) {
          dst.push_back(pool[cell[at]]);
          ids.push_back(cell[at]);
        }
      };
      take(split.train, split.train_ids,
           static_cast<std::size_t>(spec.train_cell_count(y, z)));
      take(split.val, split.val_ids, static_cast<std::size_t>(spec.val_size / 4));
      take(split.test, split.test_ids,
           static_cast<std::size_t>(spec.test_size / 4));
      take(split.reserve, split.reserve_ids, cell.size() - at);
    }

  // Deterministic order within each subset, independent of cell layout.
  auto reorder = [&pool](std::vector<Example>& dst, std::vector<std::size_t>& ids) {
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&ids](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    std::vector<Example> ex2;
    std::vector<std::size_t> ids2;
    ex2.reserve(dst.size());
    ids2.reserve(ids.size());
    for (std::size_t i : order) {
      ex2.push_back(pool[ids[i]]);
      ids2.push_back(ids[i]);
    }
    dst = std::move(ex2);
    ids = std::move(ids2);
  };
  reorder(split.train, split.train_ids);
  reorder(split.val, split.val_ids);
  reorder(split.test, split.test_ids);
  reorder(split.reserve, split.reserve_ids);
  return split;
}

std::string split_manifest(const CorpusSpec& spec, std::uint64_t seed,
                           const Split& split) {
  nlohmann::json j;
  j["seed"] = seed;
  j["spec"] = {{"total_size", spec.total_size},
               {"balance_rate", spec.balance_rate},
               {"label_ratio", spec.label_ratio},
               {"group_ratio", spec.group_ratio},
               {"val_size", spec.val_size},
               {"test_size", spec.test_size}};
  auto cell_counts = [](const std::vector<Example>& xs) {
    std::array<int, 4> c{0, 0, 0, 0};
    for (const Example& e : xs) ++c[static_cast<std::size_t>(e.z * 2 + e.y)];
    return nlohmann::json{{"y0_z0", c[0]}, {"y1_z0", c[1]},
                          {"y0_z1", c[2]}, {"y1_z1", c[3]}};
  };
  j["counts"] = {{"train", cell_counts(split.train)},
                 {"val", cell_counts(split.val)},
                 {"test", cell_counts(split.test)},
                 {"reserve", cell_counts(split.reserve)}};
  return j.dump(2) + "\n";
}

Vocabulary Vocabulary::build(const std::vector<Example>& train, int min_freq,
                             int max_size) {
  std::unordered_map<std::string, long> freq;
  for (const Example& ex : train)
    for (const std::string& t : ex.tokens) ++freq[t];

  std::vector<std::pair<std::string, long>> entries;
  entries.reserve(freq.size());
  for (auto& kv : freq)
    if (kv.second >= min_freq) entries.emplace_back(kv.first, kv.second);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.tokens_ = {"<pad>", "<unk>"};
  for (const auto& [tok, n] : entries) {
    if (max_size > 0 && static_cast<int>(v.tokens_.size()) >= max_size) break;
    v.tokens_.push_back(tok);
  }
  for (std::size_t i = 0; i < v.tokens_.size(); ++i)
    v.index_[v.tokens_[i]] = static_cast<int>(i);
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::string& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

EncodedExample encode(const Example& ex, const Vocabulary& vocab, int max_len) {
  if (max_len <= 0) throw ConfigError("max_len must be positive");
  EncodedExample enc;
  enc.y = ex.y;
  enc.z = ex.z;
  enc.length = static_cast<int>(
      std::min<std::size_t>(ex.tokens.size(), static_cast<std::size_t>(max_len)));
  enc.ids.assign(static_cast<std::size_t>(max_len), Vocabulary::kPadId);
  for (int i = 0; i < enc.length; ++i)
    enc.ids[static_cast<std::size_t>(i)] =
        vocab.id(ex.tokens[static_cast<std::size_t>(i)]);
  return enc;
}

std::vector<EncodedExample> encode_all(const std::vector<Example>& examples,
                                       const Vocabulary& vocab, int max_len) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const Example& ex : examples) out.push_back(encode(ex, vocab, max_len));
  return out;
}

std::vector<Example> relabel_with_group(const std::vector<Example>& examples) {
  std::vector<Example> out = examples;
  for (Example& ex : out) ex.y = ex.z;
  return out;
}

}  // namespace fairtext
