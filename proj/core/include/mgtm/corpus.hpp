#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mgtm {

using WordId = std::uint32_t;

/// Dense term <-> id mapping, ids assigned in first-appearance order.
class Vocabulary {
 public:
  /// Returns the id of term, inserting it if unknown.
  WordId add(const std::string& term);
  std::optional<WordId> find(const std::string& term) const;
  const std::string& term(WordId id) const { return terms_.at(id); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }

  /// FNV-1a over all terms in id order; ties model files to their corpus.
  std::uint64_t hash() const;

 private:
  std::unordered_map<std::string, WordId> index_;
  std::vector<std::string> terms_;
};

struct Sentence {
  std::vector<WordId> tokens;  // empty when the raw sentence was all stopwords/punctuation
  std::size_t span_begin = 0;  // byte offsets into the raw document text
  std::size_t span_end = 0;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::map<std::string, int> ratings;  // aspect -> rating, may be empty

  std::size_t token_count() const;
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t tokens = 0;

  bool operator==(const CorpusStats&) const = default;
};

/// Immutable tokenized collection. Safe to share across concurrent readers.
struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  CorpusStats stats;

  CorpusStats recount() const;
};

struct RawDocument {
  std::string id;
  std::string text;
  std::map<std::string, int> ratings;
};

struct IngestReport {
  std::size_t docs_kept = 0;
  std::size_t docs_dropped = 0;  // no non-empty sentence after filtering
  std::size_t vocabulary_size = 0;
  std::size_t tokens = 0;
};

/// Sentence boundaries at . ! ? followed by whitespace, except after a lone
/// capital letter ("J. Smith"). The returned spans tile [0, text.size()).
std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(const std::string& text);

/// The trimmed text of each span from sentence_spans.
std::vector<std::string> sentence_split(const std::string& text);

/// Lowercased alphanumeric tokens with punctuation stripped and stopwords
/// removed. Digit-only tokens are kept. The stopword set must be lowercase.
std::vector<std::string> tokenize(const std::string& raw_sentence,
                                  const std::unordered_set<std::string>& stopwords);

/// Builds an immutable corpus. Documents whose sentences are all empty after
/// filtering are dropped (counted in the report). Duplicate ids and ratings
/// outside 1..rating_scale raise DataError.
Corpus build_corpus(const std::vector<RawDocument>& raw,
                    const std::unordered_set<std::string>& stopwords,
                    int rating_scale = 5,
                    IngestReport* report = nullptr);

/// One lowercased term per line; blank lines ignored.
std::unordered_set<std::string> load_stopwords(const std::string& path);

/// JSON-lines input, one document per line:
///   {"id": str, "text": str, "ratings": {aspect: int}?}
/// Malformed lines raise DataError naming the line number.
std::vector<RawDocument> load_documents_jsonl(const std::string& path);

void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

/// Serialized form (used by save_corpus and the determinism checks).
std::string corpus_to_json(const Corpus& corpus);

/// Per-document flattened token stream for the samplers.
struct FlatDoc {
  std::vector<WordId> words;
  std::vector<std::uint32_t> sentence_of;
};
FlatDoc flatten_document(const Document& doc);

}  // namespace mgtm
