#include "mgtm/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mgtm/errors.hpp"
#include "json.hpp"

namespace mgtm {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
// Bytes >= 0x80 are kept as token characters so multi-byte UTF-8 sequences
// survive intact.
bool is_token_char(char c) {
  return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

WordId Vocabulary::add(const std::string& term) {
  auto it = index_.find(term);
  if (it != index_.end()) return it->second;
  WordId id = static_cast<WordId>(terms_.size());
  index_.emplace(term, id);
  terms_.push_back(term);
  return id;
}

std::optional<WordId> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : terms_) {
    for (char c : t) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // term separator
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

CorpusStats Corpus::recount() const {
  CorpusStats st;
  st.documents = documents.size();
  for (const auto& d : documents) {
    st.sentences += d.sentences.size();
    st.tokens += d.token_count();
  }
  return st;
}

std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  const std::size_t n = text.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < n && !is_space(text[i + 1])) continue;
    if (c == '.') {
      // "J. Smith": a lone capital before the period is an initial, not an end.
      if (i >= 1 && is_upper(text[i - 1]) && (i < 2 || !is_token_char(text[i - 2]))) {
        continue;
      }
    }
    std::size_t end = i + 1;
    while (end < n && is_space(text[end])) ++end;
    spans.emplace_back(start, end);
    start = end;
    i = end > 0 ? end - 1 : 0;
  }
  if (start < n) spans.emplace_back(start, n);
  return spans;
}

std::vector<std::string> sentence_split(const std::string& text) {
  std::vector<std::string> out;
  for (auto [b, e] : sentence_spans(text)) {
    out.push_back(trim(text.substr(b, e - b)));
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& raw_sentence,
                                  const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && stopwords.find(cur) == stopwords.end()) {
      tokens.push_back(cur);
    }
    cur.clear();
  };
  for (char c : raw_sentence) {
    if (is_token_char(c)) {
      cur.push_back(is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Corpus build_corpus(const std::vector<RawDocument>& raw,
                    const std::unordered_set<std::string>& stopwords,
                    int rating_scale,
                    IngestReport* report) {
  Corpus corpus;
  IngestReport rep;
  std::unordered_set<std::string> seen_ids;
  for (const auto& rd : raw) {
    if (!seen_ids.insert(rd.id).second) {
      throw DataError("duplicate document id: " + rd.id);
    }
    for (const auto& [aspect, rating] : rd.ratings) {
      if (rating < 1 || rating > rating_scale) {
        throw DataError("document " + rd.id + ": rating for '" + aspect +
                        "' is " + std::to_string(rating) + ", outside 1.." +
                        std::to_string(rating_scale));
      }
    }
    Document doc;
    doc.id = rd.id;
    doc.ratings = rd.ratings;
    bool any_tokens = false;
    for (auto [b, e] : sentence_spans(rd.text)) {
      Sentence sent;
      sent.span_begin = b;
      sent.span_end = e;
      for (const auto& tok : tokenize(rd.text.substr(b, e - b), stopwords)) {
        sent.tokens.push_back(corpus.vocabulary.add(tok));
      }
      any_tokens = any_tokens || !sent.tokens.empty();
      doc.sentences.push_back(std::move(sent));
    }
    if (!any_tokens) {
      ++rep.docs_dropped;
      continue;
    }
    corpus.documents.push_back(std::move(doc));
    ++rep.docs_kept;
  }
  corpus.stats = corpus.recount();
  rep.vocabulary_size = corpus.vocabulary.size();
  rep.tokens = corpus.stats.tokens;
  if (report) *report = rep;
  return corpus;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path);
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string term = trim(line);
    for (auto& c : term) {
      if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
    }
    if (!term.empty()) out.insert(term);
  }
  return out;
}

std::vector<RawDocument> load_documents_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": malformed JSON: " + e.what());
    }
    RawDocument rd;
    try {
      rd.id = j.at("id").get<std::string>();
      rd.text = j.at("text").get<std::string>();
      if (j.contains("ratings")) {
        for (const auto& [k, v] : j.at("ratings").items()) {
          rd.ratings[k] = v.get<int>();
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    docs.push_back(std::move(rd));
  }
  return docs;
}

std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::json j;
  j["format"] = "mgtm.corpus";
  j["version"] = 1;
  j["vocabulary"] = corpus.vocabulary.terms();
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : corpus.documents) {
    nlohmann::json jd;
    jd["id"] = d.id;
    nlohmann::json sents = nlohmann::json::array();
    for (const auto& s : d.sentences) {
      sents.push_back({{"tokens", s.tokens}, {"span", {s.span_begin, s.span_end}}});
    }
    jd["sentences"] = std::move(sents);
    if (!d.ratings.empty()) jd["ratings"] = d.ratings;
    docs.push_back(std::move(jd));
  }
  j["documents"] = std::move(docs);
  j["stats"] = {{"documents", corpus.stats.documents},
                {"sentences", corpus.stats.sentences},
                {"tokens", corpus.stats.tokens}};
  return j.dump();
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path);
  out << corpus_to_json(corpus) << '\n';
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed corpus file: " + e.what());
  }
  try {
    if (j.at("format") != "mgtm.corpus" || j.at("version") != 1) {
      throw DataError(path + ": not a version-1 corpus file");
    }
    Corpus corpus;
    for (const auto& t : j.at("vocabulary")) {
      corpus.vocabulary.add(t.get<std::string>());
    }
    const WordId w = static_cast<WordId>(corpus.vocabulary.size());
    for (const auto& jd : j.at("documents")) {
      Document d;
      d.id = jd.at("id").get<std::string>();
      for (const auto& js : jd.at("sentences")) {
        Sentence s;
        for (const auto& t : js.at("tokens")) {
          WordId id = t.get<WordId>();
          if (id >= w) throw DataError(path + ": token id out of range");
          s.tokens.push_back(id);
        }
        s.span_begin = js.at("span").at(0).get<std::size_t>();
        s.span_end = js.at("span").at(1).get<std::size_t>();
        d.sentences.push_back(std::move(s));
      }
      if (jd.contains("ratings")) {
        for (const auto& [k, v] : jd.at("ratings").items()) {
          d.ratings[k] = v.get<int>();
        }
      }
      corpus.documents.push_back(std::move(d));
    }
    corpus.stats = CorpusStats{j.at("stats").at("documents").get<std::size_t>(),
                               j.at("stats").at("sentences").get<std::size_t>(),
                               j.at("stats").at("tokens").get<std::size_t>()};
    if (corpus.stats != corpus.recount()) {
      throw DataError(path + ": stats do not match document contents");
    }
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed corpus file: " + e.what());
  }
}

FlatDoc flatten_document(const Document& doc) {
  FlatDoc flat;
  flat.words.reserve(doc.token_count());
  flat.sentence_of.reserve(doc.token_count());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    for (WordId w : doc.sentences[s].tokens) {
      flat.words.push_back(w);
      flat.sentence_of.push_back(static_cast<std::uint32_t>(s));
    }
  }
  return flat;
}

}  // namespace mgtm
