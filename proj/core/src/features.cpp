#include "mgtm/features.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "mgtm/errors.hpp"
#include "json.hpp"

namespace mgtm {

namespace {

std::vector<SentenceTopicProfile> finish_profiles(const Document& doc,
                                                  const std::vector<double>& acc,
                                                  int samples, int k) {
  std::vector<SentenceTopicProfile> out(doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    out[s].doc_id = doc.id;
    out[s].sentence = static_cast<std::uint32_t>(s);
    out[s].probs.assign(k, 0.0);
    const double len = static_cast<double>(doc.sentences[s].tokens.size());
    if (len == 0.0) continue;
    for (int z = 0; z < k; ++z) {
      out[s].probs[z] = acc[s * k + z] / samples / len;
    }
  }
  return out;
}

}  // namespace

std::vector<SentenceTopicProfile> resample_doc(MgldaState& state, std::size_t d,
                                               int samples, std::uint64_t seed,
                                               const SampleSink& sink) {
  if (d >= state.words.size()) {
    throw std::out_of_range("resample_doc: document index out of range");
  }
  if (samples < 1) throw std::invalid_argument("resample_doc: samples must be >= 1");

  const Document& doc = state.corpus->documents[d];
  const int kl = state.hyper.k_local;
  const std::size_t sentences = doc.sentences.size();
  const std::vector<Assignment> original = state.assignments[d];

  Rng rng(seed);
  std::vector<double> acc(sentences * kl, 0.0);
  std::vector<int> counts(sentences * kl);
  for (int rep = 0; rep < samples; ++rep) {
    sweep_document(state, d, rng);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < state.words[d].size(); ++i) {
      const Assignment& a = state.assignments[d][i];
      if (a.grain == Grain::local) {
        ++counts[state.sentence_of[d][i] * kl + a.topic];
      }
    }
    for (std::size_t c = 0; c < counts.size(); ++c) acc[c] += counts[c];
    if (sink) sink(counts);
  }

  // Put the document back exactly as found so the chain state is unchanged.
  for (std::size_t i = 0; i < state.words[d].size(); ++i) {
    set_token_assignment(state, d, i, original[i]);
  }
  return finish_profiles(doc, acc, samples, kl);
}

std::vector<SentenceTopicProfile> resample_doc(LdaState& state, std::size_t d,
                                               int samples, std::uint64_t seed,
                                               const SampleSink& sink) {
  if (d >= state.words.size()) {
    throw std::out_of_range("resample_doc: document index out of range");
  }
  if (samples < 1) throw std::invalid_argument("resample_doc: samples must be >= 1");

  const Document& doc = state.corpus->documents[d];
  const int k = state.k;
  const std::size_t sentences = doc.sentences.size();
  const std::vector<std::uint16_t> original = state.topics[d];

  Rng rng(seed);
  std::vector<double> acc(sentences * k, 0.0);
  std::vector<int> counts(sentences * k);
  for (int rep = 0; rep < samples; ++rep) {
    lda_sweep_document(state, d, rng);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < state.words[d].size(); ++i) {
      ++counts[state.sentence_of[d][i] * k + state.topics[d][i]];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) acc[c] += counts[c];
    if (sink) sink(counts);
  }

  for (std::size_t i = 0; i < state.words[d].size(); ++i) {
    lda_set_token_topic(state, d, i, original[i]);
  }
  return finish_profiles(doc, acc, samples, k);
}

std::vector<std::vector<SentenceTopicProfile>> resample_all(MgldaState& state,
                                                            int samples,
                                                            std::uint64_t seed) {
  std::vector<std::vector<SentenceTopicProfile>> out(state.words.size());
  for (std::size_t d = 0; d < state.words.size(); ++d) {
    out[d] = resample_doc(state, d, samples, mix_seed(seed, d));
  }
  return out;
}

std::vector<std::vector<SentenceTopicProfile>> resample_all(LdaState& state,
                                                            int samples,
                                                            std::uint64_t seed) {
  std::vector<std::vector<SentenceTopicProfile>> out(state.words.size());
  for (std::size_t d = 0; d < state.words.size(); ++d) {
    out[d] = resample_doc(state, d, samples, mix_seed(seed, d));
  }
  return out;
}

Bucketizer fit_bucketizer(const std::vector<double>& values, int buckets) {
  if (buckets < 1) throw std::invalid_argument("fit_bucketizer: buckets must be >= 1");
  std::vector<double> nonzero;
  nonzero.reserve(values.size());
  for (double v : values) {
    if (v > 0.0) nonzero.push_back(v);
  }
  std::sort(nonzero.begin(), nonzero.end());
  Bucketizer b;
  if (nonzero.empty()) {
    b.thresholds.assign(buckets - 1, 0.0);
    return b;
  }
  for (int j = 1; j < buckets; ++j) {
    std::size_t idx = nonzero.size() * j / buckets;
    if (idx >= nonzero.size()) idx = nonzero.size() - 1;
    b.thresholds.push_back(nonzero[idx]);
  }
  return b;
}

std::vector<double> pool_profile_values(
    const std::vector<std::vector<SentenceTopicProfile>>& profiles) {
  std::vector<double> out;
  for (const auto& doc : profiles) {
    for (const auto& prof : doc) {
      out.insert(out.end(), prof.probs.begin(), prof.probs.end());
    }
  }
  return out;
}

std::unordered_set<std::string> frequent_trigrams(const Corpus& corpus,
                                                  std::span<const std::size_t> doc_ids,
                                                  int min_df) {
  std::map<std::string, int> df;
  for (std::size_t d : doc_ids) {
    std::set<std::string> in_doc;
    for (const auto& sent : corpus.documents[d].sentences) {
      const auto& toks = sent.tokens;
      for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
        in_doc.insert(corpus.vocabulary.term(toks[i]) + "_" +
                      corpus.vocabulary.term(toks[i + 1]) + "_" +
                      corpus.vocabulary.term(toks[i + 2]));
      }
    }
    for (const auto& t : in_doc) ++df[t];
  }
  std::unordered_set<std::string> out;
  for (const auto& [t, n] : df) {
    if (n >= min_df) out.insert(t);
  }
  return out;
}

std::vector<std::string> make_features(const Document& doc, const Vocabulary& vocab,
                                       const std::vector<SentenceTopicProfile>& profiles,
                                       const Bucketizer& buckets,
                                       const std::unordered_set<std::string>& trigram_vocab,
                                       const FeatureConfig& config) {
  std::set<std::string> feats;
  const bool topic_features = !config.model_tag.empty();
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& toks = doc.sentences[s].tokens;
    std::vector<std::string> terms(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) terms[i] = vocab.term(toks[i]);

    if (config.unigrams) {
      for (const auto& t : terms) feats.insert(t);
    }
    if (config.bigrams) {
      for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
        feats.insert(terms[i] + "_" + terms[i + 1]);
      }
    }
    if (config.trigrams) {
      for (std::size_t i = 0; i + 2 < terms.size(); ++i) {
        std::string tri = terms[i] + "_" + terms[i + 1] + "_" + terms[i + 2];
        if (trigram_vocab.count(tri)) feats.insert(std::move(tri));
      }
    }

    if (!topic_features || s >= profiles.size() || terms.empty()) continue;
    const auto& probs = profiles[s].probs;
    std::vector<int> order(probs.size());
    for (std::size_t z = 0; z < probs.size(); ++z) order[z] = static_cast<int>(z);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });
    const int take = std::min<int>(config.top_k, static_cast<int>(order.size()));
    for (int r = 0; r < take; ++r) {
      const int z = order[r];
      if (!(probs[z] > 0.0)) break;
      const int b = buckets.bucket(probs[z]);
      const std::string suffix =
          "&" + config.model_tag + "&t" + std::to_string(z) + "&b" + std::to_string(b);
      for (const auto& t : terms) feats.insert(t + suffix);
    }
  }
  return {feats.begin(), feats.end()};
}

void save_profiles_jsonl(const std::vector<std::vector<SentenceTopicProfile>>& profiles,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write profiles file: " + path);
  for (const auto& doc : profiles) {
    for (const auto& prof : doc) {
      nlohmann::json j;
      j["doc"] = prof.doc_id;
      j["sentence"] = prof.sentence;
      j["probs"] = prof.probs;
      out << j.dump() << '\n';
    }
  }
}

void save_sparse_features(const std::vector<std::vector<std::string>>& features,
                          const std::vector<std::vector<int>>& labels,
                          const std::vector<std::string>& label_names,
                          const std::string& path) {
  if (features.size() != labels.size()) {
    throw std::invalid_argument("save_sparse_features: features/labels size mismatch");
  }
  std::map<std::string, std::size_t> index;  // ordered: stable 1-based ids
  for (const auto& fv : features) {
    for (const auto& f : fv) index.emplace(f, 0);
  }
  std::size_t next = 1;
  for (auto& [f, id] : index) id = next++;

  {
    std::ofstream vocab(path + ".vocab", std::ios::binary);
    if (!vocab) throw DataError("cannot write feature dictionary: " + path + ".vocab");
    for (const auto& [f, id] : index) vocab << f << '\n';
  }
  for (std::size_t a = 0; a < label_names.size(); ++a) {
    const std::string file = path + "." + label_names[a];
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write feature file: " + file);
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (labels[i].size() != label_names.size()) {
        throw std::invalid_argument("save_sparse_features: label row width mismatch");
      }
      out << labels[i][a];
      std::vector<std::size_t> ids;
      ids.reserve(features[i].size());
      for (const auto& f : features[i]) ids.push_back(index.at(f));
      std::sort(ids.begin(), ids.end());
      for (std::size_t id : ids) out << ' ' << id << ":1";
      out << '\n';
    }
  }
}

}  // namespace mgtm
