#include "mgtm/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mgtm/errors.hpp"
#include "json.hpp"

namespace mgtm {

namespace {

constexpr const char* kModelFormat = "mgtm.model";
constexpr int kModelVersion = 1;

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot open ") + what + ": " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed " + what + ": " + e.what());
  }
  return j;
}

void check_model_header(const nlohmann::json& j, const std::string& path) {
  if (!j.contains("format") || j["format"] != kModelFormat ||
      !j.contains("version") || j["version"] != kModelVersion) {
    throw DataError(path + ": not a version-" + std::to_string(kModelVersion) +
                    " model file");
  }
}

void check_vocab(const nlohmann::json& j, const Corpus& corpus, const std::string& path) {
  if (j.at("vocab_hash").get<std::string>() != hash_hex(corpus.vocabulary.hash())) {
    throw DataError(path + ": model was trained on a different vocabulary");
  }
}

std::string format_report_rows(
    const std::vector<std::pair<std::string, const std::vector<double>*>>& rows,
    const Vocabulary& vocab, int top_n) {
  std::ostringstream out;
  int topic_id = 0;
  std::string prev_tag;
  for (const auto& [tag, row_probs] : rows) {
    const std::vector<double>& probs = *row_probs;
    if (tag != prev_tag) {
      topic_id = 0;
      prev_tag = tag;
    }
    std::vector<std::size_t> order(probs.size());
    for (std::size_t w = 0; w < probs.size(); ++w) order[w] = w;
    std::stable_sort(order.begin(), order.end(), [&probs](std::size_t a, std::size_t b) {
      return probs[a] > probs[b];
    });
    out << tag << '\t' << topic_id;
    const int take = std::min<int>(top_n, static_cast<int>(order.size()));
    char buf[64];
    for (int i = 0; i < take; ++i) {
      std::snprintf(buf, sizeof(buf), "%.6f", probs[order[i]]);
      out << '\t' << vocab.term(static_cast<WordId>(order[i])) << ':' << buf;
    }
    out << '\n';
    ++topic_id;
  }
  return out.str();
}

}  // namespace

void save_model(const MgldaState& state, const std::string& path) {
  const Hyperparams& h = state.hyper;
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["kind"] = "mglda";
  j["hyper"] = {{"k_global", h.k_global},
                {"k_local", h.k_local},
                {"window", h.window},
                {"alpha_global", h.alpha_global},
                {"alpha_local", h.alpha_local},
                {"alpha_mix_global", h.alpha_mix_global},
                {"alpha_mix_local", h.alpha_mix_local},
                {"beta_global", h.beta_global},
                {"beta_local", h.beta_local},
                {"gamma", h.gamma}};
  j["vocabulary"] = state.corpus->vocabulary.terms();
  j["vocab_hash"] = hash_hex(state.corpus->vocabulary.hash());
  j["seed"] = state.seed;
  j["iterations"] = state.iteration;

  nlohmann::json assigns = nlohmann::json::array();
  for (const auto& doc : state.assignments) {
    std::vector<int> offsets, grains, topics;
    offsets.reserve(doc.size());
    for (const Assignment& a : doc) {
      offsets.push_back(a.window_offset);
      grains.push_back(a.grain == Grain::global ? 0 : 1);
      topics.push_back(a.topic);
    }
    assigns.push_back({{"o", offsets}, {"r", grains}, {"z", topics}});
  }
  j["assignments"] = std::move(assigns);
  j["counts"] = {{"word_topic_global", state.counts.word_topic_global},
                 {"word_topic_local", state.counts.word_topic_local},
                 {"topic_global", state.counts.topic_global},
                 {"topic_local", state.counts.topic_local}};
  const TopicModel tm = estimate_phi(state);
  j["phi_global"] = tm.phi_global;
  j["phi_local"] = tm.phi_local;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump() << '\n';
}

void save_model(const LdaState& state, const std::string& path) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["kind"] = "lda";
  j["hyper"] = {{"k", state.k}, {"alpha", state.alpha}, {"beta", state.beta}};
  j["vocabulary"] = state.corpus->vocabulary.terms();
  j["vocab_hash"] = hash_hex(state.corpus->vocabulary.hash());
  j["seed"] = state.seed;
  j["iterations"] = state.iteration;
  nlohmann::json assigns = nlohmann::json::array();
  for (const auto& doc : state.topics) {
    assigns.push_back(std::vector<int>(doc.begin(), doc.end()));
  }
  j["assignments"] = std::move(assigns);
  j["counts"] = {{"word_topic", state.word_topic}, {"topic_total", state.topic_total}};
  j["phi"] = lda_estimate(state).phi;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out << j.dump() << '\n';
}

std::string peek_model_kind(const std::string& path) {
  nlohmann::json j = read_json_file(path, "model file");
  check_model_header(j, path);
  std::string kind = j.at("kind").get<std::string>();
  if (kind != "mglda" && kind != "lda") {
    throw DataError(path + ": unknown model kind '" + kind + "'");
  }
  return kind;
}

MgldaState load_mglda_model(const std::string& path, const Corpus& corpus) {
  nlohmann::json j = read_json_file(path, "model file");
  check_model_header(j, path);
  try {
    if (j.at("kind") != "mglda") throw DataError(path + ": not an mglda model");
    check_vocab(j, corpus, path);
    const auto& jh = j.at("hyper");
    Hyperparams h;
    h.k_global = jh.at("k_global").get<int>();
    h.k_local = jh.at("k_local").get<int>();
    h.window = jh.at("window").get<int>();
    h.alpha_global = jh.at("alpha_global").get<double>();
    h.alpha_local = jh.at("alpha_local").get<double>();
    h.alpha_mix_global = jh.at("alpha_mix_global").get<double>();
    h.alpha_mix_local = jh.at("alpha_mix_local").get<double>();
    h.beta_global = jh.at("beta_global").get<double>();
    h.beta_local = jh.at("beta_local").get<double>();
    h.gamma = jh.at("gamma").get<double>();

    MgldaState state = init_state(corpus, h, j.at("seed").get<std::uint64_t>());
    const auto& assigns = j.at("assignments");
    if (assigns.size() != state.words.size()) {
      throw DataError(path + ": assignment table does not match the corpus");
    }
    for (std::size_t d = 0; d < state.words.size(); ++d) {
      const auto& offsets = assigns[d].at("o");
      const auto& grains = assigns[d].at("r");
      const auto& topics = assigns[d].at("z");
      if (offsets.size() != state.words[d].size()) {
        throw DataError(path + ": assignment table does not match the corpus");
      }
      for (std::size_t i = 0; i < state.words[d].size(); ++i) {
        Assignment a;
        a.window_offset = static_cast<std::uint8_t>(offsets[i].get<int>());
        a.grain = grains[i].get<int>() == 0 ? Grain::global : Grain::local;
        a.topic = static_cast<std::uint16_t>(topics[i].get<int>());
        if (a.window_offset >= h.window ||
            a.topic >= (a.grain == Grain::global ? h.k_global : h.k_local)) {
          throw DataError(path + ": assignment out of range");
        }
        set_token_assignment(state, d, i, a);
      }
    }
    state.iteration = j.at("iterations").get<std::uint64_t>();
    const auto& jc = j.at("counts");
    if (jc.at("word_topic_global").get<std::vector<std::int32_t>>() !=
            state.counts.word_topic_global ||
        jc.at("word_topic_local").get<std::vector<std::int32_t>>() !=
            state.counts.word_topic_local ||
        jc.at("topic_global").get<std::vector<std::int32_t>>() != state.counts.topic_global ||
        jc.at("topic_local").get<std::vector<std::int32_t>>() != state.counts.topic_local) {
      throw DataError(path + ": stored count tables disagree with assignments");
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed model file: " + e.what());
  }
}

LdaState load_lda_model(const std::string& path, const Corpus& corpus) {
  nlohmann::json j = read_json_file(path, "model file");
  check_model_header(j, path);
  try {
    if (j.at("kind") != "lda") throw DataError(path + ": not an lda model");
    check_vocab(j, corpus, path);
    const auto& jh = j.at("hyper");
    LdaState state = lda_init(corpus, jh.at("k").get<int>(), jh.at("alpha").get<double>(),
                              jh.at("beta").get<double>(), j.at("seed").get<std::uint64_t>());
    const auto& assigns = j.at("assignments");
    if (assigns.size() != state.words.size()) {
      throw DataError(path + ": assignment table does not match the corpus");
    }
    for (std::size_t d = 0; d < state.words.size(); ++d) {
      if (assigns[d].size() != state.words[d].size()) {
        throw DataError(path + ": assignment table does not match the corpus");
      }
      for (std::size_t i = 0; i < state.words[d].size(); ++i) {
        const int z = assigns[d][i].get<int>();
        if (z < 0 || z >= state.k) throw DataError(path + ": assignment out of range");
        lda_set_token_topic(state, d, i, static_cast<std::uint16_t>(z));
      }
    }
    state.iteration = j.at("iterations").get<std::uint64_t>();
    const auto& jc = j.at("counts");
    if (jc.at("word_topic").get<std::vector<std::int32_t>>() != state.word_topic ||
        jc.at("topic_total").get<std::vector<std::int32_t>>() != state.topic_total) {
      throw DataError(path + ": stored count tables disagree with assignments");
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed model file: " + e.what());
  }
}

std::string topic_report(const TopicModel& model, const Vocabulary& vocab, int top_n) {
  std::vector<std::pair<std::string, const std::vector<double>*>> rows;
  for (const auto& row : model.phi_global) rows.emplace_back("gl", &row);
  for (const auto& row : model.phi_local) rows.emplace_back("loc", &row);
  return format_report_rows(rows, vocab, top_n);
}

std::string topic_report(const LdaEstimates& est, const Vocabulary& vocab, int top_n) {
  std::vector<std::pair<std::string, const std::vector<double>*>> rows;
  for (const auto& row : est.phi) rows.emplace_back("lda", &row);
  return format_report_rows(rows, vocab, top_n);
}

std::string topic_report_from_file(const std::string& path, int top_n) {
  nlohmann::json j = read_json_file(path, "model file");
  check_model_header(j, path);
  try {
    Vocabulary vocab;
    for (const auto& t : j.at("vocabulary")) vocab.add(t.get<std::string>());
    std::vector<std::pair<std::string, const std::vector<double>*>> rows;
    std::vector<std::vector<double>> phi_global, phi_local, phi;
    if (j.at("kind") == "mglda") {
      phi_global = j.at("phi_global").get<std::vector<std::vector<double>>>();
      phi_local = j.at("phi_local").get<std::vector<std::vector<double>>>();
      for (const auto& row : phi_global) rows.emplace_back("gl", &row);
      for (const auto& row : phi_local) rows.emplace_back("loc", &row);
    } else if (j.at("kind") == "lda") {
      phi = j.at("phi").get<std::vector<std::vector<double>>>();
      for (const auto& row : phi) rows.emplace_back("lda", &row);
    } else {
      throw DataError(path + ": unknown model kind");
    }
    return format_report_rows(rows, vocab, top_n);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed model file: " + e.what());
  }
}

void save_ranker(const RankerModel& model, const Bucketizer& buckets,
                 const FeatureConfig& config, const std::string& path) {
  nlohmann::json j;
  j["format"] = "mgtm.ranker";
  j["version"] = 1;
  j["rating_levels"] = model.rating_levels;
  j["aspects"] = model.aspects;
  nlohmann::json per_aspect = nlohmann::json::array();
  for (const auto& a : model.per_aspect) {
    // std::map gives a stable key order in the output.
    std::map<std::string, double> sorted(a.weights.begin(), a.weights.end());
    per_aspect.push_back({{"weights", sorted}, {"boundaries", a.boundaries}});
  }
  j["per_aspect"] = std::move(per_aspect);
  j["buckets"] = {{"thresholds", buckets.thresholds}};
  j["features"] = {{"unigrams", config.unigrams},
                   {"bigrams", config.bigrams},
                   {"trigrams", config.trigrams},
                   {"top_k", config.top_k},
                   {"model_tag", config.model_tag}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write ranker file: " + path);
  out << j.dump() << '\n';
}

LoadedRanker load_ranker(const std::string& path) {
  nlohmann::json j = read_json_file(path, "ranker file");
  try {
    if (j.at("format") != "mgtm.ranker" || j.at("version") != 1) {
      throw DataError(path + ": not a version-1 ranker file");
    }
    LoadedRanker out;
    out.model.rating_levels = j.at("rating_levels").get<int>();
    out.model.aspects = j.at("aspects").get<std::vector<std::string>>();
    for (const auto& ja : j.at("per_aspect")) {
      AspectRanker a;
      for (const auto& [k, v] : ja.at("weights").items()) {
        a.weights[k] = v.get<double>();
      }
      a.boundaries = ja.at("boundaries").get<std::vector<double>>();
      out.model.per_aspect.push_back(std::move(a));
    }
    if (out.model.per_aspect.size() != out.model.aspects.size()) {
      throw DataError(path + ": aspect tables disagree");
    }
    out.buckets.thresholds = j.at("buckets").at("thresholds").get<std::vector<double>>();
    const auto& jf = j.at("features");
    out.config.unigrams = jf.at("unigrams").get<bool>();
    out.config.bigrams = jf.at("bigrams").get<bool>();
    out.config.trigrams = jf.at("trigrams").get<bool>();
    out.config.top_k = jf.at("top_k").get<int>();
    out.config.model_tag = jf.at("model_tag").get<std::string>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed ranker file: " + e.what());
  }
}

}  // namespace mgtm
