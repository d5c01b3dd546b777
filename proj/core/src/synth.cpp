#include "mgtm/synth.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mgtm/errors.hpp"
#include "mgtm/rng.hpp"
#include "json.hpp"

namespace mgtm {

namespace {

std::string word_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%03d", i);
  return buf;
}

std::string doc_name(int i) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "synth-%04d", i);
  return buf;
}

}  // namespace

SynthOutput generate_synthetic(const SynthConfig& config) {
  config.hyper.validate();
  if (config.documents < 1 || config.sentences_per_doc < 1 ||
      config.tokens_per_sentence < 1 || config.vocab_size < 2) {
    throw std::invalid_argument("generate_synthetic: degenerate size configuration");
  }
  const Hyperparams& h = config.hyper;
  const int t_span = h.window;
  Rng rng(config.seed);

  SynthOutput out;
  out.vocabulary.reserve(config.vocab_size);
  for (int w = 0; w < config.vocab_size; ++w) out.vocabulary.push_back(word_name(w));
  for (int z = 0; z < h.k_global; ++z) {
    out.phi_global.push_back(rng.dirichlet(config.vocab_size, config.phi_concentration));
  }
  for (int z = 0; z < h.k_local; ++z) {
    out.phi_local.push_back(rng.dirichlet(config.vocab_size, config.phi_concentration));
  }

  for (int d = 0; d < config.documents; ++d) {
    const int sentences = config.sentences_per_doc;
    const int windows = sentences + t_span - 1;
    std::vector<double> theta_global = rng.dirichlet(h.k_global, h.alpha_global);
    std::vector<std::vector<double>> psi(sentences);
    for (auto& p : psi) p = rng.dirichlet(t_span, h.gamma);
    std::vector<std::vector<double>> theta_local(windows);
    std::vector<double> pi_global(windows);
    for (int v = 0; v < windows; ++v) {
      theta_local[v] = rng.dirichlet(h.k_local, h.alpha_local);
      pi_global[v] = rng.beta(h.alpha_mix_global, h.alpha_mix_local);
    }

    std::string text;
    for (int s = 0; s < sentences; ++s) {
      std::string sent;
      for (int i = 0; i < config.tokens_per_sentence; ++i) {
        const int v = s + static_cast<int>(rng.categorical(psi[s]));
        const bool global = rng.uniform() < pi_global[v];
        std::size_t word;
        if (global) {
          const std::size_t z = rng.categorical(theta_global);
          word = rng.categorical(out.phi_global[z]);
        } else {
          const std::size_t z = rng.categorical(theta_local[v]);
          word = rng.categorical(out.phi_local[z]);
        }
        if (!sent.empty()) sent += ' ';
        sent += out.vocabulary[word];
      }
      sent += '.';
      if (!text.empty()) text += ' ';
      text += sent;
    }
    out.documents.push_back(RawDocument{doc_name(d), std::move(text), {}});
  }
  return out;
}

const std::vector<std::string>& rated_aspects() {
  static const std::vector<std::string> aspects = {
      "check-in", "service", "value", "location", "rooms", "cleanliness"};
  return aspects;
}

SynthOutput generate_rated(const RatedSynthConfig& config) {
  if (config.documents < 1 || config.brands < 1 || config.content_words_per_aspect < 1 ||
      config.sentiment_words < 1) {
    throw std::invalid_argument("generate_rated: degenerate size configuration");
  }
  const auto& aspects = rated_aspects();
  const int n_aspects = static_cast<int>(aspects.size());
  Rng rng(config.seed);

  SynthOutput out;
  // Vocabulary layout: aspect content blocks, then sentiment, then brands.
  std::vector<std::vector<std::string>> content(n_aspects);
  for (int a = 0; a < n_aspects; ++a) {
    for (int j = 0; j < config.content_words_per_aspect; ++j) {
      std::string w;
      for (char c : aspects[a]) {
        if (c != '-') w += c;  // keep tokens alphanumeric
      }
      w += std::to_string(j);
      content[a].push_back(w);
      out.vocabulary.push_back(w);
    }
  }
  std::vector<std::string> positive, negative;
  for (int j = 0; j < config.sentiment_words; ++j) {
    positive.push_back("good" + std::to_string(j));
    negative.push_back("poor" + std::to_string(j));
    out.vocabulary.push_back(positive.back());
    out.vocabulary.push_back(negative.back());
  }
  std::vector<std::vector<std::string>> brand(config.brands);
  for (int g = 0; g < config.brands; ++g) {
    for (int j = 0; j < config.brand_words; ++j) {
      brand[g].push_back("brand" + std::to_string(g) + "item" + std::to_string(j));
      out.vocabulary.push_back(brand[g].back());
    }
  }

  // Planted local rows: uniform over the aspect's content block.
  const std::size_t vocab = out.vocabulary.size();
  for (int a = 0; a < n_aspects; ++a) {
    std::vector<double> row(vocab, 0.0);
    for (int j = 0; j < config.content_words_per_aspect; ++j) {
      row[static_cast<std::size_t>(a) * config.content_words_per_aspect + j] =
          1.0 / config.content_words_per_aspect;
    }
    out.phi_local.push_back(std::move(row));
  }
  const std::size_t brand_base =
      static_cast<std::size_t>(n_aspects) * config.content_words_per_aspect +
      static_cast<std::size_t>(2) * config.sentiment_words;
  for (int g = 0; g < config.brands; ++g) {
    std::vector<double> row(vocab, 0.0);
    for (int j = 0; j < config.brand_words; ++j) {
      row[brand_base + static_cast<std::size_t>(g) * config.brand_words + j] =
          1.0 / config.brand_words;
    }
    out.phi_global.push_back(std::move(row));
  }

  for (int d = 0; d < config.documents; ++d) {
    RawDocument doc;
    doc.id = doc_name(d);
    const int g = static_cast<int>(rng.uniform_int(config.brands));
    std::vector<int> ratings(n_aspects);
    for (int a = 0; a < n_aspects; ++a) {
      ratings[a] = 1 + static_cast<int>(rng.uniform_int(5));
      doc.ratings[aspects[a]] = ratings[a];
    }
    std::vector<int> order(n_aspects);
    for (int a = 0; a < n_aspects; ++a) order[a] = a;
    rng.shuffle(order);

    std::vector<std::string> sentences;
    {
      std::string sent;
      for (int i = 0; i < config.brand_tokens_per_sentence; ++i) {
        if (!sent.empty()) sent += ' ';
        sent += brand[g][rng.uniform_int(brand[g].size())];
      }
      sentences.push_back(sent + ".");
    }
    for (int a : order) {
      std::string sent;
      for (int i = 0; i < config.content_tokens_per_sentence; ++i) {
        if (!sent.empty()) sent += ' ';
        sent += content[a][rng.uniform_int(content[a].size())];
      }
      const double p_positive = (ratings[a] - 1) / 4.0;
      for (int i = 0; i < config.sentiment_tokens_per_sentence; ++i) {
        bool pos = rng.uniform() < p_positive;
        if (rng.uniform() < config.noise) pos = !pos;
        const auto& pool = pos ? positive : negative;
        sent += ' ';
        sent += pool[rng.uniform_int(pool.size())];
      }
      sentences.push_back(sent + ".");
    }
    std::string text;
    for (const auto& s : sentences) {
      if (!text.empty()) text += ' ';
      text += s;
    }
    doc.text = std::move(text);
    out.documents.push_back(std::move(doc));
  }
  return out;
}

void save_documents_jsonl(const std::vector<RawDocument>& docs, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write documents file: " + path);
  for (const auto& d : docs) {
    nlohmann::json j;
    j["id"] = d.id;
    j["text"] = d.text;
    if (!d.ratings.empty()) j["ratings"] = d.ratings;
    f << j.dump() << '\n';
  }
}

void save_truth(const SynthOutput& out, const std::string& path) {
  nlohmann::json j;
  j["format"] = "mgtm.truth";
  j["version"] = 1;
  j["vocabulary"] = out.vocabulary;
  j["phi_global"] = out.phi_global;
  j["phi_local"] = out.phi_local;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write truth file: " + path);
  f << j.dump() << '\n';
}

}  // namespace mgtm
