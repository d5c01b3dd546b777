#pragma once

#include <string>

#include "mgtm/features.hpp"
#include "mgtm/lda.hpp"
#include "mgtm/mglda.hpp"
#include "mgtm/ranker.hpp"

namespace mgtm {

/// Versioned model files carry the hyperparameters, the vocabulary (terms and
/// hash), the per-token assignments, the collection-level count tables and
/// the smoothed topic-word rows. Loaders verify version, vocabulary hash and
/// count consistency and raise DataError on any mismatch.
void save_model(const MgldaState& state, const std::string& path);
void save_model(const LdaState& state, const std::string& path);

/// "mglda" or "lda"; DataError for anything unrecognizable.
std::string peek_model_kind(const std::string& path);

MgldaState load_mglda_model(const std::string& path, const Corpus& corpus);
LdaState load_lda_model(const std::string& path, const Corpus& corpus);

/// TSV report, one row per topic: granularity, topic id, then the top-n
/// "word:probability" pairs in nonincreasing probability order.
std::string topic_report(const TopicModel& model, const Vocabulary& vocab, int top_n);
std::string topic_report(const LdaEstimates& est, const Vocabulary& vocab, int top_n);

/// Same report rendered straight from a model file, using the vocabulary and
/// topic rows embedded in it.
std::string topic_report_from_file(const std::string& path, int top_n);

/// Ranker model file: per-aspect sparse weights and boundaries plus the
/// bucket thresholds and feature configuration used to build its inputs.
void save_ranker(const RankerModel& model, const Bucketizer& buckets,
                 const FeatureConfig& config, const std::string& path);

struct LoadedRanker {
  RankerModel model;
  Bucketizer buckets;
  FeatureConfig config;
};
LoadedRanker load_ranker(const std::string& path);

}  // namespace mgtm
