#pragma once
// Pluggable per-sentence informativeness scores f_I over a sentence pool.
// Providers: sentence-level LexRank (default), per-sentence ROUGE against a
// reference (oracle), and externally computed scores loaded from JSON Lines.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cohesum/text.hpp"

namespace cohesum {

struct InformativenessScores {
    std::string provider_name;
    // (doc_id, sentence_index) -> score in [0,1]; total over the pool.
    std::map<std::pair<std::string, int>, double> scores;

    double at(const Sentence& s) const;
};

struct LexrankSentenceParams {
    double damping = 0.85;
    double tol = 1e-8;
    int max_iter = 200;
    bool rescale = true;
};

// Continuous LexRank over TF-IDF sentence vectors, min-max rescaled to [0,1].
// A constant score vector (including a single-sentence pool) maps to all 0.5.
InformativenessScores lexrank_sentence_scores(const SentencePool& pool,
                                              const LexrankSentenceParams& params = {});

// (ROUGE-1 F1 + ROUGE-2 F1)/2 of each sentence alone against the reference,
// min-max rescaled.
InformativenessScores oracle_scores(const SentencePool& pool,
                                    const std::vector<Sentence>& reference, bool rescale = true);

// JSON Lines, one {"doc_id":..., "sentence_index":..., "score":...} per line.
// Scores are clamped to [0,1] (clamps reported via `warnings`); a pool
// sentence without a score is an error.
InformativenessScores load_external_scores(const std::string& path, const SentencePool& pool,
                                            std::vector<std::string>* warnings = nullptr);

} // namespace cohesum
