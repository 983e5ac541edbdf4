#pragma once
// Summary evaluation: ROUGE-1/2/L, pairwise redundancy (RdRL), inverse
// uniqueness (IUniq), entity-graph cohesion, chain statistics, and the
// greedy extractive oracle.

#include <optional>
#include <vector>

#include "cohesum/kvd.hpp"
#include "cohesum/text.hpp"

namespace cohesum {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Clipped n-gram overlap (multiset intersection). Zero denominators yield 0.
RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n);

// LCS-based ROUGE-L.
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

// Mean pairwise sentence-level ROUGE-L, scaled to [0,100]. Fewer than two
// sentences -> 0. F1 by default; recall when use_recall is set.
double rdrl(const std::vector<Sentence>& summary, bool use_recall = false);

// 1 - distinct/total n-grams over the concatenated token stream, averaged over
// n = 1..3. An n with no n-grams contributes 0.
double iuniq(const std::vector<Sentence>& summary);

enum class EntityGraphWeighting { DistanceWeighted, Binary };

// Sentence graph over shared noun tokens; returns the summed edge weight
// divided by the sentence count. Noun tokens per sentence may be supplied
// directly (one NounPhrase list per sentence) or derived with a chunker.
double entity_graph(const std::vector<std::vector<NounPhrase>>& nps_per_sentence,
                    EntityGraphWeighting weighting = EntityGraphWeighting::DistanceWeighted);
double entity_graph(const std::vector<Sentence>& summary, const NounPhraseExtractor& chunker,
                    EntityGraphWeighting weighting = EntityGraphWeighting::DistanceWeighted);

struct ChainStats {
    double spread = 0.0;   // mean gap between consecutive covered positions
    double density = 0.0;  // mean chains per covered sentence
    double coverage = 0.0; // percent of sentences covered by any chain
};

// Chains are mapped onto summary positions via the extraction-ordered source
// indices of the summary sentences. Chains covering fewer than two distinct
// positions are excluded from spread.
ChainStats chain_stats(const std::vector<Chain>& chains,
                       const std::vector<int>& selected_source_indices);

struct MetricsReport {
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rougeL = 0.0;
    double rdrl = 0.0;
    double iuniq = 0.0;
    double egr = 0.0;
    std::optional<double> chain_spread;
    std::optional<double> chain_density;
    std::optional<double> chain_coverage;
};

struct ExtOracleResult {
    std::vector<int> selected_pool_indices; // extraction order
    double objective = 0.0;                 // final ROUGE-1 F1 + ROUGE-2 F1
    int total_word_count = 0;
    int truncated_word_count = 0;
};

// Greedily adds the pool sentence that most improves ROUGE-1 F1 + ROUGE-2 F1
// of the growing summary against the reference; stops when nothing improves or
// the budget is met (budget-crossing sentence included).
ExtOracleResult ext_oracle(const SentencePool& pool, const std::vector<Sentence>& reference,
                           int word_budget);

} // namespace cohesum
