#pragma once
// Budgeted sentence selection: at each step the candidate maximizing
//   lambda_sel * f_I(s) + (1 - lambda_sel) * f_C(summary + s)
// is extracted, with f_C supplied by the chosen method (none, MMR similarity,
// n-gram admissibility, distance to reference similarity statistics, or the
// working-memory chain simulation).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cohesum/informativeness.hpp"
#include "cohesum/kvd.hpp"
#include "cohesum/text.hpp"

namespace cohesum {

enum class SelectionMethod { Greedy, Mmr, Npass, DistSim, DistGap, Kvd };

SelectionMethod parse_method(const std::string& name);
std::string method_name(SelectionMethod method);

enum class MmrAggregate { Max, Mean };

struct SelectorConfig {
    double lambda_sel = 0.8;
    int word_budget = 200;
    int ngram_n = 2;
    double npass_p = 0.8;
    int wm_capacity = 6;
    double nu = 0.6;
    double gamma_rec = 0.01;
    std::optional<double> ref_mean_sim; // required by dist_sim
    std::optional<double> ref_mean_gap; // required by dist_gap
    MmrAggregate mmr_aggregate = MmrAggregate::Max;
    // The gap term is negated like the similarity term by default; set to use
    // the positive form instead.
    bool dist_gap_positive = false;
    bool evict_before_score = false;

    void validate() const; // throws Error on out-of-range values
};

struct CandidateScore {
    double informativeness = 0.0;
    double cohesion = 0.0;
    double combined = 0.0;
    bool admissible = true; // npass only; always true elsewhere
};

struct StepTrace {
    int step = 0;
    int picked_pool_index = -1;
    std::map<int, CandidateScore> candidate_scores; // keyed by pool position
    bool npass_relaxed = false; // no candidate admissible; fell back to greedy
    // kvd bookkeeping for the committed winner
    std::vector<Assignment> winner_assignments;
    std::vector<int> evicted_chain_ids;
    std::vector<int> recalled_chain_ids;
};

struct SummaryResult {
    std::vector<std::pair<std::string, int>> selected; // extraction order
    std::vector<int> selected_pool_indices;
    std::vector<StepTrace> trace;
    std::vector<Chain> chains; // kvd only: final working + long-term chains
    int total_word_count = 0;
    int truncated_word_count = 0;
};

struct SelectionContext {
    const PhraseEmbedder* embedder = nullptr;          // dist_sim / dist_gap
    const NounPhraseExtractor* np_extractor = nullptr; // kvd
};

// Selects until the cumulative word count reaches the budget (the crossing
// sentence is included) or the pool is exhausted. Ties break toward the lower
// pool position.
SummaryResult select(const SentencePool& pool, const InformativenessScores& f_i,
                     SelectionMethod method, const SelectorConfig& cfg,
                     const SelectionContext& ctx = {});

// L2-normalized mean of per-token embeddings.
DenseVector sentence_embedding(const Sentence& s, const PhraseEmbedder& embedder);

struct ReferenceStats {
    double mean_sim = 0.0;
    double mean_gap = 0.0;
    int references_used = 0;
    int references_skipped = 0;
};

// Mean over reference summaries of the mean pairwise sentence-embedding cosine
// and of the max-min cosine gap. References with fewer than two sentences are
// skipped; all skipped is an error.
ReferenceStats reference_stats(const std::vector<Document>& docs, const PhraseEmbedder& embedder);

} // namespace cohesum
