#pragma once
// Working-memory simulation for cohesion-aware sentence selection: lexical
// chains of noun phrases live in a capacity-limited working buffer T backed by
// a long-term store G. Candidate sentences are scored by the strength and
// recency of the cohesive ties they would form.

#include <vector>

#include "cohesum/text.hpp"

namespace cohesum {

struct Chain {
    int id = 0; // creation-ordered, unique within a run
    std::vector<NounPhrase> members;
    int last_retained_step = 0;
};

// T (working) and G (long-term) are disjoint chain buffers. A chain lives in
// exactly one of them.
struct MemoryState {
    std::vector<Chain> working;
    std::vector<Chain> longterm;
    int step = 0;
    int next_chain_id = 0;

    const Chain* find_chain(int id) const;
    Chain* find_chain(int id);
};

enum class AssignTarget {
    Existing, // chain resident in T at assignment time
    Recalled, // chain matched in G; moves to T on commit
    Fresh,    // new single-member chain created in T
};

struct Assignment {
    NounPhrase phrase;
    AssignTarget target = AssignTarget::Fresh;
    int chain_id = 0;
    double similarity = 0.0; // phi at assignment time; 0 for fresh chains
};

// Mean cosine between the phrase and each chain member, clamped at 0 so
// mixed-sign embedding providers cannot produce negative ties.
double phi(const NounPhrase& np, const Chain& chain);

// Assigns each phrase in order: best chain in T if phi >= nu, else best chain
// in G (recall), else a fresh chain. Grows chains as it goes, so later phrases
// of the same sentence see earlier ones' chains. Ties break toward the chain
// with the greater last_retained_step, then the lower id.
std::vector<Assignment> assign_phrases(const std::vector<NounPhrase>& phrases, MemoryState& mem,
                                       double nu);

// Cohesion score of one candidate's assignments:
//   mean over ties to T of phi/rec  +  gamma_rec * mean over recalls of phi/rec
// where rec(C) = max(1, step - last_retained_step). Fresh chains contribute to
// neither term.
double score_candidate(const std::vector<Assignment>& assignments, const MemoryState& mem,
                       double gamma_rec);

struct CommitInfo {
    std::vector<int> evicted_chain_ids;
    std::vector<int> recalled_chain_ids;
};

// Moves recalled chains into T, refreshes recency of touched chains, keeps the
// wm_capacity most recent chains in T (ties: most recently created first), and
// evicts the rest to G with their recency frozen. Increments the step.
CommitInfo commit_step(MemoryState& mem, const std::vector<Assignment>& assignments,
                       int wm_capacity);

struct KvdEvaluation {
    double f_coh = 0.0;
    std::vector<Assignment> assignments;
};

// Scores one candidate sentence's phrases against a scratch copy of the
// memory; the committed state is never touched. With evict_before_score the
// memory update (including eviction) is applied to the scratch before scoring.
KvdEvaluation evaluate_candidate(const std::vector<NounPhrase>& phrases, const MemoryState& mem,
                                 double nu, double gamma_rec, int wm_capacity,
                                 bool evict_before_score = false);

} // namespace cohesum
