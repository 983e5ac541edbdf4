#pragma once
// Segmenting documents into overlapping fixed-length blocks and selecting them
// under a token budget by trading LexRank centrality against redundancy with
// already-selected blocks.

#include <string>
#include <vector>

#include "cohesum/text.hpp"

namespace cohesum {

struct Block {
    int index = 0;                   // position in original document order
    TokenSpan token_range;           // core region over the document token stream
    TokenSpan context_range;         // core extended by surrounding context
    std::vector<int> core_sentences; // sentence indices assigned to this core
    std::vector<std::string> core_tokens;
    SparseVector tfidf;              // over core+context tokens
    int token_count = 0;             // core tokens
};

enum class BlockStrategy { Balanced, Original, Oracle, MaxRedundancy };

BlockStrategy parse_block_strategy(const std::string& name);
std::string block_strategy_name(BlockStrategy strategy);

struct BlockSelectionConfig {
    int block_size = 2048;
    int context_size = 200;
    double lambda_b = 0.2;
    double damping = 0.85;
    int budget = 16384;
    BlockStrategy strategy = BlockStrategy::Balanced;
    int pool_cap = 1000;
    double lexrank_tol = 1e-8;
    int lexrank_max_iter = 200;

    void validate() const; // throws Error on out-of-range values
};

// Core regions of block_size tokens partition each source segment's token
// stream; a sentence straddling a core boundary goes to the block holding its
// first token. Context extends up to context_size tokens each side, clamped to
// the segment.
std::vector<Block> segment_blocks(const Document& doc, const BlockSelectionConfig& cfg);

// Pairwise TF-IDF cosine over core+context tokens; diagonal left at 0.
std::vector<std::vector<double>> block_similarity(const std::vector<Block>& blocks);

// Continuous LexRank fixed point on the complete graph (self-similarity
// excluded), by power iteration:
//   LR(b) = d/|B| + (1-d) * sum_v Sim(b,v)/colsum(v) * LR(v)
// Rows with zero similarity everywhere distribute their mass uniformly.
std::vector<double> lexrank_from_similarity(const std::vector<std::vector<double>>& sim,
                                            double damping, double tol = 1e-8,
                                            int max_iter = 200);
std::vector<double> lexrank(const std::vector<Block>& blocks, double damping, double tol = 1e-8,
                            int max_iter = 200);

// Returns block positions (indices into `blocks`) in selection order. Strategy
// `balanced` maximizes lambda_b*LR(b) - (1-lambda_b)*max Sim to the selected
// set; `max_redundancy` flips the similarity sign; `original` keeps document
// order; `oracle` orders by ROUGE-1+ROUGE-2 F1 of the core text against the
// reference. Selection stops before a pick would push the core-token total
// past the budget. Ties break toward the lower block index.
std::vector<int> select_blocks(const std::vector<Block>& blocks,
                               const std::vector<double>& lexrank_scores,
                               const BlockSelectionConfig& cfg,
                               const std::vector<Sentence>* reference = nullptr);

// Core sentences of the selected blocks, in selection order, truncated to cap.
SentencePool assemble_pool(const Document& doc, const std::vector<Block>& blocks,
                           const std::vector<int>& selected, int cap = 1000);

} // namespace cohesum
