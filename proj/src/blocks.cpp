#include "cohesum/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cohesum/metrics.hpp"

namespace cohesum {

BlockStrategy parse_block_strategy(const std::string& name) {
    if (name == "balanced")
        return BlockStrategy::Balanced;
    if (name == "original")
        return BlockStrategy::Original;
    if (name == "oracle")
        return BlockStrategy::Oracle;
    if (name == "max_redundancy")
        return BlockStrategy::MaxRedundancy;
    throw Error("unknown block strategy: " + name);
}

std::string block_strategy_name(BlockStrategy strategy) {
    switch (strategy) {
    case BlockStrategy::Balanced: return "balanced";
    case BlockStrategy::Original: return "original";
    case BlockStrategy::Oracle: return "oracle";
    case BlockStrategy::MaxRedundancy: return "max_redundancy";
    }
    return "balanced";
}

void BlockSelectionConfig::validate() const {
    if (block_size < 1)
        throw Error("block_size must be >= 1");
    if (context_size < 0)
        throw Error("context_size must be >= 0");
    if (lambda_b < 0.0 || lambda_b > 1.0)
        throw Error("lambda_b must lie in [0,1]");
    if (damping <= 0.0 || damping >= 1.0)
        throw Error("damping must lie in (0,1)");
    if (budget < block_size)
        throw Error("budget must be >= block_size");
    if (pool_cap < 1)
        throw Error("pool_cap must be >= 1");
}

std::vector<Block> segment_blocks(const Document& doc, const BlockSelectionConfig& cfg) {
    if (doc.sentences.empty())
        throw Error("segment_blocks: empty document " + doc.id);

    // Global token offsets per sentence.
    const int n_sentences = static_cast<int>(doc.sentences.size());
    std::vector<int> first_token(n_sentences);
    int total_tokens = 0;
    for (int i = 0; i < n_sentences; ++i) {
        first_token[i] = total_tokens;
        total_tokens += doc.sentences[i].word_count();
    }

    // Segment boundaries as sentence indices; blocks never cross them.
    std::vector<int> breaks = doc.source_breaks;
    std::sort(breaks.begin(), breaks.end());
    if (breaks.empty() || breaks.front() != 0)
        breaks.insert(breaks.begin(), 0);
    breaks.push_back(n_sentences);

    std::vector<Block> blocks;
    for (size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
        const int seg_begin = breaks[seg];
        const int seg_end = breaks[seg + 1]; // exclusive sentence index
        if (seg_begin >= seg_end)
            continue;
        const int seg_start_tok = first_token[seg_begin];
        const int seg_end_tok = seg_end < n_sentences ? first_token[seg_end] : total_tokens;

        const size_t seg_first_block = blocks.size();
        int cur_window = -1;
        for (int s = seg_begin; s < seg_end; ++s) {
            const int window = (first_token[s] - seg_start_tok) / cfg.block_size;
            if (blocks.size() == seg_first_block || window != cur_window) {
                Block b;
                b.index = static_cast<int>(blocks.size());
                b.token_range = {first_token[s], first_token[s]};
                blocks.push_back(std::move(b));
                cur_window = window;
            }
            Block& cur = blocks.back();
            cur.core_sentences.push_back(s);
            cur.token_range.end = first_token[s] + doc.sentences[s].word_count();
            cur.token_count = cur.token_range.end - cur.token_range.start;
        }
        for (size_t i = seg_first_block; i < blocks.size(); ++i) {
            Block& b = blocks[i];
            b.context_range.start = std::max(seg_start_tok, b.token_range.start - cfg.context_size);
            b.context_range.end = std::min(seg_end_tok, b.token_range.end + cfg.context_size);
        }
    }

    // Token stream for core and context slicing.
    std::vector<std::string> stream;
    stream.reserve(total_tokens);
    for (const Sentence& s : doc.sentences)
        stream.insert(stream.end(), s.tokens.begin(), s.tokens.end());

    std::vector<std::vector<std::string>> block_tokens;
    block_tokens.reserve(blocks.size());
    for (Block& b : blocks) {
        b.core_tokens.assign(stream.begin() + b.token_range.start,
                             stream.begin() + b.token_range.end);
        block_tokens.emplace_back(stream.begin() + b.context_range.start,
                                  stream.begin() + b.context_range.end);
    }
    const IdfTable idf = IdfTable::fit(block_tokens);
    for (size_t i = 0; i < blocks.size(); ++i)
        blocks[i].tfidf = tfidf_vector(block_tokens[i], idf);
    return blocks;
}

std::vector<std::vector<double>> block_similarity(const std::vector<Block>& blocks) {
    const size_t n = blocks.size();
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            sim[i][j] = sim[j][i] = cosine(blocks[i].tfidf, blocks[j].tfidf);
    return sim;
}

std::vector<double> lexrank_from_similarity(const std::vector<std::vector<double>>& sim,
                                            double damping, double tol, int max_iter) {
    const size_t n = sim.size();
    if (n == 0)
        throw Error("lexrank: empty graph");
    if (n == 1)
        return {1.0};

    // Column v holds Sim(b,v)/colsum(v); zero columns fall back to uniform so
    // the map stays stochastic.
    std::vector<double> colsum(n, 0.0);
    for (size_t v = 0; v < n; ++v)
        for (size_t b = 0; b < n; ++b)
            if (b != v)
                colsum[v] += sim[b][v];

    std::vector<double> scores(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n, 0.0);
    const double teleport = damping / static_cast<double>(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        for (size_t b = 0; b < n; ++b) {
            double acc = 0.0;
            for (size_t v = 0; v < n; ++v) {
                if (v == b)
                    continue;
                const double w = colsum[v] > 0.0
                                     ? sim[b][v] / colsum[v]
                                     : 1.0 / static_cast<double>(n - 1);
                acc += w * scores[v];
            }
            next[b] = teleport + (1.0 - damping) * acc;
        }
        double max_delta = 0.0;
        for (size_t b = 0; b < n; ++b)
            max_delta = std::max(max_delta, std::abs(next[b] - scores[b]));
        scores.swap(next);
        if (max_delta < tol)
            break;
    }
    return scores;
}

std::vector<double> lexrank(const std::vector<Block>& blocks, double damping, double tol,
                            int max_iter) {
    return lexrank_from_similarity(block_similarity(blocks), damping, tol, max_iter);
}

std::vector<int> select_blocks(const std::vector<Block>& blocks,
                               const std::vector<double>& lexrank_scores,
                               const BlockSelectionConfig& cfg,
                               const std::vector<Sentence>* reference) {
    const size_t n = blocks.size();
    std::vector<int> order;

    if (cfg.strategy == BlockStrategy::Original) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    } else if (cfg.strategy == BlockStrategy::Oracle) {
        if (!reference || reference->empty())
            throw Error("oracle block strategy requires a reference summary");
        std::vector<std::string> ref_tokens;
        for (const Sentence& s : *reference)
            ref_tokens.insert(ref_tokens.end(), s.tokens.begin(), s.tokens.end());
        // Per-block score is static, so greedy picking is a stable sort on
        // core-text ROUGE-1+ROUGE-2 F1, descending.
        std::vector<double> rouge(n, 0.0);
        for (size_t b = 0; b < n; ++b)
            rouge[b] = rouge_n(blocks[b].core_tokens, ref_tokens, 1).f1 +
                       rouge_n(blocks[b].core_tokens, ref_tokens, 2).f1;
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return rouge[a] > rouge[b]; });
    } else {
        if (lexrank_scores.size() != n)
            throw Error("select_blocks: lexrank scores missing");
        const auto sim = block_similarity(blocks);
        const double sign = cfg.strategy == BlockStrategy::MaxRedundancy ? 1.0 : -1.0;
        std::vector<bool> taken(n, false);
        for (size_t step = 0; step < n; ++step) {
            int best = -1;
            double best_score = 0.0;
            for (size_t b = 0; b < n; ++b) {
                if (taken[b])
                    continue;
                double max_sim = 0.0; // defined as 0 when nothing is selected yet
                for (int j : order)
                    max_sim = std::max(max_sim, sim[b][j]);
                const double score =
                    cfg.lambda_b * lexrank_scores[b] + sign * (1.0 - cfg.lambda_b) * max_sim;
                if (best < 0 || score > best_score) {
                    best = static_cast<int>(b);
                    best_score = score;
                }
            }
            taken[best] = true;
            order.push_back(best);
        }
    }

    // Budget: stop before the pick that would cross it.
    std::vector<int> selected;
    int tokens = 0;
    for (int b : order) {
        if (tokens + blocks[b].token_count > cfg.budget)
            break;
        tokens += blocks[b].token_count;
        selected.push_back(b);
    }
    return selected;
}

SentencePool assemble_pool(const Document& doc, const std::vector<Block>& blocks,
                           const std::vector<int>& selected, int cap) {
    SentencePool pool;
    for (int b : selected) {
        for (int s : blocks[b].core_sentences) {
            if (static_cast<int>(pool.size()) >= cap)
                return pool;
            PoolSentence entry;
            entry.sentence = doc.sentences[s];
            if (doc.np_spans && s < static_cast<int>(doc.np_spans->size()))
                entry.np_spans = (*doc.np_spans)[s];
            pool.push_back(std::move(entry));
        }
    }
    return pool;
}

} // namespace cohesum
