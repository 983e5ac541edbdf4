#include "cohesum/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace cohesum {

namespace {

double f1_of(double p, double r) {
    return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

// N-grams as joined token strings; '\x1f' cannot appear inside tokens.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
    std::vector<std::string> out;
    if (n <= 0 || static_cast<int>(tokens.size()) < n)
        return out;
    out.reserve(tokens.size() - n + 1);
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g = tokens[i];
        for (int k = 1; k < n; ++k) {
            g.push_back('\x1f');
            g += tokens[i + k];
        }
        out.push_back(std::move(g));
    }
    return out;
}

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty())
        return 0;
    std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::vector<std::string> concat_tokens(const std::vector<Sentence>& sentences) {
    std::vector<std::string> all;
    for (const Sentence& s : sentences)
        all.insert(all.end(), s.tokens.begin(), s.tokens.end());
    return all;
}

} // namespace

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n) {
    if (n < 1)
        throw Error("rouge_n: n must be >= 1");
    const auto cand = ngrams(candidate, n);
    const auto ref = ngrams(reference, n);
    std::unordered_map<std::string, int> ref_counts;
    for (const auto& g : ref)
        ++ref_counts[g];
    size_t overlap = 0;
    for (const auto& g : cand) {
        auto it = ref_counts.find(g);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    RougeScore score;
    score.precision = cand.empty() ? 0.0 : static_cast<double>(overlap) / cand.size();
    score.recall = ref.empty() ? 0.0 : static_cast<double>(overlap) / ref.size();
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
    RougeScore score;
    if (candidate.empty() || reference.empty())
        return score;
    const double lcs = static_cast<double>(lcs_length(candidate, reference));
    score.precision = lcs / candidate.size();
    score.recall = lcs / reference.size();
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

double rdrl(const std::vector<Sentence>& summary, bool use_recall) {
    const size_t n = summary.size();
    if (n < 2)
        return 0.0;
    double total = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const RougeScore rl = rouge_l(summary[i].tokens, summary[j].tokens);
            total += use_recall ? rl.recall : rl.f1;
            ++pairs;
        }
    }
    return 100.0 * total / static_cast<double>(pairs);
}

double iuniq(const std::vector<Sentence>& summary) {
    const auto tokens = concat_tokens(summary);
    double acc = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const auto grams = ngrams(tokens, n);
        if (grams.empty())
            continue; // contributes 0
        std::set<std::string> distinct(grams.begin(), grams.end());
        acc += 1.0 - static_cast<double>(distinct.size()) / static_cast<double>(grams.size());
    }
    return acc / 3.0;
}

double entity_graph(const std::vector<std::vector<NounPhrase>>& nps_per_sentence,
                    EntityGraphWeighting weighting) {
    const size_t n = nps_per_sentence.size();
    if (n < 2)
        return 0.0;
    std::vector<std::set<std::string>> nouns(n);
    for (size_t i = 0; i < n; ++i) {
        for (const NounPhrase& np : nps_per_sentence[i]) {
            for (const auto& tok : tokenize(np.surface))
                nouns[i].insert(tok);
        }
    }
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            size_t shared = 0;
            for (const auto& t : nouns[i])
                if (nouns[j].count(t))
                    ++shared;
            if (shared == 0)
                continue;
            if (weighting == EntityGraphWeighting::DistanceWeighted)
                total += static_cast<double>(shared) / static_cast<double>(j - i);
            else
                total += 1.0;
        }
    }
    return total / static_cast<double>(n);
}

double entity_graph(const std::vector<Sentence>& summary, const NounPhraseExtractor& chunker,
                    EntityGraphWeighting weighting) {
    std::vector<std::vector<NounPhrase>> nps;
    nps.reserve(summary.size());
    for (const Sentence& s : summary)
        nps.push_back(chunker.extract(s));
    return entity_graph(nps, weighting);
}

ChainStats chain_stats(const std::vector<Chain>& chains,
                       const std::vector<int>& selected_source_indices) {
    ChainStats stats;
    const size_t n_sentences = selected_source_indices.size();
    if (n_sentences == 0)
        return stats;
    std::unordered_map<int, int> position_of; // source index -> summary position
    for (size_t pos = 0; pos < n_sentences; ++pos)
        position_of[selected_source_indices[pos]] = static_cast<int>(pos);

    std::map<int, int> chains_covering; // summary position -> chain count
    double spread_sum = 0.0;
    int spread_chains = 0;
    for (const Chain& chain : chains) {
        std::set<int> positions;
        for (const NounPhrase& np : chain.members) {
            auto it = position_of.find(np.sentence_index);
            if (it != position_of.end())
                positions.insert(it->second);
        }
        for (int p : positions)
            ++chains_covering[p];
        if (positions.size() >= 2) {
            double gap_sum = 0.0;
            int prev = -1, gaps = 0;
            for (int p : positions) {
                if (prev >= 0) {
                    gap_sum += p - prev;
                    ++gaps;
                }
                prev = p;
            }
            spread_sum += gap_sum / gaps;
            ++spread_chains;
        }
    }
    if (spread_chains > 0)
        stats.spread = spread_sum / spread_chains;
    if (!chains_covering.empty()) {
        double density_sum = 0.0;
        for (const auto& [pos, count] : chains_covering)
            density_sum += count;
        stats.density = density_sum / static_cast<double>(chains_covering.size());
    }
    stats.coverage = 100.0 * static_cast<double>(chains_covering.size()) /
                     static_cast<double>(n_sentences);
    return stats;
}

ExtOracleResult ext_oracle(const SentencePool& pool, const std::vector<Sentence>& reference,
                           int word_budget) {
    if (reference.empty())
        throw Error("ext_oracle: empty reference");
    const auto ref_tokens = concat_tokens(reference);

    ExtOracleResult result;
    std::vector<bool> taken(pool.size(), false);
    std::vector<std::string> summary_tokens;
    double objective = 0.0;
    int words = 0;
    while (true) {
        int best = -1;
        double best_objective = objective;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (taken[i])
                continue;
            std::vector<std::string> candidate = summary_tokens;
            candidate.insert(candidate.end(), pool[i].sentence.tokens.begin(),
                             pool[i].sentence.tokens.end());
            const double obj =
                rouge_n(candidate, ref_tokens, 1).f1 + rouge_n(candidate, ref_tokens, 2).f1;
            if (obj > best_objective) {
                best_objective = obj;
                best = static_cast<int>(i);
            }
        }
        if (best < 0)
            break; // no improving addition
        taken[best] = true;
        result.selected_pool_indices.push_back(best);
        summary_tokens.insert(summary_tokens.end(), pool[best].sentence.tokens.begin(),
                              pool[best].sentence.tokens.end());
        objective = best_objective;
        words += pool[best].sentence.word_count();
        if (words >= word_budget)
            break;
    }
    result.objective = objective;
    result.total_word_count = words;
    result.truncated_word_count = std::min(words, word_budget);
    return result;
}

} // namespace cohesum
