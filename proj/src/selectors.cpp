#include "cohesum/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cohesum/blocks.hpp"

namespace cohesum {

SelectionMethod parse_method(const std::string& name) {
    if (name == "greedy")
        return SelectionMethod::Greedy;
    if (name == "mmr")
        return SelectionMethod::Mmr;
    if (name == "npass")
        return SelectionMethod::Npass;
    if (name == "dist_sim")
        return SelectionMethod::DistSim;
    if (name == "dist_gap")
        return SelectionMethod::DistGap;
    if (name == "kvd")
        return SelectionMethod::Kvd;
    throw Error("unknown selection method: " + name);
}

std::string method_name(SelectionMethod method) {
    switch (method) {
    case SelectionMethod::Greedy: return "greedy";
    case SelectionMethod::Mmr: return "mmr";
    case SelectionMethod::Npass: return "npass";
    case SelectionMethod::DistSim: return "dist_sim";
    case SelectionMethod::DistGap: return "dist_gap";
    case SelectionMethod::Kvd: return "kvd";
    }
    return "greedy";
}

void SelectorConfig::validate() const {
    if (lambda_sel < 0.0 || lambda_sel > 1.0)
        throw Error("lambda_sel must lie in [0,1]");
    if (word_budget < 1)
        throw Error("word_budget must be >= 1");
    if (ngram_n < 1)
        throw Error("ngram_n must be >= 1");
    if (npass_p < 0.0 || npass_p > 1.0)
        throw Error("npass_p must lie in [0,1]");
    if (wm_capacity < 1)
        throw Error("wm_capacity must be >= 1");
    if (nu < 0.0 || nu > 1.0)
        throw Error("nu must lie in [0,1]");
    if (gamma_rec < 0.0 || gamma_rec > 1.0)
        throw Error("gamma_rec must lie in [0,1]");
}

DenseVector sentence_embedding(const Sentence& s, const PhraseEmbedder& embedder) {
    DenseVector acc;
    acc.values.assign(embedder.dims(), 0.0);
    if (s.tokens.empty())
        return acc;
    for (const auto& tok : s.tokens) {
        const DenseVector e = embedder.embed({tok});
        for (int i = 0; i < acc.dims(); ++i)
            acc.values[i] += e.values[i];
    }
    for (double& v : acc.values)
        v /= static_cast<double>(s.tokens.size());
    return l2_normalized(std::move(acc));
}

namespace {

std::set<std::string> sentence_ngram_set(const std::vector<std::string>& tokens, int n) {
    std::set<std::string> out;
    if (static_cast<int>(tokens.size()) < n)
        return out;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g = tokens[i];
        for (int k = 1; k < n; ++k) {
            g.push_back('\x1f');
            g += tokens[i + k];
        }
        out.insert(std::move(g));
    }
    return out;
}

struct PairwiseCosines {
    double mean = 0.0;
    double gap = 0.0; // max - min
    int pairs = 0;
};

PairwiseCosines pairwise_cosines(const std::vector<const DenseVector*>& embeddings) {
    PairwiseCosines out;
    const size_t n = embeddings.size();
    if (n < 2)
        return out;
    double total = 0.0, lo = 2.0, hi = -2.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double c = cosine(*embeddings[i], *embeddings[j]);
            total += c;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            ++out.pairs;
        }
    }
    out.mean = total / out.pairs;
    out.gap = hi - lo;
    return out;
}

// Per-run precomputed per-sentence features.
struct Resources {
    std::vector<SparseVector> tfidf;                 // mmr
    std::vector<DenseVector> embeddings;             // dist_sim / dist_gap
    std::vector<std::vector<NounPhrase>> phrases;    // kvd
    std::vector<std::set<std::string>> ngram_sets;   // npass
};

Resources build_resources(const SentencePool& pool, SelectionMethod method,
                          const SelectorConfig& cfg, const SelectionContext& ctx) {
    Resources res;
    switch (method) {
    case SelectionMethod::Mmr: {
        std::vector<std::vector<std::string>> units;
        units.reserve(pool.size());
        for (const PoolSentence& p : pool)
            units.push_back(p.sentence.tokens);
        const IdfTable idf = IdfTable::fit(units);
        res.tfidf.reserve(units.size());
        for (const auto& u : units)
            res.tfidf.push_back(tfidf_vector(u, idf));
        break;
    }
    case SelectionMethod::DistSim:
    case SelectionMethod::DistGap: {
        if (!ctx.embedder)
            throw Error(method_name(method) + " requires an embedder");
        res.embeddings.reserve(pool.size());
        for (const PoolSentence& p : pool)
            res.embeddings.push_back(sentence_embedding(p.sentence, *ctx.embedder));
        break;
    }
    case SelectionMethod::Kvd: {
        if (!ctx.np_extractor)
            throw Error("kvd requires a noun-phrase extractor");
        res.phrases.reserve(pool.size());
        for (const PoolSentence& p : pool)
            res.phrases.push_back(ctx.np_extractor->extract(
                p.sentence, p.np_spans ? &*p.np_spans : nullptr));
        break;
    }
    case SelectionMethod::Npass: {
        res.ngram_sets.reserve(pool.size());
        for (const PoolSentence& p : pool)
            res.ngram_sets.push_back(sentence_ngram_set(p.sentence.tokens, cfg.ngram_n));
        break;
    }
    case SelectionMethod::Greedy:
        break;
    }
    return res;
}

} // namespace

SummaryResult select(const SentencePool& pool, const InformativenessScores& f_i,
                     SelectionMethod method, const SelectorConfig& cfg,
                     const SelectionContext& ctx) {
    if (pool.empty())
        throw Error("select: empty pool");
    cfg.validate();
    if (method == SelectionMethod::DistSim && !cfg.ref_mean_sim)
        throw Error("dist_sim requires ref_mean_sim (run refstats first)");
    if (method == SelectionMethod::DistGap && !cfg.ref_mean_gap)
        throw Error("dist_gap requires ref_mean_gap (run refstats first)");

    const Resources res = build_resources(pool, method, cfg, ctx);
    const size_t n = pool.size();

    SummaryResult result;
    std::vector<bool> taken(n, false);
    std::vector<int> selected; // pool positions in extraction order
    std::set<std::string> summary_ngrams;
    MemoryState memory;
    std::vector<KvdEvaluation> evals(method == SelectionMethod::Kvd ? n : 0);

    int words = 0;
    for (int step = 0; words < cfg.word_budget &&
                       selected.size() < n; ++step) {
        StepTrace trace;
        trace.step = step;

        int best = -1;
        double best_key = 0.0;
        bool any_admissible = false;
        for (size_t i = 0; i < n; ++i) {
            if (taken[i])
                continue;
            CandidateScore cs;
            cs.informativeness = f_i.at(pool[i].sentence);
            switch (method) {
            case SelectionMethod::Greedy:
                break;
            case SelectionMethod::Mmr: {
                double agg = 0.0;
                if (!selected.empty()) {
                    if (cfg.mmr_aggregate == MmrAggregate::Max) {
                        for (int j : selected)
                            agg = std::max(agg, cosine(res.tfidf[i], res.tfidf[j]));
                    } else {
                        for (int j : selected)
                            agg += cosine(res.tfidf[i], res.tfidf[j]);
                        agg /= static_cast<double>(selected.size());
                    }
                }
                cs.cohesion = -agg;
                break;
            }
            case SelectionMethod::Npass: {
                const auto& grams = res.ngram_sets[i];
                if (!grams.empty()) {
                    size_t overlap = 0;
                    for (const auto& g : grams)
                        if (summary_ngrams.count(g))
                            ++overlap;
                    const double ratio =
                        static_cast<double>(overlap) / static_cast<double>(grams.size());
                    cs.admissible = ratio <= cfg.npass_p;
                }
                break;
            }
            case SelectionMethod::DistSim:
            case SelectionMethod::DistGap: {
                std::vector<const DenseVector*> embs;
                embs.reserve(selected.size() + 1);
                for (int j : selected)
                    embs.push_back(&res.embeddings[j]);
                embs.push_back(&res.embeddings[i]);
                const PairwiseCosines pc = pairwise_cosines(embs);
                if (pc.pairs > 0) {
                    if (method == SelectionMethod::DistSim) {
                        cs.cohesion = -std::abs(*cfg.ref_mean_sim - pc.mean);
                    } else {
                        const double d = std::abs(*cfg.ref_mean_gap - pc.gap);
                        cs.cohesion = cfg.dist_gap_positive ? d : -d;
                    }
                }
                break;
            }
            case SelectionMethod::Kvd: {
                KvdEvaluation ev =
                    evaluate_candidate(res.phrases[i], memory, cfg.nu, cfg.gamma_rec,
                                       cfg.wm_capacity, cfg.evict_before_score);
                cs.cohesion = ev.f_coh;
                evals[i] = std::move(ev);
                break;
            }
            }
            cs.combined = cfg.lambda_sel * cs.informativeness +
                          (1.0 - cfg.lambda_sel) * cs.cohesion;
            trace.candidate_scores[static_cast<int>(i)] = cs;

            // npass picks the most informative admissible candidate; the other
            // methods pick the best combined score. Strictly-greater keeps the
            // lowest pool position on ties.
            const double key = method == SelectionMethod::Npass ? cs.informativeness : cs.combined;
            if (method == SelectionMethod::Npass && !cs.admissible)
                continue;
            any_admissible = true;
            if (best < 0 || key > best_key) {
                best = static_cast<int>(i);
                best_key = key;
            }
        }
        if (method == SelectionMethod::Npass && !any_admissible) {
            // Nothing admissible: relax to greedy for this step.
            trace.npass_relaxed = true;
            for (const auto& [i, cs] : trace.candidate_scores) {
                if (best < 0 || cs.informativeness > best_key) {
                    best = i;
                    best_key = cs.informativeness;
                }
            }
        }

        trace.picked_pool_index = best;
        if (method == SelectionMethod::Kvd) {
            // Re-run assignment against the committed memory (deterministic),
            // then commit the winner.
            std::vector<Assignment> assignments =
                assign_phrases(res.phrases[best], memory, cfg.nu);
            const CommitInfo info = commit_step(memory, assignments, cfg.wm_capacity);
            trace.winner_assignments = std::move(assignments);
            trace.evicted_chain_ids = info.evicted_chain_ids;
            trace.recalled_chain_ids = info.recalled_chain_ids;
        }
        if (method == SelectionMethod::Npass)
            for (const auto& g : res.ngram_sets[best])
                summary_ngrams.insert(g);

        taken[best] = true;
        selected.push_back(best);
        words += pool[best].sentence.word_count();
        result.trace.push_back(std::move(trace));
    }

    for (int i : selected) {
        result.selected.emplace_back(pool[i].sentence.doc_id, pool[i].sentence.index);
        result.selected_pool_indices.push_back(i);
    }
    if (method == SelectionMethod::Kvd) {
        result.chains = memory.working;
        result.chains.insert(result.chains.end(), memory.longterm.begin(),
                             memory.longterm.end());
        std::sort(result.chains.begin(), result.chains.end(),
                  [](const Chain& a, const Chain& b) { return a.id < b.id; });
    }
    result.total_word_count = words;
    result.truncated_word_count = std::min(words, cfg.word_budget);
    return result;
}

ReferenceStats reference_stats(const std::vector<Document>& docs, const PhraseEmbedder& embedder) {
    ReferenceStats stats;
    double sim_total = 0.0, gap_total = 0.0;
    for (const Document& doc : docs) {
        if (!doc.has_reference())
            continue;
        if (doc.reference.size() < 2) {
            ++stats.references_skipped;
            continue;
        }
        std::vector<DenseVector> embs;
        embs.reserve(doc.reference.size());
        for (const Sentence& s : doc.reference)
            embs.push_back(sentence_embedding(s, embedder));
        std::vector<const DenseVector*> ptrs;
        ptrs.reserve(embs.size());
        for (const DenseVector& e : embs)
            ptrs.push_back(&e);
        const PairwiseCosines pc = pairwise_cosines(ptrs);
        sim_total += pc.mean;
        gap_total += pc.gap;
        ++stats.references_used;
    }
    if (stats.references_used == 0)
        throw Error("reference_stats: no reference with >= 2 sentences");
    stats.mean_sim = sim_total / stats.references_used;
    stats.mean_gap = gap_total / stats.references_used;
    return stats;
}

} // namespace cohesum
