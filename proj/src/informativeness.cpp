#include "cohesum/informativeness.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "cohesum/blocks.hpp"
#include "cohesum/metrics.hpp"

namespace cohesum {

namespace {

using Key = std::pair<std::string, int>;

Key key_of(const PoolSentence& p) {
    return {p.sentence.doc_id, p.sentence.index};
}

// Min-max rescale; a flat vector degenerates to all 0.5 so trade-off sweeps
// stay well defined.
void rescale_unit(std::vector<double>& xs) {
    if (xs.empty())
        return;
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi - lo < 1e-12) {
        std::fill(xs.begin(), xs.end(), 0.5);
        return;
    }
    for (double& x : xs)
        x = (x - lo) / (hi - lo);
}

InformativenessScores pack(const SentencePool& pool, std::vector<double> values,
                           std::string provider) {
    InformativenessScores out;
    out.provider_name = std::move(provider);
    for (size_t i = 0; i < pool.size(); ++i)
        out.scores[key_of(pool[i])] = values[i];
    return out;
}

} // namespace

double InformativenessScores::at(const Sentence& s) const {
    auto it = scores.find({s.doc_id, s.index});
    if (it == scores.end())
        throw Error("no informativeness score for (" + s.doc_id + ", " +
                    std::to_string(s.index) + ")");
    return it->second;
}

InformativenessScores lexrank_sentence_scores(const SentencePool& pool,
                                              const LexrankSentenceParams& params) {
    if (pool.empty())
        throw Error("lexrank_sentence_scores: empty pool");
    std::vector<std::vector<std::string>> units;
    units.reserve(pool.size());
    for (const PoolSentence& p : pool)
        units.push_back(p.sentence.tokens);
    const IdfTable idf = IdfTable::fit(units);
    std::vector<SparseVector> vecs;
    vecs.reserve(units.size());
    for (const auto& u : units)
        vecs.push_back(tfidf_vector(u, idf));

    const size_t n = vecs.size();
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            sim[i][j] = sim[j][i] = cosine(vecs[i], vecs[j]);

    std::vector<double> scores =
        lexrank_from_similarity(sim, params.damping, params.tol, params.max_iter);
    if (params.rescale)
        rescale_unit(scores);
    return pack(pool, std::move(scores), "lexrank");
}

InformativenessScores oracle_scores(const SentencePool& pool,
                                    const std::vector<Sentence>& reference, bool rescale) {
    if (pool.empty())
        throw Error("oracle_scores: empty pool");
    if (reference.empty())
        throw Error("oracle_scores: empty reference");
    std::vector<std::string> ref_tokens;
    for (const Sentence& s : reference)
        ref_tokens.insert(ref_tokens.end(), s.tokens.begin(), s.tokens.end());

    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const PoolSentence& p : pool) {
        const double r1 = rouge_n(p.sentence.tokens, ref_tokens, 1).f1;
        const double r2 = rouge_n(p.sentence.tokens, ref_tokens, 2).f1;
        scores.push_back((r1 + r2) / 2.0);
    }
    if (rescale)
        rescale_unit(scores);
    return pack(pool, std::move(scores), "oracle");
}

InformativenessScores load_external_scores(const std::string& path, const SentencePool& pool,
                                            std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open score file: " + path);

    std::map<Key, double> loaded;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("score file " + path + ": malformed line " + std::to_string(line_no) +
                        ": " + e.what());
        }
        if (!rec.contains("doc_id") || !rec.contains("sentence_index") || !rec.contains("score"))
            throw Error("score file " + path + ": malformed line " + std::to_string(line_no) +
                        ": need doc_id, sentence_index, score");
        const Key key{rec["doc_id"].get<std::string>(), rec["sentence_index"].get<int>()};
        double score = rec["score"].get<double>();
        if (score < 0.0 || score > 1.0) {
            if (warnings)
                warnings->push_back("score " + std::to_string(score) + " for (" + key.first +
                                    ", " + std::to_string(key.second) + ") clamped to [0,1]");
            score = std::clamp(score, 0.0, 1.0);
        }
        loaded[key] = score;
    }

    InformativenessScores out;
    out.provider_name = "external";
    std::vector<std::string> missing;
    for (const PoolSentence& p : pool) {
        const Key key = key_of(p);
        auto it = loaded.find(key);
        if (it == loaded.end()) {
            missing.push_back("(" + key.first + ", " + std::to_string(key.second) + ")");
            continue;
        }
        out.scores[key] = it->second;
    }
    if (!missing.empty()) {
        std::string msg = "score file " + path + " missing pool sentences:";
        for (const auto& m : missing)
            msg += " " + m;
        throw Error(msg);
    }
    return out;
}

} // namespace cohesum
