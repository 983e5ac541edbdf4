#pragma once
// Deterministic synthetic corpus: topic-clustered sentences built from a
// reusable noun vocabulary, with whole passages duplicated 2-4 times per
// document (duplicates planted early in source order). Passages are exactly
// one block long under the matching config, so duplicate passages become
// duplicate blocks.

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cohesum/harness.hpp"
#include "cohesum/text.hpp"

namespace testsupport {

inline std::string topic_noun(int topic, int i) {
    static const std::vector<std::string> syl = {"ka", "lo", "mi",  "ta",  "re",  "su",
                                                 "ne", "vo", "da",  "pel", "gor", "tin"};
    return syl[topic % 12] + syl[i % 12] + syl[(topic * 5 + i * 3) % 12];
}

inline std::string topic_sentence(int topic, std::mt19937& rng) {
    auto noun = [&] { return topic_noun(topic, static_cast<int>(rng() % 8)); };
    std::ostringstream out;
    out << "the " << noun() << " of the " << noun() << " and the " << noun() << " with the "
        << noun() << " " << noun();
    return out.str(); // 12 tokens
}

// 4 sentences x 12 tokens = 48 tokens, one block under synthetic_config().
inline std::vector<std::string> topic_passage(int topic, std::mt19937& rng) {
    std::vector<std::string> out;
    for (int s = 0; s < 4; ++s)
        out.push_back(topic_sentence(topic, rng));
    return out;
}

struct SyntheticCorpus {
    std::vector<cohesum::Document> docs;
    std::string jsonl; // the same corpus as an ingestible file body
};

inline SyntheticCorpus synthetic_corpus(int n_docs = 20, unsigned seed = 42) {
    std::mt19937 rng(seed);
    SyntheticCorpus corpus;
    std::ostringstream jsonl;

    for (int d = 0; d < n_docs; ++d) {
        const int t0 = d % 6, t1 = (d + 1) % 6, t2 = (d + 2) % 6, t3 = (d + 3) % 6;
        const std::vector<std::string> hub = topic_passage(t0, rng);
        const int copies = 2 + static_cast<int>(rng() % 3); // hub appears 2-4 times
        std::vector<int> dup_slots = {0, 1};
        if (copies >= 3)
            dup_slots.push_back(3);
        if (copies >= 4)
            dup_slots.push_back(5);

        const std::vector<int> fresh_topics = {t1, t2, t3};
        std::vector<std::vector<std::string>> passages(10);
        std::vector<std::string> reference;
        int fresh_count = 0;
        for (int slot = 0; slot < 10; ++slot) {
            if (std::find(dup_slots.begin(), dup_slots.end(), slot) != dup_slots.end()) {
                passages[slot] = hub;
                continue;
            }
            const int topic = fresh_topics[fresh_count % 3];
            passages[slot] = topic_passage(topic, rng);
            if (fresh_count < 3)
                reference.push_back(passages[slot][0]); // one sentence per fresh topic
            ++fresh_count;
        }

        char id[16];
        std::snprintf(id, sizeof id, "syn%02d", d);
        cohesum::Document doc;
        doc.id = id;
        for (const auto& passage : passages) {
            for (const std::string& text : passage) {
                cohesum::Sentence s;
                s.doc_id = doc.id;
                s.index = static_cast<int>(doc.sentences.size());
                s.text = text;
                s.tokens = cohesum::tokenize(text);
                doc.sentences.push_back(std::move(s));
            }
        }
        for (size_t i = 0; i < reference.size(); ++i) {
            cohesum::Sentence s;
            s.doc_id = doc.id;
            s.index = static_cast<int>(i);
            s.text = reference[i];
            s.tokens = cohesum::tokenize(reference[i]);
            doc.reference.push_back(std::move(s));
        }

        jsonl << R"({"id":")" << id << R"(","sentences":[)";
        for (size_t i = 0; i < doc.sentences.size(); ++i)
            jsonl << (i ? "," : "") << '"' << doc.sentences[i].text << '"';
        jsonl << R"(],"reference":[)";
        for (size_t i = 0; i < doc.reference.size(); ++i)
            jsonl << (i ? "," : "") << '"' << doc.reference[i].text << '"';
        jsonl << "]}\n";

        corpus.docs.push_back(std::move(doc));
    }
    corpus.jsonl = jsonl.str();
    return corpus;
}

// Block geometry matching the 48-token passages: six of ten blocks fit the
// budget, and the word budget covers three sentences.
inline cohesum::RunConfig synthetic_config() {
    cohesum::RunConfig cfg;
    cfg.block.block_size = 48;
    cfg.block.context_size = 12;
    cfg.block.budget = 288;
    cfg.selector.word_budget = 36;
    return cfg;
}

} // namespace testsupport
