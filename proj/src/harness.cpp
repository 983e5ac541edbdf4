#include "cohesum/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace cohesum {

namespace {

std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

double round6(double x) {
    return std::round(x * 1e6) / 1e6;
}

std::string trim_copy(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw Error("expected a boolean, got: " + v);
}

std::string sanitize_filename(const std::string& id) {
    std::string out;
    for (char c : id)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                              c == '.'
                          ? c
                          : '_');
    return out.empty() ? "_" : out;
}

Sentence make_sentence(const std::string& doc_id, int index, std::string text) {
    Sentence s;
    s.doc_id = doc_id;
    s.index = index;
    s.tokens = tokenize(text);
    s.text = std::move(text);
    return s;
}

} // namespace

Provider parse_provider(const std::string& name) {
    if (name == "lexrank")
        return Provider::Lexrank;
    if (name == "oracle")
        return Provider::Oracle;
    if (name == "external")
        return Provider::External;
    throw Error("unknown informativeness provider: " + name);
}

std::string provider_name(Provider provider) {
    switch (provider) {
    case Provider::Lexrank: return "lexrank";
    case Provider::Oracle: return "oracle";
    case Provider::External: return "external";
    }
    return "lexrank";
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "input") cfg.input_path = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "method") cfg.method = parse_method(value);
    else if (key == "provider") cfg.provider = parse_provider(value);
    else if (key == "external_scores") cfg.external_scores_path = value;
    else if (key == "stopwords") cfg.stopwords_path = value;
    else if (key == "embedder") {
        if (value == "hashed") cfg.embedder_kind = EmbedderKind::Hashed;
        else if (value == "file") cfg.embedder_kind = EmbedderKind::File;
        else throw Error("unknown embedder kind: " + value);
    }
    else if (key == "embedding_file") cfg.embedding_file = value;
    else if (key == "ref_stats") cfg.ref_stats_path = value;
    else if (key == "emit_trace") cfg.emit_trace = parse_bool(value);
    else if (key == "block.block_size") cfg.block.block_size = std::stoi(value);
    else if (key == "block.context_size") cfg.block.context_size = std::stoi(value);
    else if (key == "block.lambda_b") cfg.block.lambda_b = std::stod(value);
    else if (key == "block.damping") cfg.block.damping = std::stod(value);
    else if (key == "block.budget") cfg.block.budget = std::stoi(value);
    else if (key == "block.strategy") cfg.block.strategy = parse_block_strategy(value);
    else if (key == "block.pool_cap") cfg.block.pool_cap = std::stoi(value);
    else if (key == "selector.lambda_sel") cfg.selector.lambda_sel = std::stod(value);
    else if (key == "selector.word_budget") cfg.selector.word_budget = std::stoi(value);
    else if (key == "selector.ngram_n") cfg.selector.ngram_n = std::stoi(value);
    else if (key == "selector.npass_p") cfg.selector.npass_p = std::stod(value);
    else if (key == "selector.wm") cfg.selector.wm_capacity = std::stoi(value);
    else if (key == "selector.nu") cfg.selector.nu = std::stod(value);
    else if (key == "selector.gamma_rec") cfg.selector.gamma_rec = std::stod(value);
    else if (key == "selector.ref_mean_sim") cfg.selector.ref_mean_sim = std::stod(value);
    else if (key == "selector.ref_mean_gap") cfg.selector.ref_mean_gap = std::stod(value);
    else if (key == "selector.mmr_aggregate") {
        if (value == "max") cfg.selector.mmr_aggregate = MmrAggregate::Max;
        else if (value == "mean") cfg.selector.mmr_aggregate = MmrAggregate::Mean;
        else throw Error("unknown mmr aggregate: " + value);
    }
    else if (key == "selector.dist_gap_positive")
        cfg.selector.dist_gap_positive = parse_bool(value);
    else if (key == "selector.evict_before_score")
        cfg.selector.evict_before_score = parse_bool(value);
    else if (key == "ingest.min_sentence_tokens") cfg.ingestion.min_sentence_tokens = std::stoi(value);
    else if (key == "ingest.max_sentence_tokens") cfg.ingestion.max_sentence_tokens = std::stoi(value);
    else if (key == "ingest.min_doc_sentences") cfg.ingestion.min_doc_sentences = std::stoi(value);
    else if (key == "metrics.rdrl_use_recall") cfg.rdrl_use_recall = parse_bool(value);
    else if (key == "metrics.entity_graph_weighting") {
        if (value == "distance") cfg.eg_weighting = EntityGraphWeighting::DistanceWeighted;
        else if (value == "binary") cfg.eg_weighting = EntityGraphWeighting::Binary;
        else throw Error("unknown entity graph weighting: " + value);
    }
    else if (key == "informativeness.rescale") cfg.rescale_informativeness = parse_bool(value);
    else throw Error("unknown config key: " + key);
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim_copy(line);
        if (line.empty())
            continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path + ": line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim_copy(line.substr(0, eq));
        const std::string value = trim_copy(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::exception& e) {
            throw Error(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    const size_t n = text.size();
    for (size_t i = 0; i < n; ++i) {
        const char c = text[i];
        cur.push_back(c);
        if (c != '.' && c != '!' && c != '?')
            continue;
        size_t j = i + 1;
        while (j < n && (text[j] == '"' || text[j] == '\'' || text[j] == ')' || text[j] == ']')) {
            cur.push_back(text[j]);
            ++j;
        }
        if (j >= n || std::isspace(static_cast<unsigned char>(text[j]))) {
            const std::string s = trim_copy(cur);
            if (!s.empty())
                out.push_back(s);
            cur.clear();
            i = j; // the whitespace itself is consumed by the loop increment
        } else {
            // mid-token punctuation ("3.5", "e.g.x") does not end a sentence;
            // the closers scanned by j are already in cur
            i = j - 1;
        }
    }
    const std::string tail = trim_copy(cur);
    if (!tail.empty())
        out.push_back(tail);
    return out;
}

namespace {

struct RawSentence {
    std::string text;
    std::optional<std::vector<TokenSpan>> spans;
    int source = 0;
};

std::vector<Sentence> build_reference(const std::string& doc_id, const json& rec) {
    std::vector<std::string> texts;
    if (rec["reference"].is_string()) {
        texts = split_sentences(rec["reference"].get<std::string>());
    } else {
        for (const auto& s : rec["reference"])
            texts.push_back(s.get<std::string>());
    }
    std::vector<Sentence> ref;
    for (size_t i = 0; i < texts.size(); ++i)
        ref.push_back(make_sentence(doc_id, static_cast<int>(i), texts[i]));
    return ref;
}

} // namespace

IngestReport ingest(const std::string& path, const IngestionConfig& cfg) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open input file: " + path);

    IngestReport report;
    std::set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path + ": malformed JSON at line " + std::to_string(line_no) + ": " +
                        e.what());
        }
        if (!rec.contains("id"))
            throw Error(path + ": line " + std::to_string(line_no) + ": record has no id");
        const std::string id = rec["id"].is_string()
                                   ? rec["id"].get<std::string>()
                                   : rec["id"].dump();
        if (!seen_ids.insert(id).second)
            throw Error(path + ": line " + std::to_string(line_no) + ": duplicate id " + id);

        std::vector<RawSentence> raw;
        if (rec.contains("sentences")) {
            const auto& arr = rec["sentences"];
            std::vector<std::vector<TokenSpan>> spans;
            if (rec.contains("np_spans")) {
                const auto& sp = rec["np_spans"];
                if (sp.size() != arr.size())
                    throw Error(path + ": line " + std::to_string(line_no) +
                                ": np_spans length does not match sentences");
                for (const auto& per_sentence : sp) {
                    std::vector<TokenSpan> list;
                    for (const auto& pair : per_sentence)
                        list.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
                    spans.push_back(std::move(list));
                }
            }
            for (size_t i = 0; i < arr.size(); ++i) {
                RawSentence rs;
                rs.text = arr[i].get<std::string>();
                if (!spans.empty())
                    rs.spans = spans[i];
                raw.push_back(std::move(rs));
            }
        } else if (rec.contains("text")) {
            if (rec.contains("np_spans"))
                throw Error(path + ": line " + std::to_string(line_no) +
                            ": np_spans requires pre-split sentences");
            for (auto& s : split_sentences(rec["text"].get<std::string>()))
                raw.push_back({std::move(s), std::nullopt, 0});
        } else if (rec.contains("documents")) {
            if (rec.contains("np_spans"))
                throw Error(path + ": line " + std::to_string(line_no) +
                            ": np_spans requires pre-split sentences");
            int source = 0;
            for (const auto& d : rec["documents"]) {
                for (auto& s : split_sentences(d.get<std::string>()))
                    raw.push_back({std::move(s), std::nullopt, source});
                ++source;
            }
        } else {
            throw Error(path + ": line " + std::to_string(line_no) +
                        ": record needs sentences, text, or documents");
        }

        Document doc;
        doc.id = id;
        std::vector<std::vector<TokenSpan>> kept_spans;
        bool any_spans = false;
        int last_source = -1;
        for (RawSentence& rs : raw) {
            std::vector<std::string> tokens = tokenize(rs.text);
            std::string text = rs.text;
            if (static_cast<int>(tokens.size()) > cfg.max_sentence_tokens) {
                tokens.resize(cfg.max_sentence_tokens);
                text = join_tokens(tokens);
                if (rs.spans) {
                    std::vector<TokenSpan> clamped;
                    for (const TokenSpan& sp : *rs.spans)
                        if (sp.end <= cfg.max_sentence_tokens)
                            clamped.push_back(sp);
                    rs.spans = std::move(clamped);
                }
            }
            if (static_cast<int>(tokens.size()) < cfg.min_sentence_tokens)
                continue;
            Sentence s;
            s.doc_id = id;
            s.index = static_cast<int>(doc.sentences.size());
            s.text = std::move(text);
            s.tokens = std::move(tokens);
            if (rs.source != last_source) {
                doc.source_breaks.push_back(s.index);
                last_source = rs.source;
            }
            doc.sentences.push_back(std::move(s));
            kept_spans.push_back(rs.spans.value_or(std::vector<TokenSpan>{}));
            any_spans = any_spans || rs.spans.has_value();
        }
        if (static_cast<int>(doc.sentences.size()) < cfg.min_doc_sentences) {
            report.skipped.push_back(id + ": only " + std::to_string(doc.sentences.size()) +
                                     " sentences after filtering (min " +
                                     std::to_string(cfg.min_doc_sentences) + ")");
            continue;
        }
        if (any_spans)
            doc.np_spans = std::move(kept_spans);
        if (rec.contains("reference"))
            doc.reference = build_reference(id, rec);
        report.documents.push_back(std::move(doc));
    }
    return report;
}

TextStack make_text_stack(const RunConfig& cfg) {
    TextStack stack;
    if (cfg.embedder_kind == EmbedderKind::File) {
        if (cfg.embedding_file.empty())
            throw Error("embedder=file requires embedding_file");
        stack.embedder = std::make_unique<WordVectorEmbedder>(cfg.embedding_file);
    } else {
        stack.embedder = std::make_unique<HashedTrigramEmbedder>();
    }
    auto stopwords =
        cfg.stopwords_path.empty() ? default_stopwords() : load_stopwords(cfg.stopwords_path);
    stack.np_extractor =
        std::make_unique<NounPhraseExtractor>(std::move(stopwords), stack.embedder.get());
    return stack;
}

namespace {

struct Prepared {
    SentencePool pool;
    InformativenessScores scores;
};

InformativenessScores provider_scores(const SentencePool& pool, const Document& doc,
                                      const RunConfig& cfg) {
    switch (cfg.provider) {
    case Provider::Lexrank: {
        LexrankSentenceParams params;
        params.damping = cfg.block.damping;
        params.rescale = cfg.rescale_informativeness;
        return lexrank_sentence_scores(pool, params);
    }
    case Provider::Oracle:
        if (!doc.has_reference())
            throw Error("oracle provider requires a reference (doc " + doc.id + ")");
        return oracle_scores(pool, doc.reference, cfg.rescale_informativeness);
    case Provider::External:
        return load_external_scores(cfg.external_scores_path, pool);
    }
    throw Error("unreachable provider");
}

Prepared prepare_document(const Document& doc, const RunConfig& cfg) {
    cfg.block.validate();
    const std::vector<Block> blocks = segment_blocks(doc, cfg.block);
    std::vector<double> lr;
    if (cfg.block.strategy == BlockStrategy::Balanced ||
        cfg.block.strategy == BlockStrategy::MaxRedundancy)
        lr = lexrank(blocks, cfg.block.damping, cfg.block.lexrank_tol,
                     cfg.block.lexrank_max_iter);
    const std::vector<int> picked = select_blocks(
        blocks, lr, cfg.block, doc.has_reference() ? &doc.reference : nullptr);
    Prepared prep;
    prep.pool = assemble_pool(doc, blocks, picked, cfg.block.pool_cap);
    if (prep.pool.empty())
        throw Error("empty sentence pool for document " + doc.id);
    prep.scores = provider_scores(prep.pool, doc, cfg);
    return prep;
}

std::vector<Sentence> truncate_summary(const SentencePool& pool,
                                       const std::vector<int>& pool_indices, int word_limit) {
    std::vector<Sentence> out;
    int words = 0;
    for (int idx : pool_indices) {
        if (words >= word_limit)
            break;
        Sentence s = pool[idx].sentence;
        if (words + s.word_count() > word_limit) {
            s.tokens.resize(word_limit - words);
            s.text = join_tokens(s.tokens);
        }
        words += s.word_count();
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> concat_tokens(const std::vector<Sentence>& sentences) {
    std::vector<std::string> all;
    for (const Sentence& s : sentences)
        all.insert(all.end(), s.tokens.begin(), s.tokens.end());
    return all;
}

MetricsReport measure_summary(const std::vector<Sentence>& truncated,
                              const std::vector<int>& selected_source_indices,
                              const SentencePool& pool, const Document& doc,
                              const SummaryResult* kvd_summary, const RunConfig& cfg,
                              const NounPhraseExtractor& npx) {
    MetricsReport report;
    if (doc.has_reference()) {
        const auto cand = concat_tokens(truncated);
        const auto ref = concat_tokens(doc.reference);
        report.rouge1 = rouge_n(cand, ref, 1).f1;
        report.rouge2 = rouge_n(cand, ref, 2).f1;
        report.rougeL = rouge_l(cand, ref).f1;
    }
    report.rdrl = rdrl(truncated, cfg.rdrl_use_recall);
    report.iuniq = iuniq(truncated);

    // Noun tokens per truncated sentence; annotations from the pool are kept
    // where they still fit inside the (possibly trimmed) last sentence.
    std::map<int, const PoolSentence*> by_index;
    for (const PoolSentence& p : pool)
        by_index[p.sentence.index] = &p;
    std::vector<std::vector<NounPhrase>> nps;
    nps.reserve(truncated.size());
    for (const Sentence& s : truncated) {
        const PoolSentence* src = by_index.count(s.index) ? by_index.at(s.index) : nullptr;
        if (src && src->np_spans) {
            std::vector<TokenSpan> usable;
            for (const TokenSpan& sp : *src->np_spans)
                if (sp.end <= s.word_count())
                    usable.push_back(sp);
            nps.push_back(npx.extract(s, &usable));
        } else {
            nps.push_back(npx.extract(s));
        }
    }
    report.egr = entity_graph(nps, cfg.eg_weighting);

    if (kvd_summary) {
        const ChainStats cs = chain_stats(kvd_summary->chains, selected_source_indices);
        report.chain_spread = cs.spread;
        report.chain_density = cs.density;
        report.chain_coverage = cs.coverage;
    }
    return report;
}

DocumentResult select_and_measure(const Document& doc, const Prepared& prep,
                                  const RunConfig& cfg, const TextStack& stack) {
    DocumentResult result;
    result.doc_id = doc.id;
    SelectionContext ctx;
    ctx.embedder = stack.embedder.get();
    ctx.np_extractor = stack.np_extractor.get();
    result.summary = select(prep.pool, prep.scores, cfg.method, cfg.selector, ctx);
    result.truncated_summary = truncate_summary(prep.pool, result.summary.selected_pool_indices,
                                                result.summary.truncated_word_count);

    std::vector<int> source_indices;
    for (int idx : result.summary.selected_pool_indices)
        source_indices.push_back(prep.pool[idx].sentence.index);

    const bool is_kvd = cfg.method == SelectionMethod::Kvd;
    result.metrics = measure_summary(result.truncated_summary, source_indices, prep.pool, doc,
                                     is_kvd ? &result.summary : nullptr, cfg,
                                     *stack.np_extractor);
    if (doc.has_reference()) {
        std::vector<Sentence> raw_sentences;
        for (int idx : result.summary.selected_pool_indices)
            raw_sentences.push_back(prep.pool[idx].sentence);
        const auto cand = concat_tokens(raw_sentences);
        const auto ref = concat_tokens(doc.reference);
        result.raw_rouge1 = rouge_n(cand, ref, 1).f1;
        result.raw_rouge2 = rouge_n(cand, ref, 2).f1;
        result.raw_rougeL = rouge_l(cand, ref).f1;
    }
    return result;
}

MetricsReport aggregate_metrics(const std::vector<DocumentResult>& docs) {
    MetricsReport agg;
    int n = 0, chain_n = 0;
    double spread = 0.0, density = 0.0, coverage = 0.0;
    for (const DocumentResult& d : docs) {
        if (d.failed)
            continue;
        agg.rouge1 += d.metrics.rouge1;
        agg.rouge2 += d.metrics.rouge2;
        agg.rougeL += d.metrics.rougeL;
        agg.rdrl += d.metrics.rdrl;
        agg.iuniq += d.metrics.iuniq;
        agg.egr += d.metrics.egr;
        ++n;
        if (d.metrics.chain_spread) {
            spread += *d.metrics.chain_spread;
            density += *d.metrics.chain_density;
            coverage += *d.metrics.chain_coverage;
            ++chain_n;
        }
    }
    if (n > 0) {
        agg.rouge1 /= n;
        agg.rouge2 /= n;
        agg.rougeL /= n;
        agg.rdrl /= n;
        agg.iuniq /= n;
        agg.egr /= n;
    }
    if (chain_n > 0) {
        agg.chain_spread = spread / chain_n;
        agg.chain_density = density / chain_n;
        agg.chain_coverage = coverage / chain_n;
    }
    return agg;
}

RunConfig resolve_ref_stats(RunConfig cfg) {
    if (!cfg.ref_stats_path.empty() &&
        (!cfg.selector.ref_mean_sim || !cfg.selector.ref_mean_gap)) {
        std::ifstream in(cfg.ref_stats_path);
        if (!in)
            throw Error("cannot open ref stats file: " + cfg.ref_stats_path);
        json stats = json::parse(in);
        if (!cfg.selector.ref_mean_sim)
            cfg.selector.ref_mean_sim = stats.at("mean_sim").get<double>();
        if (!cfg.selector.ref_mean_gap)
            cfg.selector.ref_mean_gap = stats.at("mean_gap").get<double>();
    }
    return cfg;
}

} // namespace

CorpusResult run_corpus(const std::vector<Document>& docs, const RunConfig& cfg_in) {
    const RunConfig cfg = resolve_ref_stats(cfg_in);
    const TextStack stack = make_text_stack(cfg);
    CorpusResult result;
    for (const Document& doc : docs) {
        DocumentResult dr;
        dr.doc_id = doc.id;
        try {
            const Prepared prep = prepare_document(doc, cfg);
            dr = select_and_measure(doc, prep, cfg, stack);
        } catch (const std::exception& e) {
            dr.failed = true;
            dr.error = e.what();
            ++result.failed_count;
        }
        result.docs.push_back(std::move(dr));
    }
    std::sort(result.docs.begin(), result.docs.end(),
              [](const DocumentResult& a, const DocumentResult& b) { return a.doc_id < b.doc_id; });
    result.aggregate = aggregate_metrics(result.docs);
    return result;
}

namespace {

json metrics_to_json(const MetricsReport& m) {
    json j;
    j["rouge1"] = round6(m.rouge1);
    j["rouge2"] = round6(m.rouge2);
    j["rougeL"] = round6(m.rougeL);
    j["rdrl"] = round6(m.rdrl);
    j["iuniq"] = round6(m.iuniq);
    j["egr"] = round6(m.egr);
    if (m.chain_spread) {
        j["spread"] = round6(*m.chain_spread);
        j["density"] = round6(*m.chain_density);
        j["coverage"] = round6(*m.chain_coverage);
    }
    return j;
}

void write_metrics_csv_row(std::ofstream& out, const std::string& doc_id,
                           const MetricsReport& m) {
    out << doc_id << ',' << fmt6(m.rouge1) << ',' << fmt6(m.rouge2) << ',' << fmt6(m.rougeL)
        << ',' << fmt6(m.rdrl) << ',' << fmt6(m.iuniq) << ',' << fmt6(m.egr) << ',';
    if (m.chain_spread)
        out << fmt6(*m.chain_spread);
    out << ',';
    if (m.chain_density)
        out << fmt6(*m.chain_density);
    out << ',';
    if (m.chain_coverage)
        out << fmt6(*m.chain_coverage);
    out << '\n';
}

json chain_to_json(const Chain& chain) {
    json members = json::array();
    for (const NounPhrase& np : chain.members) {
        members.push_back({{"sentence_index", np.sentence_index},
                           {"span", {np.token_span.start, np.token_span.end}},
                           {"surface", np.surface}});
    }
    return {{"id", chain.id},
            {"last_retained_step", chain.last_retained_step},
            {"members", std::move(members)}};
}

const char* target_name(AssignTarget t) {
    switch (t) {
    case AssignTarget::Existing: return "existing";
    case AssignTarget::Recalled: return "recalled";
    case AssignTarget::Fresh: return "new";
    }
    return "new";
}

} // namespace

void write_run_outputs(const CorpusResult& result, const RunConfig& cfg,
                       const std::vector<std::string>& ingest_skipped) {
    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir / "docs");

    std::ofstream csv(out_dir / "metrics.csv");
    csv << "doc_id,rouge1,rouge2,rougeL,rdrl,iuniq,egr,spread,density,coverage\n";
    for (const DocumentResult& d : result.docs) {
        if (d.failed)
            continue;
        write_metrics_csv_row(csv, d.doc_id, d.metrics);
    }
    write_metrics_csv_row(csv, "ALL", result.aggregate);

    for (const DocumentResult& d : result.docs) {
        const std::string stem = sanitize_filename(d.doc_id);
        if (d.failed) {
            json j{{"doc_id", d.doc_id}, {"failed", true}, {"error", d.error}};
            std::ofstream(out_dir / "docs" / (stem + ".json")) << j.dump(2) << '\n';
            continue;
        }
        json j;
        j["doc_id"] = d.doc_id;
        j["method"] = method_name(cfg.method);
        j["provider"] = provider_name(cfg.provider);
        json selected = json::array();
        for (const auto& [doc_id, index] : d.summary.selected)
            selected.push_back({{"doc_id", doc_id}, {"sentence_index", index}});
        j["selected"] = std::move(selected);
        std::string text;
        for (const Sentence& s : d.truncated_summary) {
            if (!text.empty())
                text.push_back(' ');
            text += s.text;
        }
        j["summary_text"] = text;
        j["total_word_count"] = d.summary.total_word_count;
        j["truncated_word_count"] = d.summary.truncated_word_count;
        j["metrics"] = metrics_to_json(d.metrics);
        j["metrics"]["rouge1_raw"] = round6(d.raw_rouge1);
        j["metrics"]["rouge2_raw"] = round6(d.raw_rouge2);
        j["metrics"]["rougeL_raw"] = round6(d.raw_rougeL);
        if (cfg.method == SelectionMethod::Kvd) {
            json chains = json::array();
            for (const Chain& c : d.summary.chains)
                chains.push_back(chain_to_json(c));
            j["chains"] = std::move(chains);
        }
        if (cfg.emit_trace) {
            json steps = json::array();
            for (const StepTrace& st : d.summary.trace) {
                json cand = json::array();
                for (const auto& [pool_index, cs] : st.candidate_scores)
                    cand.push_back({{"pool_index", pool_index},
                                    {"f_i", round6(cs.informativeness)},
                                    {"f_c", round6(cs.cohesion)},
                                    {"combined", round6(cs.combined)},
                                    {"admissible", cs.admissible}});
                steps.push_back({{"step", st.step},
                                 {"picked_pool_index", st.picked_pool_index},
                                 {"candidates", std::move(cand)}});
            }
            j["trace"] = std::move(steps);
        }
        std::ofstream(out_dir / "docs" / (stem + ".json")) << j.dump(2) << '\n';

        if (cfg.method == SelectionMethod::Kvd) {
            std::ofstream chains_out(out_dir / "docs" / (stem + ".chains.jsonl"));
            for (size_t step = 0; step < d.summary.trace.size(); ++step) {
                const StepTrace& st = d.summary.trace[step];
                json assignments = json::array();
                for (const Assignment& a : st.winner_assignments)
                    assignments.push_back({{"surface", a.phrase.surface},
                                           {"target", target_name(a.target)},
                                           {"chain_id", a.chain_id},
                                           {"phi", round6(a.similarity)}});
                json rec{{"step", st.step},
                         {"selected_sentence", d.summary.selected[step].second},
                         {"assignments", std::move(assignments)},
                         {"evicted_chain_ids", st.evicted_chain_ids},
                         {"recalled_chain_ids", st.recalled_chain_ids}};
                chains_out << rec.dump() << '\n';
            }
        }
    }

    json summary;
    summary["input"] = cfg.input_path;
    summary["method"] = method_name(cfg.method);
    summary["provider"] = provider_name(cfg.provider);
    summary["documents"] = result.docs.size();
    summary["failed"] = result.failed_count;
    summary["skipped_records"] = ingest_skipped;
    json failures = json::array();
    for (const DocumentResult& d : result.docs)
        if (d.failed)
            failures.push_back({{"doc_id", d.doc_id}, {"error", d.error}});
    summary["failures"] = std::move(failures);
    summary["aggregate"] = metrics_to_json(result.aggregate);
    std::ofstream(out_dir / "run_summary.json") << summary.dump(2) << '\n';
}

std::vector<SweepRow> sweep_lambda(const std::vector<Document>& docs, const RunConfig& cfg_in,
                                   const std::vector<SelectionMethod>& methods,
                                   const std::vector<double>& values) {
    const RunConfig cfg = resolve_ref_stats(cfg_in);
    for (double v : values)
        if (v < 0.0 || v > 1.0)
            throw Error("sweep values must lie in [0,1]");
    const TextStack stack = make_text_stack(cfg);

    // Pools and provider scores do not depend on the selector; prepare once.
    struct Entry {
        const Document* doc;
        Prepared prep;
    };
    std::vector<Entry> prepared;
    for (const Document& doc : docs)
        prepared.push_back({&doc, prepare_document(doc, cfg)});
    std::sort(prepared.begin(), prepared.end(),
              [](const Entry& a, const Entry& b) { return a.doc->id < b.doc->id; });

    std::vector<SweepRow> rows;
    for (SelectionMethod method : methods) {
        for (double lambda : values) {
            RunConfig run_cfg = cfg;
            run_cfg.method = method;
            run_cfg.selector.lambda_sel = lambda;
            std::vector<DocumentResult> doc_results;
            for (const Entry& entry : prepared)
                doc_results.push_back(
                    select_and_measure(*entry.doc, entry.prep, run_cfg, stack));
            for (const DocumentResult& d : doc_results) {
                rows.push_back({method_name(method), lambda, d.doc_id, d.metrics.rouge1,
                                d.metrics.rouge2, d.metrics.rougeL, d.metrics.rdrl,
                                d.metrics.iuniq, d.metrics.egr});
            }
            const MetricsReport agg = aggregate_metrics(doc_results);
            rows.push_back({method_name(method), lambda, "ALL", agg.rouge1, agg.rouge2,
                            agg.rougeL, agg.rdrl, agg.iuniq, agg.egr});
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    out << "method,lambda_sel,doc_id,rouge1,rouge2,rougeL,rdrl,iuniq,egr\n";
    for (const SweepRow& r : rows) {
        out << r.method << ',' << fmt6(r.lambda_sel) << ',' << r.doc_id << ','
            << fmt6(r.rouge1) << ',' << fmt6(r.rouge2) << ',' << fmt6(r.rougeL) << ','
            << fmt6(r.rdrl) << ',' << fmt6(r.iuniq) << ',' << fmt6(r.egr) << '\n';
    }
}

std::vector<BlockAnalysisRow> block_analysis(const std::vector<Document>& docs,
                                             const RunConfig& cfg_in,
                                             const std::vector<BlockStrategy>& strategies) {
    const RunConfig cfg = resolve_ref_stats(cfg_in);
    const TextStack stack = make_text_stack(cfg);

    struct Accum {
        double input_rdrl = 0.0, rouge1 = 0.0, rouge2 = 0.0, rougeL = 0.0, summary_rdrl = 0.0;
        int docs = 0;
    };
    std::map<std::pair<size_t, int>, Accum> table; // (strategy position, step)

    for (const Document& doc : docs) {
        cfg.block.validate();
        const std::vector<Block> blocks = segment_blocks(doc, cfg.block);
        std::vector<double> lr;
        const bool needs_lexrank =
            std::any_of(strategies.begin(), strategies.end(), [](BlockStrategy s) {
                return s == BlockStrategy::Balanced || s == BlockStrategy::MaxRedundancy;
            });
        if (needs_lexrank)
            lr = lexrank(blocks, cfg.block.damping, cfg.block.lexrank_tol,
                         cfg.block.lexrank_max_iter);

        for (size_t si = 0; si < strategies.size(); ++si) {
            BlockSelectionConfig bcfg = cfg.block;
            bcfg.strategy = strategies[si];
            const std::vector<int> order = select_blocks(
                blocks, lr, bcfg, doc.has_reference() ? &doc.reference : nullptr);
            std::vector<int> chosen;
            for (size_t k = 0; k < order.size(); ++k) {
                chosen.push_back(order[k]);
                const SentencePool pool = assemble_pool(doc, blocks, chosen, cfg.block.pool_cap);
                std::vector<Sentence> pool_sentences;
                for (const PoolSentence& p : pool)
                    pool_sentences.push_back(p.sentence);

                Accum& acc = table[{si, static_cast<int>(k) + 1}];
                acc.input_rdrl += rdrl(pool_sentences, cfg.rdrl_use_recall);

                RunConfig greedy_cfg = cfg;
                greedy_cfg.method = SelectionMethod::Greedy;
                const InformativenessScores scores = provider_scores(pool, doc, greedy_cfg);
                SelectionContext ctx;
                ctx.embedder = stack.embedder.get();
                ctx.np_extractor = stack.np_extractor.get();
                const SummaryResult summary =
                    select(pool, scores, SelectionMethod::Greedy, greedy_cfg.selector, ctx);
                const std::vector<Sentence> truncated = truncate_summary(
                    pool, summary.selected_pool_indices, summary.truncated_word_count);
                if (doc.has_reference()) {
                    const auto cand = concat_tokens(truncated);
                    const auto ref = concat_tokens(doc.reference);
                    acc.rouge1 += rouge_n(cand, ref, 1).f1;
                    acc.rouge2 += rouge_n(cand, ref, 2).f1;
                    acc.rougeL += rouge_l(cand, ref).f1;
                }
                acc.summary_rdrl += rdrl(truncated, cfg.rdrl_use_recall);
                ++acc.docs;
            }
        }
    }

    std::vector<BlockAnalysisRow> rows;
    for (const auto& [key, acc] : table) {
        BlockAnalysisRow row;
        row.strategy = block_strategy_name(strategies[key.first]);
        row.step = key.second;
        row.input_rdrl = acc.input_rdrl / acc.docs;
        row.rouge1 = acc.rouge1 / acc.docs;
        row.rouge2 = acc.rouge2 / acc.docs;
        row.rougeL = acc.rougeL / acc.docs;
        row.summary_rdrl = acc.summary_rdrl / acc.docs;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_block_analysis_csv(const std::vector<BlockAnalysisRow>& rows,
                              const std::string& path) {
    std::ofstream out(path);
    out << "strategy,step,input_rdrl,rouge1,rouge2,rougeL,summary_rdrl\n";
    for (const BlockAnalysisRow& r : rows) {
        out << r.strategy << ',' << r.step << ',' << fmt6(r.input_rdrl) << ',' << fmt6(r.rouge1)
            << ',' << fmt6(r.rouge2) << ',' << fmt6(r.rougeL) << ',' << fmt6(r.summary_rdrl)
            << '\n';
    }
}

CorpusResult run_ext_oracle(const std::vector<Document>& docs, const RunConfig& cfg_in) {
    const RunConfig cfg = resolve_ref_stats(cfg_in);
    const TextStack stack = make_text_stack(cfg);
    CorpusResult result;
    for (const Document& doc : docs) {
        DocumentResult dr;
        dr.doc_id = doc.id;
        try {
            const Prepared prep = prepare_document(doc, cfg);
            const ExtOracleResult oracle =
                ext_oracle(prep.pool, doc.reference, cfg.selector.word_budget);
            dr.summary.selected_pool_indices = oracle.selected_pool_indices;
            for (int idx : oracle.selected_pool_indices)
                dr.summary.selected.emplace_back(prep.pool[idx].sentence.doc_id,
                                                 prep.pool[idx].sentence.index);
            dr.summary.total_word_count = oracle.total_word_count;
            dr.summary.truncated_word_count = oracle.truncated_word_count;
            dr.truncated_summary = truncate_summary(prep.pool, oracle.selected_pool_indices,
                                                    oracle.truncated_word_count);
            std::vector<int> source_indices;
            for (int idx : oracle.selected_pool_indices)
                source_indices.push_back(prep.pool[idx].sentence.index);
            dr.metrics = measure_summary(dr.truncated_summary, source_indices, prep.pool, doc,
                                         nullptr, cfg, *stack.np_extractor);
        } catch (const std::exception& e) {
            dr.failed = true;
            dr.error = e.what();
            ++result.failed_count;
        }
        result.docs.push_back(std::move(dr));
    }
    std::sort(result.docs.begin(), result.docs.end(),
              [](const DocumentResult& a, const DocumentResult& b) { return a.doc_id < b.doc_id; });
    result.aggregate = aggregate_metrics(result.docs);
    return result;
}

ReferenceStats write_reference_stats(const std::vector<Document>& docs, const RunConfig& cfg,
                                     const std::string& out_path) {
    const TextStack stack = make_text_stack(cfg);
    const ReferenceStats stats = reference_stats(docs, *stack.embedder);
    json j;
    j["mean_sim"] = round6(stats.mean_sim);
    j["mean_gap"] = round6(stats.mean_gap);
    j["references_used"] = stats.references_used;
    j["references_skipped"] = stats.references_skipped;
    const fs::path path(out_path);
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream(path) << j.dump(2) << '\n';
    return stats;
}

} // namespace cohesum
