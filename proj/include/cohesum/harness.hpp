#pragma once
// Corpus ingestion, configuration, end-to-end runs, the block-strategy
// analysis, lambda sweeps, and report emission.

#include <memory>
#include <string>
#include <vector>

#include "cohesum/blocks.hpp"
#include "cohesum/informativeness.hpp"
#include "cohesum/metrics.hpp"
#include "cohesum/selectors.hpp"
#include "cohesum/text.hpp"

namespace cohesum {

struct IngestionConfig {
    int min_sentence_tokens = 5;
    int max_sentence_tokens = 100; // longer sentences are trimmed
    int min_doc_sentences = 3;
};

enum class Provider { Lexrank, Oracle, External };

Provider parse_provider(const std::string& name);
std::string provider_name(Provider provider);

enum class EmbedderKind { Hashed, File };

struct RunConfig {
    std::string input_path;
    std::string output_dir;
    SelectionMethod method = SelectionMethod::Greedy;
    Provider provider = Provider::Lexrank;
    std::string external_scores_path;
    std::string stopwords_path; // empty: built-in list
    EmbedderKind embedder_kind = EmbedderKind::Hashed;
    std::string embedding_file;
    std::string ref_stats_path; // JSON written by the refstats verb
    bool emit_trace = false;    // include per-step candidate scores in doc JSON

    BlockSelectionConfig block;
    SelectorConfig selector;
    IngestionConfig ingestion;

    bool rescale_informativeness = true;
    bool rdrl_use_recall = false;
    EntityGraphWeighting eg_weighting = EntityGraphWeighting::DistanceWeighted;
};

// Flat "key = value" config file with dotted section keys; '#' starts a
// comment. Unknown keys are errors.
RunConfig load_config_file(const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

struct IngestReport {
    std::vector<Document> documents;
    std::vector<std::string> skipped; // "<id>: <reason>" per skipped record
};

// One JSON object per line: {"id": ..., "sentences": [...] | "text": "..." |
// "documents": [...], "reference": [...]?, "np_spans": [[[s,e],...],...]?}.
IngestReport ingest(const std::string& path, const IngestionConfig& cfg);

// Sentence splitting for raw text records: terminal punctuation followed by
// whitespace ends a sentence.
std::vector<std::string> split_sentences(const std::string& text);

struct DocumentResult {
    std::string doc_id;
    bool failed = false;
    std::string error;
    SummaryResult summary;
    std::vector<Sentence> truncated_summary; // metric-facing text
    MetricsReport metrics;                   // on budget-truncated text
    double raw_rouge1 = 0.0, raw_rouge2 = 0.0, raw_rougeL = 0.0;
};

struct CorpusResult {
    std::vector<DocumentResult> docs; // ordered by document id
    MetricsReport aggregate;          // mean over successful docs
    int failed_count = 0;
};

// Bundles the run-wide text machinery (embedder, stopwords, NP extractor).
struct TextStack {
    std::unique_ptr<PhraseEmbedder> embedder;
    std::unique_ptr<NounPhraseExtractor> np_extractor;
};

TextStack make_text_stack(const RunConfig& cfg);

CorpusResult run_corpus(const std::vector<Document>& docs, const RunConfig& cfg);

// Writes docs/<id>.json, metrics.csv, run_summary.json, and (for kvd)
// docs/<id>.chains.jsonl under cfg.output_dir.
void write_run_outputs(const CorpusResult& result, const RunConfig& cfg,
                       const std::vector<std::string>& ingest_skipped);

struct SweepRow {
    std::string method;
    double lambda_sel = 0.0;
    std::string doc_id; // "ALL" for the aggregate row
    double rouge1 = 0.0, rouge2 = 0.0, rougeL = 0.0;
    double rdrl = 0.0, iuniq = 0.0, egr = 0.0;
};

std::vector<SweepRow> sweep_lambda(const std::vector<Document>& docs, const RunConfig& cfg,
                                   const std::vector<SelectionMethod>& methods,
                                   const std::vector<double>& values);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

struct BlockAnalysisRow {
    std::string strategy;
    int step = 0;          // 1-based selection step
    double input_rdrl = 0.0;
    double rouge1 = 0.0, rouge2 = 0.0, rougeL = 0.0;
    double summary_rdrl = 0.0;
};

// Mean over documents, per strategy and selection step: redundancy of the
// accumulated pool plus quality of a greedy summary drawn from it.
std::vector<BlockAnalysisRow> block_analysis(const std::vector<Document>& docs,
                                             const RunConfig& cfg,
                                             const std::vector<BlockStrategy>& strategies);
void write_block_analysis_csv(const std::vector<BlockAnalysisRow>& rows, const std::string& path);

// Extractive upper bound (greedy ROUGE-1+ROUGE-2 oracle) over the same pools.
CorpusResult run_ext_oracle(const std::vector<Document>& docs, const RunConfig& cfg);

// Computes reference statistics and writes them as JSON {"mean_sim","mean_gap"}.
ReferenceStats write_reference_stats(const std::vector<Document>& docs, const RunConfig& cfg,
                                     const std::string& out_path);

} // namespace cohesum
