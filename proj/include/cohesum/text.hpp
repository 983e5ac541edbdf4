#pragma once
// Tokenization, TF-IDF vectors, phrase embeddings, and noun-phrase chunking.
// Everything here is deterministic and free of shared mutable state.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cohesum {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TokenSpan {
    int start = 0;
    int end = 0; // exclusive
    bool operator==(const TokenSpan&) const = default;
};

struct Sentence {
    std::string doc_id;
    int index = 0; // 0-based position in the document
    std::string text;
    std::vector<std::string> tokens;

    int word_count() const { return static_cast<int>(tokens.size()); }
};

struct Document {
    std::string id;
    std::vector<Sentence> sentences;
    std::vector<Sentence> reference; // empty when no reference summary
    // Per-sentence pre-annotated noun-phrase spans (e.g. from an external parser).
    std::optional<std::vector<std::vector<TokenSpan>>> np_spans;
    // Sentence indices that start a new source document (multi-source inputs).
    // Blocks never cross these boundaries.
    std::vector<int> source_breaks;

    bool has_reference() const { return !reference.empty(); }
};

// A pool entry keeps its identity and any NP annotation carried from the source.
struct PoolSentence {
    Sentence sentence;
    std::optional<std::vector<TokenSpan>> np_spans;
};
using SentencePool = std::vector<PoolSentence>;

// Sorted by term id, zero weights never stored.
struct SparseVector {
    std::vector<std::pair<int32_t, double>> entries;

    double norm() const;
    bool empty() const { return entries.empty(); }
};

double dot(const SparseVector& a, const SparseVector& b);
// Cosine similarity; 0 when either norm is 0.
double cosine(const SparseVector& a, const SparseVector& b);

struct DenseVector {
    std::vector<double> values;

    int dims() const { return static_cast<int>(values.size()); }
    double norm() const;
    bool is_zero() const;
};

double dot(const DenseVector& a, const DenseVector& b);
double cosine(const DenseVector& a, const DenseVector& b);
DenseVector l2_normalized(DenseVector v);

struct NounPhrase {
    int sentence_index = 0;
    TokenSpan token_span;
    std::string surface; // span tokens joined with single spaces
    DenseVector embedding;
};

// Lowercased tokens split at non-alphanumeric boundaries. An apostrophe between
// word characters and a '.' between digits stay inside the token, so
// contractions ("nokia's") and decimals ("5.44") survive as single tokens.
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

// idf(t) = ln(N / df(t)); terms absent from the collection have no entry.
class IdfTable {
public:
    // Throws Error on an empty collection.
    static IdfTable fit(const std::vector<std::vector<std::string>>& units);

    // Returns (term id, idf) or nullopt for unknown terms.
    std::optional<std::pair<int32_t, double>> lookup(const std::string& term) const;
    size_t vocab_size() const { return idf_.size(); }
    size_t collection_size() const { return collection_size_; }

private:
    std::unordered_map<std::string, int32_t> ids_;
    std::vector<double> idf_;
    size_t collection_size_ = 0;
};

// weight(t) = count(t) * idf(t); unknown and zero-idf terms are dropped.
SparseVector tfidf_vector(const std::vector<std::string>& tokens, const IdfTable& idf);

class PhraseEmbedder {
public:
    virtual ~PhraseEmbedder() = default;
    virtual int dims() const = 0;
    // Deterministic; returns a unit-norm vector, or the zero vector when no
    // features are found.
    virtual DenseVector embed(const std::vector<std::string>& tokens) const = 0;
};

// Default provider: feature-hashed character trigrams per token, summed over
// tokens and L2-normalized. No model files, stable across platforms.
class HashedTrigramEmbedder final : public PhraseEmbedder {
public:
    static constexpr int kDims = 256;

    int dims() const override { return kDims; }
    DenseVector embed(const std::vector<std::string>& tokens) const override;
};

// Loads "word v1 v2 ... vdim" lines (optional "count dim" header). Token
// vectors are averaged, unknown tokens count as zero vectors, and the mean is
// L2-normalized.
class WordVectorEmbedder final : public PhraseEmbedder {
public:
    explicit WordVectorEmbedder(const std::string& path);

    int dims() const override { return dims_; }
    DenseVector embed(const std::vector<std::string>& tokens) const override;
    size_t vocabulary_size() const { return vectors_.size(); }

private:
    int dims_ = 0;
    std::unordered_map<std::string, DenseVector> vectors_;
};

// Built-in stopword list (version 1, frozen; see data/stopwords.txt).
const std::unordered_set<std::string>& default_stopwords();
std::unordered_set<std::string> load_stopwords(const std::string& path);

// Pre-annotated spans pass through untouched; otherwise maximal runs of
// non-stopword tokens are chunked, with runs longer than 5 split at 5.
class NounPhraseExtractor {
public:
    explicit NounPhraseExtractor(std::unordered_set<std::string> stopwords,
                                 const PhraseEmbedder* embedder = nullptr);

    std::vector<NounPhrase> extract(const Sentence& sentence,
                                    const std::vector<TokenSpan>* annotated = nullptr) const;

    const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

private:
    static constexpr int kMaxRunLength = 5;

    std::unordered_set<std::string> stopwords_;
    const PhraseEmbedder* embedder_; // may be null: embeddings left empty

    NounPhrase make_phrase(const Sentence& sentence, TokenSpan span) const;
};

} // namespace cohesum
