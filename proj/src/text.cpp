#include "cohesum/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cohesum {

namespace {

bool is_word_byte(unsigned char c) {
    // Non-ASCII bytes are treated as word characters so UTF-8 letters stay
    // inside tokens without a Unicode table.
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_ascii_digit(unsigned char c) {
    return c >= '0' && c <= '9';
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    const size_t n = text.size();
    for (size_t i = 0; i < n; ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
            continue;
        }
        const bool has_next_word = i + 1 < n && is_word_byte(static_cast<unsigned char>(text[i + 1]));
        if (c == '\'' && !cur.empty() && has_next_word) {
            cur.push_back('\'');
            continue;
        }
        if (c == '.' && !cur.empty() && is_ascii_digit(static_cast<unsigned char>(cur.back())) &&
            i + 1 < n && is_ascii_digit(static_cast<unsigned char>(text[i + 1]))) {
            cur.push_back('.');
            continue;
        }
        if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        tokens.push_back(std::move(cur));
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i)
            out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

double SparseVector::norm() const {
    double s = 0.0;
    for (const auto& [id, w] : entries)
        s += w * w;
    return std::sqrt(s);
}

double dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        const int32_t ida = a.entries[i].first;
        const int32_t idb = b.entries[j].first;
        if (ida == idb) {
            s += a.entries[i].second * b.entries[j].second;
            ++i;
            ++j;
        } else if (ida < idb) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return dot(a, b) / (na * nb);
}

double DenseVector::norm() const {
    double s = 0.0;
    for (double v : values)
        s += v * v;
    return std::sqrt(s);
}

bool DenseVector::is_zero() const {
    for (double v : values)
        if (v != 0.0)
            return false;
    return true;
}

double dot(const DenseVector& a, const DenseVector& b) {
    if (a.dims() != b.dims())
        throw Error("dense vector dimensionality mismatch: " + std::to_string(a.dims()) +
                    " vs " + std::to_string(b.dims()));
    double s = 0.0;
    for (int i = 0; i < a.dims(); ++i)
        s += a.values[i] * b.values[i];
    return s;
}

double cosine(const DenseVector& a, const DenseVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return dot(a, b) / (na * nb);
}

DenseVector l2_normalized(DenseVector v) {
    const double n = v.norm();
    if (n > 0.0)
        for (double& x : v.values)
            x /= n;
    return v;
}

IdfTable IdfTable::fit(const std::vector<std::vector<std::string>>& units) {
    if (units.empty())
        throw Error("tfidf fit: empty collection");
    IdfTable table;
    table.collection_size_ = units.size();
    std::vector<int> df;
    // Ids assigned by first appearance in collection order, so results do not
    // depend on hash-map iteration order.
    for (const auto& unit : units) {
        std::unordered_set<int32_t> seen;
        for (const auto& term : unit) {
            auto [it, inserted] = table.ids_.try_emplace(term, static_cast<int32_t>(df.size()));
            if (inserted)
                df.push_back(0);
            if (seen.insert(it->second).second)
                ++df[it->second];
        }
    }
    const double n = static_cast<double>(units.size());
    table.idf_.resize(df.size());
    for (size_t i = 0; i < df.size(); ++i)
        table.idf_[i] = std::log(n / static_cast<double>(df[i]));
    return table;
}

std::optional<std::pair<int32_t, double>> IdfTable::lookup(const std::string& term) const {
    auto it = ids_.find(term);
    if (it == ids_.end())
        return std::nullopt;
    return std::make_pair(it->second, idf_[it->second]);
}

SparseVector tfidf_vector(const std::vector<std::string>& tokens, const IdfTable& idf) {
    std::unordered_map<int32_t, std::pair<int, double>> counts; // id -> (tf, idf)
    for (const auto& t : tokens) {
        if (auto entry = idf.lookup(t))
            counts[entry->first].first += 1, counts[entry->first].second = entry->second;
    }
    SparseVector vec;
    vec.entries.reserve(counts.size());
    for (const auto& [id, tf_idf] : counts) {
        const double w = static_cast<double>(tf_idf.first) * tf_idf.second;
        if (w != 0.0)
            vec.entries.emplace_back(id, w);
    }
    std::sort(vec.entries.begin(), vec.entries.end());
    return vec;
}

DenseVector HashedTrigramEmbedder::embed(const std::vector<std::string>& tokens) const {
    DenseVector v;
    v.values.assign(kDims, 0.0);
    for (const auto& tok : tokens) {
        if (tok.empty())
            continue;
        if (tok.size() < 3) {
            v.values[fnv1a64(tok) % kDims] += 1.0;
            continue;
        }
        for (size_t i = 0; i + 3 <= tok.size(); ++i)
            v.values[fnv1a64(std::string_view(tok).substr(i, 3)) % kDims] += 1.0;
    }
    return l2_normalized(std::move(v));
}

WordVectorEmbedder::WordVectorEmbedder(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open word-vector file: " + path);
    std::string line;
    size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        std::vector<double> vals;
        double x;
        while (ss >> x)
            vals.push_back(x);
        if (!ss.eof())
            throw Error("word-vector file: malformed line " + std::to_string(line_no));
        if (first_content_line) {
            first_content_line = false;
            // Optional "count dim" header: two integer fields and nothing else.
            if (vals.size() == 1 && !word.empty() &&
                word.find_first_not_of("0123456789") == std::string::npos) {
                dims_ = static_cast<int>(vals[0]);
                continue;
            }
        }
        if (vals.empty())
            throw Error("word-vector file: malformed line " + std::to_string(line_no));
        if (dims_ == 0)
            dims_ = static_cast<int>(vals.size());
        if (static_cast<int>(vals.size()) != dims_)
            throw Error("word-vector file: malformed line " + std::to_string(line_no) +
                        " (expected " + std::to_string(dims_) + " values, got " +
                        std::to_string(vals.size()) + ")");
        vectors_[word] = DenseVector{std::move(vals)};
    }
    if (vectors_.empty())
        throw Error("word-vector file has no vectors: " + path);
}

DenseVector WordVectorEmbedder::embed(const std::vector<std::string>& tokens) const {
    DenseVector acc;
    acc.values.assign(dims_, 0.0);
    if (tokens.empty())
        return acc;
    for (const auto& tok : tokens) {
        auto it = vectors_.find(tok);
        if (it == vectors_.end())
            continue; // unknown token contributes a zero vector
        for (int i = 0; i < dims_; ++i)
            acc.values[i] += it->second.values[i];
    }
    for (double& v : acc.values)
        v /= static_cast<double>(tokens.size());
    return l2_normalized(std::move(acc));
}

const std::unordered_set<std::string>& default_stopwords() {
    // stopwords_v1 — keep in sync with data/stopwords.txt.
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
        "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
        "between", "both", "but", "by", "can", "cannot", "could", "did", "do", "does",
        "doing", "down", "during", "each", "few", "for", "from", "further", "had",
        "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
        "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
        "me", "more", "most", "my", "myself", "no", "nor", "not", "of", "off", "on",
        "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out",
        "over", "own", "same", "she", "should", "so", "some", "such", "than", "that",
        "the", "their", "theirs", "them", "themselves", "then", "there", "these",
        "they", "this", "those", "through", "to", "too", "under", "until", "up",
        "very", "was", "we", "were", "what", "when", "where", "which", "while", "who",
        "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
        "yourselves",
    };
    return words;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open stopword file: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' '))
            line.pop_back();
        if (!line.empty())
            words.insert(line);
    }
    return words;
}

NounPhraseExtractor::NounPhraseExtractor(std::unordered_set<std::string> stopwords,
                                         const PhraseEmbedder* embedder)
    : stopwords_(std::move(stopwords)), embedder_(embedder) {}

NounPhrase NounPhraseExtractor::make_phrase(const Sentence& sentence, TokenSpan span) const {
    NounPhrase np;
    np.sentence_index = sentence.index;
    np.token_span = span;
    std::vector<std::string> span_tokens(sentence.tokens.begin() + span.start,
                                         sentence.tokens.begin() + span.end);
    np.surface = join_tokens(span_tokens);
    if (embedder_)
        np.embedding = embedder_->embed(span_tokens);
    return np;
}

std::vector<NounPhrase> NounPhraseExtractor::extract(const Sentence& sentence,
                                                     const std::vector<TokenSpan>* annotated) const {
    std::vector<NounPhrase> out;
    const int n = sentence.word_count();
    if (annotated) {
        int prev_end = -1;
        for (const TokenSpan& span : *annotated) {
            if (span.start < 0 || span.end <= span.start || span.end > n)
                throw Error("np span [" + std::to_string(span.start) + "," +
                            std::to_string(span.end) + ") out of range for sentence " +
                            std::to_string(sentence.index));
            if (span.start < prev_end)
                throw Error("np spans overlap or are unsorted in sentence " +
                            std::to_string(sentence.index));
            prev_end = span.end;
            out.push_back(make_phrase(sentence, span));
        }
        return out;
    }
    int run_start = -1;
    for (int i = 0; i <= n; ++i) {
        const bool content = i < n && !stopwords_.count(sentence.tokens[i]);
        if (content) {
            if (run_start < 0)
                run_start = i;
            continue;
        }
        if (run_start >= 0) {
            for (int s = run_start; s < i; s += kMaxRunLength)
                out.push_back(make_phrase(sentence, {s, std::min(s + kMaxRunLength, i)}));
            run_start = -1;
        }
    }
    return out;
}

} // namespace cohesum
