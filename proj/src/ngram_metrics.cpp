#include "semscore/ngram_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "semscore/util.hpp"

namespace semscore {

TokenSequence rouge_tokenize(std::string_view text) {
    TokenSequence tokens;
    std::string current;
    for (char c : text) {
        if (is_ascii_alnum(c)) {
            current.push_back(ascii_lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

int lcs_length(const TokenSequence& a, const TokenSequence& b) {
    if (a.empty() || b.empty()) return 0;
    // two-row DP over token indices
    std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
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

double rouge_l(std::string_view target, std::string_view candidate) {
    TokenSequence ref = rouge_tokenize(target);
    TokenSequence hyp = rouge_tokenize(candidate);
    if (ref.empty() || hyp.empty()) return 0.0;
    int lcs = lcs_length(ref, hyp);
    if (lcs == 0) return 0.0;
    double precision = static_cast<double>(lcs) / static_cast<double>(hyp.size());
    double recall = static_cast<double>(lcs) / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

// ASCII punctuation that 13a always pads with spaces. Periods, commas,
// hyphens and apostrophes are handled by context rules instead.
bool is_13a_padded_punct(char c) {
    return (c >= ' ' && c <= '&') || (c >= '(' && c <= '+') || c == '/' ||
           (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

std::string unescape_13a(std::string_view text) {
    std::string s;
    s.reserve(text.size());
    size_t i = 0;
    auto starts_with = [&](const char* lit) {
        return text.substr(i).substr(0, std::string_view(lit).size()) == lit;
    };
    while (i < text.size()) {
        if (starts_with("<skipped>")) {
            i += 9;
        } else if (starts_with("-\n")) {
            i += 2;
        } else if (text[i] == '\n' || text[i] == '\r' || text[i] == '\t') {
            s.push_back(' ');
            ++i;
        } else if (starts_with("&quot;")) {
            s.push_back('"');
            i += 6;
        } else if (starts_with("&amp;")) {
            s.push_back('&');
            i += 5;
        } else if (starts_with("&lt;")) {
            s.push_back('<');
            i += 4;
        } else if (starts_with("&gt;")) {
            s.push_back('>');
            i += 4;
        } else {
            s.push_back(text[i]);
            ++i;
        }
    }
    return s;
}

}  // namespace

TokenSequence tokenize_13a(std::string_view text) {
    std::string s = unescape_13a(text);
    std::string padded;
    padded.reserve(s.size() * 2);
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        char prev = i > 0 ? s[i - 1] : ' ';
        char next = i + 1 < s.size() ? s[i + 1] : ' ';
        if (c == ' ') {
            padded.push_back(c);
        } else if (is_13a_padded_punct(c)) {
            padded.push_back(' ');
            padded.push_back(c);
            padded.push_back(' ');
        } else if (c == '.' || c == ',') {
            // split unless flanked by digits on both sides, so "3.5" survives
            if (is_ascii_digit(prev) && is_ascii_digit(next)) {
                padded.push_back(c);
            } else {
                padded.push_back(' ');
                padded.push_back(c);
                padded.push_back(' ');
            }
        } else if (c == '-' && is_ascii_digit(prev)) {
            padded.push_back(' ');
            padded.push_back(c);
            padded.push_back(' ');
        } else {
            padded.push_back(c);
        }
    }
    return split_whitespace(padded);
}

namespace {

constexpr int kBleuOrder = 4;

struct BleuCounts {
    long matches[kBleuOrder] = {0, 0, 0, 0};
    long totals[kBleuOrder] = {0, 0, 0, 0};
    long ref_len = 0;
    long hyp_len = 0;
};

void accumulate_bleu_counts(const TokenSequence& ref, const TokenSequence& hyp, BleuCounts& c) {
    c.ref_len += static_cast<long>(ref.size());
    c.hyp_len += static_cast<long>(hyp.size());
    for (int n = 1; n <= kBleuOrder; ++n) {
        if (hyp.size() + 1 <= static_cast<size_t>(n)) break;
        std::map<std::vector<std::string>, long> ref_ngrams;
        if (ref.size() + 1 > static_cast<size_t>(n))
            for (size_t i = 0; i + n <= ref.size(); ++i)
                ++ref_ngrams[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
        std::map<std::vector<std::string>, long> hyp_ngrams;
        for (size_t i = 0; i + n <= hyp.size(); ++i)
            ++hyp_ngrams[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)];
        for (const auto& [gram, count] : hyp_ngrams) {
            c.totals[n - 1] += count;
            auto it = ref_ngrams.find(gram);
            if (it != ref_ngrams.end()) c.matches[n - 1] += std::min(count, it->second);
        }
    }
}

// Precisions on the 0..100 scale; zero-match orders get the exponential
// smoothing p_n = 100 / (2^k * total_n), k counting zero orders so far.
// Orders with an empty denominator are dropped from the geometric mean.
double bleu_from_counts(const BleuCounts& c) {
    if (c.hyp_len == 0) return 0.0;
    double log_sum = 0.0;
    int effective_order = 0;
    double smooth = 1.0;
    for (int n = 0; n < kBleuOrder; ++n) {
        if (c.totals[n] == 0) break;
        double p;
        if (c.matches[n] == 0) {
            smooth *= 2.0;
            p = 100.0 / (smooth * static_cast<double>(c.totals[n]));
        } else {
            p = 100.0 * static_cast<double>(c.matches[n]) / static_cast<double>(c.totals[n]);
        }
        log_sum += std::log(p);
        ++effective_order;
    }
    if (effective_order == 0) return 0.0;
    double brevity = 1.0;
    if (c.hyp_len < c.ref_len)
        brevity = std::exp(1.0 - static_cast<double>(c.ref_len) / static_cast<double>(c.hyp_len));
    return brevity * std::exp(log_sum / static_cast<double>(effective_order));
}

}  // namespace

double sentence_bleu(std::string_view target, std::string_view candidate) {
    BleuCounts counts;
    accumulate_bleu_counts(tokenize_13a(target), tokenize_13a(candidate), counts);
    return bleu_from_counts(counts);
}

double corpus_bleu(const std::vector<std::string>& targets,
                   const std::vector<std::string>& candidates) {
    if (targets.size() != candidates.size())
        throw std::invalid_argument("corpus_bleu: size mismatch (" +
                                    std::to_string(targets.size()) + " refs, " +
                                    std::to_string(candidates.size()) + " hyps)");
    BleuCounts counts;
    for (size_t i = 0; i < targets.size(); ++i)
        accumulate_bleu_counts(tokenize_13a(targets[i]), tokenize_13a(candidates[i]), counts);
    return bleu_from_counts(counts);
}

double mean_metric(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("mean_metric: empty input");
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

}  // namespace semscore
