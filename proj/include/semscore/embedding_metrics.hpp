#pragma once

#include <string>

#include "semscore/embedding.hpp"

namespace semscore {

// Empty (whitespace-only) texts never error: empty generations are real
// model behavior and must rank worst. The flag records that the minimum
// score was substituted rather than computed.
struct SimilarityScore {
    double value;
    bool empty_text = false;
};

// Cosine of the provider's sentence embeddings of candidate and target,
// each embedded independently. Range [-1, 1]; empty candidate -> -1.
SimilarityScore semscore(const std::string& target, const std::string& candidate,
                         EmbeddingProvider& provider, EmbeddingCache* cache = nullptr);

// Greedy token matching: precision is the mean over candidate tokens of the
// maximum cosine to any target token, recall symmetric, F1 = 2PR/(P+R).
// No IDF weighting, no baseline rescaling. Empty side -> 0.
SimilarityScore bertscore_f1(const std::string& target, const std::string& candidate,
                             EmbeddingProvider& provider);

}  // namespace semscore
