#include "semscore/embedding_metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "semscore/util.hpp"

namespace semscore {

namespace {

EmbeddingVector embed_one(const std::string& text, EmbeddingProvider& provider,
                          EmbeddingCache* cache) {
    auto result = embed_batch({text}, provider, cache);
    return std::move(result.vectors.front());
}

}  // namespace

SimilarityScore semscore(const std::string& target, const std::string& candidate,
                         EmbeddingProvider& provider, EmbeddingCache* cache) {
    if (!provider.supports_sentence_embedding())
        throw std::runtime_error("provider \"" + provider.name() +
                                 "\" has no sentence embeddings");
    if (trim(candidate).empty() || trim(target).empty()) return {-1.0, true};
    EmbeddingVector t, c;
    try {
        t = embed_one(target, provider, cache);
        c = embed_one(candidate, provider, cache);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("semscore: embedding failed: ") + e.what() +
                                 " (target \"" + trim(target).substr(0, 40) + "...\")");
    }
    return {cosine(c, t), false};
}

SimilarityScore bertscore_f1(const std::string& target, const std::string& candidate,
                             EmbeddingProvider& provider) {
    if (!provider.supports_token_embeddings())
        throw std::runtime_error("provider \"" + provider.name() + "\" has no token embeddings");
    if (trim(candidate).empty() || trim(target).empty()) return {0.0, true};
    TokenEmbeddings ref = provider.embed_tokens(target);
    TokenEmbeddings hyp = provider.embed_tokens(candidate);
    if (ref.empty() || hyp.empty()) return {0.0, true};

    auto mean_best_match = [](const TokenEmbeddings& from, const TokenEmbeddings& to) {
        double sum = 0.0;
        for (const auto& f : from) {
            double best = -1.0;
            for (const auto& t : to) best = std::max(best, cosine(f, t));
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };

    double precision = mean_best_match(hyp, ref);
    double recall = mean_best_match(ref, hyp);
    if (precision + recall == 0.0) return {0.0, false};
    return {2.0 * precision * recall / (precision + recall), false};
}

}  // namespace semscore
