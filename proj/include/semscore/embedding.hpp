#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace semscore {

using EmbeddingVector = std::vector<double>;
using TokenEmbeddings = std::vector<EmbeddingVector>;

enum class PoolMode { mean, cls };

PoolMode parse_pool_mode(const std::string& s);
std::string to_string(PoolMode m);

// dot(a,b)/(|a||b|), clamped to [-1,1]. Throws on dimension mismatch or a
// zero-norm vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Zero vectors pass through unchanged; they are the sentinel for empty text.
EmbeddingVector l2_normalize(EmbeddingVector v);

// mean: average token vectors then normalize; cls: first token normalized.
// Throws on an empty token list.
EmbeddingVector pool(const TokenEmbeddings& tokens, PoolMode mode);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string name() const = 0;
    virtual int dimension() const = 0;
    virtual int max_tokens() const = 0;  // 0 = unbounded
    virtual bool supports_sentence_embedding() const = 0;
    virtual bool supports_token_embeddings() const = 0;
    virtual int max_in_flight() const { return 1; }

    // Sentence embeddings are unit length; identical text gives identical
    // output. Empty text embeds to the all-zero sentinel.
    virtual EmbeddingVector embed_sentence(const std::string& text) = 0;
    virtual TokenEmbeddings embed_tokens(const std::string& text) = 0;

    // Batch hook, must equal per-text embedding in order and value.
    virtual std::vector<EmbeddingVector> embed_sentences(const std::vector<std::string>& texts);
};

// Deterministic stand-in for a neural provider: whitespace tokens are
// lowercased, hashed into 64 count buckets and L2-normalized. The token
// level emits one one-hot bucket vector per token.
class HashEmbeddingProvider final : public EmbeddingProvider {
public:
    static constexpr int kDimension = 64;

    explicit HashEmbeddingProvider(int max_tokens = 0) : max_tokens_(max_tokens) {}

    std::string name() const override { return "hash64"; }
    int dimension() const override { return kDimension; }
    int max_tokens() const override { return max_tokens_; }
    bool supports_sentence_embedding() const override { return true; }
    bool supports_token_embeddings() const override { return true; }

    EmbeddingVector embed_sentence(const std::string& text) override;
    TokenEmbeddings embed_tokens(const std::string& text) override;

    static int bucket_of(const std::string& token);

private:
    int max_tokens_;
};

// Sentence embeddings derived from a token-level provider by pooling.
// The pooling mode is part of the name so cache entries never collide
// between ablation runs.
class PooledProvider final : public EmbeddingProvider {
public:
    PooledProvider(std::shared_ptr<EmbeddingProvider> base, PoolMode mode);

    std::string name() const override;
    int dimension() const override { return base_->dimension(); }
    int max_tokens() const override { return base_->max_tokens(); }
    bool supports_sentence_embedding() const override { return true; }
    bool supports_token_embeddings() const override { return true; }
    int max_in_flight() const override { return base_->max_in_flight(); }

    EmbeddingVector embed_sentence(const std::string& text) override;
    TokenEmbeddings embed_tokens(const std::string& text) override;

private:
    std::shared_ptr<EmbeddingProvider> base_;
    PoolMode mode_;
};

// Client for the embedding service wire contract:
//   POST /embed {"model": ..., "texts": [...], "level": "sentence"|"token"}
//   -> {"dim": int, "vectors": [[...]]} or {"dim": int, "token_vectors": [[[...]]]}
// Non-200 responses carry {"error": ...}. Received sentence vectors are
// re-normalized to unit length.
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string base_url, std::string model, int max_tokens = 0,
                          int max_in_flight = 4, int timeout_sec = 120);
    ~HttpEmbeddingProvider() override;

    std::string name() const override { return model_; }
    int dimension() const override { return dimension_.load(); }
    int max_tokens() const override { return max_tokens_; }
    bool supports_sentence_embedding() const override { return true; }
    bool supports_token_embeddings() const override { return true; }
    int max_in_flight() const override { return max_in_flight_; }

    EmbeddingVector embed_sentence(const std::string& text) override;
    TokenEmbeddings embed_tokens(const std::string& text) override;
    std::vector<EmbeddingVector> embed_sentences(const std::vector<std::string>& texts) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string model_;
    int max_tokens_;
    int max_in_flight_;
    std::atomic<int> dimension_{0};  // learned from the first response
};

// In-memory cache with an optional on-disk store. Disk entries are one file
// per key under the cache directory, addressed by the key hash; the format
// is versioned and records the full key to rule out hash collisions.
class EmbeddingCache {
public:
    EmbeddingCache() = default;
    explicit EmbeddingCache(std::filesystem::path dir);

    std::optional<EmbeddingVector> get(const std::string& provider_name, const std::string& text);
    void put(const std::string& provider_name, const std::string& text,
             const EmbeddingVector& vec);

private:
    std::optional<EmbeddingVector> disk_get(const std::string& key);
    void disk_put(const std::string& key, const EmbeddingVector& vec);

    std::mutex mu_;
    std::map<std::string, EmbeddingVector> mem_;
    std::optional<std::filesystem::path> dir_;
};

struct TruncationWarning {
    size_t index;        // position in the batch
    size_t token_count;  // whitespace tokens before truncation
    size_t kept_tokens;
};

struct BatchResult {
    std::vector<EmbeddingVector> vectors;
    std::vector<TruncationWarning> truncations;
};

// Order-preserving batch embedding with caching and head-first truncation
// to the provider's token budget. Equal to one-at-a-time embedding.
BatchResult embed_batch(const std::vector<std::string>& texts, EmbeddingProvider& provider,
                        EmbeddingCache* cache = nullptr);

// Truncation helper: keeps the prefix covering the first max_tokens
// whitespace tokens. Returns text unchanged when within budget.
std::string truncate_to_tokens(const std::string& text, int max_tokens, size_t* token_count);

}  // namespace semscore
