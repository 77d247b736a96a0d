#include "semscore/embedding.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"
#include "semscore/util.hpp"

namespace semscore {

using nlohmann::json;

PoolMode parse_pool_mode(const std::string& s) {
    if (s == "mean") return PoolMode::mean;
    if (s == "cls") return PoolMode::cls;
    throw std::runtime_error("invalid pooling mode \"" + s + "\" (expected mean or cls)");
}

std::string to_string(PoolMode m) { return m == PoolMode::mean ? "mean" : "cls"; }

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm vector");
    double value = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(value, -1.0, 1.0);
}

EmbeddingVector l2_normalize(EmbeddingVector v) {
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq == 0.0) return v;
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
}

EmbeddingVector pool(const TokenEmbeddings& tokens, PoolMode mode) {
    if (tokens.empty()) throw std::invalid_argument("pool: empty token list");
    if (mode == PoolMode::cls) return l2_normalize(tokens.front());
    EmbeddingVector mean(tokens.front().size(), 0.0);
    for (const auto& t : tokens) {
        if (t.size() != mean.size())
            throw std::invalid_argument("pool: inconsistent token dimensions");
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += t[i];
    }
    for (double& x : mean) x /= static_cast<double>(tokens.size());
    return l2_normalize(std::move(mean));
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_sentences(
    const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_sentence(t));
    return out;
}

int HashEmbeddingProvider::bucket_of(const std::string& token) {
    std::string lowered = token;
    for (char& c : lowered) c = ascii_lower(c);
    return static_cast<int>(fnv1a64(lowered) % kDimension);
}

EmbeddingVector HashEmbeddingProvider::embed_sentence(const std::string& text) {
    EmbeddingVector counts(kDimension, 0.0);
    for (const auto& token : split_whitespace(text)) counts[bucket_of(token)] += 1.0;
    return l2_normalize(std::move(counts));  // zero sentinel for empty text
}

TokenEmbeddings HashEmbeddingProvider::embed_tokens(const std::string& text) {
    TokenEmbeddings out;
    for (const auto& token : split_whitespace(text)) {
        EmbeddingVector one_hot(kDimension, 0.0);
        one_hot[bucket_of(token)] = 1.0;
        out.push_back(std::move(one_hot));
    }
    return out;
}

PooledProvider::PooledProvider(std::shared_ptr<EmbeddingProvider> base, PoolMode mode)
    : base_(std::move(base)), mode_(mode) {
    if (!base_->supports_token_embeddings())
        throw std::runtime_error("PooledProvider: base provider \"" + base_->name() +
                                 "\" has no token embeddings");
}

std::string PooledProvider::name() const { return base_->name() + "+" + to_string(mode_); }

EmbeddingVector PooledProvider::embed_sentence(const std::string& text) {
    TokenEmbeddings tokens = base_->embed_tokens(text);
    if (tokens.empty()) return EmbeddingVector(base_->dimension(), 0.0);
    return pool(tokens, mode_);
}

TokenEmbeddings PooledProvider::embed_tokens(const std::string& text) {
    return base_->embed_tokens(text);
}

// ---------------------------------------------------------------------------
// HTTP provider
// ---------------------------------------------------------------------------

// One short-lived client per request: httplib clients are not safe for
// concurrent use, and this keeps parallel chunks independent.
struct HttpEmbeddingProvider::Impl {
    std::string base_url;
    int timeout_sec;

    json post_embed(const std::string& model, const std::vector<std::string>& texts,
                    const std::string& level) const {
        httplib::Client client(base_url);
        client.set_connection_timeout(timeout_sec, 0);
        client.set_read_timeout(timeout_sec, 0);
        client.set_write_timeout(timeout_sec, 0);
        json body;
        body["model"] = model;
        body["texts"] = texts;
        body["level"] = level;
        auto res = client.Post("/embed", body.dump(), "application/json");
        if (!res)
            throw std::runtime_error("embedding service unreachable: " +
                                     httplib::to_string(res.error()));
        if (res->status != 200) {
            std::string detail;
            try {
                detail = json::parse(res->body).value("error", res->body);
            } catch (...) {
                detail = res->body;
            }
            throw std::runtime_error("embedding service error (HTTP " +
                                     std::to_string(res->status) + "): " + detail);
        }
        return json::parse(res->body);
    }
};

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string model,
                                             int max_tokens, int max_in_flight, int timeout_sec)
    : impl_(std::make_unique<Impl>(std::move(base_url), timeout_sec)),
      model_(std::move(model)),
      max_tokens_(max_tokens),
      max_in_flight_(max_in_flight) {}

HttpEmbeddingProvider::~HttpEmbeddingProvider() = default;

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_sentences(
    const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    json reply = impl_->post_embed(model_, texts, "sentence");
    dimension_ = reply.value("dim", 0);
    std::vector<EmbeddingVector> out;
    for (const auto& vec : reply.at("vectors"))
        out.push_back(l2_normalize(vec.get<EmbeddingVector>()));
    if (out.size() != texts.size())
        throw std::runtime_error("embedding service returned " + std::to_string(out.size()) +
                                 " vectors for " + std::to_string(texts.size()) + " texts");
    return out;
}

EmbeddingVector HttpEmbeddingProvider::embed_sentence(const std::string& text) {
    return embed_sentences({text}).front();
}

TokenEmbeddings HttpEmbeddingProvider::embed_tokens(const std::string& text) {
    json reply = impl_->post_embed(model_, {text}, "token");
    dimension_ = reply.value("dim", 0);
    auto per_text = reply.at("token_vectors");
    if (per_text.size() != 1)
        throw std::runtime_error("embedding service returned wrong token batch size");
    TokenEmbeddings out;
    for (const auto& vec : per_text.at(0)) out.push_back(vec.get<EmbeddingVector>());
    return out;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

namespace {

constexpr char kCacheMagic[4] = {'S', 'E', 'M', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

std::string cache_key(const std::string& provider_name, const std::string& text) {
    return provider_name + "\n" + text;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_);
}

std::optional<EmbeddingVector> EmbeddingCache::get(const std::string& provider_name,
                                                   const std::string& text) {
    std::string key = cache_key(provider_name, text);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = mem_.find(key);
        if (it != mem_.end()) return it->second;
    }
    if (!dir_) return std::nullopt;
    auto vec = disk_get(key);
    if (vec) {
        std::lock_guard<std::mutex> lock(mu_);
        mem_.emplace(key, *vec);
    }
    return vec;
}

void EmbeddingCache::put(const std::string& provider_name, const std::string& text,
                         const EmbeddingVector& vec) {
    std::string key = cache_key(provider_name, text);
    bool inserted;
    {
        std::lock_guard<std::mutex> lock(mu_);
        inserted = mem_.emplace(key, vec).second;
    }
    if (inserted && dir_) disk_put(key, vec);
}

std::optional<EmbeddingVector> EmbeddingCache::disk_get(const std::string& key) {
    std::filesystem::path file = *dir_ / (to_hex(fnv1a64(key)) + ".emb");
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    std::uint32_t version = 0, key_len = 0, dim = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&key_len), sizeof key_len);
    if (!in || std::string_view(magic, 4) != std::string_view(kCacheMagic, 4) ||
        version != kCacheVersion)
        return std::nullopt;
    std::string stored_key(key_len, '\0');
    in.read(stored_key.data(), key_len);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!in || stored_key != key) return std::nullopt;  // hash collision or damage
    EmbeddingVector vec(dim);
    in.read(reinterpret_cast<char*>(vec.data()), static_cast<std::streamsize>(dim * sizeof(double)));
    if (!in) return std::nullopt;
    return vec;
}

void EmbeddingCache::disk_put(const std::string& key, const EmbeddingVector& vec) {
    std::filesystem::path file = *dir_ / (to_hex(fnv1a64(key)) + ".emb");
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;  // cache write failures are non-fatal
        std::uint32_t key_len = static_cast<std::uint32_t>(key.size());
        std::uint32_t dim = static_cast<std::uint32_t>(vec.size());
        out.write(kCacheMagic, 4);
        out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
        out.write(reinterpret_cast<const char*>(&key_len), sizeof key_len);
        out.write(key.data(), static_cast<std::streamsize>(key.size()));
        out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
        out.write(reinterpret_cast<const char*>(vec.data()),
                  static_cast<std::streamsize>(vec.size() * sizeof(double)));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
}

// ---------------------------------------------------------------------------
// Batching
// ---------------------------------------------------------------------------

std::string truncate_to_tokens(const std::string& text, int max_tokens, size_t* token_count) {
    size_t count = 0;
    size_t cut = text.size();
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && static_cast<unsigned char>(text[i]) <= ' ') ++i;
        if (i >= text.size()) break;
        ++count;
        while (i < text.size() && static_cast<unsigned char>(text[i]) > ' ') ++i;
        if (max_tokens > 0 && count == static_cast<size_t>(max_tokens)) cut = i;
    }
    if (token_count) *token_count = count;
    if (max_tokens <= 0 || count <= static_cast<size_t>(max_tokens)) return text;
    return text.substr(0, cut);
}

BatchResult embed_batch(const std::vector<std::string>& texts, EmbeddingProvider& provider,
                        EmbeddingCache* cache) {
    BatchResult result;
    result.vectors.resize(texts.size());

    std::vector<std::string> prepared(texts.size());
    for (size_t i = 0; i < texts.size(); ++i) {
        size_t token_count = 0;
        prepared[i] = truncate_to_tokens(texts[i], provider.max_tokens(), &token_count);
        if (prepared[i].size() != texts[i].size()) {
            size_t kept = static_cast<size_t>(provider.max_tokens());
            result.truncations.push_back({i, token_count, kept});
            std::cerr << "warning: text " << i << " truncated from " << token_count << " to "
                      << kept << " tokens for provider " << provider.name() << "\n";
        }
    }

    std::vector<size_t> misses;
    for (size_t i = 0; i < prepared.size(); ++i) {
        if (cache) {
            if (auto hit = cache->get(provider.name(), prepared[i])) {
                result.vectors[i] = std::move(*hit);
                continue;
            }
        }
        misses.push_back(i);
    }
    if (misses.empty()) return result;

    // chunked provider calls, bounded by the provider's in-flight limit
    constexpr size_t kChunk = 64;
    size_t n_chunks = (misses.size() + kChunk - 1) / kChunk;
    std::vector<std::string> chunk_errors(n_chunks);
    parallel_for_indexed(n_chunks, provider.max_in_flight(), [&](size_t c) {
        size_t begin = c * kChunk;
        size_t end = std::min(begin + kChunk, misses.size());
        std::vector<std::string> chunk_texts;
        chunk_texts.reserve(end - begin);
        for (size_t k = begin; k < end; ++k) chunk_texts.push_back(prepared[misses[k]]);
        try {
            auto vectors = provider.embed_sentences(chunk_texts);
            for (size_t k = begin; k < end; ++k) result.vectors[misses[k]] = vectors[k - begin];
        } catch (const std::exception& e) {
            chunk_errors[c] = e.what();
        }
    });
    for (size_t c = 0; c < n_chunks; ++c)
        if (!chunk_errors[c].empty())
            throw std::runtime_error("embed_batch: " + chunk_errors[c]);

    if (cache)
        for (size_t i : misses) cache->put(provider.name(), prepared[i], result.vectors[i]);
    return result;
}

}  // namespace semscore
