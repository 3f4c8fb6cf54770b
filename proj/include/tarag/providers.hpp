#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tarag/temporal.hpp"

namespace tarag {

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    // One vector per text, order preserving. Implementations need not
    // normalize; embed_texts does.
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

// Deterministic endpoint-free embedder used for offline runs and tests.
//
// Feature-hashing over lowercased tokens with signed buckets, plus dedicated
// positive buckets so calendar tokens carry unambiguous features: years
// 1900..2099 map into a 16-bucket region (year mod 16) and month names each
// own a bucket. Layout: [0, dim-28) general, [dim-28, dim-12) years,
// [dim-12, dim) months.
class StubEmbedder final : public EmbeddingProvider {
public:
    explicit StubEmbedder(std::size_t dim = 64);
    [[nodiscard]] std::size_t dim() const override { return dim_; }
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

    [[nodiscard]] std::vector<float> embed_one(const std::string& text) const;

private:
    std::size_t dim_;
};

struct RetryPolicy {
    int attempts = 3;
    int initial_backoff_ms = 500;  // doubles per retry
};

// JSON-over-HTTP client for the de-facto embeddings API shape:
// POST {"model":..., "input":[texts]} -> {"data":[{"embedding":[...]}, ...]}.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    struct Options {
        std::string endpoint;            // e.g. "http://localhost:8080"
        std::string path = "/v1/embeddings";
        std::string model;
        std::string api_key;             // optional bearer token
        std::size_t dim = 0;
        std::size_t batch_size = 64;
        RetryPolicy retry;
        int timeout_sec = 60;
    };

    explicit RemoteEmbedder(Options opts) : opts_(std::move(opts)) {}
    [[nodiscard]] std::size_t dim() const override { return opts_.dim; }
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

private:
    std::vector<std::vector<float>> embed_batch(const std::vector<std::string>& batch);
    Options opts_;
};

// Chat-completions-shaped client:
// POST {"model":..., "messages":[...]} -> {"choices":[{"message":{"content":...}}]}.
class RemoteLlm final : public LlmProvider {
public:
    struct Options {
        std::string endpoint;
        std::string path = "/v1/chat/completions";
        std::string model;
        std::string api_key;
        double temperature = 0.0;
        int max_tokens = 1024;
        RetryPolicy retry;
        int timeout_sec = 120;
    };

    explicit RemoteLlm(Options opts) : opts_(std::move(opts)) {}
    std::string complete(const std::string& prompt) override;

private:
    Options opts_;
};

// Pure rule-table LLM double: the reply of the first rule whose needle occurs
// in the prompt, else the default reply.
class StubLlm final : public LlmProvider {
public:
    struct Rule {
        std::string needle;
        std::string reply;
    };

    StubLlm() = default;
    explicit StubLlm(std::vector<Rule> rules, std::string default_reply = "")
        : rules_(std::move(rules)), default_reply_(std::move(default_reply)) {}

    std::string complete(const std::string& prompt) override;

private:
    std::vector<Rule> rules_;
    std::string default_reply_;
};

// Generator double that always answers the same choice label.
class ConstantChoiceLlm final : public LlmProvider {
public:
    explicit ConstantChoiceLlm(std::string label = "A") : label_(std::move(label)) {}
    std::string complete(const std::string&) override { return label_; }

private:
    std::string label_;
};

// Generator double that answers the choice sharing the most tokens with the
// context portion of the generator prompt. Depends on the shipped generator
// prompt layout ("Question:" / "Choices:" markers).
class OverlapOracleLlm final : public LlmProvider {
public:
    std::string complete(const std::string& prompt) override;
};

// Caller-facing wrapper: validates inputs (EmptyText), preserves order, and
// L2-normalizes every output regardless of backend behavior.
std::vector<std::vector<float>> embed_texts(EmbeddingProvider& p,
                                            const std::vector<std::string>& texts);

struct HypoEmbeddingOptions {
    // When false, raw backend vectors are averaged before the final
    // normalization (the literal form of the averaging formula).
    bool normalize_variants = true;
};

// Hypothetical temporal query embedding: render one variant per anchor, embed,
// average, renormalize. Throws DegenerateMean when the mean norm is below 1e-9.
std::vector<float> build_hypothetical_embedding(EmbeddingProvider& p, const std::string& q_core,
                                                const std::vector<Date>& anchors, Granularity g,
                                                const HypoEmbeddingOptions& opts = {});

}  // namespace tarag
