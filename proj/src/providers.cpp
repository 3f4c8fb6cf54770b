#include "tarag/providers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tarag/errors.hpp"
#include "tarag/text.hpp"
#include "tarag/vector_index.hpp"

namespace tarag {

namespace {

constexpr std::size_t kYearBuckets = 16;
constexpr std::size_t kMonthBuckets = 12;

int month_index(const std::string& tok) {
    static const char* names[] = {"january", "february", "march",     "april",   "may",      "june",
                                  "july",    "august",   "september", "october", "november", "december"};
    for (int i = 0; i < 12; ++i)
        if (tok == names[i]) return i;
    return -1;
}

int year_value(const std::string& tok) {
    if (tok.size() != 4) return -1;
    for (char c : tok)
        if (c < '0' || c > '9') return -1;
    int y = std::stoi(tok);
    return (y >= 1900 && y <= 2099) ? y : -1;
}

}  // namespace

StubEmbedder::StubEmbedder(std::size_t dim) : dim_(dim) {
    if (dim < kYearBuckets + kMonthBuckets + 4)
        throw std::invalid_argument("StubEmbedder dim too small");
}

std::vector<float> StubEmbedder::embed_one(const std::string& text) const {
    const std::size_t general = dim_ - kYearBuckets - kMonthBuckets;
    std::vector<float> v(dim_, 0.0f);
    for (const auto& tok : tokenize_lower(text)) {
        if (int y = year_value(tok); y >= 0) {
            v[general + std::size_t(y - 1900) % kYearBuckets] += 1.0f;
            continue;
        }
        if (int m = month_index(tok); m >= 0) {
            v[general + kYearBuckets + std::size_t(m)] += 1.0f;
            continue;
        }
        std::uint64_t h = fnv1a64(tok);
        float sign = ((h >> 32) & 1) ? 1.0f : -1.0f;
        v[h % general] += sign;
    }
    double n2 = 0.0;
    for (float x : v) n2 += double(x) * x;
    if (n2 < 1e-24) {
        // All signed contributions cancelled; fall back to a whole-text bucket.
        v.assign(dim_, 0.0f);
        v[fnv1a64(text) % dim_] = 1.0f;
    } else {
        float inv = float(1.0 / std::sqrt(n2));
        for (float& x : v) x *= inv;
    }
    return v;
}

std::vector<std::vector<float>> StubEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

namespace {

// Shared retry loop for the two remote clients.
nlohmann::json post_json_with_retry(const std::string& endpoint, const std::string& path,
                                    const std::string& api_key, int timeout_sec,
                                    const RetryPolicy& retry, const nlohmann::json& body) {
    std::string last_error = "no attempts made";
    int backoff_ms = retry.initial_backoff_ms;
    for (int attempt = 0; attempt < retry.attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        httplib::Client client(endpoint);
        client.set_read_timeout(timeout_sec, 0);
        client.set_connection_timeout(timeout_sec, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            continue;
        }
        auto parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            last_error = "unparseable response body";
            continue;
        }
        return parsed;
    }
    throw ProviderUnavailable{"request to " + endpoint + path + " failed after " +
                              std::to_string(retry.attempts) + " attempts; last error: " + last_error};
}

}  // namespace

std::vector<std::vector<float>> RemoteEmbedder::embed_batch(const std::vector<std::string>& batch) {
    nlohmann::json body = {{"model", opts_.model}, {"input", batch}};
    auto reply = post_json_with_retry(opts_.endpoint, opts_.path, opts_.api_key, opts_.timeout_sec,
                                      opts_.retry, body);
    if (!reply.contains("data") || !reply["data"].is_array() || reply["data"].size() != batch.size())
        throw ProviderUnavailable{"embeddings response has no matching data array"};
    std::vector<std::vector<float>> out;
    out.reserve(batch.size());
    for (const auto& item : reply["data"]) {
        auto vec = item.at("embedding").get<std::vector<float>>();
        if (opts_.dim != 0 && vec.size() != opts_.dim)
            throw DimensionMismatch{"remote embedding dim " + std::to_string(vec.size()) +
                                    ", expected " + std::to_string(opts_.dim)};
        out.push_back(std::move(vec));
    }
    return out;
}

std::vector<std::vector<float>> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); i += opts_.batch_size) {
        std::vector<std::string> batch(texts.begin() + i,
                                       texts.begin() + std::min(texts.size(), i + opts_.batch_size));
        auto vecs = embed_batch(batch);
        for (auto& v : vecs) out.push_back(std::move(v));
    }
    return out;
}

std::string RemoteLlm::complete(const std::string& prompt) {
    nlohmann::json body = {{"model", opts_.model},
                           {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                           {"temperature", opts_.temperature},
                           {"max_tokens", opts_.max_tokens}};
    auto reply = post_json_with_retry(opts_.endpoint, opts_.path, opts_.api_key, opts_.timeout_sec,
                                      opts_.retry, body);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw ProviderUnavailable{"chat response missing choices[0].message.content"};
    }
}

std::string StubLlm::complete(const std::string& prompt) {
    for (const auto& rule : rules_) {
        if (prompt.find(rule.needle) != std::string::npos) return rule.reply;
    }
    return default_reply_;
}

std::string OverlapOracleLlm::complete(const std::string& prompt) {
    auto choices_pos = prompt.find("Choices:");
    if (choices_pos == std::string::npos) return "";
    std::unordered_set<std::string> context_tokens;
    for (auto& tok : tokenize_lower(std::string_view(prompt).substr(0, choices_pos)))
        context_tokens.insert(std::move(tok));

    std::istringstream lines(prompt.substr(choices_pos));
    std::string line;
    int best = -1;
    std::size_t best_overlap = 0;
    int idx = 0;
    while (std::getline(lines, line)) {
        if (line.size() < 3 || line[0] < 'A' || line[0] > 'D' || line[1] != '.') continue;
        std::size_t overlap = 0;
        for (const auto& tok : tokenize_lower(std::string_view(line).substr(2)))
            if (context_tokens.contains(tok)) ++overlap;
        idx = line[0] - 'A';
        if (best < 0 || overlap > best_overlap) {
            best = idx;
            best_overlap = overlap;
        }
    }
    if (best < 0) return "";
    return std::string(1, char('A' + best));
}

std::vector<std::vector<float>> embed_texts(EmbeddingProvider& p,
                                            const std::vector<std::string>& texts) {
    if (texts.empty()) throw EmptyText{};
    for (const auto& t : texts) {
        if (normalize_whitespace(t).empty()) throw EmptyText{};
    }
    auto vecs = p.embed(texts);
    if (vecs.size() != texts.size())
        throw ProviderUnavailable{"provider returned " + std::to_string(vecs.size()) +
                                  " vectors for " + std::to_string(texts.size()) + " texts"};
    for (auto& v : vecs) {
        if (v.size() != p.dim())
            throw DimensionMismatch{"provider emitted vector of dim " + std::to_string(v.size())};
        normalize(v);
    }
    return vecs;
}

std::vector<float> build_hypothetical_embedding(EmbeddingProvider& p, const std::string& q_core,
                                                const std::vector<Date>& anchors, Granularity g,
                                                const HypoEmbeddingOptions& opts) {
    if (anchors.empty()) throw std::invalid_argument("at least one anchor required");
    std::vector<std::string> variants;
    variants.reserve(anchors.size());
    for (const auto& a : anchors) variants.push_back(render_anchor(a, g, q_core));

    std::vector<std::vector<float>> vecs;
    if (opts.normalize_variants) {
        vecs = embed_texts(p, variants);
    } else {
        vecs = p.embed(variants);
        for (const auto& v : vecs)
            if (v.size() != p.dim())
                throw DimensionMismatch{"provider emitted vector of dim " + std::to_string(v.size())};
    }

    std::vector<double> mean(p.dim(), 0.0);
    for (const auto& v : vecs)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    double n2 = 0.0;
    for (double& x : mean) {
        x /= double(vecs.size());
        n2 += x * x;
    }
    double n = std::sqrt(n2);
    if (n < 1e-9) throw DegenerateMean{};
    std::vector<float> out(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) out[i] = float(mean[i] / n);
    return out;
}

}  // namespace tarag
