#include "tarag/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tarag/text.hpp"

namespace tarag {

Bm25Index Bm25Index::build(const std::vector<std::pair<ChunkId, std::string>>& docs) {
    Bm25Index idx;
    std::uint64_t total_len = 0;
    for (const auto& [id, text] : docs) {
        std::uint32_t doc = std::uint32_t(idx.ids_.size());
        idx.ids_.push_back(id);
        std::unordered_map<std::string, std::uint32_t> tf;
        std::uint32_t len = 0;
        for (auto& tok : tokenize_lower(text)) {
            ++tf[std::move(tok)];
            ++len;
        }
        idx.doc_len_.push_back(len);
        total_len += len;
        for (auto& [term, count] : tf) idx.postings_[term].push_back({doc, count});
    }
    idx.avg_len_ = idx.ids_.empty() ? 0.0 : double(total_len) / double(idx.ids_.size());
    return idx;
}

std::vector<ScoredHit> Bm25Index::top_k(const std::string& query, std::size_t k) const {
    const double n_docs = double(ids_.size());
    std::unordered_map<std::uint32_t, double> scores;
    // Duplicate query terms contribute once per occurrence, matching the
    // plain sum-over-query-terms formulation.
    for (const auto& term : tokenize_lower(query)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double df = double(it->second.size());
        const double idf = std::log((n_docs - df + 0.5) / (df + 0.5) + 1.0);
        for (const auto& p : it->second) {
            const double tf = double(p.tf);
            const double norm = 1.0 - kB + kB * double(doc_len_[p.doc]) / avg_len_;
            scores[p.doc] += idf * tf * (kK1 + 1.0) / (tf + kK1 * norm);
        }
    }

    struct Scored {
        double score;
        std::uint32_t doc;
    };
    std::vector<Scored> scored;
    scored.reserve(scores.size());
    for (const auto& [doc, score] : scores) scored.push_back({score, doc});
    auto better = [this](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return ids_[a.doc] < ids_[b.doc];
    };
    const std::size_t cut = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + cut, scored.end(), better);

    std::vector<ScoredHit> out;
    out.reserve(cut);
    for (std::size_t i = 0; i < cut; ++i) out.push_back({ids_[scored[i].doc], float(scored[i].score)});
    return out;
}

}  // namespace tarag
