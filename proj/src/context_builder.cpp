#include "tarag/context_builder.hpp"

#include <algorithm>
#include <tuple>

#include "tarag/text.hpp"

namespace tarag {

namespace {

std::string render_block(const ContextBlock& block) {
    return "[Published: " + block.pub_time_est.to_iso() + "]\n" + block.text + "\n";
}

}  // namespace

StructuredContext build_context(const std::vector<ScoredHit>& hits, const CorpusIndex& index,
                                std::size_t token_budget) {
    struct Entry {
        const ChunkRecord* rec;
        float score;
        std::size_t tokens;
    };
    std::vector<Entry> entries;
    entries.reserve(hits.size());
    for (const auto& hit : hits) {
        const auto& rec = index.chunk(hit.chunk_id);
        ContextBlock probe{rec.pub_time_est, rec.chunk_id, rec.text};
        entries.push_back({&rec, hit.score, token_count(render_block(probe))});
    }

    // Dropping lowest-scored first keeps a top-m prefix of the score order.
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.rec->chunk_id < b.rec->chunk_id;
    });
    std::size_t total = 0, keep = 0;
    for (const auto& e : entries) {
        if (total + e.tokens > token_budget) break;
        total += e.tokens;
        ++keep;
    }

    StructuredContext ctx;
    ctx.truncated = keep < entries.size();
    entries.resize(keep);

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.rec->pub_time_est, a.rec->doc_id, a.rec->seq) <
               std::tie(b.rec->pub_time_est, b.rec->doc_id, b.rec->seq);
    });
    for (const auto& e : entries) {
        ctx.blocks.push_back({e.rec->pub_time_est, e.rec->chunk_id, e.rec->text});
        ctx.rendered += render_block(ctx.blocks.back());
        ctx.token_estimate += e.tokens;
    }
    return ctx;
}

}  // namespace tarag
