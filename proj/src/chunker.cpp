#include "tarag/chunker.hpp"

#include <stdexcept>

#include "tarag/text.hpp"

namespace tarag {

std::vector<ChunkPiece> chunk_document(const std::string& text, std::size_t max_tokens) {
    if (max_tokens < 32) throw std::invalid_argument("chunk budget must be >= 32 tokens");

    struct Segment {
        std::size_t begin, end, tokens;
    };
    std::vector<Segment> segments;
    for (const auto& s : sentence_spans(text)) {
        std::string_view sent = std::string_view(text).substr(s.begin, s.end - s.begin);
        std::size_t tokens = token_count(sent);
        if (tokens <= max_tokens) {
            segments.push_back({s.begin, s.end, tokens});
            continue;
        }
        // Oversize sentence: cut at token starts so no token straddles a cut.
        auto spans = token_spans(sent);
        std::size_t piece_begin = s.begin;
        for (std::size_t i = max_tokens; i < spans.size(); i += max_tokens) {
            std::size_t cut = s.begin + spans[i].begin;
            segments.push_back({piece_begin, cut, max_tokens});
            piece_begin = cut;
        }
        segments.push_back({piece_begin, s.end, spans.size() % max_tokens == 0
                                                    ? max_tokens
                                                    : spans.size() % max_tokens});
    }

    std::vector<ChunkPiece> chunks;
    std::size_t cur_begin = 0, cur_end = 0, cur_tokens = 0;
    auto flush = [&] {
        if (cur_end > cur_begin) {
            chunks.push_back({chunks.size(), text.substr(cur_begin, cur_end - cur_begin), cur_tokens});
        }
    };
    for (const auto& seg : segments) {
        if (cur_tokens > 0 && cur_tokens + seg.tokens > max_tokens) {
            flush();
            cur_begin = seg.begin;
            cur_tokens = 0;
        } else if (cur_tokens == 0) {
            cur_begin = seg.begin;
        }
        cur_end = seg.end;
        cur_tokens += seg.tokens;
    }
    flush();
    return chunks;
}

}  // namespace tarag
