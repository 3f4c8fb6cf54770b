#include "tarag/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "tarag/errors.hpp"
#include "tarag/text.hpp"

namespace tarag {

using nlohmann::json;

const ChunkRecord& CorpusIndex::chunk(const ChunkId& id) const {
    auto it = row_of_.find(id);
    if (it == row_of_.end()) throw UnknownChunkId{id};
    return chunks[it->second];
}

void CorpusIndex::rebuild_lookup() {
    row_of_.clear();
    for (std::size_t i = 0; i < chunks.size(); ++i) row_of_[chunks[i].chunk_id] = i;
}

namespace {

std::string make_chunk_id(const std::string& doc_id, std::size_t seq) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%06zu", seq);
    return doc_id + buf;
}

std::optional<std::string> date_hint(const Document& doc) {
    for (const char* key : {"date", "date_hint", "published", "pub_date"}) {
        auto it = doc.metadata.find(key);
        if (it != doc.metadata.end()) return it->second;
    }
    return std::nullopt;
}

std::string now_iso_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json intervals_to_json(const std::vector<TimeInterval>& intervals) {
    json arr = json::array();
    for (const auto& iv : intervals)
        arr.push_back({{"start", iv.start.to_iso()}, {"end", iv.end.to_iso()}});
    return arr;
}

std::vector<TimeInterval> intervals_from_json(const json& arr) {
    std::vector<TimeInterval> out;
    for (const auto& item : arr) {
        auto s = Date::parse_iso(item.at("start").get<std::string>());
        auto e = Date::parse_iso(item.at("end").get<std::string>());
        if (!s || !e || !(*s < *e)) throw CorruptIndex{"invalid interval in chunk table"};
        out.emplace_back(*s, *e);
    }
    return out;
}

AnnotationSource source_from_string(const std::string& s) {
    if (s == "llm") return AnnotationSource::llm;
    if (s == "fallback_pub") return AnnotationSource::fallback_pub;
    return AnnotationSource::rule;
}

}  // namespace

CorpusIndex build_corpus_index(const std::vector<Document>& docs, EmbeddingProvider& embedder,
                               LlmProvider* llm, const IngestConfig& config, BuildReport* report) {
    BuildReport local_report;
    BuildReport& rep = report ? *report : local_report;
    rep = {};

    AnnotationCache cache = config.cache_path.empty() ? AnnotationCache{} : AnnotationCache{config.cache_path};

    CorpusIndex index;
    std::optional<Date> min_pub, max_pub;

    for (const auto& doc : docs) {
        ++rep.documents_seen;
        if (doc.text.empty()) {
            rep.rejected.emplace_back(doc.doc_id, "empty document");
            continue;
        }

        const std::size_t h = config.annotation.head_chars;
        std::string head = doc.text.substr(0, h);
        std::string tail = doc.text.size() > h ? doc.text.substr(doc.text.size() - h) : doc.text;

        DocPassResult pass1;
        const std::string pass1_key =
            AnnotationCache::make_key(doc.text, config.prompt_version, config.llm_id, "pass1");
        if (auto cached = cache.get(pass1_key)) {
            auto pub = Date::parse_iso((*cached).at("pub").get<std::string>());
            if (!pub) throw CorruptIndex{"bad cached pass-one entry"};
            pass1 = {*pub, (*cached).at("abstract").get<std::string>()};
        } else {
            try {
                pass1 = doc_pass_one(llm, head, tail, date_hint(doc), config.annotation);
            } catch (const NoTemporalSignal&) {
                rep.rejected.emplace_back(doc.doc_id, "no temporal signal");
                continue;
            }
            cache.put(pass1_key, {{"pub", pass1.pub_time_est.to_iso()}, {"abstract", pass1.abstract}});
        }

        for (const auto& piece : chunk_document(doc.text, config.max_chunk_tokens)) {
            ChunkRecord rec;
            rec.chunk_id = make_chunk_id(doc.doc_id, piece.seq);
            rec.doc_id = doc.doc_id;
            rec.seq = piece.seq;
            rec.text = piece.text;
            rec.token_count = piece.token_count;
            rec.pub_time_est = pass1.pub_time_est;

            const std::string pass2_key = AnnotationCache::make_key(
                pass1.pub_time_est.to_iso() + "\n" + piece.text, config.prompt_version, config.llm_id,
                "pass2");
            if (auto cached = cache.get(pass2_key)) {
                rec.event_intervals = intervals_from_json((*cached).at("intervals"));
                rec.interval_source = source_from_string((*cached).value("source", "rule"));
            } else {
                auto ann = chunk_pass_two(llm, piece.text, pass1, config.annotation);
                rec.event_intervals = ann.event_intervals;
                rec.interval_source = ann.source;
                cache.put(pass2_key, {{"intervals", intervals_to_json(ann.event_intervals)},
                                      {"source", to_string(ann.source)}});
            }
            index.chunks.push_back(std::move(rec));
        }

        ++rep.documents_indexed;
        if (!min_pub || pass1.pub_time_est < *min_pub) min_pub = pass1.pub_time_est;
        if (!max_pub || *max_pub < pass1.pub_time_est) max_pub = pass1.pub_time_est;
    }

    if (index.chunks.empty()) throw EmptyCorpus{};
    rep.chunk_count = index.chunks.size();

    // Embedding stage, cache-aware per chunk text.
    std::vector<std::string> to_embed;
    std::vector<std::size_t> to_embed_rows;
    std::vector<std::vector<float>> embeddings(index.chunks.size());
    for (std::size_t i = 0; i < index.chunks.size(); ++i) {
        const std::string key =
            AnnotationCache::make_key(index.chunks[i].text, "-", config.embedder_id, "embed");
        if (auto cached = cache.get(key)) {
            embeddings[i] = cached->get<std::vector<float>>();
        } else {
            to_embed.push_back(index.chunks[i].text);
            to_embed_rows.push_back(i);
        }
    }
    if (!to_embed.empty()) {
        auto vecs = embed_texts(embedder, to_embed);
        for (std::size_t j = 0; j < vecs.size(); ++j) {
            embeddings[to_embed_rows[j]] = vecs[j];
            const std::string key = AnnotationCache::make_key(index.chunks[to_embed_rows[j]].text, "-",
                                                              config.embedder_id, "embed");
            cache.put(key, embeddings[to_embed_rows[j]]);
        }
    }

    index.vectors = VectorIndex(embedder.dim());
    std::vector<std::pair<TimeInterval, ChunkId>> entries;
    for (std::size_t i = 0; i < index.chunks.size(); ++i) {
        index.vectors.add(index.chunks[i].chunk_id, embeddings[i]);
        for (const auto& iv : index.chunks[i].event_intervals)
            entries.emplace_back(iv, index.chunks[i].chunk_id);
    }
    index.intervals = IntervalIndex::build(std::move(entries));

    index.manifest.embedder_id = config.embedder_id;
    index.manifest.dim = embedder.dim();
    index.manifest.prompt_version = config.prompt_version;
    index.manifest.built_at = now_iso_utc();
    index.manifest.bounds_start = *min_pub;
    index.manifest.bounds_end = max_pub->add_days(1);
    index.manifest.max_chunk_tokens = config.max_chunk_tokens;
    index.rebuild_lookup();
    return index;
}

namespace {

constexpr char kMagic[8] = {'T', 'A', 'R', 'A', 'G', 'I', 'X', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw CorruptIndex{"truncated index file"};
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void save_index(const CorpusIndex& index, const std::string& path) {
    std::string out;
    out.append(kMagic, sizeof kMagic);
    put_u32(out, kFormatVersion);

    json manifest = {{"embedder_id", index.manifest.embedder_id},
                     {"dim", index.manifest.dim},
                     {"prompt_version", index.manifest.prompt_version},
                     {"built_at", index.manifest.built_at},
                     {"bounds_start", index.manifest.bounds_start.to_iso()},
                     {"bounds_end", index.manifest.bounds_end.to_iso()},
                     {"max_chunk_tokens", index.manifest.max_chunk_tokens}};
    std::string manifest_str = manifest.dump();
    put_u64(out, manifest_str.size());
    out += manifest_str;

    std::string table;
    for (const auto& c : index.chunks) {
        json line = {{"id", c.chunk_id},          {"doc", c.doc_id},
                     {"seq", c.seq},              {"text", c.text},
                     {"tokens", c.token_count},   {"pub", c.pub_time_est.to_iso()},
                     {"intervals", intervals_to_json(c.event_intervals)},
                     {"src", to_string(c.interval_source)}};
        table += line.dump();
        table += "\n";
    }
    put_u64(out, table.size());
    out += table;

    put_u32(out, std::uint32_t(index.vectors.dim()));
    put_u32(out, std::uint32_t(index.vectors.size()));
    const auto& data = index.vectors.data();
    static_assert(sizeof(float) == 4);
    out.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(float));

    std::uint32_t crc = std::uint32_t(
        crc32(0, reinterpret_cast<const Bytef*>(out.data()), uInt(out.size())));
    put_u32(out, crc);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error{"cannot open " + path + " for writing"};
    file.write(out.data(), std::streamsize(out.size()));
    if (!file) throw Error{"write failed: " + path};
}

CorpusIndex load_index(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error{"cannot open " + path};
    std::string buf((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof kMagic + 8 || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0)
        throw CorruptIndex{"bad magic"};
    std::uint32_t stored_crc = 0;
    for (int i = 0; i < 4; ++i)
        stored_crc |= std::uint32_t(std::uint8_t(buf[buf.size() - 4 + i])) << (8 * i);
    std::uint32_t actual_crc = std::uint32_t(
        crc32(0, reinterpret_cast<const Bytef*>(buf.data()), uInt(buf.size() - 4)));
    if (stored_crc != actual_crc) throw CorruptIndex{"checksum mismatch"};

    Reader r{buf, sizeof kMagic};
    std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        throw FormatVersionMismatch{"index format version " + std::to_string(version) +
                                    ", expected " + std::to_string(kFormatVersion)};

    CorpusIndex index;
    std::string manifest_str = r.bytes(r.u64());
    auto manifest = json::parse(manifest_str, nullptr, false);
    if (manifest.is_discarded()) throw CorruptIndex{"unparseable manifest"};
    index.manifest.embedder_id = manifest.value("embedder_id", "");
    index.manifest.dim = manifest.value("dim", 0);
    index.manifest.prompt_version = manifest.value("prompt_version", "");
    index.manifest.built_at = manifest.value("built_at", "");
    index.manifest.max_chunk_tokens = manifest.value("max_chunk_tokens", 0);
    auto bs = Date::parse_iso(manifest.value("bounds_start", ""));
    auto be = Date::parse_iso(manifest.value("bounds_end", ""));
    if (!bs || !be || !(*bs < *be)) throw CorruptIndex{"bad corpus bounds in manifest"};
    index.manifest.bounds_start = *bs;
    index.manifest.bounds_end = *be;

    std::string table = r.bytes(r.u64());
    std::size_t line_start = 0;
    while (line_start < table.size()) {
        std::size_t nl = table.find('\n', line_start);
        if (nl == std::string::npos) nl = table.size();
        auto line = json::parse(table.substr(line_start, nl - line_start), nullptr, false);
        if (line.is_discarded()) throw CorruptIndex{"unparseable chunk table line"};
        ChunkRecord rec;
        rec.chunk_id = line.at("id").get<std::string>();
        rec.doc_id = line.at("doc").get<std::string>();
        rec.seq = line.at("seq").get<std::size_t>();
        rec.text = line.at("text").get<std::string>();
        rec.token_count = line.at("tokens").get<std::size_t>();
        auto pub = Date::parse_iso(line.at("pub").get<std::string>());
        if (!pub) throw CorruptIndex{"bad publication date in chunk table"};
        rec.pub_time_est = *pub;
        rec.event_intervals = intervals_from_json(line.at("intervals"));
        if (rec.event_intervals.empty()) throw CorruptIndex{"chunk with no event intervals"};
        rec.interval_source = source_from_string(line.value("src", "rule"));
        index.chunks.push_back(std::move(rec));
        line_start = nl + 1;
    }
    if (index.chunks.empty()) throw CorruptIndex{"empty chunk table"};

    std::uint32_t dim = r.u32();
    std::uint32_t count = r.u32();
    if (dim != index.manifest.dim || count != index.chunks.size())
        throw CorruptIndex{"vector block header disagrees with manifest/chunk table"};
    std::string vec_bytes = r.bytes(std::size_t(dim) * count * sizeof(float));
    std::vector<float> data(std::size_t(dim) * count);
    std::memcpy(data.data(), vec_bytes.data(), vec_bytes.size());

    std::vector<ChunkId> ids;
    ids.reserve(count);
    std::vector<std::pair<TimeInterval, ChunkId>> entries;
    for (const auto& c : index.chunks) {
        ids.push_back(c.chunk_id);
        for (const auto& iv : c.event_intervals) entries.emplace_back(iv, c.chunk_id);
    }
    index.vectors = VectorIndex::from_rows(dim, std::move(ids), std::move(data));
    index.intervals = IntervalIndex::build(std::move(entries));
    index.rebuild_lookup();
    return index;
}

std::vector<Document> load_documents_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error{"cannot open " + path};
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (normalize_whitespace(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("doc_id") || !j.contains("text"))
            throw Error{"bad corpus line " + std::to_string(line_no) + " in " + path};
        Document doc;
        doc.doc_id = j["doc_id"].get<std::string>();
        doc.text = j["text"].get<std::string>();
        if (j.contains("metadata") && j["metadata"].is_object()) {
            for (auto& [k, v] : j["metadata"].items())
                if (v.is_string()) doc.metadata[k] = v.get<std::string>();
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace tarag
