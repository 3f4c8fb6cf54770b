// Command-line front end: ingest / query / eval / compare.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tarag/errors.hpp"
#include "tarag/eval.hpp"
#include "tarag/ingest.hpp"
#include "tarag/retrieval.hpp"

using namespace tarag;
using nlohmann::json;

namespace {

// JSON config file. Schema (all keys optional):
// {
//   "max_chunk_tokens": 2048,
//   "prompt_version": "v1",
//   "plausible_min": "1900-01-01",
//   "plausible_max": "2100-01-01",
//   "cache_path": "annotations.cache.jsonl",
//   "embedder": {"kind": "stub", "dim": 64}
//             | {"kind": "remote", "endpoint": "...", "model": "...",
//                "path": "/v1/embeddings", "dim": 1536, "batch_size": 64,
//                "api_key": "..."},
//   "llm":       {"kind": "rule"} | {"kind": "remote", "endpoint": ..., "model": ...},
//   "generator": {"kind": "remote", ...} | {"kind": "constant", "label": "A"}
//              | {"kind": "overlap_oracle"}
// }
// The TARAG_API_KEY environment variable overrides every configured api_key.
struct Config {
    json raw = json::object();

    static Config load(const std::string& path) {
        Config cfg;
        if (path.empty()) return cfg;
        std::ifstream in(path);
        if (!in) throw Error{"cannot open config file " + path};
        cfg.raw = json::parse(in, nullptr, false);
        if (cfg.raw.is_discarded() || !cfg.raw.is_object())
            throw Error{"config file " + path + " is not a JSON object"};
        return cfg;
    }

    [[nodiscard]] json section(const std::string& key) const {
        return raw.contains(key) && raw[key].is_object() ? raw[key] : json::object();
    }
};

std::string api_key_for(const json& section) {
    if (const char* env = std::getenv("TARAG_API_KEY")) return env;
    return section.value("api_key", "");
}

std::unique_ptr<EmbeddingProvider> make_embedder(const Config& cfg, std::string* id_out) {
    json s = cfg.section("embedder");
    std::string kind = s.value("kind", "stub");
    if (kind == "stub") {
        std::size_t dim = s.value("dim", std::size_t{64});
        if (id_out) *id_out = "stub-" + std::to_string(dim);
        return std::make_unique<StubEmbedder>(dim);
    }
    if (kind == "remote") {
        RemoteEmbedder::Options o;
        o.endpoint = s.value("endpoint", "");
        o.path = s.value("path", o.path);
        o.model = s.value("model", "");
        o.dim = s.value("dim", std::size_t{0});
        o.batch_size = s.value("batch_size", o.batch_size);
        o.api_key = api_key_for(s);
        if (o.endpoint.empty() || o.model.empty() || o.dim == 0)
            throw Error{"remote embedder config needs endpoint, model, and dim"};
        if (id_out) *id_out = o.model;
        return std::make_unique<RemoteEmbedder>(o);
    }
    throw Error{"unknown embedder kind: " + kind};
}

// nullptr means the rule-based fallback path (no LLM calls).
std::unique_ptr<LlmProvider> make_llm(const json& s, std::string* id_out) {
    std::string kind = s.value("kind", "rule");
    if (kind == "rule" || kind == "none") {
        if (id_out) *id_out = "rule";
        return nullptr;
    }
    if (kind == "remote") {
        RemoteLlm::Options o;
        o.endpoint = s.value("endpoint", "");
        o.path = s.value("path", o.path);
        o.model = s.value("model", "");
        o.temperature = s.value("temperature", o.temperature);
        o.max_tokens = s.value("max_tokens", o.max_tokens);
        o.api_key = api_key_for(s);
        if (o.endpoint.empty() || o.model.empty())
            throw Error{"remote llm config needs endpoint and model"};
        if (id_out) *id_out = o.model;
        return std::make_unique<RemoteLlm>(o);
    }
    if (kind == "constant") {
        if (id_out) *id_out = "constant";
        return std::make_unique<ConstantChoiceLlm>(s.value("label", "A"));
    }
    if (kind == "overlap_oracle") {
        if (id_out) *id_out = "overlap_oracle";
        return std::make_unique<OverlapOracleLlm>();
    }
    throw Error{"unknown llm kind: " + kind};
}

IngestConfig ingest_config(const Config& cfg, const std::string& embedder_id,
                           const std::string& llm_id) {
    IngestConfig ic;
    ic.max_chunk_tokens = cfg.raw.value("max_chunk_tokens", ic.max_chunk_tokens);
    ic.prompt_version = cfg.raw.value("prompt_version", ic.prompt_version);
    ic.cache_path = cfg.raw.value("cache_path", ic.cache_path);
    ic.embedder_id = embedder_id;
    ic.llm_id = llm_id;
    if (auto d = Date::parse_iso(cfg.raw.value("plausible_min", "")))
        ic.annotation.plausible_min = *d;
    if (auto d = Date::parse_iso(cfg.raw.value("plausible_max", "")))
        ic.annotation.plausible_max = *d;
    return ic;
}

std::vector<std::size_t> parse_k_list(const std::string& csv) {
    std::vector<std::size_t> ks;
    std::stringstream ss(csv);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t k = std::stoul(part);
        if (k == 0) throw Error{"k values must be positive"};
        ks.push_back(k);
    }
    if (ks.empty()) throw Error{"empty k list"};
    return ks;
}

std::vector<Method> parse_method_list(const std::string& csv) {
    std::vector<Method> methods;
    std::stringstream ss(csv);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto m = method_from_string(part);
        if (!m) throw Error{"unknown method: " + part};
        methods.push_back(*m);
    }
    if (methods.empty()) throw Error{"empty method list"};
    return methods;
}

json intervals_json(const std::vector<TimeInterval>& intervals) {
    json arr = json::array();
    for (const auto& iv : intervals)
        arr.push_back({{"start", iv.start.to_iso()}, {"end", iv.end.to_iso()}});
    return arr;
}

int cmd_ingest(const std::string& corpus, const std::string& out, const std::string& config_path) {
    Config cfg = Config::load(config_path);
    std::string embedder_id, llm_id;
    auto embedder = make_embedder(cfg, &embedder_id);
    auto llm = make_llm(cfg.section("llm"), &llm_id);

    auto docs = load_documents_jsonl(corpus);
    BuildReport report;
    auto index =
        build_corpus_index(docs, *embedder, llm.get(), ingest_config(cfg, embedder_id, llm_id), &report);
    save_index(index, out);

    std::fprintf(stderr, "indexed %zu/%zu documents, %zu chunks, bounds %s .. %s -> %s\n",
                 report.documents_indexed, report.documents_seen, report.chunk_count,
                 index.manifest.bounds_start.to_iso().c_str(),
                 index.manifest.bounds_end.to_iso().c_str(), out.c_str());
    for (const auto& [doc_id, reason] : report.rejected)
        std::fprintf(stderr, "rejected %s: %s\n", doc_id.c_str(), reason.c_str());
    return 0;
}

int cmd_query(const std::string& index_path, const std::string& method_name, std::size_t k,
              const std::string& question, const std::string& config_path) {
    Config cfg = Config::load(config_path);
    auto method = method_from_string(method_name);
    if (!method) throw Error{"unknown method: " + method_name};

    auto index = load_index(index_path);
    auto embedder = make_embedder(cfg, nullptr);
    auto llm = make_llm(cfg.section("llm"), nullptr);

    Retriever retriever(index);
    RetrievalRequest req;
    req.question = question;
    req.k = k;
    req.method = *method;
    auto result = retriever.retrieve(req, embedder.get(), llm.get());

    json hits = json::array();
    for (const auto& h : result.hits) {
        const auto& rec = index.chunk(h.chunk_id);
        hits.push_back({{"chunk_id", h.chunk_id},
                        {"score", h.score},
                        {"doc_id", rec.doc_id},
                        {"pub_time_est", rec.pub_time_est.to_iso()},
                        {"text", rec.text}});
    }
    json out = {{"method", to_string(*method)},
                {"k", k},
                {"question", question},
                {"hits", hits},
                {"resolved_intervals", intervals_json(result.resolved_intervals)},
                {"diagnostics",
                 {{"candidate_count", result.diagnostics.candidate_count},
                  {"anchor_count", result.diagnostics.anchor_count},
                  {"elapsed_ms", result.diagnostics.elapsed_ms},
                  {"short_fill", result.diagnostics.short_fill},
                  {"reason", result.diagnostics.reason}}}};
    if (result.decomposition) out["q_core"] = result.decomposition->q_core;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_eval(const std::string& index_path, const std::string& eval_set_path,
             const std::string& methods_csv, const std::string& k_csv, std::size_t runs,
             const std::string& out_path, const std::string& plot_path,
             const std::string& config_path) {
    Config cfg = Config::load(config_path);
    auto index = load_index(index_path);
    auto embedder = make_embedder(cfg, nullptr);
    auto decomposer = make_llm(cfg.section("llm"), nullptr);
    auto generator = make_llm(cfg.section("generator"), nullptr);
    if (!generator) throw Error{"eval needs a generator (config key \"generator\")"};

    auto items = load_mcqa_jsonl(eval_set_path);
    auto methods = parse_method_list(methods_csv);
    auto ks = parse_k_list(k_csv);

    auto reports = compare_methods(index, embedder.get(), decomposer.get(), *generator, items,
                                   methods, ks, runs);
    std::cout << reports_table(reports);
    if (!out_path.empty()) write_reports_json(reports, out_path);
    if (!plot_path.empty()) write_accuracy_plot_svg(reports, plot_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporally aware retrieval pipeline"};
    app.require_subcommand(1);

    std::string corpus, out, config_path, index_path, question, plot_path;
    std::string method = "ta_rag", methods = "ta_rag,naive,bm25", k_csv = "5,10,20,50";
    std::size_t k = 10, runs = 5;

    auto* ingest = app.add_subcommand("ingest", "annotate, chunk, embed, and index a corpus");
    ingest->add_option("--corpus", corpus, "JSON-lines corpus file")->required();
    ingest->add_option("--out", out, "output index file")->required();
    ingest->add_option("--config", config_path, "JSON config file");

    auto* query = app.add_subcommand("query", "run one retrieval and print JSON");
    query->add_option("--index", index_path, "index file")->required();
    query->add_option("--method", method, "ta_rag | naive | bm25");
    query->add_option("--k", k, "number of hits");
    query->add_option("--question", question, "the question")->required();
    query->add_option("--config", config_path, "JSON config file");

    auto* eval = app.add_subcommand("eval", "run the MCQA evaluation protocol");
    eval->add_option("--index", index_path, "index file")->required();
    eval->add_option("--eval-set", corpus, "JSON-lines MCQA items")->required();
    eval->add_option("--method", method, "method to evaluate");
    eval->add_option("--k", k_csv, "comma-separated k values");
    eval->add_option("--runs", runs, "repetitions for mean/std");
    eval->add_option("--out", out, "write machine-readable reports JSON here");
    eval->add_option("--plot", plot_path, "write accuracy-vs-k SVG here");
    eval->add_option("--config", config_path, "JSON config file");

    auto* compare = app.add_subcommand("compare", "evaluate several methods side by side");
    compare->add_option("--index", index_path, "index file")->required();
    compare->add_option("--eval-set", corpus, "JSON-lines MCQA items")->required();
    compare->add_option("--methods", methods, "comma-separated method list");
    compare->add_option("--k", k_csv, "comma-separated k values");
    compare->add_option("--runs", runs, "repetitions for mean/std");
    compare->add_option("--out", out, "write machine-readable reports JSON here");
    compare->add_option("--plot", plot_path, "write accuracy-vs-k SVG here");
    compare->add_option("--config", config_path, "JSON config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(corpus, out, config_path);
        if (query->parsed()) return cmd_query(index_path, method, k, question, config_path);
        if (eval->parsed())
            return cmd_eval(index_path, corpus, method, k_csv, runs, out, plot_path, config_path);
        if (compare->parsed())
            return cmd_eval(index_path, corpus, methods, k_csv, runs, out, plot_path, config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
