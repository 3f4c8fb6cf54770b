#pragma once

#include <stdexcept>
#include <string>

namespace tarag {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllConstraintsEmpty : Error {
    AllConstraintsEmpty() : Error("every temporal constraint clips to emptiness against the corpus bounds") {}
};

struct EmptyConstraintSet : Error {
    EmptyConstraintSet() : Error("empty interval list") {}
};

struct EmptyCorpus : Error {
    EmptyCorpus() : Error("corpus contains no indexable chunks") {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct UnknownChunkId : Error {
    explicit UnknownChunkId(const std::string& id) : Error("unknown chunk id: " + id) {}
};

struct ProviderUnavailable : Error {
    explicit ProviderUnavailable(const std::string& what) : Error(what) {}
};

struct BatchTooLarge : Error {
    explicit BatchTooLarge(const std::string& what) : Error(what) {}
};

struct EmptyText : Error {
    EmptyText() : Error("cannot embed an empty text") {}
};

struct DegenerateMean : Error {
    DegenerateMean() : Error("mean of variant embeddings has near-zero norm") {}
};

struct NoTemporalSignal : Error {
    explicit NoTemporalSignal(const std::string& doc_id)
        : Error("no publication time could be established for document " + doc_id) {}
};

struct EmptyCore : Error {
    EmptyCore() : Error("question contains no content words after removing temporal expressions") {}
};

struct FormatVersionMismatch : Error {
    explicit FormatVersionMismatch(const std::string& what) : Error(what) {}
};

struct CorruptIndex : Error {
    explicit CorruptIndex(const std::string& what) : Error(what) {}
};

}  // namespace tarag
