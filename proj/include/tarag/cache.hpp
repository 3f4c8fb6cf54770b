#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace tarag {

// Append-only JSON-lines sidecar caching annotation and embedding results so
// re-ingestion never repeats paid provider calls for unchanged content. Keys
// combine content hash, prompt version, model id and stage.
class AnnotationCache {
public:
    AnnotationCache() = default;  // in-memory only
    explicit AnnotationCache(std::string path);

    [[nodiscard]] std::optional<nlohmann::json> get(const std::string& key) const;
    void put(const std::string& key, const nlohmann::json& value);

    [[nodiscard]] static std::string make_key(std::string_view content, std::string_view prompt_version,
                                              std::string_view model_id, std::string_view stage);

    [[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
    std::string path_;  // empty -> no persistence
    std::unordered_map<std::string, nlohmann::json> entries_;
};

}  // namespace tarag
