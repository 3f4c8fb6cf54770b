#include "tarag/cache.hpp"

#include <cstdio>
#include <fstream>

#include "tarag/text.hpp"

namespace tarag {

AnnotationCache::AnnotationCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("key") || !j.contains("value")) continue;
        entries_[j["key"].get<std::string>()] = j["value"];
    }
}

std::optional<nlohmann::json> AnnotationCache::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::optional<nlohmann::json>{std::in_place, it->second};
}

void AnnotationCache::put(const std::string& key, const nlohmann::json& value) {
    entries_[key] = value;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    out << nlohmann::json{{"key", key}, {"value", value}}.dump() << "\n";
}

std::string AnnotationCache::make_key(std::string_view content, std::string_view prompt_version,
                                      std::string_view model_id, std::string_view stage) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
    return std::string(buf) + ":" + std::string(prompt_version) + ":" + std::string(model_id) + ":" +
           std::string(stage);
}

}  // namespace tarag
