#include "tarag/prompts.hpp"

namespace tarag::prompts {

std::string fill(std::string tmpl, const std::string& key, const std::string& value) {
    const std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = tmpl.find(needle, pos)) != std::string::npos) {
        tmpl.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return tmpl;
}

}  // namespace tarag::prompts
