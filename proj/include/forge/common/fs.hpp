#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace forge {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string read_file(const fs::path& path);

// Writes to a sibling temporary file then renames over the target, so
// readers never observe a partially written file and concurrent writers of
// identical content are last-writer-wins.
void write_file_atomic(const fs::path& path, std::string_view content);

std::vector<json> read_jsonl(const fs::path& path);

// One compact JSON document per line, '\n' terminated.
std::string to_jsonl(const std::vector<json>& records);

// Filesystem-safe slug for model ids such as "openai:gpt-5" -> "openai_gpt-5".
std::string slugify(std::string_view id);

}  // namespace forge
