#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace satolab::io {

/// %.17g, or "null" for non-finite values.
std::string format17(double v);

/// Serializes with every floating-point number at 17 significant digits so
/// reports round-trip exactly and are byte-stable.
std::string dump(const nlohmann::ordered_json& j, int indent = 2);

/// Writes `text` to `path`, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace satolab::io
