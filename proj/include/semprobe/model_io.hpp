#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "semprobe/mapping.hpp"

namespace semprobe {

using AnyModel = std::variant<LinearMap, MlpMap>;

/// Text serialization with a kind tag, explicit shapes and 17-significant-
/// digit values, so save/load round-trips parameters bit-exactly.
void save_model(const LinearMap& model, const std::filesystem::path& path);
void save_model(const MlpMap& model, const std::filesystem::path& path);
void save_model(const AnyModel& model, const std::filesystem::path& path);

AnyModel load_model(const std::filesystem::path& path);
AnyModel load_model(std::istream& in, const std::string& name);

}  // namespace semprobe
