#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dietcha {

/// Payload written by one task execution. Never modified after creation.
struct DataPipeEntry {
    std::string key;
    std::string producer;  // task name
    std::string kind;      // output_kind of the producing task
    nlohmann::json payload;
    std::string created_at;
    std::size_t turn = 0;
};

/// Append-only per-session store of intermediate results, addressed by
/// opaque keys. Planner inputs refer to entries as "$pipe:<key>".
class DataPipe {
public:
    static constexpr std::string_view kRefPrefix = "$pipe:";

    /// Stores the payload under a fresh key and returns that key.
    std::string put(std::string producer, std::string kind, nlohmann::json payload, std::size_t turn);

    std::shared_ptr<const DataPipeEntry> get(std::string_view key) const;
    bool contains(std::string_view key) const { return get(key) != nullptr; }

    const std::vector<std::shared_ptr<const DataPipeEntry>>& entries() const { return entries_; }

    /// Newest entry of the given kind, optionally restricted to one turn.
    std::shared_ptr<const DataPipeEntry> latest(std::string_view kind,
                                                std::optional<std::size_t> turn = std::nullopt) const;

    /// "$pipe:k3" -> "k3"; nullopt for anything else.
    static std::optional<std::string> parse_ref(std::string_view value);
    static std::string make_ref(std::string_view key) { return std::string(kRefPrefix) + std::string(key); }

private:
    std::vector<std::shared_ptr<const DataPipeEntry>> entries_;
};

}  // namespace dietcha
