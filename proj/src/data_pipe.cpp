#include "dietcha/data_pipe.h"

#include "dietcha/format.h"

namespace dietcha {

std::string DataPipe::put(std::string producer, std::string kind, nlohmann::json payload, std::size_t turn) {
    auto entry = std::make_shared<DataPipeEntry>();
    entry->key = "k" + std::to_string(entries_.size() + 1);
    entry->producer = std::move(producer);
    entry->kind = std::move(kind);
    entry->payload = std::move(payload);
    entry->created_at = utc_timestamp_now();
    entry->turn = turn;
    std::string key = entry->key;
    entries_.push_back(std::move(entry));
    return key;
}

std::shared_ptr<const DataPipeEntry> DataPipe::get(std::string_view key) const {
    for (const auto& e : entries_) {
        if (e->key == key) return e;
    }
    return nullptr;
}

std::shared_ptr<const DataPipeEntry> DataPipe::latest(std::string_view kind, std::optional<std::size_t> turn) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        if ((*it)->kind == kind && (!turn || (*it)->turn == *turn)) return *it;
    }
    return nullptr;
}

std::optional<std::string> DataPipe::parse_ref(std::string_view value) {
    if (value.substr(0, kRefPrefix.size()) != kRefPrefix || value.size() == kRefPrefix.size()) return std::nullopt;
    return std::string(value.substr(kRefPrefix.size()));
}

}  // namespace dietcha
