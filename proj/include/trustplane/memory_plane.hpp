#pragma once

#include "trustplane/boundary.hpp"
#include "trustplane/canonical.hpp"
#include "trustplane/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace trustplane {

struct Provenance {
    std::string writer;  // agent id or feed id
    std::string phase;
    std::string incident_id;
    std::vector<std::string> context_refs;  // "M6:case-42" style references

    json to_json() const {
        return {{"writer", writer},
                {"phase", phase},
                {"incident_id", incident_id},
                {"context_refs", context_refs}};
    }
    static Provenance from_json(const json& doc) {
        return {doc.at("writer").get<std::string>(), doc.at("phase").get<std::string>(),
                doc.at("incident_id").get<std::string>(),
                doc.at("context_refs").get<std::vector<std::string>>()};
    }
};

struct MemoryRecord {
    std::string store;
    std::string key;
    std::uint64_t version = 1;  // gapless per (store, key), starting at 1
    json value;
    Provenance provenance;
    std::uint64_t tick = 0;  // memory plane logical clock
    bool tombstone = false;  // purge marks, never deletes

    json to_json() const {
        return {{"store", store},     {"key", key},   {"version", version},
                {"value", value},     {"tick", tick}, {"tombstone", tombstone},
                {"provenance", provenance.to_json()}};
    }
    static MemoryRecord from_json(const json& doc) {
        MemoryRecord r;
        r.store = doc.at("store").get<std::string>();
        r.key = doc.at("key").get<std::string>();
        r.version = doc.at("version").get<std::uint64_t>();
        r.value = doc.at("value");
        r.tick = doc.at("tick").get<std::uint64_t>();
        r.tombstone = doc.at("tombstone").get<bool>();
        r.provenance = Provenance::from_json(doc.at("provenance"));
        return r;
    }
};

enum class ReadStatus { Ok, OkRedacted, AccessDenied, UnknownStore, UnknownKey };

struct ReadResult {
    ReadStatus status = ReadStatus::AccessDenied;
    json value;
    std::vector<std::string> redacted_fields;
    std::set<Principle> principles;  // principles that acted on this request

    bool ok() const { return status == ReadStatus::Ok || status == ReadStatus::OkRedacted; }
};

enum class WriteStatus { Ok, AccessDenied, WriteRejected, UnknownStore };
enum class WriteReason { None, SchemaViolation, ProvenanceMismatch, DanglingEvidence, RateExceeded };

inline const char* to_string(WriteReason r) {
    switch (r) {
        case WriteReason::None: return "none";
        case WriteReason::SchemaViolation: return "SchemaViolation";
        case WriteReason::ProvenanceMismatch: return "ProvenanceMismatch";
        case WriteReason::DanglingEvidence: return "DanglingEvidence";
        case WriteReason::RateExceeded: return "RateExceeded";
    }
    return "?";
}

struct WriteResult {
    WriteStatus status = WriteStatus::AccessDenied;
    std::uint64_t version = 0;
    WriteReason reason = WriteReason::None;
    std::set<Principle> principles;

    bool ok() const { return status == WriteStatus::Ok; }
};

enum class IngestStatus { Accepted, Rejected, UnknownFeed };
enum class IngestReason { None, RouteEliminated, SchemaViolation };

struct IngestResult {
    IngestStatus status = IngestStatus::Rejected;
    std::uint64_t version = 0;
    IngestReason reason = IngestReason::None;
    std::optional<std::string> consolidation_target;
    std::set<Principle> principles;
};

struct MemoryPlaneConfig {
    bool enforce = true;  // grants, filters, redaction; off models the flat baseline
    std::set<std::string> redacted_phases = {"Report"};
    std::uint64_t rate_limit = 64;
    std::uint64_t rate_window = 32;  // logical ticks
};

// Versioned, append-only stores behind the Memory Management Agent: every
// access is grant-checked (P5) and every write passes the filter stack (P4).
// Single-writer by construction; callers go through the kernel inbox.
class MemoryPlane {
public:
    MemoryPlane(ArchitectureSpec spec, MemoryPlaneConfig config = {})
        : spec_(std::move(spec)), config_(config) {}

    const ArchitectureSpec& spec() const { return spec_; }
    std::uint64_t clock() const { return clock_; }

    ReadResult read(const std::string& phase, const std::string& store_id,
                    const std::string& key) const {
        ReadResult result;
        const StoreDecl* store = spec_.find_store(store_id);
        if (!store) {
            result.status = ReadStatus::UnknownStore;
            return result;
        }
        if (config_.enforce) {
            const auto mode = spec_.grant(phase, store_id);
            if (!mode || !grants_read(*mode)) {
                result.status = ReadStatus::AccessDenied;
                result.principles = {Principle::P5};
                return result;
            }
        }
        const MemoryRecord* record = latest(store_id, key);
        if (!record) {
            result.status = ReadStatus::UnknownKey;
            return result;
        }
        result.value = record->value;
        result.status = ReadStatus::Ok;
        if (config_.enforce && config_.redacted_phases.count(phase)) {
            for (const auto& [field, decl] : store->schema) {
                if (decl.sensitivity == Sensitivity::RawForensic && result.value.contains(field)) {
                    result.value.erase(field);
                    result.redacted_fields.push_back(field);
                }
            }
            if (!result.redacted_fields.empty()) {
                result.status = ReadStatus::OkRedacted;
                result.principles = {Principle::P5};
            }
        }
        return result;
    }

    WriteResult write(const std::string& phase, const std::string& store_id,
                      const std::string& key, json value, Provenance provenance) {
        WriteResult result;
        const StoreDecl* store = spec_.find_store(store_id);
        if (!store) {
            result.status = WriteStatus::UnknownStore;
            return result;
        }
        if (config_.enforce) {
            const auto mode = spec_.grant(phase, store_id);
            if (!mode || !grants_write(*mode)) {
                result.status = WriteStatus::AccessDenied;
                result.principles = {Principle::P5};
                return result;
            }
            const WriteReason verdict = run_filters(phase, *store, value, provenance);
            if (verdict != WriteReason::None) {
                result.status = WriteStatus::WriteRejected;
                result.reason = verdict;
                result.principles = {Principle::P4, Principle::P5};
                return result;
            }
        }
        result.status = WriteStatus::Ok;
        result.version = append(store_id, key, std::move(value), std::move(provenance));
        result.principles = config_.enforce ? std::set<Principle>{Principle::P4, Principle::P5}
                                            : std::set<Principle>{};
        return result;
    }

    IngestResult ingest_feed(const std::string& feed_id, const json& item) {
        IngestResult result;
        const FeedDecl* feed = spec_.find_feed(feed_id);
        const FeedRoute* route = spec_.route_for(feed_id);
        if (!feed || !route) {
            result.status = IngestStatus::UnknownFeed;
            return result;
        }
        const StoreDecl* store = spec_.find_store(route->store);
        const std::string key = item.contains("key") ? item.at("key").get<std::string>()
                                                     : feed_id + ":" + std::to_string(clock_);
        const json value = item.contains("value") ? item.at("value") : item;
        if (config_.enforce) {
            if (!route->retained) {
                result.status = IngestStatus::Rejected;
                result.reason = IngestReason::RouteEliminated;
                result.consolidation_target = route->consolidation_target;
                result.principles = {Principle::P5};
                return result;
            }
            if (schema_violation(*store, value)) {
                result.status = IngestStatus::Rejected;
                result.reason = IngestReason::SchemaViolation;
                result.principles = {Principle::P4, Principle::P5};
                return result;
            }
        }
        result.status = IngestStatus::Accepted;
        result.version = append(route->store, key, value, {feed_id, "External", "", {}});
        result.principles = config_.enforce ? std::set<Principle>{Principle::P4, Principle::P5}
                                            : std::set<Principle>{};
        return result;
    }

    std::vector<MemoryRecord> history(const std::string& store_id, const std::string& key) const {
        if (!spec_.find_store(store_id)) throw ReferenceError("unknown store: " + store_id);
        auto sit = records_.find(store_id);
        if (sit == records_.end() || !sit->second.count(key)) {
            throw ReferenceError("unknown key: " + store_id + ":" + key);
        }
        return sit->second.at(key);
    }

    bool has_key(const std::string& store_id, const std::string& key) const {
        auto sit = records_.find(store_id);
        return sit != records_.end() && sit->second.count(key) > 0;
    }

    // Re-run the schema filter over committed records and tombstone-mark
    // offenders. Nothing is deleted; versions stay gapless.
    std::size_t purge_rescan() {
        std::size_t marked = 0;
        for (auto& [store_id, keys] : records_) {
            const StoreDecl* store = spec_.find_store(store_id);
            if (!store) continue;
            for (auto& [key, versions] : keys) {
                (void)key;
                for (auto& record : versions) {
                    if (!record.tombstone && schema_violation(*store, record.value)) {
                        record.tombstone = true;
                        ++marked;
                    }
                }
            }
        }
        return marked;
    }

    std::string export_snapshot() const {
        std::ostringstream os;
        for (const auto& [store_id, keys] : records_) {
            (void)store_id;
            for (const auto& [key, versions] : keys) {
                (void)key;
                for (const auto& record : versions) os << record.to_json().dump() << '\n';
            }
        }
        return os.str();
    }

    // Snapshot import bypasses grants and filters; used for fixture seeding
    // and restore, never exposed through the kernel's method set.
    void import_snapshot(const std::string& lines) {
        std::istringstream is(lines);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            MemoryRecord record = MemoryRecord::from_json(json::parse(line));
            records_[record.store][record.key].push_back(std::move(record));
        }
    }

    void seed(const std::string& store_id, const std::string& key, json value,
              Provenance provenance) {
        append(store_id, key, std::move(value), std::move(provenance));
    }

    std::size_t record_count() const {
        std::size_t n = 0;
        for (const auto& [store, keys] : records_) {
            (void)store;
            for (const auto& [key, versions] : keys) {
                (void)key;
                n += versions.size();
            }
        }
        return n;
    }

private:
    const MemoryRecord* latest(const std::string& store_id, const std::string& key) const {
        auto sit = records_.find(store_id);
        if (sit == records_.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end() || kit->second.empty()) return nullptr;
        return &kit->second.back();
    }

    std::uint64_t append(const std::string& store_id, const std::string& key, json value,
                         Provenance provenance) {
        auto& versions = records_[store_id][key];
        MemoryRecord record;
        record.store = store_id;
        record.key = key;
        record.version = versions.size() + 1;
        record.value = std::move(value);
        record.provenance = std::move(provenance);
        record.tick = ++clock_;
        versions.push_back(std::move(record));
        return versions.back().version;
    }

    static bool kind_matches(const std::string& kind, const json& v) {
        if (kind == "string") return v.is_string();
        if (kind == "int") return v.is_number_integer();
        if (kind == "bool") return v.is_boolean();
        if (kind == "list") return v.is_array();
        if (kind == "object") return v.is_object();
        return false;
    }

    static bool schema_violation(const StoreDecl& store, const json& value) {
        if (!value.is_object()) return true;
        for (const auto& [field, v] : value.items()) {
            auto it = store.schema.find(field);
            if (it == store.schema.end() || !kind_matches(it->second.kind, v)) return true;
        }
        return false;
    }

    bool resolves(const std::string& phase, const std::string& ref) const {
        const auto colon = ref.find(':');
        if (colon == std::string::npos) return false;
        const std::string store_id = ref.substr(0, colon);
        const std::string key = ref.substr(colon + 1);
        // Filters may consult any store the writer can read.
        const auto mode = spec_.grant(phase, store_id);
        if (!mode || !grants_read(*mode)) return false;
        const MemoryRecord* record = latest(store_id, key);
        return record != nullptr && !record->tombstone;
    }

    WriteReason run_filters(const std::string& phase, const StoreDecl& store, const json& value,
                            const Provenance& provenance) const {
        if (schema_violation(store, value)) return WriteReason::SchemaViolation;
        const AgentDecl* writer = spec_.find_agent(provenance.writer);
        if (!writer || writer->phase != phase || provenance.phase != phase) {
            return WriteReason::ProvenanceMismatch;
        }
        std::vector<std::string> refs = provenance.context_refs;
        if (value.contains("evidence_refs") && value.at("evidence_refs").is_array()) {
            for (const auto& r : value.at("evidence_refs")) {
                if (r.is_string()) refs.push_back(r.get<std::string>());
            }
        }
        for (const auto& ref : refs) {
            if (!resolves(phase, ref)) return WriteReason::DanglingEvidence;
        }
        std::uint64_t recent = 0;
        const std::uint64_t window_start =
            clock_ >= config_.rate_window ? clock_ - config_.rate_window : 0;
        for (const auto& [store_id, keys] : records_) {
            (void)store_id;
            for (const auto& [key, versions] : keys) {
                (void)key;
                for (const auto& record : versions) {
                    if (record.provenance.phase == phase && record.tick > window_start) ++recent;
                }
            }
        }
        if (recent >= config_.rate_limit) return WriteReason::RateExceeded;
        return WriteReason::None;
    }

    ArchitectureSpec spec_;
    MemoryPlaneConfig config_;
    std::map<std::string, std::map<std::string, std::vector<MemoryRecord>>> records_;
    std::uint64_t clock_ = 0;
};

}  // namespace trustplane
