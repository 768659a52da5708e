#pragma once

#include "trustplane/canonical.hpp"
#include "trustplane/crypto.hpp"

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace trustplane {

struct AuditRecord {
    std::uint64_t seq = 0;
    std::string prev_hash;  // hex; all-zero digest for record 0
    json payload;
    std::string hash;  // hex digest over (seq, prev_hash, canonical payload)
};

inline std::string audit_record_hash(std::uint64_t seq, const std::string& prev_hash,
                                     const json& payload) {
    return sha256_hex(std::to_string(seq) + "|" + prev_hash + "|" + canonicalize(payload));
}

struct ChainCheck {
    bool intact = true;
    std::uint64_t broken_at = 0;
};

inline ChainCheck verify_audit_chain(const std::vector<AuditRecord>& records) {
    std::string prev = zero_digest_hex();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const AuditRecord& r = records[i];
        if (r.seq != i || r.prev_hash != prev ||
            r.hash != audit_record_hash(r.seq, r.prev_hash, r.payload)) {
            return {false, static_cast<std::uint64_t>(i)};
        }
        prev = r.hash;
    }
    return {true, 0};
}

// Append-only hash chain. Records are never rewritten; tampering with any
// payload or link is caught by verify_audit_chain.
class AuditLog {
public:
    const AuditRecord& append(json payload) {
        AuditRecord record;
        record.seq = records_.size();
        record.prev_hash = records_.empty() ? zero_digest_hex() : records_.back().hash;
        record.payload = std::move(payload);
        record.hash = audit_record_hash(record.seq, record.prev_hash, record.payload);
        records_.push_back(std::move(record));
        return records_.back();
    }

    const std::vector<AuditRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    ChainCheck verify() const { return verify_audit_chain(records_); }

    // One JSON record per line: seq, prev, hash, event.
    std::string to_lines() const {
        std::ostringstream os;
        for (const auto& r : records_) {
            os << json{{"seq", r.seq}, {"prev", r.prev_hash}, {"hash", r.hash}, {"event", r.payload}}
                      .dump()
               << '\n';
        }
        return os.str();
    }

    static std::vector<AuditRecord> parse_lines(const std::string& text) {
        std::vector<AuditRecord> out;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            json doc = json::parse(line);
            out.push_back({doc.at("seq").get<std::uint64_t>(), doc.at("prev").get<std::string>(),
                           doc.at("event"), doc.at("hash").get<std::string>()});
        }
        return out;
    }

private:
    std::vector<AuditRecord> records_;
};

}  // namespace trustplane
