#pragma once

#include "trustplane/canonical.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trustplane {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ReferenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PartitionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AccessMode { Read, Write, ReadWrite };
enum class ActionClass { Reversible, Irreversible };
enum class Sensitivity { Normal, RawForensic };

inline std::string to_string(AccessMode m) {
    switch (m) {
        case AccessMode::Read: return "read";
        case AccessMode::Write: return "write";
        case AccessMode::ReadWrite: return "rw";
    }
    throw std::logic_error("bad access mode");
}

inline AccessMode access_mode_from_string(const std::string& s) {
    if (s == "read") return AccessMode::Read;
    if (s == "write") return AccessMode::Write;
    if (s == "rw") return AccessMode::ReadWrite;
    throw SchemaError("unknown access mode: " + s);
}

inline bool grants_read(AccessMode m) { return m != AccessMode::Write; }
inline bool grants_write(AccessMode m) { return m != AccessMode::Read; }

struct OperationDecl {
    ActionClass action_class = ActionClass::Reversible;
    // Permitted parameter fields; invocation payloads are narrowed to this set.
    std::vector<std::string> param_fields;
};

struct AgentDecl {
    std::string id;
    std::string phase;
    std::string display_name;
};

struct ToolDecl {
    std::string id;
    std::string name;
    std::map<std::string, OperationDecl> operations;
};

struct StoreField {
    std::string kind;  // string | int | bool | list | object
    Sensitivity sensitivity = Sensitivity::Normal;
};

struct StoreDecl {
    std::string id;
    std::string name;
    std::map<std::string, StoreField> schema;
};

struct FeedDecl {
    std::string id;
    std::string name;
};

struct FeedRoute {
    std::string feed;
    std::string store;
    bool retained = false;
    std::optional<std::string> consolidation_target;
};

struct ArchitectureSpec {
    std::vector<AgentDecl> agents;
    std::vector<ToolDecl> tools;
    std::vector<StoreDecl> memory_stores;
    std::vector<FeedDecl> feeds;
    std::map<std::string, std::set<std::string>> tool_assignments;            // phase -> tools
    std::map<std::string, std::map<std::string, AccessMode>> memory_grants;   // phase -> store -> mode
    std::vector<std::pair<std::string, std::string>> handoffs;                // (phase, phase)
    std::vector<FeedRoute> feed_routes;

    const AgentDecl* find_agent(const std::string& id) const {
        for (const auto& a : agents)
            if (a.id == id) return &a;
        return nullptr;
    }
    const ToolDecl* find_tool(const std::string& id) const {
        for (const auto& t : tools)
            if (t.id == id) return &t;
        return nullptr;
    }
    const StoreDecl* find_store(const std::string& id) const {
        for (const auto& s : memory_stores)
            if (s.id == id) return &s;
        return nullptr;
    }
    const FeedDecl* find_feed(const std::string& id) const {
        for (const auto& f : feeds)
            if (f.id == id) return &f;
        return nullptr;
    }
    const FeedRoute* route_for(const std::string& feed_id) const {
        for (const auto& r : feed_routes)
            if (r.feed == feed_id) return &r;
        return nullptr;
    }

    // Phase owning a tool, per the tool_assignments partition.
    std::optional<std::string> tool_phase(const std::string& tool_id) const {
        for (const auto& [phase, tools_in_phase] : tool_assignments)
            if (tools_in_phase.count(tool_id)) return phase;
        return std::nullopt;
    }

    std::optional<AccessMode> grant(const std::string& phase, const std::string& store) const {
        auto pit = memory_grants.find(phase);
        if (pit == memory_grants.end()) return std::nullopt;
        auto sit = pit->second.find(store);
        if (sit == pit->second.end()) return std::nullopt;
        return sit->second;
    }

    bool has_handoff(const std::string& from, const std::string& to) const {
        for (const auto& [a, b] : handoffs)
            if (a == from && b == to) return true;
        return false;
    }

    std::set<std::string> declared_phases() const {
        std::set<std::string> phases;
        for (const auto& a : agents) phases.insert(a.phase);
        return phases;
    }
};

namespace detail {

template <typename T>
void require_unique_ids(const std::vector<T>& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (!seen.insert(item.id).second) {
            throw SchemaError(std::string(what) + " id declared twice: " + item.id);
        }
    }
}

}  // namespace detail

inline void validate(const ArchitectureSpec& spec) {
    detail::require_unique_ids(spec.agents, "agent");
    detail::require_unique_ids(spec.tools, "tool");
    detail::require_unique_ids(spec.memory_stores, "memory store");
    detail::require_unique_ids(spec.feeds, "feed");

    for (const auto& t : spec.tools) {
        if (t.operations.empty()) throw SchemaError("tool has no operations: " + t.id);
    }

    const std::set<std::string> phases = spec.declared_phases();

    // Tool assignments partition the tool set: every referenced tool exists
    // and no tool belongs to two phases.
    std::map<std::string, std::string> owner;
    for (const auto& [phase, tool_ids] : spec.tool_assignments) {
        for (const auto& tid : tool_ids) {
            if (!spec.find_tool(tid)) {
                throw ReferenceError("tool_assignments references unknown tool: " + tid);
            }
            auto [it, inserted] = owner.emplace(tid, phase);
            if (!inserted) {
                throw PartitionError("tool " + tid + " assigned to both " + it->second +
                                     " and " + phase);
            }
        }
    }

    for (const auto& [phase, grants] : spec.memory_grants) {
        for (const auto& [store_id, mode] : grants) {
            (void)mode;
            if (!spec.find_store(store_id)) {
                throw ReferenceError("memory_grants references unknown store: " + store_id);
            }
        }
    }

    for (const auto& [from, to] : spec.handoffs) {
        if (!phases.count(from) || !phases.count(to)) {
            throw ReferenceError("handoff endpoint is not a declared phase: " + from + "->" + to);
        }
        if (from == to) throw SchemaError("self-handoff is not allowed: " + from);
    }

    std::set<std::string> routed;
    for (const auto& r : spec.feed_routes) {
        if (!spec.find_feed(r.feed)) {
            throw ReferenceError("feed_routes references unknown feed: " + r.feed);
        }
        if (!spec.find_store(r.store)) {
            throw ReferenceError("feed_routes references unknown store: " + r.store);
        }
        if (r.consolidation_target && !spec.find_feed(*r.consolidation_target)) {
            throw ReferenceError("consolidation target is not a declared feed: " +
                                 *r.consolidation_target);
        }
        if (!routed.insert(r.feed).second) {
            throw SchemaError("feed has more than one route: " + r.feed);
        }
    }
    for (const auto& f : spec.feeds) {
        if (!routed.count(f.id)) throw SchemaError("feed has no route: " + f.id);
    }
}

inline json serialize(const ArchitectureSpec& spec) {
    json doc;
    doc["agents"] = json::array();
    for (const auto& a : spec.agents) {
        doc["agents"].push_back({{"id", a.id}, {"phase", a.phase}, {"display_name", a.display_name}});
    }
    doc["tools"] = json::array();
    for (const auto& t : spec.tools) {
        json ops = json::object();
        for (const auto& [name, op] : t.operations) {
            ops[name] = {
                {"action_class", op.action_class == ActionClass::Irreversible ? "irreversible"
                                                                              : "reversible"},
                {"params", op.param_fields},
            };
        }
        doc["tools"].push_back({{"id", t.id}, {"name", t.name}, {"operations", ops}});
    }
    doc["memory_stores"] = json::array();
    for (const auto& s : spec.memory_stores) {
        json schema = json::object();
        for (const auto& [field, decl] : s.schema) {
            schema[field] = {
                {"kind", decl.kind},
                {"sensitivity",
                 decl.sensitivity == Sensitivity::RawForensic ? "raw_forensic" : "normal"},
            };
        }
        doc["memory_stores"].push_back({{"id", s.id}, {"name", s.name}, {"schema", schema}});
    }
    doc["feeds"] = json::array();
    for (const auto& f : spec.feeds) doc["feeds"].push_back({{"id", f.id}, {"name", f.name}});

    doc["tool_assignments"] = json::object();
    for (const auto& [phase, tools] : spec.tool_assignments) {
        doc["tool_assignments"][phase] = std::vector<std::string>(tools.begin(), tools.end());
    }
    doc["memory_grants"] = json::object();
    for (const auto& [phase, grants] : spec.memory_grants) {
        json g = json::object();
        for (const auto& [store, mode] : grants) g[store] = to_string(mode);
        doc["memory_grants"][phase] = g;
    }
    doc["handoffs"] = json::array();
    for (const auto& [from, to] : spec.handoffs) doc["handoffs"].push_back({from, to});

    doc["feed_routes"] = json::array();
    for (const auto& r : spec.feed_routes) {
        json route = {{"feed", r.feed}, {"store", r.store}, {"retained", r.retained}};
        route["consolidation_target"] =
            r.consolidation_target ? json(*r.consolidation_target) : json(nullptr);
        doc["feed_routes"].push_back(route);
    }
    return doc;
}

namespace detail {

inline const json& member(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing field: ") + key);
    return *it;
}

inline std::string str_member(const json& obj, const char* key) {
    const json& v = member(obj, key);
    if (!v.is_string()) throw SchemaError(std::string("field is not a string: ") + key);
    return v.get<std::string>();
}

}  // namespace detail

inline ArchitectureSpec parse_architecture(const json& doc) {
    using detail::member;
    using detail::str_member;
    if (!doc.is_object()) throw SchemaError("architecture document must be a JSON object");

    ArchitectureSpec spec;
    for (const auto& a : member(doc, "agents")) {
        spec.agents.push_back(
            {str_member(a, "id"), str_member(a, "phase"), str_member(a, "display_name")});
    }
    for (const auto& t : member(doc, "tools")) {
        ToolDecl tool{str_member(t, "id"), str_member(t, "name"), {}};
        for (const auto& [name, op] : member(t, "operations").items()) {
            OperationDecl decl;
            const std::string cls = str_member(op, "action_class");
            if (cls == "irreversible") {
                decl.action_class = ActionClass::Irreversible;
            } else if (cls == "reversible") {
                decl.action_class = ActionClass::Reversible;
            } else {
                throw SchemaError("unknown action class: " + cls);
            }
            for (const auto& f : member(op, "params")) decl.param_fields.push_back(f.get<std::string>());
            tool.operations[name] = std::move(decl);
        }
        spec.tools.push_back(std::move(tool));
    }
    for (const auto& s : member(doc, "memory_stores")) {
        StoreDecl store{str_member(s, "id"), str_member(s, "name"), {}};
        for (const auto& [field, decl] : member(s, "schema").items()) {
            StoreField sf;
            sf.kind = str_member(decl, "kind");
            const std::string sens = str_member(decl, "sensitivity");
            if (sens == "raw_forensic") {
                sf.sensitivity = Sensitivity::RawForensic;
            } else if (sens == "normal") {
                sf.sensitivity = Sensitivity::Normal;
            } else {
                throw SchemaError("unknown sensitivity tag: " + sens);
            }
            store.schema[field] = sf;
        }
        spec.memory_stores.push_back(std::move(store));
    }
    for (const auto& f : member(doc, "feeds")) {
        spec.feeds.push_back({str_member(f, "id"), str_member(f, "name")});
    }
    for (const auto& [phase, tools] : member(doc, "tool_assignments").items()) {
        std::set<std::string>& dst = spec.tool_assignments[phase];
        for (const auto& tid : tools) dst.insert(tid.get<std::string>());
    }
    for (const auto& [phase, grants] : member(doc, "memory_grants").items()) {
        for (const auto& [store, mode] : grants.items()) {
            if (!mode.is_string()) throw SchemaError("access mode must be a string");
            spec.memory_grants[phase][store] = access_mode_from_string(mode.get<std::string>());
        }
    }
    for (const auto& h : member(doc, "handoffs")) {
        if (!h.is_array() || h.size() != 2) throw SchemaError("handoff must be a [from, to] pair");
        spec.handoffs.emplace_back(h[0].get<std::string>(), h[1].get<std::string>());
    }
    for (const auto& r : member(doc, "feed_routes")) {
        FeedRoute route;
        route.feed = str_member(r, "feed");
        route.store = str_member(r, "store");
        route.retained = member(r, "retained").get<bool>();
        const json& target = member(r, "consolidation_target");
        if (!target.is_null()) route.consolidation_target = target.get<std::string>();
        spec.feed_routes.push_back(std::move(route));
    }

    validate(spec);
    return spec;
}

inline ArchitectureSpec parse_architecture(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw SchemaError("malformed JSON");
    return parse_architecture(doc);
}

}  // namespace trustplane
