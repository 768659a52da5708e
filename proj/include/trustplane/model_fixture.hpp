#pragma once

#include "trustplane/model.hpp"

namespace trustplane {

// The reference four-phase SOC deployment: 4 agents, 16 tools partitioned
// 4/3/5/4, 12 memory stores with four grants per phase, the sequential
// handoff ring, and 12 external feeds of which 4 routes are retained.
inline ArchitectureSpec builtin_paper_architecture() {
    ArchitectureSpec spec;

    spec.agents = {
        {"A1", "Monitor", "Monitor"},
        {"A2", "Analyze", "Analyze"},
        {"A3", "Admin", "Admin"},
        {"A4", "Report", "Report"},
    };

    auto tool = [](std::string id, std::string name, std::string op, ActionClass cls,
                   std::vector<std::string> params) {
        ToolDecl t{std::move(id), std::move(name), {}};
        t.operations[std::move(op)] = OperationDecl{cls, std::move(params)};
        return t;
    };
    const auto rev = ActionClass::Reversible;
    const auto irrev = ActionClass::Irreversible;
    spec.tools = {
        tool("T1", "UEBA Model", "score_entity", rev, {"entity"}),
        tool("T2", "IDS/IPS/CMDB", "query_events", rev, {"query"}),
        tool("T3", "EDR/NDR Sensor", "pull_telemetry", rev, {"host"}),
        tool("T4", "ITSM/Ticketing", "create_ticket", rev, {"title", "severity"}),
        tool("T5", "Sandbox", "detonate", rev, {"sample"}),
        tool("T6", "SIEM Search", "search", rev, {"query"}),
        tool("T7", "Code Analyzer", "analyze", rev, {"path"}),
        tool("T8", "IAM/PAM", "revoke_credentials", irrev, {"account"}),
        tool("T9", "Firewall/APM", "update_rules", irrev, {"rule", "action"}),
        tool("T10", "Configuration Manager", "deploy_change", irrev, {"change"}),
        tool("T11", "EPP/AV", "quarantine_host", irrev, {"host"}),
        tool("T12", "ANSIBLE", "run_playbook", irrev, {"playbook"}),
        tool("T13", "Reporting Dashboard", "publish_report", rev, {"report"}),
        tool("T14", "ISAC/MISP", "publish_indicators", rev, {"indicators", "tlp"}),
        tool("T15", "Editor & Test Suite", "run_tests", rev, {"suite"}),
        tool("T16", "GRC Mapper", "map_controls", rev, {"framework"}),
    };

    auto store = [](std::string id, std::string name,
                    std::vector<std::pair<std::string, std::string>> fields,
                    std::vector<std::string> raw_forensic = {}) {
        StoreDecl s{std::move(id), std::move(name), {}};
        for (auto& [field, kind] : fields) s.schema[field] = StoreField{kind, Sensitivity::Normal};
        for (const auto& field : raw_forensic) s.schema[field].sensitivity = Sensitivity::RawForensic;
        return s;
    };
    spec.memory_stores = {
        store("M1", "Threat Repository",
              {{"title", "string"}, {"rca", "string"}, {"severity", "string"}, {"evidence_refs", "list"}}),
        store("M2", "Asset Inventory",
              {{"hostname", "string"}, {"criticality", "string"}, {"owner", "string"}}),
        store("M3", "Policy Store", {{"policy", "string"}, {"scope", "string"}}),
        store("M4", "SIEM Data Lake",
              {{"event", "string"}, {"source", "string"}, {"severity", "string"}}),
        store("M5", "Code Repository", {{"path", "string"}, {"content", "string"}}),
        store("M6", "Case Management",
              {{"summary", "string"}, {"status", "string"}, {"assignee", "string"}}),
        store("M7", "CTI Knowledge Base",
              {{"indicator", "string"}, {"source", "string"}, {"confidence", "string"}}),
        store("M8", "Playbook Repository", {{"playbook", "string"}, {"steps", "list"}}),
        store("M9", "Compliance Mappings", {{"control", "string"}, {"framework", "string"}}),
        store("M10", "Detection Rules", {{"rule", "string"}, {"enabled", "bool"}}),
        store("M11", "AAR Archive",
              {{"summary", "string"}, {"timeline", "string"}, {"raw_forensics", "string"},
               {"indicators", "list"}},
              {"raw_forensics"}),
        store("M12", "BCP/Risk Registry",
              {{"asset", "string"}, {"impact", "string"}, {"plan", "string"}}),
    };

    spec.feeds = {
        {"E1", "Vendor Advisories"},   {"E2", "ISAC Feeds"},
        {"E3", "MISP Community"},      {"E4", "CVE/NVD"},
        {"E5", "OSINT Sources"},       {"E6", "Regulatory Updates"},
        {"E7", "Threat Intel Subs."},  {"E8", "Vulnerability Scanners"},
        {"E9", "Partner SOC Feeds"},   {"E10", "Industry Benchmarks"},
        {"E11", "Patch Bulletins"},    {"E12", "Compliance Updates"},
    };

    spec.tool_assignments = {
        {"Monitor", {"T1", "T2", "T3", "T4"}},
        {"Analyze", {"T5", "T6", "T7"}},
        {"Admin", {"T8", "T9", "T10", "T11", "T12"}},
        {"Report", {"T13", "T14", "T15", "T16"}},
    };

    const auto R = AccessMode::Read;
    const auto RW = AccessMode::ReadWrite;
    spec.memory_grants = {
        {"Monitor", {{"M1", RW}, {"M4", RW}, {"M7", R}, {"M10", R}}},
        {"Analyze", {{"M1", RW}, {"M2", R}, {"M6", RW}, {"M7", R}}},
        {"Admin", {{"M2", RW}, {"M3", R}, {"M8", R}, {"M12", R}}},
        {"Report", {{"M8", RW}, {"M9", RW}, {"M10", RW}, {"M11", RW}}},
    };

    spec.handoffs = {
        {"Monitor", "Analyze"},
        {"Analyze", "Admin"},
        {"Admin", "Report"},
        {"Report", "Monitor"},
    };

    auto route = [](std::string feed, std::string to, bool retained,
                    std::optional<std::string> target = std::nullopt) {
        return FeedRoute{std::move(feed), std::move(to), retained, std::move(target)};
    };
    spec.feed_routes = {
        route("E1", "M7", true),
        route("E2", "M7", false, "E1"),
        route("E3", "M1", true),
        route("E4", "M1", false, "E3"),
        route("E5", "M7", false, "E1"),
        route("E6", "M9", true),
        route("E7", "M1", false, "E3"),
        route("E8", "M4", false),  // ingested via Monitor tooling, no feed-route survivor
        route("E9", "M7", false, "E1"),
        route("E10", "M9", false, "E6"),
        route("E11", "M10", true),
        route("E12", "M9", false, "E6"),
    };

    validate(spec);
    return spec;
}

}  // namespace trustplane
