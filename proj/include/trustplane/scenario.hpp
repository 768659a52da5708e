#pragma once

#include "trustplane/attack.hpp"
#include "trustplane/kernel.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace trustplane {

// An escalation reached the human tier but the script supplies no verdict for
// it; a real deployment would page someone, the simulator halts.
struct EscalationStarvation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Injection {
    std::size_t after_action = 0;  // inject once this many scripted actions have run
    std::string chain_id;

    json to_json() const { return {{"after", after_action}, {"chain", chain_id}}; }
    static Injection from_json(const json& doc) {
        return {doc.at("after").get<std::size_t>(), doc.at("chain").get<std::string>()};
    }
};

struct ScenarioScript {
    std::uint64_t seed = 0;
    std::vector<AttackStep> actions;  // same action vocabulary as attack chains
    std::vector<Injection> injections;
    std::vector<bool> human_verdicts;  // consumed in escalation order

    json to_json() const {
        json actions_json = json::array();
        for (const auto& a : actions) actions_json.push_back(a.to_json());
        json inj = json::array();
        for (const auto& i : injections) inj.push_back(i.to_json());
        return {{"seed", seed},
                {"actions", actions_json},
                {"injections", inj},
                {"human_verdicts", human_verdicts}};
    }
    static ScenarioScript from_json(const json& doc) {
        ScenarioScript s;
        s.seed = doc.value("seed", std::uint64_t{0});
        if (!doc.contains("actions") || !doc.at("actions").is_array()) {
            throw SchemaError("scenario requires an actions array");
        }
        for (const auto& a : doc.at("actions")) s.actions.push_back(AttackStep::from_json(a));
        for (const auto& i : doc.value("injections", json::array())) {
            s.injections.push_back(Injection::from_json(i));
        }
        for (const auto& v : doc.value("human_verdicts", json::array())) {
            s.human_verdicts.push_back(v.get<bool>());
        }
        return s;
    }
};

// One full incident-handling cycle: every phase runs its tools, reads its
// inputs, records its outputs, and hands off to the next phase. All sixteen
// tools and the consolidation loop back to Monitor are exercised.
inline ScenarioScript builtin_lifecycle_scenario() {
    using A = StepAction;
    ScenarioScript s;
    s.actions = {
        // External intel arrives before the cycle starts.
        {"external", A::FeedPublish, "E1", "vendor advisory lands in CTI",
         {{"key", "adv-1"},
          {"value", {{"indicator", "evil.example"}, {"source", "vendor"},
                     {"confidence", "high"}}}}},
        // Monitor
        {"A1", A::ToolInvoke, "T1", "triage score", {{"operation", "score_entity"}, {"params", {{"entity", "host-7"}}}}},
        {"A1", A::ToolInvoke, "T2", "query correlated events", {{"operation", "query_events"}, {"params", {{"query", "beacon"}}}}},
        {"A1", A::ToolInvoke, "T3", "pull host telemetry", {{"operation", "pull_telemetry"}, {"params", {{"host", "host-7"}}}}},
        {"A1", A::MemoryRead, "M7", "consult threat intel", {{"key", "adv-1"}}},
        {"A1", A::MemoryWrite, "M4", "record the triggering event",
         {{"key", "evt-7"}, {"value", {{"event", "beacon to evil.example"}, {"source", "ids"}, {"severity", "high"}}}, {"incident", "incident-7"}}},
        {"A1", A::MemoryWrite, "M1", "open an alert citing the event",
         {{"key", "alert-7"},
          {"value", {{"title", "beaconing from host-7"}, {"rca", ""}, {"severity", "high"},
                     {"evidence_refs", json::array({"M4:evt-7"})}}},
          {"incident", "incident-7"}}},
        {"A1", A::ToolInvoke, "T4", "open a ticket", {{"operation", "create_ticket"}, {"params", {{"title", "beaconing host-7"}, {"severity", "high"}}}}},
        {"A1", A::Handoff, "Analyze", "hand the case to analysis", {}},

        // Analyze
        {"A2", A::MemoryRead, "M1", "pick up the alert", {{"key", "alert-7"}}},
        {"A2", A::ToolInvoke, "T5", "detonate the sample", {{"operation", "detonate"}, {"params", {{"sample", "dropper.bin"}}}}},
        {"A2", A::ToolInvoke, "T6", "hunt for related activity", {{"operation", "search"}, {"params", {{"query", "evil.example"}}}}},
        {"A2", A::ToolInvoke, "T7", "static analysis", {{"operation", "analyze"}, {"params", {{"path", "/samples/dropper.bin"}}}}},
        {"A2", A::MemoryWrite, "M6", "open the case record",
         {{"key", "case-7"}, {"value", {{"summary", "confirmed beaconing, dropper recovered"}, {"status", "open"}, {"assignee", "A2"}}}, {"incident", "incident-7"}}},
        {"A2", A::MemoryWrite, "M1", "write the RCA with evidence",
         {{"key", "rca-7"},
          {"value", {{"title", "host-7 compromise"}, {"rca", "phishing dropper, C2 beacon"},
                     {"severity", "high"}, {"evidence_refs", json::array({"M6:case-7"})}}},
          {"incident", "incident-7"}}},
        {"A2", A::Handoff, "Admin", "escalate to response", {}},

        // Admin
        {"A3", A::MemoryRead, "M3", "check containment policy", {{"key", "policy-containment"}}},
        {"A3", A::MemoryRead, "M12", "check business impact", {{"key", "risk-host-7"}}},
        {"A3", A::MemoryRead, "M8", "select the playbook", {{"key", "pb-containment"}}},
        {"A3", A::ToolInvoke, "T11", "quarantine the host", {{"operation", "quarantine_host"}, {"params", {{"host", "host-7"}}}}},
        {"A3", A::ToolInvoke, "T8", "revoke stolen credentials", {{"operation", "revoke_credentials"}, {"params", {{"account", "user-7"}}}}},
        {"A3", A::ToolInvoke, "T9", "block the C2 domain", {{"operation", "update_rules"}, {"params", {{"rule", "block evil.example"}, {"action", "add"}}}}},
        {"A3", A::ToolInvoke, "T10", "deploy the config change", {{"operation", "deploy_change"}, {"params", {{"change", "egress-filter-v2"}}}}},
        {"A3", A::ToolInvoke, "T12", "run the containment playbook", {{"operation", "run_playbook"}, {"params", {{"playbook", "pb-containment"}}}}},
        {"A3", A::MemoryWrite, "M2", "update asset state",
         {{"key", "host-7"}, {"value", {{"hostname", "host-7"}, {"criticality", "high"}, {"owner", "it-ops"}}}, {"incident", "incident-7"}}},
        {"A3", A::Handoff, "Report", "containment done, document it", {}},

        // Report
        {"A4", A::MemoryRead, "M8", "reference the playbook used", {{"key", "pb-containment"}}},
        {"A4", A::MemoryWrite, "M11", "archive the after-action report",
         {{"key", "aar-7"},
          {"value", {{"summary", "incident-7 contained"}, {"timeline", "t0 alert, t4 quarantine"},
                     {"raw_forensics", "pcap and image refs"},
                     {"indicators", json::array({"evil.example"})}}},
          {"incident", "incident-7"}}},
        {"A4", A::MemoryWrite, "M9", "map to compliance controls",
         {{"key", "ctrl-ir-1"}, {"value", {{"control", "IR-4"}, {"framework", "800-53"}}}, {"incident", "incident-7"}}},
        {"A4", A::MemoryWrite, "M10", "publish the improved detection rule",
         {{"key", "rule-beacon-1"}, {"value", {{"rule", "dns beacon entropy"}, {"enabled", true}}}, {"incident", "incident-7"}}},
        {"A4", A::ToolInvoke, "T13", "publish the report", {{"operation", "publish_report"}, {"params", {{"report", "aar-7"}}}}},
        {"A4", A::ToolInvoke, "T14", "share indicators", {{"operation", "publish_indicators"}, {"params", {{"indicators", json::array({"evil.example"})}, {"tlp", "amber"}}}}},
        {"A4", A::ToolInvoke, "T15", "test the new rule", {{"operation", "run_tests"}, {"params", {{"suite", "detections"}}}}},
        {"A4", A::ToolInvoke, "T16", "map residual gaps", {{"operation", "map_controls"}, {"params", {{"framework", "800-53"}}}}},
        {"A4", A::Handoff, "Monitor", "loop improvements back", {}},

        // Improvement loop lands back in Monitor.
        {"A1", A::MemoryRead, "M10", "adopt the new detection rule", {{"key", "rule-beacon-1"}}},
    };
    return s;
}

struct SimCounts {
    std::size_t actions = 0;
    std::size_t executed = 0;
    std::size_t constrained = 0;
    std::size_t denied = 0;
    std::size_t escalations = 0;
    std::size_t writes_accepted = 0;
    std::size_t writes_rejected = 0;
    std::map<std::string, std::size_t> write_reject_reasons;

    json to_json() const {
        return {{"actions", actions},
                {"executed", executed},
                {"constrained", constrained},
                {"denied", denied},
                {"escalations", escalations},
                {"writes_accepted", writes_accepted},
                {"writes_rejected", writes_rejected},
                {"write_reject_reasons", write_reject_reasons}};
    }
};

struct SimReport {
    std::uint64_t seed = 0;
    json timeline = json::array();
    SimCounts counts;
    std::vector<InterceptResult> injected;
    bool audit_intact = false;
    std::size_t audit_records = 0;
    std::string audit_head;
    std::string audit_lines;  // JSON-lines audit log; hashed content, also deterministic

    json to_json() const {
        json inj = json::array();
        for (const auto& r : injected) inj.push_back(r.to_json());
        return {{"seed", seed},
                {"timeline", timeline},
                {"counts", counts.to_json()},
                {"injected", inj},
                {"audit_intact", audit_intact},
                {"audit_records", audit_records},
                {"audit_head", audit_head}};
    }
};

namespace detail {

// Organizational baseline the lifecycle depends on: policies, playbooks,
// risk entries. In a real deployment these predate the agents.
inline void seed_scenario_memory(MemoryPlane& memory) {
    memory.seed("M3", "policy-containment",
                {{"policy", "quarantine first, notify within 1h"}, {"scope", "endpoints"}},
                {"A3", "Admin", "", {}});
    memory.seed("M8", "pb-containment",
                {{"playbook", "containment"},
                 {"steps", json::array({"quarantine", "revoke", "block"})}},
                {"A3", "Admin", "", {}});
    memory.seed("M12", "risk-host-7",
                {{"asset", "host-7"}, {"impact", "payroll processing"}, {"plan", "failover-b"}},
                {"A3", "Admin", "", {}});
}

inline void tally(SimCounts& counts, const std::string& outcome, const json& detail) {
    ++counts.actions;
    if (outcome == "Executed") {
        ++counts.executed;
    } else if (outcome == "Constrained") {
        ++counts.constrained;
    } else if (outcome == "ConsensusEscalated") {
        ++counts.escalations;
    } else {
        ++counts.denied;
    }
    if (outcome == "WriteRejected") {
        ++counts.writes_rejected;
        if (detail.contains("reason")) {
            ++counts.write_reject_reasons[detail.at("reason").get<std::string>()];
        }
    }
}

}  // namespace detail

// Deterministic: two runs with the same script produce byte-identical report
// JSON. The seed only perturbs adversarial payload keys in injected chains.
inline SimReport run_scenario(const ArchitectureSpec& spec, const ScenarioScript& script,
                              KernelConfig config = {},
                              const SignatureScheme& scheme = default_scheme()) {
    IdentityDirectory ids = IdentityDirectory::for_spec(spec, scheme);
    Kernel kernel = Kernel::bootstrapped(spec, config, ids);
    detail::seed_scenario_memory(kernel.memory());

    SimReport report;
    report.seed = script.seed;
    std::mt19937_64 rng(script.seed);
    std::size_t verdict_cursor = 0;
    std::map<std::string, std::string> sessions;

    auto handle_escalations = [&]() {
        while (kernel.pending_escalations() > 0) {
            const Escalation* next = nullptr;
            for (const auto& e : kernel.escalations()) {
                if (!e.resolved) {
                    next = &e;
                    break;
                }
            }
            if (verdict_cursor >= script.human_verdicts.size()) {
                throw EscalationStarvation("escalation " + std::to_string(next->id) +
                                           " has no scripted human verdict");
            }
            const bool approve = script.human_verdicts[verdict_cursor++];
            Decision d = kernel.resolve_escalation(next->id, approve);
            report.timeline.push_back({{"kind", "escalation"},
                                       {"id", next->id},
                                       {"approved", approve},
                                       {"outcome", to_string(d.outcome)}});
        }
    };

    auto run_one = [&](const AttackStep& step, const std::string& kind) {
        StepResult sr = detail::run_step(kernel, sessions, step);
        detail::tally(report.counts, sr.outcome, json::object());
        report.timeline.push_back({{"kind", kind},
                                   {"actor", step.actor},
                                   {"action", to_string(step.action)},
                                   {"target", step.target},
                                   {"description", step.description},
                                   {"verdict", to_string(sr.verdict)},
                                   {"outcome", sr.outcome}});
        handle_escalations();
        return sr;
    };

    std::size_t action_index = 0;
    auto run_injections_at = [&](std::size_t position) {
        for (const auto& inj : script.injections) {
            if (inj.after_action != position) continue;
            auto chain = builtin_attack_chain(inj.chain_id);
            if (!chain) throw SchemaError("unknown injected chain: " + inj.chain_id);
            // Perturb adversarial write/publish keys so distinct seeds leave
            // distinct traces without changing any verdict.
            std::ostringstream tok;
            tok << std::hex << rng();
            for (auto& step : chain->steps) {
                if (step.payload.is_object() && step.payload.contains("key")) {
                    step.payload["key"] = step.payload.at("key").get<std::string>() + "-" + tok.str();
                }
            }
            InterceptResult ir;
            ir.chain_id = chain->id;
            ir.residual_risk = chain->residual_risk;
            bool blocked = false;
            for (const auto& step : chain->steps) {
                if (blocked) {
                    ir.steps.push_back(
                        {StepVerdict::NotReached, {}, "", "chain already intercepted"});
                    continue;
                }
                StepResult sr = run_one(step, "injected:" + chain->id);
                if (sr.verdict != StepVerdict::Allowed) {
                    if (ir.intercept_index == 0) ir.intercept_index = ir.steps.size() + 1;
                    ir.principles.insert(sr.principles.begin(), sr.principles.end());
                }
                if (sr.verdict == StepVerdict::Blocked) blocked = true;
                ir.steps.push_back(std::move(sr));
            }
            ir.outcome = blocked                  ? ChainOutcome::Intercepted
                         : ir.intercept_index != 0 ? ChainOutcome::Constrained
                                                   : ChainOutcome::Completed;
            report.injected.push_back(std::move(ir));
        }
    };

    run_injections_at(0);
    for (const auto& action : script.actions) {
        run_one(action, "scripted");
        ++action_index;
        run_injections_at(action_index);
    }

    // Recount write rejections from the audit trail, which carries the reason.
    report.counts.writes_rejected = 0;
    report.counts.write_reject_reasons.clear();
    for (const auto& rec : kernel.audit().records()) {
        if (rec.payload.value("outcome", "") != std::string("WriteRejected")) continue;
        ++report.counts.writes_rejected;
        ++report.counts.write_reject_reasons[rec.payload.value("reason", "unknown")];
    }
    report.counts.writes_accepted = 0;
    for (const auto& rec : kernel.audit().records()) {
        if (rec.payload.value("method", "") == std::string("memory/write") &&
            rec.payload.value("outcome", "") == std::string("Executed")) {
            ++report.counts.writes_accepted;
        }
    }
    const ChainCheck check = verify_audit_chain(kernel.audit().records());
    report.audit_intact = check.intact;
    report.audit_records = kernel.audit().records().size();
    report.audit_lines = kernel.audit().to_lines();
    if (!kernel.audit().records().empty()) {
        report.audit_head = kernel.audit().records().back().hash;
    }
    return report;
}

}  // namespace trustplane
