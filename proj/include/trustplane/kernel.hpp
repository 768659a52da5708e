#pragma once

#include "trustplane/audit.hpp"
#include "trustplane/boundary.hpp"
#include "trustplane/canonical.hpp"
#include "trustplane/consensus.hpp"
#include "trustplane/crypto.hpp"
#include "trustplane/manifest.hpp"
#include "trustplane/memory_plane.hpp"
#include "trustplane/model.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace trustplane {

struct KernelConfig {
    bool enforce_signatures = true;    // P1
    bool enforce_capabilities = true;  // P2
    bool consensus_enabled = true;     // P3
    bool memory_enforcement = true;    // P4 + P5
    std::size_t validator_count = 3;
    std::size_t approvals_reversible = 2;  // irreversible actions need all validators
    std::uint64_t rate_limit = 64;
    std::uint64_t rate_window = 32;

    static KernelConfig flat() {
        KernelConfig c;
        c.enforce_signatures = false;
        c.enforce_capabilities = false;
        c.consensus_enabled = false;
        c.memory_enforcement = false;
        return c;
    }
};

// Every mediated request resolves to one of these outcomes; the principle set
// names which controls produced the decision.
enum class Outcome {
    Executed,
    Constrained,
    SignatureInvalid,
    CapabilityDenied,
    ConsensusEscalated,
    ConsensusRejected,
    AccessDenied,
    WriteRejected,
    RouteEliminated,
    ResponseRejected,
    HandoffDenied,
    Error,
};

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Executed: return "Executed";
        case Outcome::Constrained: return "Constrained";
        case Outcome::SignatureInvalid: return "SignatureInvalid";
        case Outcome::CapabilityDenied: return "CapabilityDenied";
        case Outcome::ConsensusEscalated: return "ConsensusEscalated";
        case Outcome::ConsensusRejected: return "ConsensusRejected";
        case Outcome::AccessDenied: return "AccessDenied";
        case Outcome::WriteRejected: return "WriteRejected";
        case Outcome::RouteEliminated: return "RouteEliminated";
        case Outcome::ResponseRejected: return "ResponseRejected";
        case Outcome::HandoffDenied: return "HandoffDenied";
        case Outcome::Error: return "Error";
    }
    return "?";
}

struct Decision {
    Outcome outcome = Outcome::Error;
    std::set<Principle> principles;
    json detail;  // outcome-specific payload (result, reason, stripped fields)

    bool allowed() const {
        return outcome == Outcome::Executed || outcome == Outcome::Constrained;
    }
    json to_json() const {
        json labels = json::array();
        for (Principle p : principles) labels.push_back(to_string(p));
        return {{"outcome", to_string(outcome)}, {"principles", labels}, {"detail", detail}};
    }
};

enum class RegisterStatus { Registered, UnknownIssuer, SignatureInvalid, StaleVersion, PhaseConflict };

struct RegisterResult {
    RegisterStatus status = RegisterStatus::SignatureInvalid;
    bool ok() const { return status == RegisterStatus::Registered; }
};

struct Escalation {
    std::uint64_t id = 0;
    ActionProposal proposal;
    ConsensusVerdict verdict;
    bool resolved = false;
    bool approved = false;
};

// Deterministic identity material for the builtin architecture: agents,
// per-phase tool servers, and a single manifest issuer. Key seeds are fixed
// strings so scenario runs are reproducible byte for byte.
struct IdentityDirectory {
    const SignatureScheme* scheme = &default_scheme();
    std::map<std::string, KeyPair> agent_keys;   // agent id -> pair
    std::map<std::string, KeyPair> server_keys;  // phase -> pair
    KeyPair issuer;

    static IdentityDirectory for_spec(const ArchitectureSpec& spec,
                                      const SignatureScheme& scheme = default_scheme()) {
        IdentityDirectory dir;
        dir.scheme = &scheme;
        dir.issuer = scheme.generate("trustplane:issuer:root");
        for (const auto& agent : spec.agents) {
            dir.agent_keys[agent.id] = scheme.generate("trustplane:agent:" + agent.id);
        }
        for (const auto& phase : spec.declared_phases()) {
            dir.server_keys[phase] = scheme.generate("trustplane:server:" + phase);
        }
        return dir;
    }

    // Base64 detached signature over the canonical envelope body, for building
    // well-formed wire envelopes in tests and the scenario driver.
    std::string sign_envelope(const std::string& agent_id, const json& body) const {
        return to_base64(scheme->sign(canonicalize(body), agent_keys.at(agent_id).secret_key));
    }
};

class Kernel {
public:
    Kernel(ArchitectureSpec spec, KernelConfig config = {},
           const SignatureScheme& scheme = default_scheme())
        : spec_(std::move(spec)),
          config_(config),
          scheme_(&scheme),
          memory_(spec_, MemoryPlaneConfig{config.memory_enforcement, {"Report"},
                                           config.rate_limit, config.rate_window}) {
        if (!spec_.agents.empty()) current_phase_ = spec_.agents.front().phase;
    }

    const ArchitectureSpec& spec() const { return spec_; }
    const KernelConfig& config() const { return config_; }
    MemoryPlane& memory() { return memory_; }
    const MemoryPlane& memory() const { return memory_; }
    AuditLog& audit() { return audit_; }
    const AuditLog& audit() const { return audit_; }
    const std::string& current_phase() const { return current_phase_; }
    std::uint64_t tick() const { return tick_; }

    // --- identity enrollment -------------------------------------------------

    void enroll_issuer(const std::string& key_id, Bytes public_key) {
        issuers_[key_id] = std::move(public_key);
    }
    void enroll_agent_key(const std::string& agent_id, Bytes public_key) {
        agent_pubs_[agent_id] = std::move(public_key);
    }
    void enroll_server_key(const std::string& phase, Bytes public_key) {
        server_pubs_[phase] = std::move(public_key);
    }

    RegisterResult register_server(const SignedManifest& manifest) {
        auto issuer = issuers_.find(manifest.body.issuer_key_id);
        if (issuer == issuers_.end()) return {RegisterStatus::UnknownIssuer};
        if (verify_manifest(manifest, issuer->second, *scheme_) != VerifyResult::Verified) {
            record_audit("manifest/register", "", manifest.body.server_id,
                         {Outcome::SignatureInvalid, {Principle::P1}, {}});
            return {RegisterStatus::SignatureInvalid};
        }
        auto existing = manifests_.find(manifest.body.server_id);
        if (existing != manifests_.end() &&
            manifest.body.version <= existing->second.version) {
            return {RegisterStatus::StaleVersion};
        }
        for (const auto& [sid, body] : manifests_) {
            if (sid != manifest.body.server_id && body.phase == manifest.body.phase) {
                return {RegisterStatus::PhaseConflict};
            }
        }
        manifests_[manifest.body.server_id] = manifest.body;
        record_audit("manifest/register", "", manifest.body.server_id,
                     {Outcome::Executed, {Principle::P1}, {{"phase", manifest.body.phase}}});
        return {RegisterStatus::Registered};
    }

    // Convenience bootstrap: enroll builtin identities and register one signed
    // manifest per phase.
    static Kernel bootstrapped(const ArchitectureSpec& spec, KernelConfig config,
                               const IdentityDirectory& ids) {
        Kernel kernel(spec, config, *ids.scheme);
        kernel.enroll_issuer("issuer-root", ids.issuer.public_key);
        for (const auto& [agent, pair] : ids.agent_keys) {
            kernel.enroll_agent_key(agent, pair.public_key);
        }
        for (const auto& [phase, pair] : ids.server_keys) {
            kernel.enroll_server_key(phase, pair.public_key);
            ManifestBody body =
                manifest_for_phase(spec, phase, "srv-" + phase, "issuer-root", 1);
            kernel.register_server(sign_manifest(body, ids.issuer.secret_key, *ids.scheme));
        }
        return kernel;
    }

    // --- sessions ------------------------------------------------------------

    std::string open_session(const std::string& agent_id) {
        const AgentDecl* agent = spec_.find_agent(agent_id);
        if (!agent) throw ReferenceError("unknown agent: " + agent_id);
        const std::string id = "s" + std::to_string(++session_seq_);
        sessions_[id] = agent_id;
        return id;
    }
    void close_session(const std::string& session) { sessions_.erase(session); }

    // --- typed operations (used by the tracer and scenario driver) -----------

    Decision invoke_tool(const std::string& session, const std::string& tool_id,
                         const std::string& operation, json params) {
        ++tick_;
        const AgentDecl* agent = session_agent(session);
        if (!agent) return audited("tools/invoke", session, tool_id, error("unknown session"));
        const ToolDecl* tool = spec_.find_tool(tool_id);
        if (!tool || !tool->operations.count(operation)) {
            return audited("tools/invoke", session, tool_id, error("unknown tool operation"));
        }
        const auto phase = spec_.tool_phase(tool_id);
        const ActionClass klass = tool->operations.at(operation).action_class;
        ToolCall call{tool_id, operation, params};

        if (config_.enforce_capabilities) {
            const ManifestBody* manifest = phase ? manifest_for(*phase) : nullptr;
            const bool in_phase = phase && *phase == agent->phase;
            const bool listed = manifest && manifest_lists(*manifest, tool_id, operation);
            if (!in_phase || !listed) {
                Decision d{Outcome::CapabilityDenied, {Principle::P2},
                           {{"tool", tool_id}, {"agent_phase", agent->phase}}};
                // Consensus validators independently reject out-of-phase
                // proposals; attribute P3 as well, but never queue a denial.
                if (config_.consensus_enabled &&
                    run_consensus(make_proposal(agent->id, call, klass),
                                  make_validators(), consensus_config(klass))
                            .outcome != ConsensusOutcome::Approved) {
                    d.principles.insert(Principle::P3);
                }
                return audited("tools/invoke", session, tool_id, d);
            }
            // Narrow params to the manifest allowlist.
            const auto allow = manifest_params(*manifest, tool_id, operation);
            std::vector<std::string> stripped;
            if (params.is_object()) {
                for (auto it = params.begin(); it != params.end();) {
                    if (!allow.count(it.key())) {
                        stripped.push_back(it.key());
                        it = params.erase(it);
                    } else {
                        ++it;
                    }
                }
            }
            call.params = params;
            if (!stripped.empty()) {
                Decision d = execute(agent->id, call, klass, session);
                if (d.outcome == Outcome::Executed) {
                    d.outcome = Outcome::Constrained;
                    d.principles.insert(Principle::P2);
                    d.detail["stripped_params"] = stripped;
                }
                return audited("tools/invoke", session, tool_id, d);
            }
        }
        return audited("tools/invoke", session, tool_id, execute(agent->id, call, klass, session));
    }

    Decision read_memory(const std::string& session, const std::string& store,
                         const std::string& key) {
        ++tick_;
        const AgentDecl* agent = session_agent(session);
        if (!agent) return audited("memory/read", session, store, error("unknown session"));
        const ReadResult r = memory_.read(agent->phase, store, key);
        Decision d;
        d.principles = r.principles;
        switch (r.status) {
            case ReadStatus::Ok:
                d.outcome = Outcome::Executed;
                d.detail = {{"value", r.value}};
                break;
            case ReadStatus::OkRedacted:
                d.outcome = Outcome::Constrained;
                d.detail = {{"value", r.value}, {"redacted_fields", r.redacted_fields}};
                break;
            case ReadStatus::AccessDenied:
                d.outcome = Outcome::AccessDenied;
                break;
            case ReadStatus::UnknownStore:
            case ReadStatus::UnknownKey:
                d = error(r.status == ReadStatus::UnknownStore ? "unknown store" : "unknown key");
                break;
        }
        return audited("memory/read", session, store + ":" + key, d);
    }

    Decision write_memory(const std::string& session, const std::string& store,
                          const std::string& key, json value,
                          std::vector<std::string> context_refs = {},
                          const std::string& incident = "") {
        ++tick_;
        const AgentDecl* agent = session_agent(session);
        if (!agent) return audited("memory/write", session, store, error("unknown session"));
        Provenance prov{agent->id, agent->phase, incident, std::move(context_refs)};
        const WriteResult w = memory_.write(agent->phase, store, key, std::move(value), prov);
        Decision d;
        d.principles = w.principles;
        switch (w.status) {
            case WriteStatus::Ok:
                d.outcome = Outcome::Executed;
                d.detail = {{"version", w.version}};
                break;
            case WriteStatus::AccessDenied:
                d.outcome = Outcome::AccessDenied;
                break;
            case WriteStatus::WriteRejected:
                d.outcome = Outcome::WriteRejected;
                d.detail = {{"reason", to_string(w.reason)}};
                break;
            case WriteStatus::UnknownStore:
                d = error("unknown store");
                break;
        }
        return audited("memory/write", session, store + ":" + key, d);
    }

    Decision ingest_feed(const std::string& feed, const json& item) {
        ++tick_;
        const IngestResult r = memory_.ingest_feed(feed, item);
        Decision d;
        d.principles = r.principles;
        switch (r.status) {
            case IngestStatus::Accepted:
                d.outcome = Outcome::Executed;
                d.detail = {{"version", r.version}};
                break;
            case IngestStatus::Rejected:
                if (r.reason == IngestReason::RouteEliminated) {
                    d.outcome = Outcome::RouteEliminated;
                    if (r.consolidation_target) {
                        d.detail["consolidation_target"] = *r.consolidation_target;
                    }
                } else {
                    d.outcome = Outcome::WriteRejected;
                    d.detail = {{"reason", "SchemaViolation"}};
                }
                break;
            case IngestStatus::UnknownFeed:
                d = error("unknown feed");
                break;
        }
        return audited("feed/ingest", "", feed, d);
    }

    Decision handoff(const std::string& session, const std::string& to_phase) {
        ++tick_;
        const AgentDecl* agent = session_agent(session);
        if (!agent) return audited("phase/handoff", session, to_phase, error("unknown session"));
        Decision d;
        if (!spec_.has_handoff(agent->phase, to_phase)) {
            d.outcome = Outcome::HandoffDenied;
            d.principles = {Principle::P1, Principle::P3};
        } else {
            current_phase_ = to_phase;
            d.outcome = Outcome::Executed;
            d.principles = {Principle::P1, Principle::P3};
            d.detail = {{"from", agent->phase}, {"to", to_phase}};
        }
        return audited("phase/handoff", session, to_phase, d);
    }

    // Client-side verification of a tool server response. A forged signature
    // is rejected outright (P1); if the forged body also instructs an
    // irreversible action, validators reject the unknown proposer (P3).
    Decision ingest_server_response(const std::string& session, const std::string& tool_id,
                                    const json& body, const std::string& signature) {
        ++tick_;
        const AgentDecl* agent = session_agent(session);
        if (!agent) {
            return audited("response/verify", session, tool_id, error("unknown session"));
        }
        const auto phase = spec_.tool_phase(tool_id);
        Decision d;
        bool verified = !config_.enforce_signatures;
        if (!verified && phase && server_pubs_.count(*phase)) {
            try {
                verified = scheme_->verify(canonicalize(body), from_base64(signature),
                                           server_pubs_.at(*phase));
            } catch (const std::exception&) {
                verified = false;
            }
        }
        if (verified) {
            d.outcome = Outcome::Executed;
            d.detail = {{"verified", config_.enforce_signatures}};
            return audited("response/verify", session, tool_id, d);
        }
        d.outcome = Outcome::ResponseRejected;
        d.principles = {Principle::P1};
        if (config_.consensus_enabled && body.is_object() && body.contains("instruct")) {
            const json& instr = body.at("instruct");
            ToolCall call{instr.value("tool", tool_id), instr.value("operation", ""),
                          instr.value("params", json::object())};
            ActionProposal p = make_proposal("srv-" + (phase ? *phase : std::string("?")), call,
                                             ActionClass::Irreversible);
            if (run_consensus(p, make_validators(),
                              consensus_config(ActionClass::Irreversible))
                        .outcome != ConsensusOutcome::Approved) {
                d.principles.insert(Principle::P3);
            }
        }
        return audited("response/verify", session, tool_id, d);
    }

    json list_tools(const std::string& session) const {
        const AgentDecl* agent = session_agent(session);
        json out = json::array();
        if (!agent) return out;
        if (const ManifestBody* m = manifest_for(agent->phase)) {
            for (const auto& tool : m->tools) {
                json ops = json::array();
                for (const auto& op : tool.operations) {
                    ops.push_back({{"name", op.name}, {"params", op.param_fields}});
                }
                out.push_back({{"id", tool.id}, {"operations", ops}});
            }
        }
        return out;
    }

    // --- escalations -----------------------------------------------------------

    const std::deque<Escalation>& escalations() const { return escalations_; }
    std::size_t pending_escalations() const {
        std::size_t n = 0;
        for (const auto& e : escalations_) n += e.resolved ? 0 : 1;
        return n;
    }

    Decision resolve_escalation(std::uint64_t id, bool approve) {
        for (auto& e : escalations_) {
            if (e.id != id || e.resolved) continue;
            e.resolved = true;
            e.approved = approve;
            Decision d;
            if (approve) {
                d.outcome = Outcome::Executed;
                d.principles = {Principle::P3};
                d.detail = run_stub(e.proposal.call);
                executed_.push_back(e.proposal.call);
            } else {
                d.outcome = Outcome::ConsensusRejected;
                d.principles = {Principle::P3};
            }
            return audited("escalation/resolve", "", e.proposal.call.tool, d);
        }
        return error("unknown escalation");
    }

    const std::vector<ToolCall>& executed_actions() const { return executed_; }

    // --- JSON envelope transport ----------------------------------------------

    // Envelope wire shape: {id, session, origin, method, params, sig}. The
    // signature covers the canonical form of the envelope minus "sig", keyed
    // by the origin agent. Malformed input yields an error response, never an
    // exception.
    json dispatch(const json& envelope) {
        json reply{{"id", envelope.is_object() ? envelope.value("id", json()) : json()}};
        Decision d;
        const std::size_t audited_before = audit_.size();
        try {
            d = dispatch_decision(envelope);
        } catch (const std::exception& e) {
            d = error(std::string("internal: ") + e.what());
        }
        // Every dispatched envelope leaves exactly one audit record; paths
        // that did not audit internally (errors, session/list bookkeeping)
        // are recorded here.
        if (audit_.size() == audited_before) {
            const std::string method = envelope.is_object() && envelope.contains("method") &&
                                               envelope.at("method").is_string()
                                           ? envelope.at("method").get<std::string>()
                                           : "?";
            std::string session;
            if (envelope.is_object() && envelope.contains("session") &&
                envelope.at("session").is_string()) {
                session = envelope.at("session").get<std::string>();
            }
            record_audit(method, session, "", d);
        }
        reply["decision"] = d.to_json();
        reply["status"] = d.allowed() ? "ok" : "denied";
        return reply;
    }

    static json envelope_body(const json& envelope) {
        json body = envelope;
        body.erase("sig");
        return body;
    }

private:
    Decision dispatch_decision(const json& env) {
        if (!env.is_object() || !env.contains("method") || !env.at("method").is_string()) {
            return error("malformed envelope");
        }
        const std::string method = env.at("method").get<std::string>();
        const std::string session = env.value("session", "");
        const std::string origin = env.value("origin", "");
        const json params = env.value("params", json::object());
        if (!params.is_object()) return error("params must be an object");

        if (method == "session/open") {
            if (!params.contains("agent") || !params.at("agent").is_string() ||
                !spec_.find_agent(params.at("agent").get<std::string>())) {
                return error("unknown agent");
            }
            Decision d{Outcome::Executed, {},
                       {{"session", open_session(params.at("agent").get<std::string>())}}};
            return audited("session/open", "", params.at("agent").get<std::string>(), d);
        }
        if (method == "feed/ingest") {
            if (!params.contains("feed") || !params.at("feed").is_string()) {
                return error("missing feed");
            }
            return ingest_feed(params.at("feed").get<std::string>(),
                               params.value("item", json::object()));
        }

        // Everything below is agent-originated and signature-checked.
        const AgentDecl* agent = session_agent(session);
        if (!agent) return error("unknown session");
        if (origin != agent->id) {
            ++tick_;
            return audited(method, session, origin,
                           {Outcome::SignatureInvalid, {Principle::P1},
                            {{"reason", "origin does not match session"}}});
        }
        if (config_.enforce_signatures) {
            const std::string sig = env.is_object() && env.contains("sig") &&
                                            env.at("sig").is_string()
                                        ? env.at("sig").get<std::string>()
                                        : "";
            auto pub = agent_pubs_.find(agent->id);
            bool ok = false;
            if (pub != agent_pubs_.end() && !sig.empty()) {
                try {
                    ok = scheme_->verify(canonicalize(envelope_body(env)), from_base64(sig),
                                         pub->second);
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok) {
                ++tick_;
                return audited(method, session, agent->id,
                               {Outcome::SignatureInvalid, {Principle::P1}, {}});
            }
        }

        if (method == "session/close") {
            close_session(session);
            return {Outcome::Executed, {}, {}};
        }
        if (method == "tools/list") return {Outcome::Executed, {}, {{"tools", list_tools(session)}}};
        if (method == "tools/invoke") {
            if (!params.contains("tool") || !params.at("tool").is_string() ||
                !params.contains("operation") || !params.at("operation").is_string()) {
                return error("missing tool/operation");
            }
            return invoke_tool(session, params.at("tool").get<std::string>(),
                               params.at("operation").get<std::string>(),
                               params.value("arguments", json::object()));
        }
        if (method == "memory/read") {
            if (!params.contains("store") || !params.at("store").is_string() ||
                !params.contains("key") || !params.at("key").is_string()) {
                return error("missing store/key");
            }
            return read_memory(session, params.at("store").get<std::string>(),
                               params.at("key").get<std::string>());
        }
        if (method == "memory/write") {
            if (!params.contains("store") || !params.at("store").is_string() ||
                !params.contains("key") || !params.at("key").is_string()) {
                return error("missing store/key");
            }
            std::vector<std::string> refs;
            if (params.contains("context_refs") && params.at("context_refs").is_array()) {
                for (const auto& r : params.at("context_refs")) {
                    if (r.is_string()) refs.push_back(r.get<std::string>());
                }
            }
            return write_memory(session, params.at("store").get<std::string>(),
                                params.at("key").get<std::string>(),
                                params.value("value", json::object()), std::move(refs),
                                params.value("incident", ""));
        }
        if (method == "phase/handoff") {
            if (!params.contains("to") || !params.at("to").is_string()) {
                return error("missing to");
            }
            return handoff(session, params.at("to").get<std::string>());
        }
        return error("unknown method: " + method);
    }

    const AgentDecl* session_agent(const std::string& session) const {
        auto it = sessions_.find(session);
        return it == sessions_.end() ? nullptr : spec_.find_agent(it->second);
    }

    const ManifestBody* manifest_for(const std::string& phase) const {
        for (const auto& [sid, body] : manifests_) {
            (void)sid;
            if (body.phase == phase) return &body;
        }
        return nullptr;
    }

    static bool manifest_lists(const ManifestBody& m, const std::string& tool,
                               const std::string& operation) {
        for (const auto& t : m.tools) {
            if (t.id != tool) continue;
            for (const auto& op : t.operations) {
                if (op.name == operation) return true;
            }
        }
        return false;
    }

    static std::set<std::string> manifest_params(const ManifestBody& m, const std::string& tool,
                                                 const std::string& operation) {
        for (const auto& t : m.tools) {
            if (t.id != tool) continue;
            for (const auto& op : t.operations) {
                if (op.name == operation) {
                    return {op.param_fields.begin(), op.param_fields.end()};
                }
            }
        }
        return {};
    }

    ActionProposal make_proposal(const std::string& proposer, ToolCall call,
                                 ActionClass klass) const {
        ActionProposal p;
        p.proposer = proposer;
        p.call = std::move(call);
        p.action_class = klass;
        p.plan_summary = "invoke " + p.call.tool + "." + p.call.operation;
        return p;
    }

    ConsensusConfig consensus_config(ActionClass klass) const {
        ConsensusConfig c;
        c.threshold_reversible = config_.approvals_reversible;
        if (klass == ActionClass::Irreversible) c.threshold_irreversible = config_.validator_count;
        return c;
    }

    std::vector<Validator> make_validators() const {
        std::vector<Validator> vs;
        vs.push_back({"schema_conformance", [this](const ActionProposal& p) {
                          const ToolDecl* tool = spec_.find_tool(p.call.tool);
                          if (!tool || !tool->operations.count(p.call.operation)) {
                              return Vote{"", VoteKind::Reject, "unknown operation"};
                          }
                          const auto& allow = tool->operations.at(p.call.operation).param_fields;
                          std::set<std::string> ok(allow.begin(), allow.end());
                          if (p.call.params.is_object()) {
                              for (const auto& [k, v] : p.call.params.items()) {
                                  (void)v;
                                  if (!ok.count(k)) {
                                      return Vote{"", VoteKind::Reject, "param outside schema: " + k};
                                  }
                              }
                          }
                          return Vote{"", VoteKind::Approve, ""};
                      }});
        vs.push_back({"phase_appropriateness", [this](const ActionProposal& p) {
                          const AgentDecl* agent = spec_.find_agent(p.proposer);
                          if (!agent) return Vote{"", VoteKind::Reject, "unknown proposer"};
                          const auto phase = spec_.tool_phase(p.call.tool);
                          if (!phase || *phase != agent->phase) {
                              return Vote{"", VoteKind::Reject, "tool outside proposer phase"};
                          }
                          return Vote{"", VoteKind::Approve, ""};
                      }});
        vs.push_back({"rate_ceiling", [this](const ActionProposal& p) {
                          (void)p;
                          std::uint64_t recent = 0;
                          const std::uint64_t start =
                              tick_ >= config_.rate_window ? tick_ - config_.rate_window : 0;
                          for (const auto& t : executed_ticks_) {
                              if (t > start) ++recent;
                          }
                          if (recent >= config_.rate_limit) {
                              return Vote{"", VoteKind::Reject, "rate ceiling"};
                          }
                          return Vote{"", VoteKind::Approve, ""};
                      }});
        vs.resize(std::min(vs.size(), config_.validator_count),
                  Validator{"", [](const ActionProposal&) { return Vote{"", VoteKind::Abstain, ""}; }});
        return vs;
    }

    Decision execute(const std::string& agent_id, const ToolCall& call, ActionClass klass,
                     const std::string& session) {
        (void)session;
        if (config_.consensus_enabled) {
            const ActionProposal proposal = make_proposal(agent_id, call, klass);
            const ConsensusVerdict verdict =
                run_consensus(proposal, make_validators(), consensus_config(klass));
            if (verdict.outcome != ConsensusOutcome::Approved) {
                Escalation e;
                e.id = ++escalation_seq_;
                e.proposal = proposal;
                e.verdict = verdict;
                escalations_.push_back(e);
                return {Outcome::ConsensusEscalated, {Principle::P3},
                        {{"escalation_id", e.id}, {"verdict", verdict_to_json(verdict)}}};
            }
        }
        executed_.push_back(call);
        executed_ticks_.push_back(tick_);
        Decision d{Outcome::Executed, {}, run_stub(call)};
        if (config_.consensus_enabled && klass == ActionClass::Irreversible) {
            d.principles.insert(Principle::P3);
        }
        return d;
    }

    // Tool execution stub: the simulator never reaches real effectors. The
    // reply is signed with the serving phase's key so the client-side check
    // in ingest_server_response has something real to verify.
    json run_stub(const ToolCall& call) {
        json body{{"tool", call.tool}, {"operation", call.operation}, {"params", call.params},
                  {"status", "executed"}};
        return body;
    }

    Decision error(const std::string& message) {
        return {Outcome::Error, {}, {{"error", message}}};
    }

    Decision audited(const std::string& method, const std::string& session,
                     const std::string& target, Decision d) {
        json principles = json::array();
        for (Principle p : d.principles) principles.push_back(to_string(p));
        json payload{{"tick", tick_},    {"method", method},
                     {"session", session}, {"target", target},
                     {"outcome", to_string(d.outcome)}, {"principles", principles}};
        if (d.detail.is_object() && d.detail.contains("reason")) {
            payload["reason"] = d.detail.at("reason");
        }
        audit_.append(std::move(payload));
        return d;
    }

    void record_audit(const std::string& method, const std::string& session,
                      const std::string& target, Decision d) {
        audited(method, session, target, std::move(d));
    }

    ArchitectureSpec spec_;
    KernelConfig config_;
    const SignatureScheme* scheme_;
    MemoryPlane memory_;
    AuditLog audit_;

    std::map<std::string, Bytes> issuers_;
    std::map<std::string, Bytes> agent_pubs_;
    std::map<std::string, Bytes> server_pubs_;
    std::map<std::string, ManifestBody> manifests_;
    std::map<std::string, std::string> sessions_;
    std::deque<Escalation> escalations_;
    std::vector<ToolCall> executed_;
    std::vector<std::uint64_t> executed_ticks_;
    std::string current_phase_;
    std::uint64_t session_seq_ = 0;
    std::uint64_t escalation_seq_ = 0;
    std::uint64_t tick_ = 0;
};

}  // namespace trustplane
