// trustplane: analyze, trace, and simulate zero-trust mediation for
// multi-agent deployments.

#include <CLI11.hpp>

#include "trustplane/attack.hpp"
#include "trustplane/boundary.hpp"
#include "trustplane/coverage.hpp"
#include "trustplane/kernel.hpp"
#include "trustplane/model_fixture.hpp"
#include "trustplane/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace trustplane;

namespace {

constexpr int kOk = 0;
constexpr int kDiscrepancy = 1;
constexpr int kUsage = 2;

struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Paths under fixtures/ may be re-rooted with TRUSTPLANE_FIXTURES.
std::string resolve_path(const std::string& path) {
    const char* root = std::getenv("TRUSTPLANE_FIXTURES");
    if (root && path.rfind("fixtures/", 0) == 0) {
        return (fs::path(root) / path.substr(std::string("fixtures/").size())).string();
    }
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(resolve_path(path));
    if (!in) throw UsageFailure("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw UsageFailure("malformed JSON in " + path + ": " + e.what());
    }
}

ArchitectureSpec load_arch(const std::string& ref) {
    if (ref == "builtin:paper") return builtin_paper_architecture();
    if (ref.rfind("builtin:", 0) == 0) throw UsageFailure("unknown builtin architecture: " + ref);
    try {
        return parse_architecture(load_json(ref));
    } catch (const SchemaError& e) {
        throw UsageFailure(std::string("architecture schema error: ") + e.what());
    } catch (const ReferenceError& e) {
        throw UsageFailure(std::string("architecture reference error: ") + e.what());
    } catch (const PartitionError& e) {
        throw UsageFailure(std::string("architecture partition error: ") + e.what());
    }
}

CoverageMatrix load_matrix(const std::string& ref) {
    if (ref == "builtin:paper") return builtin_paper_matrix();
    if (ref.rfind("builtin:", 0) == 0) throw UsageFailure("unknown builtin matrix: " + ref);
    try {
        return matrix_from_json(load_json(ref));
    } catch (const SchemaError& e) {
        throw UsageFailure(std::string("matrix schema error: ") + e.what());
    }
}

AttackChain load_chain(const std::string& ref) {
    if (ref.rfind("builtin:", 0) == 0) {
        auto chain = builtin_attack_chain(ref.substr(std::string("builtin:").size()));
        if (!chain) throw UsageFailure("unknown builtin chain: " + ref);
        return *chain;
    }
    try {
        return AttackChain::from_json(load_json(ref));
    } catch (const SchemaError& e) {
        throw UsageFailure(std::string("chain schema error: ") + e.what());
    } catch (const json::exception& e) {
        throw UsageFailure(std::string("chain schema error: ") + e.what());
    }
}

ScenarioScript load_scenario(const std::string& ref) {
    if (ref == "builtin:lifecycle") return builtin_lifecycle_scenario();
    if (ref.rfind("builtin:", 0) == 0) throw UsageFailure("unknown builtin scenario: " + ref);
    try {
        return ScenarioScript::from_json(load_json(ref));
    } catch (const SchemaError& e) {
        throw UsageFailure(std::string("scenario schema error: ") + e.what());
    } catch (const json::exception& e) {
        throw UsageFailure(std::string("scenario schema error: ") + e.what());
    }
}

struct KeyFile {
    std::string scheme;
    KeyPair pair;
};

KeyFile load_key(const std::string& path) {
    const json doc = load_json(path);
    KeyFile k;
    try {
        k.scheme = doc.at("scheme").get<std::string>();
        k.pair.public_key = from_hex(doc.at("public_key").get<std::string>());
        if (doc.contains("secret_key")) {
            k.pair.secret_key = from_hex(doc.at("secret_key").get<std::string>());
        }
    } catch (const std::exception& e) {
        throw UsageFailure(std::string("malformed key file: ") + e.what());
    }
    return k;
}

int cmd_analyze_boundaries(const std::string& arch_ref, const std::string& mode,
                           const std::string& format, const std::string& diff_fixture) {
    const ArchitectureSpec spec = load_arch(arch_ref);
    const auto boundaries = mode == "flat" ? enumerate_flat(spec) : enumerate_scoped(spec);
    const BoundaryReport report = summarize(boundaries);
    if (format == "json") {
        json out = report_to_json(report);
        out["rows"] = boundaries_to_json(boundaries);
        std::cout << out.dump(2) << '\n';
    } else if (format == "csv") {
        std::cout << render_report_csv(report);
    } else {
        std::cout << render_report_table(report);
    }
    if (!diff_fixture.empty()) {
        const auto fixture = boundaries_from_json(load_json(diff_fixture));
        const auto diff = diff_against_fixture(boundaries, fixture);
        if (!diff.empty()) {
            std::cerr << diff.size() << " discrepancies against " << diff_fixture << '\n';
            for (const auto& d : diff) {
                std::cerr << "  row " << d.row << " (" << d.actual.source << " -> "
                          << d.actual.destination << "): " << d.note << '\n';
            }
            return kDiscrepancy;
        }
        std::cout << "matches fixture " << diff_fixture << " (" << fixture.size() << " rows)\n";
    }
    return kOk;
}

int cmd_analyze_coverage(const std::string& matrix_ref, const std::string& ablate,
                         const std::string& mode_name, const std::string& format) {
    const CoverageMatrix matrix = load_matrix(matrix_ref);
    if (!ablate.empty()) {
        Principle removed;
        try {
            removed = principle_from_string(ablate);
        } catch (const std::exception& e) {
            throw UsageFailure(e.what());
        }
        const CountingMode mode = mode_name == "primary-and-secondary"
                                      ? CountingMode::PrimaryAndSecondary
                                      : CountingMode::PrimaryOnly;
        const auto entries = ablation_report(matrix, removed, mode);
        if (format == "json") {
            json out = json::array();
            for (const auto& e : entries) {
                out.push_back({{"vector", to_string(e.vector)},
                               {"remaining", e.remaining},
                               {"flagged", e.flagged}});
            }
            std::cout << out.dump(2) << '\n';
        } else {
            std::cout << "ablating " << to_string(removed) << " (" << mode_name << "):\n";
            for (const auto& e : entries) {
                std::cout << "  " << vector_display(e.vector) << ": " << e.remaining
                          << " remaining" << (e.flagged ? "  [FLAGGED]" : "") << '\n';
            }
        }
        return kOk;
    }
    const ClaimReport claims = check_claims(matrix);
    if (format == "json") {
        json flagged_po = json::object();
        json flagged_ps = json::object();
        for (const auto& [p, n] : claims.flagged_primary_only) flagged_po[to_string(p)] = n;
        for (const auto& [p, n] : claims.flagged_primary_and_secondary) {
            flagged_ps[to_string(p)] = n;
        }
        json loads = json::object();
        for (Principle p : matrix.principles) {
            const PrincipleLoad l = principle_load(matrix, p);
            loads[to_string(p)] = {{"primary", l.primary}, {"secondary", l.secondary}};
        }
        std::cout << json{{"matrix", render_matrix_table(matrix)},
                          {"principle_load", loads},
                          {"min_coverage", claims.min_coverage},
                          {"max_primary", claims.max_primary},
                          {"every_vector_covered_twice", claims.every_vector_covered_twice},
                          {"flagged_primary_only", flagged_po},
                          {"flagged_primary_and_secondary", flagged_ps}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << render_matrix_table(matrix) << '\n';
        std::cout << "Primary  ";
        for (Principle p : matrix.principles) std::cout << principle_load(matrix, p).primary << ' ';
        std::cout << "\nSecondary";
        for (Principle p : matrix.principles) {
            std::cout << ' ' << principle_load(matrix, p).secondary;
        }
        std::cout << "\nmin coverage " << claims.min_coverage << ", max primary load "
                  << claims.max_primary << '\n';
    }
    return kOk;
}

int cmd_trace(const std::string& arch_ref, const std::string& chain_ref, bool flat,
              const std::string& format) {
    const ArchitectureSpec spec = load_arch(arch_ref);
    const AttackChain chain = load_chain(chain_ref);
    InterceptResult result;
    try {
        result = flat ? trace_flat(chain, spec) : trace(chain, spec);
    } catch (const ConfigError& e) {
        throw UsageFailure(e.what());
    }
    if (format == "json") {
        std::cout << result.to_json().dump(2) << '\n';
        return kOk;
    }
    std::cout << render_intercept(result, chain);
    std::ostringstream summary;
    if (result.outcome == ChainOutcome::Completed) {
        summary << "Completed (" << result.steps.size() << " steps)";
    } else {
        summary << (result.outcome == ChainOutcome::Intercepted ? "Blocked" : "Constrained")
                << " at step " << result.intercept_index << " [";
        bool first = true;
        for (Principle p : result.principles) {
            summary << (first ? "" : ", ") << to_string(p);
            first = false;
        }
        summary << "]";
    }
    std::cout << summary.str() << '\n';
    return kOk;
}

int cmd_simulate(const std::string& arch_ref, const std::string& scenario_ref,
                 std::uint64_t seed, const std::string& out_dir,
                 const std::vector<std::string>& injects) {
    const ArchitectureSpec spec = load_arch(arch_ref);
    ScenarioScript script = load_scenario(scenario_ref);
    script.seed = seed;
    for (const auto& spec_str : injects) {
        const auto at = spec_str.find('@');
        if (at == std::string::npos) {
            throw UsageFailure("--inject expects CHAIN@POSITION, got: " + spec_str);
        }
        Injection inj;
        inj.chain_id = spec_str.substr(0, at);
        try {
            inj.after_action = std::stoul(spec_str.substr(at + 1));
        } catch (const std::exception&) {
            throw UsageFailure("--inject position must be an integer: " + spec_str);
        }
        if (!builtin_attack_chain(inj.chain_id)) {
            throw UsageFailure("unknown chain for --inject: " + inj.chain_id);
        }
        script.injections.push_back(inj);
    }

    // Capture the audit trail by rerunning through a kernel we hold; simplest
    // is to rebuild exactly what run_scenario does and write both artifacts.
    SimReport report;
    try {
        report = run_scenario(spec, script);
    } catch (const EscalationStarvation& e) {
        std::cerr << "halted: " << e.what() << '\n';
        return kDiscrepancy;
    }

    std::cout << "actions " << report.counts.actions << ", executed " << report.counts.executed
              << ", constrained " << report.counts.constrained << ", denied "
              << report.counts.denied << ", escalations " << report.counts.escalations << '\n';
    std::cout << "writes accepted " << report.counts.writes_accepted << ", rejected "
              << report.counts.writes_rejected;
    for (const auto& [reason, n] : report.counts.write_reject_reasons) {
        std::cout << " (" << reason << " x" << n << ")";
    }
    std::cout << '\n';
    for (const auto& r : report.injected) {
        std::cout << "injected " << r.chain_id << ": " << to_string(r.outcome);
        if (r.intercept_index != 0) std::cout << " at step " << r.intercept_index;
        std::cout << '\n';
    }
    std::cout << "audit " << (report.audit_intact ? "Intact" : "BROKEN") << " ("
              << report.audit_records << " records, head " << report.audit_head.substr(0, 12)
              << ")\n";

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / "report.json") << report.to_json().dump(2) << '\n';
        std::ofstream(fs::path(out_dir) / "audit.log") << report.audit_lines;
    }
    return report.audit_intact ? kOk : kDiscrepancy;
}

int cmd_manifest_keygen(const std::string& out, const std::string& seed) {
    const KeyPair pair = default_scheme().generate(seed);
    std::ofstream f(out);
    if (!f) throw UsageFailure("cannot write key file: " + out);
    f << json{{"scheme", default_scheme().name()},
              {"public_key", to_hex(pair.public_key)},
              {"secret_key", to_hex(pair.secret_key)}}
             .dump(2)
      << '\n';
    std::cout << "wrote " << out << '\n';
    return kOk;
}

int cmd_manifest_sign(const std::string& key_path, const std::string& manifest_path) {
    const KeyFile key = load_key(key_path);
    if (key.pair.secret_key.empty()) throw UsageFailure("key file has no secret_key");
    ManifestBody body;
    try {
        body = ManifestBody::from_json(load_json(manifest_path));
    } catch (const json::exception& e) {
        throw UsageFailure(std::string("malformed manifest: ") + e.what());
    }
    const SignedManifest signed_manifest = sign_manifest(body, key.pair.secret_key);
    const std::string sig_path = manifest_path + ".sig";
    std::ofstream(resolve_path(sig_path)) << to_base64(signed_manifest.signature) << '\n';
    std::cout << "wrote " << sig_path << '\n';
    return kOk;
}

int cmd_manifest_verify(const std::string& key_path, const std::string& manifest_path) {
    const KeyFile key = load_key(key_path);
    ManifestBody body;
    try {
        body = ManifestBody::from_json(load_json(manifest_path));
    } catch (const json::exception& e) {
        throw UsageFailure(std::string("malformed manifest: ") + e.what());
    }
    std::string sig_text = slurp(manifest_path + ".sig");
    while (!sig_text.empty() && (sig_text.back() == '\n' || sig_text.back() == '\r')) {
        sig_text.pop_back();
    }
    SignedManifest signed_manifest{body, {}};
    try {
        signed_manifest.signature = from_base64(sig_text);
    } catch (const std::exception&) {
        std::cout << "signature INVALID (undecodable)\n";
        return kDiscrepancy;
    }
    if (verify_manifest(signed_manifest, key.pair.public_key) == VerifyResult::Verified) {
        std::cout << "signature OK\n";
        return kOk;
    }
    std::cout << "signature INVALID\n";
    return kDiscrepancy;
}

int cmd_audit_verify(const std::string& log_path) {
    std::vector<AuditRecord> records;
    try {
        records = AuditLog::parse_lines(slurp(log_path));
    } catch (const std::exception& e) {
        throw UsageFailure(std::string("malformed audit log: ") + e.what());
    }
    const ChainCheck check = verify_audit_chain(records);
    if (check.intact) {
        std::cout << "chain Intact (" << records.size() << " records)\n";
        return kOk;
    }
    std::cout << "chain BROKEN at seq " << check.broken_at << '\n';
    return kDiscrepancy;
}

int cmd_fixtures(const std::string& out_dir) {
    fs::create_directories(out_dir);
    const ArchitectureSpec spec = builtin_paper_architecture();
    std::ofstream(fs::path(out_dir) / "paper_arch.json") << serialize(spec).dump(2) << '\n';
    std::ofstream(fs::path(out_dir) / "appendix_c_boundaries.json")
        << boundaries_to_json(enumerate_scoped(spec)).dump(2) << '\n';
    std::ofstream(fs::path(out_dir) / "table3_matrix.json")
        << matrix_to_json(builtin_paper_matrix()).dump(2) << '\n';
    std::cout << "wrote paper_arch.json, appendix_c_boundaries.json, table3_matrix.json to "
              << out_dir << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    crypto_init();
    CLI::App app{"zero-trust mediation analyzer and simulator"};
    app.require_subcommand(1);

    std::string arch = "builtin:paper";
    std::string mode = "scoped";
    std::string format = "table";
    std::string diff_fixture;
    std::string matrix = "builtin:paper";
    std::string ablate;
    std::string counting = "primary-only";
    std::string chain;
    bool flat = false;
    std::string scenario = "builtin:lifecycle";
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<std::string> injects;
    std::string key_path;
    std::string manifest_path;
    std::string log_path;
    std::string keygen_seed = "trustplane:issuer:root";

    auto* analyze = app.add_subcommand("analyze", "static analyses");
    analyze->require_subcommand(1);
    auto* bounds = analyze->add_subcommand("boundaries", "trust-boundary enumeration");
    bounds->add_option("--arch", arch, "architecture JSON or builtin:paper");
    bounds->add_option("--mode", mode)->check(CLI::IsMember({"flat", "scoped"}));
    bounds->add_option("--format", format)->check(CLI::IsMember({"table", "json", "csv"}));
    bounds->add_option("--diff-fixture", diff_fixture, "golden row fixture to diff against");
    auto* coverage = analyze->add_subcommand("coverage", "principle x vector coverage");
    coverage->add_option("--matrix", matrix, "matrix JSON or builtin:paper");
    coverage->add_option("--ablate", ablate, "principle to remove (P1..P5)");
    coverage->add_option("--counting", counting)
        ->check(CLI::IsMember({"primary-only", "primary-and-secondary"}));
    coverage->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    auto* trace_cmd = app.add_subcommand("trace", "run an attack chain through the kernel");
    trace_cmd->add_option("--arch", arch);
    trace_cmd->add_option("--chain", chain, "chain JSON or builtin:AP-1..AP-4")->required();
    trace_cmd->add_flag("--flat", flat, "disable all mediation (baseline)");
    trace_cmd->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    auto* simulate = app.add_subcommand("simulate", "run a scripted scenario");
    simulate->add_option("--arch", arch);
    simulate->add_option("--scenario", scenario, "scenario JSON or builtin:lifecycle");
    simulate->add_option("--seed", seed);
    simulate->add_option("--out", out_dir, "directory for report.json and audit.log");
    simulate->add_option("--inject", injects, "inject a builtin chain, e.g. AP-2@10");

    auto* manifest_cmd = app.add_subcommand("manifest", "manifest signing utilities");
    manifest_cmd->require_subcommand(1);
    auto* keygen = manifest_cmd->add_subcommand("keygen", "write a deterministic key file");
    keygen->add_option("--out", key_path)->required();
    keygen->add_option("--seed", keygen_seed, "seed material for key derivation");
    auto* sign = manifest_cmd->add_subcommand("sign", "sign a manifest (writes PATH.sig)");
    sign->add_option("--key", key_path)->required();
    sign->add_option("--manifest", manifest_path)->required();
    auto* verify = manifest_cmd->add_subcommand("verify", "verify a manifest signature");
    verify->add_option("--key", key_path)->required();
    verify->add_option("--manifest", manifest_path)->required();

    auto* audit_cmd = app.add_subcommand("audit", "audit log utilities");
    audit_cmd->require_subcommand(1);
    auto* audit_verify = audit_cmd->add_subcommand("verify", "check hash-chain integrity");
    audit_verify->add_option("--log", log_path)->required();

    auto* fixtures = app.add_subcommand("fixtures", "emit builtin fixtures as files");
    fixtures->add_option("--out", out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (bounds->parsed()) return cmd_analyze_boundaries(arch, mode, format, diff_fixture);
        if (coverage->parsed()) return cmd_analyze_coverage(matrix, ablate, counting, format);
        if (trace_cmd->parsed()) return cmd_trace(arch, chain, flat, format);
        if (simulate->parsed()) return cmd_simulate(arch, scenario, seed, out_dir, injects);
        if (keygen->parsed()) return cmd_manifest_keygen(key_path, keygen_seed);
        if (sign->parsed()) return cmd_manifest_sign(key_path, manifest_path);
        if (verify->parsed()) return cmd_manifest_verify(key_path, manifest_path);
        if (audit_verify->parsed()) return cmd_audit_verify(log_path);
        if (fixtures->parsed()) return cmd_fixtures(out_dir);
    } catch (const UsageFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
