#include <catch2/catch_amalgamated.hpp>

#include "trustplane/manifest.hpp"
#include "trustplane/model_fixture.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using namespace trustplane;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(TRUSTPLANE_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "trustplane-cli-tests";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
}

}  // namespace

TEST_CASE("boundary analysis table matches the expected totals") {
    const RunResult r = run_cli("analyze boundaries --arch builtin:paper --mode scoped");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Total 200 56 72%") != std::string::npos);
}

TEST_CASE("boundary diff against the shipped fixture is clean") {
    const RunResult r = run_cli(
        "analyze boundaries --arch builtin:paper --mode scoped "
        "--diff-fixture fixtures/appendix_c_boundaries.json");
    CHECK(r.exit_code == 0);
}

TEST_CASE("a perturbed architecture produces a non-empty diff and exit 1") {
    ArchitectureSpec spec = builtin_paper_architecture();
    spec.tool_assignments["Monitor"].erase("T2");
    const fs::path arch_path = scratch_dir() / "perturbed_arch.json";
    write_file(arch_path, serialize(spec).dump(2));
    const RunResult r = run_cli("analyze boundaries --arch " + arch_path.string() +
                                " --mode scoped --diff-fixture fixtures/appendix_c_boundaries.json");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("discrepanc") != std::string::npos);
}

TEST_CASE("coverage analysis accepts the shipped matrix and rejects junk") {
    const RunResult good = run_cli("analyze coverage --matrix fixtures/table3_matrix.json");
    CHECK(good.exit_code == 0);

    const fs::path bad_path = scratch_dir() / "bad_matrix.json";
    write_file(bad_path, R"({"vectors": "not-a-list"})");
    const RunResult bad = run_cli("analyze coverage --matrix " + bad_path.string());
    CHECK(bad.exit_code == 2);

    const RunResult ablate =
        run_cli("analyze coverage --matrix builtin:paper --ablate P2 --counting primary-only");
    CHECK(ablate.exit_code == 0);
}

TEST_CASE("trace reports the interception step and principles") {
    const RunResult ap3 = run_cli("trace --arch builtin:paper --chain builtin:AP-3");
    CHECK(ap3.exit_code == 0);
    CHECK(ap3.output.find("Blocked at step 2 [P1, P3]") != std::string::npos);

    const RunResult ap4 = run_cli("trace --arch builtin:paper --chain builtin:AP-4");
    CHECK(ap4.exit_code == 0);
    CHECK(ap4.output.find("Constrained at step 1") != std::string::npos);

    const RunResult flat = run_cli("trace --arch builtin:paper --chain builtin:AP-1 --flat");
    CHECK(flat.exit_code == 0);
    CHECK(flat.output.find("Completed (4 steps)") != std::string::npos);

    const RunResult unknown = run_cli("trace --arch builtin:paper --chain builtin:AP-9");
    CHECK(unknown.exit_code == 2);
}

TEST_CASE("simulate runs the builtin scenario and writes artifacts") {
    const fs::path out = scratch_dir() / "sim_out";
    fs::remove_all(out);
    const RunResult r = run_cli("simulate --arch builtin:paper --scenario builtin:lifecycle "
                                "--seed 7 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("audit Intact") != std::string::npos);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "audit.log"));

    SECTION("the emitted audit log verifies, and tampering is caught") {
        const RunResult ok = run_cli("audit verify --log " + (out / "audit.log").string());
        CHECK(ok.exit_code == 0);
        CHECK(ok.output.find("chain Intact") != std::string::npos);

        std::ifstream in(out / "audit.log");
        std::string lines((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        const auto pos = lines.find("\"outcome\"");
        REQUIRE(pos != std::string::npos);
        lines[pos + 1] = 'x';
        const fs::path tampered = scratch_dir() / "tampered.log";
        write_file(tampered, lines);
        const RunResult broken = run_cli("audit verify --log " + tampered.string());
        CHECK(broken.exit_code == 1);
        CHECK(broken.output.find("BROKEN") != std::string::npos);
    }
}

TEST_CASE("simulate with an injected chain reports the rejection reason") {
    const RunResult r = run_cli(
        "simulate --arch builtin:paper --scenario builtin:lifecycle --seed 7 --inject AP-2@10");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("DanglingEvidence") != std::string::npos);
    CHECK(r.output.find("AP-2") != std::string::npos);
}

TEST_CASE("manifest keygen, sign, and verify round trip") {
    const fs::path dir = scratch_dir();
    const fs::path key = dir / "issuer.key";
    const fs::path manifest = dir / "monitor_manifest.json";
    const ManifestBody body =
        manifest_for_phase(builtin_paper_architecture(), "Monitor", "srv-Monitor", "issuer-root");
    write_file(manifest, body.to_json().dump(2));

    CHECK(run_cli("manifest keygen --out " + key.string() + " --seed demo").exit_code == 0);
    CHECK(run_cli("manifest sign --key " + key.string() + " --manifest " + manifest.string())
              .exit_code == 0);
    const RunResult ok =
        run_cli("manifest verify --key " + key.string() + " --manifest " + manifest.string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("signature OK") != std::string::npos);

    // Any body change invalidates the detached signature.
    ManifestBody altered = body;
    altered.version = 9;
    const fs::path altered_path = dir / "monitor_manifest_altered.json";
    write_file(altered_path, altered.to_json().dump(2));
    fs::copy_file(fs::path(manifest.string() + ".sig"),
                  fs::path(altered_path.string() + ".sig"),
                  fs::copy_options::overwrite_existing);
    const RunResult bad =
        run_cli("manifest verify --key " + key.string() + " --manifest " + altered_path.string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("INVALID") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("simulate --scenario /nonexistent/scenario.json").exit_code == 2);
    CHECK(run_cli("audit verify --log /nonexistent/audit.log").exit_code == 2);
    CHECK(run_cli("analyze boundaries --mode sideways").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("an empty architecture analyzes without error") {
    const fs::path arch_path = scratch_dir() / "empty_arch.json";
    write_file(arch_path, serialize(ArchitectureSpec{}).dump());
    const RunResult r =
        run_cli("analyze boundaries --arch " + arch_path.string() + " --mode flat");
    CHECK(r.exit_code == 0);
}
