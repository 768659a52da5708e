#include <catch2/catch_amalgamated.hpp>

#include "trustplane/attack.hpp"
#include "trustplane/model_fixture.hpp"

using namespace trustplane;

namespace {
const ToyScheme kScheme;

InterceptResult trace_builtin(const std::string& id) {
    auto chain = builtin_attack_chain(id);
    REQUIRE(chain.has_value());
    return trace(*chain, builtin_paper_architecture(), KernelConfig{}, kScheme);
}
}  // namespace

TEST_CASE("AP-1: injected feed instruction dies at the capability boundary") {
    const InterceptResult r = trace_builtin("AP-1");
    CHECK(r.outcome == ChainOutcome::Intercepted);
    CHECK(r.intercept_index == 2);
    CHECK(r.steps[0].verdict == StepVerdict::Allowed);  // feed item is schema-conformant
    CHECK(r.steps[1].verdict == StepVerdict::Blocked);
    CHECK(r.principles.count(Principle::P2) == 1);
    for (std::size_t i = 2; i < r.steps.size(); ++i) {
        CHECK(r.steps[i].verdict == StepVerdict::NotReached);
    }
}

TEST_CASE("AP-2: fabricated finding bounces off the write-boundary filters") {
    const InterceptResult r = trace_builtin("AP-2");
    CHECK(r.outcome == ChainOutcome::Intercepted);
    CHECK(r.intercept_index == 1);
    CHECK(r.steps[0].verdict == StepVerdict::Blocked);
    CHECK(r.principles == std::set<Principle>{Principle::P4, Principle::P5});
}

TEST_CASE("AP-3: forged server response fails signature verification") {
    const InterceptResult r = trace_builtin("AP-3");
    CHECK(r.outcome == ChainOutcome::Intercepted);
    CHECK(r.intercept_index == 2);
    CHECK(r.steps[0].verdict == StepVerdict::Allowed);  // legitimate in-phase invoke
    CHECK(r.steps[1].verdict == StepVerdict::Blocked);
    CHECK(r.principles == std::set<Principle>{Principle::P1, Principle::P3});
}

TEST_CASE("AP-4: exfiltration attempt is constrained, not completed intact") {
    const InterceptResult r = trace_builtin("AP-4");
    CHECK(r.outcome == ChainOutcome::Constrained);
    CHECK(r.intercept_index == 1);
    CHECK(r.steps[0].verdict == StepVerdict::Constrained);  // redacted read
    CHECK(r.steps[1].verdict == StepVerdict::Constrained);  // stripped params
    CHECK(r.principles.count(Principle::P2) == 1);
    CHECK(r.principles.count(Principle::P5) == 1);
    CHECK_FALSE(r.residual_risk.empty());
}

TEST_CASE("flat architecture lets every chain run to completion") {
    const ArchitectureSpec spec = builtin_paper_architecture();
    for (const auto& chain : builtin_attack_chains()) {
        const InterceptResult r = trace_flat(chain, spec, kScheme);
        INFO("chain " << chain.id);
        CHECK(r.outcome == ChainOutcome::Completed);
        CHECK(r.intercept_index == 0);
        CHECK(r.steps.size() == 4);
        for (const auto& s : r.steps) CHECK(s.verdict == StepVerdict::Allowed);
    }
}

TEST_CASE("all four builtin chains have four steps and unique ids") {
    const auto chains = builtin_attack_chains();
    REQUIRE(chains.size() == 4);
    std::set<std::string> ids;
    for (const auto& c : chains) {
        ids.insert(c.id);
        CHECK(c.steps.size() == 4);
    }
    CHECK(ids == std::set<std::string>{"AP-1", "AP-2", "AP-3", "AP-4"});
    CHECK_FALSE(builtin_attack_chain("AP-9").has_value());
}

TEST_CASE("chains survive a JSON round trip") {
    const auto chain = *builtin_attack_chain("AP-2");
    const AttackChain parsed = AttackChain::from_json(chain.to_json());
    CHECK(parsed.to_json() == chain.to_json());
    REQUIRE(parsed.steps.size() == chain.steps.size());
    CHECK(parsed.steps[0].payload == chain.steps[0].payload);
}

TEST_CASE("malformed chain documents are rejected") {
    CHECK_THROWS_AS(AttackChain::from_json(json{{"id", "x"}}), SchemaError);
    CHECK_THROWS_AS(AttackChain::from_json(json{{"id", "x"}, {"steps", "nope"}}), SchemaError);
    json bad_action = {{"id", "x"},
                       {"steps", json::array({{{"actor", "A1"}, {"action", "teleport"},
                                               {"target", "T1"}}})}};
    CHECK_THROWS_AS(AttackChain::from_json(bad_action), SchemaError);
}

TEST_CASE("empty chains are a configuration error") {
    AttackChain empty;
    empty.id = "AP-empty";
    CHECK_THROWS_AS(trace(empty, builtin_paper_architecture(), KernelConfig{}, kScheme),
                    ConfigError);
}

TEST_CASE("intercept rendering names the chain and residual risk") {
    const InterceptResult r = trace_builtin("AP-3");
    const std::string text = render_intercept(r, *builtin_attack_chain("AP-3"));
    CHECK(text.find("AP-3") != std::string::npos);
    CHECK(text.find(r.residual_risk) != std::string::npos);
}
