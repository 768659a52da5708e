#include <catch2/catch_amalgamated.hpp>

#include "trustplane/boundary.hpp"
#include "trustplane/model_fixture.hpp"

#include <fstream>
#include <sstream>

using namespace trustplane;

namespace {

json load_fixture(const std::string& name) {
    std::ifstream in(std::string(TRUSTPLANE_SOURCE_DIR) + "/fixtures/" + name);
    REQUIRE(in);
    json doc;
    in >> doc;
    return doc;
}

// Hand-sized architecture whose boundary counts are worked out by hand:
// 2 agents x 3 tools = 6, 2 agents x 2 stores = 4, 2 ordered agent pairs = 2,
// 3 tools x 2 agents = 6, 1 routed feed = 1; total 19.
ArchitectureSpec small_arch() {
    ArchitectureSpec spec;
    spec.agents = {{"a1", "alpha", "Agent One"}, {"a2", "beta", "Agent Two"}};
    spec.tools = {{"t1", "Tool 1", {{"op", {}}}},
                  {"t2", "Tool 2", {{"op", {}}}},
                  {"t3", "Tool 3", {{"op", {}}}}};
    spec.memory_stores = {{"m1", "Store 1", {}}, {"m2", "Store 2", {}}};
    spec.feeds = {{"e1", "Feed 1"}};
    spec.tool_assignments = {{"alpha", {"t1", "t2"}}, {"beta", {"t3"}}};
    spec.memory_grants = {{"alpha", {{"m1", AccessMode::ReadWrite}}},
                          {"beta", {{"m2", AccessMode::Read}}}};
    spec.handoffs = {{"alpha", "beta"}};
    spec.feed_routes = {{"e1", "m1", true, {}}};
    validate(spec);
    return spec;
}

}  // namespace

TEST_CASE("small architecture oracle: flat boundary counts by brute force") {
    const ArchitectureSpec spec = small_arch();
    const auto flat = enumerate_flat(spec);
    const BoundaryReport report = summarize(flat);
    CHECK(report.per_category.at(BoundaryCategory::AgentTool).flat == 6);
    CHECK(report.per_category.at(BoundaryCategory::AgentMemory).flat == 4);
    CHECK(report.per_category.at(BoundaryCategory::AgentAgent).flat == 2);
    CHECK(report.per_category.at(BoundaryCategory::ToolRespAgent).flat == 6);
    CHECK(report.per_category.at(BoundaryCategory::FeedMemory).flat == 1);
    CHECK(report.total_flat == 19);
    CHECK(report.total_scoped == 19);  // flat mode: everything retained
}

TEST_CASE("small architecture oracle: scoped retention") {
    const ArchitectureSpec spec = small_arch();
    const BoundaryReport report = summarize(enumerate_scoped(spec));
    // a1 keeps t1,t2; a2 keeps t3 -> 3 of 6 tool edges, doubled for responses.
    CHECK(report.per_category.at(BoundaryCategory::AgentTool).scoped == 3);
    CHECK(report.per_category.at(BoundaryCategory::ToolRespAgent).scoped == 3);
    // one grant per phase -> 2 of 4 memory edges.
    CHECK(report.per_category.at(BoundaryCategory::AgentMemory).scoped == 2);
    // one declared handoff of the 2 ordered pairs.
    CHECK(report.per_category.at(BoundaryCategory::AgentAgent).scoped == 1);
    CHECK(report.per_category.at(BoundaryCategory::FeedMemory).scoped == 1);
    CHECK(report.total_scoped == 10);
    CHECK(report.total_flat == 19);
}

TEST_CASE("builtin architecture: per-category counts and reduction") {
    const ArchitectureSpec spec = builtin_paper_architecture();
    const BoundaryReport report = summarize(enumerate_scoped(spec));
    using C = BoundaryCategory;
    const std::vector<std::pair<C, std::pair<long, long>>> expected = {
        {C::AgentTool, {64, 16}},  {C::AgentMemory, {48, 16}},   {C::AgentAgent, {12, 4}},
        {C::ToolRespAgent, {64, 16}}, {C::FeedMemory, {12, 4}},
    };
    for (const auto& [cat, counts] : expected) {
        CHECK(report.per_category.at(cat).flat == counts.first);
        CHECK(report.per_category.at(cat).scoped == counts.second);
    }
    CHECK(report.total_flat == 200);
    CHECK(report.total_scoped == 56);
    CHECK(report.reduction.num == 144);
    CHECK(report.reduction.den == 200);
    CHECK(report.reduction.percent() == 72);
}

TEST_CASE("row ordering and mechanisms match the published rows") {
    const auto rows = enumerate_scoped(builtin_paper_architecture());
    REQUIRE(rows.size() == 200);
    // Row 5: A1 -> T5, not in the Monitor manifest.
    CHECK(rows[4].source == "A1");
    CHECK(rows[4].destination == "T5");
    CHECK(rows[4].status == BoundaryStatus::Eliminated);
    CHECK(rows[4].mechanisms.principles == std::set<Principle>{Principle::P2});
    // Row 89: A3 -> M1, outside the Admin grant scope.
    CHECK(rows[88].source == "A3");
    CHECK(rows[88].destination == "M1");
    CHECK(rows[88].status == BoundaryStatus::Eliminated);
    CHECK(rows[88].mechanisms.principles == std::set<Principle>{Principle::P5});
    // Retained tool edge carries P1+P3.
    CHECK(rows[0].status == BoundaryStatus::Retained);
    CHECK(rows[0].mechanisms.principles == std::set<Principle>{Principle::P1, Principle::P3});
    // Agent-agent edges are host-mediated.
    CHECK(rows[112].mechanisms.host_mediated);
}

TEST_CASE("enumeration is conserved between modes") {
    const ArchitectureSpec spec = builtin_paper_architecture();
    const auto flat = enumerate_flat(spec);
    const auto scoped = enumerate_scoped(spec);
    REQUIRE(flat.size() == scoped.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        CHECK(flat[i].category == scoped[i].category);
        CHECK(flat[i].source == scoped[i].source);
        CHECK(flat[i].destination == scoped[i].destination);
        CHECK(flat[i].status == BoundaryStatus::Retained);
    }
}

TEST_CASE("scoped rows diff clean against the shipped fixture") {
    const auto scoped = enumerate_scoped(builtin_paper_architecture());
    const auto fixture = boundaries_from_json(load_fixture("appendix_c_boundaries.json"));
    REQUIRE(fixture.size() == 200);
    CHECK(diff_against_fixture(scoped, fixture).empty());
}

TEST_CASE("a single flipped row produces exactly one discrepancy") {
    const auto scoped = enumerate_scoped(builtin_paper_architecture());
    auto fixture = scoped;
    fixture[10].status = fixture[10].status == BoundaryStatus::Retained
                             ? BoundaryStatus::Eliminated
                             : BoundaryStatus::Retained;
    const auto diff = diff_against_fixture(scoped, fixture);
    REQUIRE(diff.size() == 1);
    CHECK(diff[0].row == 11);
}

TEST_CASE("flat vs scoped fixture differs in status on exactly the eliminated rows") {
    const ArchitectureSpec spec = builtin_paper_architecture();
    const auto diff = diff_against_fixture(enumerate_flat(spec), enumerate_scoped(spec));
    std::size_t status_changes = 0;
    for (const auto& d : diff) {
        CHECK(d.actual.same_edge(d.expected));  // same rows, different treatment
        if (d.note == "status mismatch") ++status_changes;
    }
    CHECK(status_changes == 144);
}

TEST_CASE("boundary rows round-trip through JSON") {
    const auto rows = enumerate_scoped(builtin_paper_architecture());
    const auto back = boundaries_from_json(boundaries_to_json(rows));
    REQUIRE(back.size() == rows.size());
    CHECK(diff_against_fixture(rows, back).empty());
}

TEST_CASE("duplicate edges are rejected as incomplete enumeration") {
    auto rows = enumerate_scoped(builtin_paper_architecture());
    rows.push_back(rows.front());
    CHECK_THROWS_AS(summarize(rows), IncompleteEnumeration);
}

TEST_CASE("empty architecture yields an all-zero report") {
    const BoundaryReport report = summarize(enumerate_flat(ArchitectureSpec{}));
    CHECK(report.total_flat == 0);
    CHECK(report.total_scoped == 0);
    CHECK(report.reduction.percent() == 0);
}

TEST_CASE("percentages round half up on the exact rational") {
    CHECK(Ratio{144, 200}.percent() == 72);
    CHECK(Ratio{1, 3}.percent() == 33);
    CHECK(Ratio{1, 2}.percent() == 50);
    CHECK(Ratio{2, 3}.percent() == 67);
    CHECK(Ratio{3, 8}.percent() == 38);  // 37.5 rounds up
}

TEST_CASE("table renderer ends with the totals row") {
    const std::string table =
        render_report_table(summarize(enumerate_scoped(builtin_paper_architecture())));
    CHECK(table.find("Total 200 56 72%") != std::string::npos);
}
