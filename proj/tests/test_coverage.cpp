#include <catch2/catch_amalgamated.hpp>

#include "trustplane/coverage.hpp"

#include <fstream>

using namespace trustplane;

namespace {

CoverageMatrix shipped_matrix() {
    std::ifstream in(std::string(TRUSTPLANE_SOURCE_DIR) + "/fixtures/table3_matrix.json");
    REQUIRE(in);
    json doc;
    in >> doc;
    return matrix_from_json(doc);
}

}  // namespace

TEST_CASE("summary row: primary and secondary counts per principle") {
    const CoverageMatrix m = builtin_paper_matrix();
    const std::vector<int> expected_secondary = {1, 0, 1, 0, 2};
    for (std::size_t i = 0; i < kAllPrinciples.size(); ++i) {
        const PrincipleLoad load = principle_load(m, kAllPrinciples[i]);
        CHECK(load.primary == 3);
        CHECK(load.secondary == expected_secondary[i]);
    }
}

TEST_CASE("spot-checked cells") {
    const CoverageMatrix m = builtin_paper_matrix();
    CHECK(m.cell(AttackVector::ConfusedDeputy, Principle::P1) == Cell::Secondary);
    CHECK(m.cell(AttackVector::MessageManipulation, Principle::P3) == Cell::Primary);
    CHECK(m.cell(AttackVector::UnauthorizedAccess, Principle::P1) == Cell::Primary);
    CHECK(m.cell(AttackVector::UnauthorizedAccess, Principle::P2) == Cell::None);
}

TEST_CASE("vector coverage counts and principal sets") {
    const CoverageMatrix m = builtin_paper_matrix();
    const VectorCoverage ua = vector_coverage(m, AttackVector::UnauthorizedAccess);
    CHECK(ua.count == 2);
    CHECK(ua.principles == std::set<Principle>{Principle::P1, Principle::P5});
    const VectorCoverage cm = vector_coverage(m, AttackVector::ConsensusManipulation);
    CHECK(cm.count == 3);
    CHECK(cm.principles == std::set<Principle>{Principle::P1, Principle::P3, Principle::P4});
    for (AttackVector v : kAllVectors) CHECK(vector_coverage(m, v).count >= 2);
}

TEST_CASE("ablation report, primary-only counting") {
    const CoverageMatrix m = builtin_paper_matrix();
    const auto entries = ablation_report(m, Principle::P2, CountingMode::PrimaryOnly);
    std::set<AttackVector> flagged;
    for (const auto& e : entries) {
        if (e.flagged) flagged.insert(e.vector);
    }
    // Removing P2 leaves these vectors with at most one primary defense.
    CHECK(flagged == std::set<AttackVector>{
                         AttackVector::ContextContamination, AttackVector::LateralCompromise,
                         AttackVector::CovertCoordination, AttackVector::ConfusedDeputy});
}

TEST_CASE("ablation report, primary-and-secondary counting") {
    const CoverageMatrix m = builtin_paper_matrix();
    const auto entries = ablation_report(m, Principle::P5, CountingMode::PrimaryAndSecondary);
    std::set<AttackVector> flagged;
    for (const auto& e : entries) {
        if (e.flagged) flagged.insert(e.vector);
    }
    CHECK(flagged == std::set<AttackVector>{AttackVector::UnauthorizedAccess,
                                            AttackVector::AuthenticationBypass,
                                            AttackVector::CovertCoordination});
}

TEST_CASE("claim report aggregates both counting modes") {
    const ClaimReport claims = check_claims(builtin_paper_matrix());
    CHECK(claims.every_vector_covered_twice);
    CHECK(claims.min_coverage == 2);
    CHECK(claims.primary_load_bounded);
    CHECK(claims.max_primary == 3);
    CHECK(claims.flagged_primary_only.at(Principle::P2) == 4);
    CHECK(claims.flagged_primary_and_secondary.at(Principle::P5) == 3);
}

TEST_CASE("matrix JSON round-trip and shipped fixture agreement") {
    const CoverageMatrix m = builtin_paper_matrix();
    const CoverageMatrix back = matrix_from_json(matrix_to_json(m));
    CHECK(matrix_to_json(back) == matrix_to_json(m));
    CHECK(matrix_to_json(shipped_matrix()) == matrix_to_json(m));
}

TEST_CASE("unknown vectors and principles are rejected") {
    CoverageMatrix m = builtin_paper_matrix();
    m.vectors.pop_back();
    CHECK_THROWS_AS(vector_coverage(m, AttackVector::ConfusedDeputy), UnknownVector);
    m.principles.pop_back();
    CHECK_THROWS_AS(principle_load(m, Principle::P5), UnknownPrinciple);
    CHECK_THROWS_AS(ablation_report(m, Principle::P5, CountingMode::PrimaryOnly),
                    UnknownPrinciple);
}

TEST_CASE("malformed matrix documents raise schema errors") {
    CHECK_THROWS_AS(matrix_from_json(json::array()), SchemaError);
    json doc = matrix_to_json(builtin_paper_matrix());
    doc["cells"][0] = json::array();  // wrong column count
    CHECK_THROWS_AS(matrix_from_json(doc), SchemaError);
    doc = matrix_to_json(builtin_paper_matrix());
    doc["cells"][0][0] = "sometimes";
    CHECK_THROWS_AS(matrix_from_json(doc), SchemaError);
}
