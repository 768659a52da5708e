#pragma once

#include "trustplane/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace trustplane {

enum class Principle { P1, P2, P3, P4, P5 };

inline std::string to_string(Principle p) {
    switch (p) {
        case Principle::P1: return "P1";
        case Principle::P2: return "P2";
        case Principle::P3: return "P3";
        case Principle::P4: return "P4";
        case Principle::P5: return "P5";
    }
    throw std::logic_error("bad principle");
}

inline Principle principle_from_string(const std::string& s) {
    if (s == "P1") return Principle::P1;
    if (s == "P2") return Principle::P2;
    if (s == "P3") return Principle::P3;
    if (s == "P4") return Principle::P4;
    if (s == "P5") return Principle::P5;
    throw SchemaError("unknown principle: " + s);
}

// A verification mechanism attributed to a boundary: one of the five
// principles, or the Host-mediation marker on agent-agent edges.
struct MechanismSet {
    std::set<Principle> principles;
    bool host_mediated = false;

    bool operator==(const MechanismSet&) const = default;

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        for (Principle p : principles) out.push_back(to_string(p));
        if (host_mediated) out.push_back("HostMediated");
        return out;
    }

    static MechanismSet from_labels(const std::vector<std::string>& labels) {
        MechanismSet m;
        for (const auto& l : labels) {
            if (l == "HostMediated") {
                m.host_mediated = true;
            } else {
                m.principles.insert(principle_from_string(l));
            }
        }
        return m;
    }
};

enum class BoundaryCategory { AgentTool, AgentMemory, AgentAgent, ToolRespAgent, FeedMemory };
enum class BoundaryStatus { Retained, Eliminated };

inline std::string to_string(BoundaryCategory c) {
    switch (c) {
        case BoundaryCategory::AgentTool: return "agent_tool";
        case BoundaryCategory::AgentMemory: return "agent_memory";
        case BoundaryCategory::AgentAgent: return "agent_agent";
        case BoundaryCategory::ToolRespAgent: return "tool_resp_agent";
        case BoundaryCategory::FeedMemory: return "feed_memory";
    }
    throw std::logic_error("bad category");
}

inline BoundaryCategory category_from_string(const std::string& s) {
    if (s == "agent_tool") return BoundaryCategory::AgentTool;
    if (s == "agent_memory") return BoundaryCategory::AgentMemory;
    if (s == "agent_agent") return BoundaryCategory::AgentAgent;
    if (s == "tool_resp_agent") return BoundaryCategory::ToolRespAgent;
    if (s == "feed_memory") return BoundaryCategory::FeedMemory;
    throw SchemaError("unknown boundary category: " + s);
}

constexpr BoundaryCategory kAllCategories[] = {
    BoundaryCategory::AgentTool, BoundaryCategory::AgentMemory, BoundaryCategory::AgentAgent,
    BoundaryCategory::ToolRespAgent, BoundaryCategory::FeedMemory};

struct TrustBoundary {
    BoundaryCategory category;
    std::string source;
    std::string destination;
    BoundaryStatus status = BoundaryStatus::Retained;
    MechanismSet mechanisms;

    bool same_edge(const TrustBoundary& other) const {
        return category == other.category && source == other.source &&
               destination == other.destination;
    }
};

// Full cross product the flat baseline exposes. Ordering matches the
// reference enumeration: agent-tool, agent-memory, directed agent pairs
// grouped (i,j),(j,i), tool-response, then one edge per feed route.
inline std::vector<TrustBoundary> enumerate_flat(const ArchitectureSpec& spec) {
    std::vector<TrustBoundary> out;
    for (const auto& a : spec.agents)
        for (const auto& t : spec.tools)
            out.push_back({BoundaryCategory::AgentTool, a.id, t.id});
    for (const auto& a : spec.agents)
        for (const auto& m : spec.memory_stores)
            out.push_back({BoundaryCategory::AgentMemory, a.id, m.id});
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.agents.size(); ++j) {
            out.push_back({BoundaryCategory::AgentAgent, spec.agents[i].id, spec.agents[j].id});
            out.push_back({BoundaryCategory::AgentAgent, spec.agents[j].id, spec.agents[i].id});
        }
    }
    for (const auto& t : spec.tools)
        for (const auto& a : spec.agents)
            out.push_back({BoundaryCategory::ToolRespAgent, t.id, a.id});
    for (const auto& f : spec.feeds) {
        const FeedRoute* route = spec.route_for(f.id);
        out.push_back({BoundaryCategory::FeedMemory, f.id, route->store});
    }
    for (auto& b : out) {
        b.status = BoundaryStatus::Retained;
        b.mechanisms = {};
    }
    return out;
}

// Same edge multiset as enumerate_flat, with status and mechanisms under
// phase scoping, grant partitioning, Host mediation, and route retention.
inline std::vector<TrustBoundary> enumerate_scoped(const ArchitectureSpec& spec) {
    std::vector<TrustBoundary> out = enumerate_flat(spec);
    for (auto& b : out) {
        switch (b.category) {
            case BoundaryCategory::AgentTool:
            case BoundaryCategory::ToolRespAgent: {
                const std::string& agent_id =
                    b.category == BoundaryCategory::AgentTool ? b.source : b.destination;
                const std::string& tool_id =
                    b.category == BoundaryCategory::AgentTool ? b.destination : b.source;
                const AgentDecl* agent = spec.find_agent(agent_id);
                const auto phase = spec.tool_phase(tool_id);
                if (agent && phase && *phase == agent->phase) {
                    b.status = BoundaryStatus::Retained;
                    b.mechanisms.principles = {Principle::P1, Principle::P3};
                } else {
                    b.status = BoundaryStatus::Eliminated;
                    b.mechanisms.principles = {Principle::P2};
                }
                break;
            }
            case BoundaryCategory::AgentMemory: {
                const AgentDecl* agent = spec.find_agent(b.source);
                if (agent && spec.grant(agent->phase, b.destination)) {
                    b.status = BoundaryStatus::Retained;
                    b.mechanisms.principles = {Principle::P4, Principle::P5};
                } else {
                    b.status = BoundaryStatus::Eliminated;
                    b.mechanisms.principles = {Principle::P5};
                }
                break;
            }
            case BoundaryCategory::AgentAgent: {
                const AgentDecl* from = spec.find_agent(b.source);
                const AgentDecl* to = spec.find_agent(b.destination);
                b.mechanisms.host_mediated = true;
                if (from && to && spec.has_handoff(from->phase, to->phase)) {
                    b.status = BoundaryStatus::Retained;
                    b.mechanisms.principles = {Principle::P1, Principle::P3};
                } else {
                    b.status = BoundaryStatus::Eliminated;
                    b.mechanisms.principles = {};
                }
                break;
            }
            case BoundaryCategory::FeedMemory: {
                const FeedRoute* route = spec.route_for(b.source);
                if (route && route->retained) {
                    b.status = BoundaryStatus::Retained;
                    b.mechanisms.principles = {Principle::P4, Principle::P5};
                } else {
                    b.status = BoundaryStatus::Eliminated;
                    b.mechanisms.principles = {Principle::P5};
                }
                break;
            }
        }
    }
    return out;
}

struct IncompleteEnumeration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CategoryCounts {
    long flat = 0;
    long scoped = 0;
    long eliminated = 0;
};

struct Ratio {
    long num = 0;
    long den = 1;

    // Half-up integer percentage; exact value carried as the rational.
    long percent() const { return den == 0 ? 0 : (num * 100 * 2 + den) / (2 * den); }
    bool operator==(const Ratio&) const = default;
};

struct BoundaryReport {
    std::map<BoundaryCategory, CategoryCounts> per_category;
    long total_flat = 0;
    long total_scoped = 0;
    long total_eliminated = 0;
    Ratio reduction;
};

inline BoundaryReport summarize(const std::vector<TrustBoundary>& boundaries) {
    std::set<std::tuple<BoundaryCategory, std::string, std::string>> seen;
    BoundaryReport report;
    for (BoundaryCategory c : kAllCategories) report.per_category[c] = {};
    for (const auto& b : boundaries) {
        if (!seen.insert({b.category, b.source, b.destination}).second) {
            throw IncompleteEnumeration("duplicate boundary: " + to_string(b.category) + " " +
                                        b.source + " -> " + b.destination);
        }
        auto& counts = report.per_category[b.category];
        counts.flat += 1;
        if (b.status == BoundaryStatus::Retained) {
            counts.scoped += 1;
        } else {
            counts.eliminated += 1;
        }
    }
    for (const auto& [cat, counts] : report.per_category) {
        (void)cat;
        report.total_flat += counts.flat;
        report.total_scoped += counts.scoped;
        report.total_eliminated += counts.eliminated;
    }
    report.reduction = {report.total_eliminated, report.total_flat == 0 ? 1 : report.total_flat};
    return report;
}

struct Discrepancy {
    std::size_t row = 0;  // 1-based, in enumeration order
    TrustBoundary expected;
    TrustBoundary actual;
    std::string note;
};

// Row-for-row comparison against a golden enumeration covering the same spec.
inline std::vector<Discrepancy> diff_against_fixture(const std::vector<TrustBoundary>& boundaries,
                                                     const std::vector<TrustBoundary>& fixture) {
    std::vector<Discrepancy> out;
    const std::size_t n = std::min(boundaries.size(), fixture.size());
    for (std::size_t i = 0; i < n; ++i) {
        const TrustBoundary& actual = boundaries[i];
        const TrustBoundary& expected = fixture[i];
        if (!actual.same_edge(expected)) {
            out.push_back({i + 1, expected, actual, "edge mismatch"});
        } else if (actual.status != expected.status) {
            out.push_back({i + 1, expected, actual, "status mismatch"});
        } else if (!(actual.mechanisms == expected.mechanisms)) {
            out.push_back({i + 1, expected, actual, "mechanism mismatch"});
        }
    }
    for (std::size_t i = n; i < std::max(boundaries.size(), fixture.size()); ++i) {
        Discrepancy d;
        d.row = i + 1;
        d.note = boundaries.size() > fixture.size() ? "extra row" : "missing row";
        if (i < boundaries.size()) d.actual = boundaries[i];
        if (i < fixture.size()) d.expected = fixture[i];
        out.push_back(d);
    }
    return out;
}

inline json boundary_to_json(const TrustBoundary& b, std::size_t row) {
    return {
        {"id", row},
        {"category", to_string(b.category)},
        {"source", b.source},
        {"destination", b.destination},
        {"status", b.status == BoundaryStatus::Retained ? "retained" : "eliminated"},
        {"mechanisms", b.mechanisms.labels()},
    };
}

inline json boundaries_to_json(const std::vector<TrustBoundary>& boundaries) {
    json rows = json::array();
    for (std::size_t i = 0; i < boundaries.size(); ++i)
        rows.push_back(boundary_to_json(boundaries[i], i + 1));
    return rows;
}

inline std::vector<TrustBoundary> boundaries_from_json(const json& rows) {
    std::vector<TrustBoundary> out;
    for (const auto& r : rows) {
        TrustBoundary b;
        b.category = category_from_string(r.at("category").get<std::string>());
        b.source = r.at("source").get<std::string>();
        b.destination = r.at("destination").get<std::string>();
        const std::string status = r.at("status").get<std::string>();
        if (status == "retained") {
            b.status = BoundaryStatus::Retained;
        } else if (status == "eliminated") {
            b.status = BoundaryStatus::Eliminated;
        } else {
            throw SchemaError("unknown boundary status: " + status);
        }
        b.mechanisms = MechanismSet::from_labels(r.at("mechanisms").get<std::vector<std::string>>());
        out.push_back(std::move(b));
    }
    return out;
}

inline const char* category_display(BoundaryCategory c) {
    switch (c) {
        case BoundaryCategory::AgentTool: return "Agent -> Tool";
        case BoundaryCategory::AgentMemory: return "Agent -> Memory";
        case BoundaryCategory::AgentAgent: return "Agent <-> Agent";
        case BoundaryCategory::ToolRespAgent: return "Tool Resp. -> Agent";
        case BoundaryCategory::FeedMemory: return "Ext. Feed -> Memory";
    }
    return "?";
}

inline std::string render_report_table(const BoundaryReport& r) {
    std::ostringstream os;
    os << "Boundary Type          Flat  Scoped  Red.\n";
    for (BoundaryCategory c : kAllCategories) {
        const CategoryCounts& counts = r.per_category.at(c);
        const Ratio red{counts.eliminated, counts.flat == 0 ? 1 : counts.flat};
        os << category_display(c);
        for (std::size_t pad = std::string(category_display(c)).size(); pad < 22; ++pad) os << ' ';
        os << ' ' << counts.flat << "  " << counts.scoped << "  " << red.percent() << "%\n";
    }
    os << "Total " << r.total_flat << " " << r.total_scoped << " " << r.reduction.percent()
       << "%\n";
    return os.str();
}

inline std::string render_report_csv(const BoundaryReport& r) {
    std::ostringstream os;
    os << "category,flat,scoped,eliminated,reduction_percent\n";
    for (BoundaryCategory c : kAllCategories) {
        const CategoryCounts& counts = r.per_category.at(c);
        const Ratio red{counts.eliminated, counts.flat == 0 ? 1 : counts.flat};
        os << to_string(c) << ',' << counts.flat << ',' << counts.scoped << ','
           << counts.eliminated << ',' << red.percent() << '\n';
    }
    os << "total," << r.total_flat << ',' << r.total_scoped << ',' << r.total_eliminated << ','
       << r.reduction.percent() << '\n';
    return os.str();
}

inline json report_to_json(const BoundaryReport& r) {
    json per = json::object();
    for (BoundaryCategory c : kAllCategories) {
        const CategoryCounts& counts = r.per_category.at(c);
        per[to_string(c)] = {
            {"flat", counts.flat}, {"scoped", counts.scoped}, {"eliminated", counts.eliminated}};
    }
    return {
        {"per_category", per},
        {"total", {{"flat", r.total_flat}, {"scoped", r.total_scoped},
                   {"eliminated", r.total_eliminated}}},
        {"reduction", {{"num", r.reduction.num}, {"den", r.reduction.den},
                       {"percent", r.reduction.percent()}}},
    };
}

}  // namespace trustplane
