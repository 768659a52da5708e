#pragma once

#include "trustplane/canonical.hpp"
#include "trustplane/model.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trustplane {

struct ToolCall {
    std::string tool;
    std::string operation;
    json params = json::object();
};

// The verify-first, execute-later unit: a proposed tool action plus the
// context needed to judge it.
struct ActionProposal {
    std::string proposer;  // agent id, or an unverified origin label
    ToolCall call;
    ActionClass action_class = ActionClass::Reversible;
    std::vector<std::string> context_refs;
    std::string plan_summary;
};

enum class VoteKind { Approve, Reject, Abstain };

struct Vote {
    std::string validator;
    VoteKind kind = VoteKind::Abstain;
    std::string reason;
};

struct ConsensusConfig {
    int threshold_reversible = 2;
    // Irreversible actions default to unanimity: threshold = validator count.
    std::optional<int> threshold_irreversible;
};

enum class ConsensusOutcome { Approved, Escalated };

struct ConsensusVerdict {
    std::vector<Vote> votes;
    int validators = 0;
    int threshold = 0;
    ConsensusOutcome outcome = ConsensusOutcome::Escalated;
};

struct Validator {
    std::string id;
    // Deterministic policy predicate. A throwing validator counts as Reject.
    std::function<Vote(const ActionProposal&)> evaluate;
};

inline ConsensusVerdict run_consensus(const ActionProposal& proposal,
                                      const std::vector<Validator>& validators,
                                      const ConsensusConfig& config) {
    if (validators.empty()) throw std::invalid_argument("consensus requires at least one validator");
    const int n = static_cast<int>(validators.size());
    int k = proposal.action_class == ActionClass::Irreversible
                ? config.threshold_irreversible.value_or(n)
                : config.threshold_reversible;
    if (k < 1 || k > n) throw std::invalid_argument("quorum threshold out of range");

    ConsensusVerdict verdict;
    verdict.validators = n;
    verdict.threshold = k;
    int approvals = 0;
    for (const auto& v : validators) {
        Vote vote;
        try {
            vote = v.evaluate(proposal);
            vote.validator = v.id;
        } catch (const std::exception& e) {
            vote = {v.id, VoteKind::Reject, std::string("validator failure: ") + e.what()};
        }
        if (vote.kind == VoteKind::Approve) ++approvals;
        verdict.votes.push_back(std::move(vote));
    }
    // Abstain counts toward neither side; failing to reach k escalates.
    verdict.outcome = approvals >= k ? ConsensusOutcome::Approved : ConsensusOutcome::Escalated;
    return verdict;
}

inline json verdict_to_json(const ConsensusVerdict& v) {
    json votes = json::array();
    for (const auto& vote : v.votes) {
        const char* kind = vote.kind == VoteKind::Approve  ? "approve"
                           : vote.kind == VoteKind::Reject ? "reject"
                                                           : "abstain";
        votes.push_back({{"validator", vote.validator}, {"vote", kind}, {"reason", vote.reason}});
    }
    return {{"votes", votes},
            {"validators", v.validators},
            {"threshold", v.threshold},
            {"outcome", v.outcome == ConsensusOutcome::Approved ? "approved" : "escalated"}};
}

}  // namespace trustplane
