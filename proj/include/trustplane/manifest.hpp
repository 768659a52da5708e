#pragma once

#include "trustplane/canonical.hpp"
#include "trustplane/crypto.hpp"
#include "trustplane/model.hpp"

#include <string>
#include <vector>

namespace trustplane {

struct ManifestOperation {
    std::string name;
    std::vector<std::string> param_fields;

    std::string schema_digest() const {
        return sha256_hex(canonicalize(json{{"op", name}, {"params", param_fields}}));
    }
};

struct ManifestTool {
    std::string id;
    std::vector<ManifestOperation> operations;
};

struct ManifestBody {
    std::string server_id;
    std::string phase;
    std::vector<ManifestTool> tools;
    std::uint64_t version = 1;
    std::string issuer_key_id;

    json to_json() const {
        json tools_json = json::array();
        for (const auto& t : tools) {
            json ops = json::array();
            for (const auto& op : t.operations) {
                ops.push_back({{"name", op.name},
                               {"params", op.param_fields},
                               {"schema_digest", op.schema_digest()}});
            }
            tools_json.push_back({{"id", t.id}, {"operations", ops}});
        }
        return {{"server_id", server_id},
                {"phase", phase},
                {"tools", tools_json},
                {"version", version},
                {"issuer_key_id", issuer_key_id}};
    }

    static ManifestBody from_json(const json& doc) {
        ManifestBody body;
        body.server_id = doc.at("server_id").get<std::string>();
        body.phase = doc.at("phase").get<std::string>();
        body.version = doc.at("version").get<std::uint64_t>();
        body.issuer_key_id = doc.at("issuer_key_id").get<std::string>();
        for (const auto& t : doc.at("tools")) {
            ManifestTool tool;
            tool.id = t.at("id").get<std::string>();
            for (const auto& op : t.at("operations")) {
                ManifestOperation parsed{op.at("name").get<std::string>(),
                                         op.at("params").get<std::vector<std::string>>()};
                if (op.at("schema_digest").get<std::string>() != parsed.schema_digest()) {
                    throw SchemaError("schema digest mismatch for operation " + parsed.name);
                }
                tool.operations.push_back(std::move(parsed));
            }
            body.tools.push_back(std::move(tool));
        }
        return body;
    }
};

struct SignedManifest {
    ManifestBody body;
    Bytes signature;  // detached, over the canonical body serialization
};

inline SignedManifest sign_manifest(ManifestBody body, const Bytes& secret_key,
                                    const SignatureScheme& scheme = default_scheme()) {
    const std::string canonical = canonicalize(body.to_json());
    return SignedManifest{std::move(body), scheme.sign(canonical, secret_key)};
}

enum class VerifyResult { Verified, SignatureInvalid };

inline VerifyResult verify_manifest(const SignedManifest& manifest, const Bytes& public_key,
                                    const SignatureScheme& scheme = default_scheme()) {
    const std::string canonical = canonicalize(manifest.body.to_json());
    return scheme.verify(canonical, manifest.signature, public_key) ? VerifyResult::Verified
                                                                    : VerifyResult::SignatureInvalid;
}

// Manifest for one phase server, with operation schemas taken from the
// architecture's tool declarations.
inline ManifestBody manifest_for_phase(const ArchitectureSpec& spec, const std::string& phase,
                                       const std::string& server_id,
                                       const std::string& issuer_key_id,
                                       std::uint64_t version = 1) {
    ManifestBody body;
    body.server_id = server_id;
    body.phase = phase;
    body.version = version;
    body.issuer_key_id = issuer_key_id;
    auto it = spec.tool_assignments.find(phase);
    if (it != spec.tool_assignments.end()) {
        for (const auto& tool_id : it->second) {
            const ToolDecl* tool = spec.find_tool(tool_id);
            if (!tool) continue;
            ManifestTool mt;
            mt.id = tool_id;
            for (const auto& [op_name, op] : tool->operations) {
                mt.operations.push_back({op_name, op.param_fields});
            }
            body.tools.push_back(std::move(mt));
        }
    }
    return body;
}

}  // namespace trustplane
