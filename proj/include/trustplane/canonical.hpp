#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace trustplane {

using json = nlohmann::json;

struct UncanonicalizableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic byte encoding of a JSON value: object keys sorted
// lexicographically, UTF-8, no insignificant whitespace. Equal values
// produce equal bytes, which is what signing and hashing rely on.
inline std::string canonicalize(const json& value) {
    if (value.is_discarded()) {
        throw UncanonicalizableError("cannot canonicalize discarded JSON value");
    }
    // nlohmann::json keeps object members in sorted key order already;
    // reject non-finite numbers, which have no JSON representation.
    const std::function<void(const json&)> check = [&](const json& v) {
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (!std::isfinite(d)) {
                throw UncanonicalizableError("non-finite number in value");
            }
        } else if (v.is_binary()) {
            throw UncanonicalizableError("binary values are not canonicalizable");
        } else if (v.is_object() || v.is_array()) {
            for (const auto& item : v) check(item);
        }
    };
    check(value);
    return value.dump();
}

}  // namespace trustplane
