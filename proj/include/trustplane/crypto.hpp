#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace trustplane {

using Bytes = std::vector<std::uint8_t>;

inline void crypto_init() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

inline std::string to_hex(const Bytes& data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

inline Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw std::runtime_error("odd-length hex string");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::runtime_error("invalid hex digit");
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nib(hex[2 * i]) << 4) | nib(hex[2 * i + 1]));
    }
    return out;
}

inline std::string to_base64(const Bytes& data) {
    crypto_init();
    std::string out(sodium_base64_encoded_len(data.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
    sodium_bin2base64(out.data(), out.size(), data.data(), data.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(out.find('\0') == std::string::npos ? out.size() : out.find('\0'));
    return out;
}

inline Bytes from_base64(const std::string& text) {
    crypto_init();
    Bytes out(text.size());
    std::size_t len = 0;
    if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len,
                          nullptr, sodium_base64_VARIANT_ORIGINAL) != 0) {
        throw std::runtime_error("invalid base64");
    }
    out.resize(len);
    return out;
}

// SHA-256 digest, hex encoded. The marker digest for the head of an audit
// chain is the all-zero digest of the same width.
inline std::string sha256_hex(const std::string& data) {
    crypto_init();
    std::array<std::uint8_t, crypto_hash_sha256_BYTES> digest{};
    crypto_hash_sha256(digest.data(),
                       reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
    return to_hex(Bytes(digest.begin(), digest.end()));
}

inline std::string zero_digest_hex() {
    return std::string(crypto_hash_sha256_BYTES * 2, '0');
}

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

// Detached-signature scheme abstraction. Production code uses Ed25519;
// tests may substitute the deterministic toy scheme below.
class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual std::string name() const = 0;
    virtual KeyPair generate(const std::string& seed_material) const = 0;
    virtual Bytes sign(const std::string& message, const Bytes& secret_key) const = 0;
    virtual bool verify(const std::string& message, const Bytes& signature,
                        const Bytes& public_key) const = 0;
};

class Ed25519Scheme final : public SignatureScheme {
public:
    std::string name() const override { return "ed25519"; }

    KeyPair generate(const std::string& seed_material) const override {
        crypto_init();
        std::array<std::uint8_t, crypto_sign_SEEDBYTES> seed{};
        crypto_hash_sha256(seed.data(),
                           reinterpret_cast<const std::uint8_t*>(seed_material.data()),
                           seed_material.size());
        KeyPair kp;
        kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
        kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
        crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
        return kp;
    }

    Bytes sign(const std::string& message, const Bytes& secret_key) const override {
        crypto_init();
        Bytes sig(crypto_sign_BYTES);
        unsigned long long len = 0;
        if (crypto_sign_detached(sig.data(), &len,
                                 reinterpret_cast<const std::uint8_t*>(message.data()),
                                 message.size(), secret_key.data()) != 0) {
            throw std::runtime_error("ed25519 signing failed");
        }
        sig.resize(len);
        return sig;
    }

    bool verify(const std::string& message, const Bytes& signature,
                const Bytes& public_key) const override {
        crypto_init();
        if (signature.size() != crypto_sign_BYTES ||
            public_key.size() != crypto_sign_PUBLICKEYBYTES) {
            return false;
        }
        return crypto_sign_verify_detached(
                   signature.data(),
                   reinterpret_cast<const std::uint8_t*>(message.data()), message.size(),
                   public_key.data()) == 0;
    }
};

// Keyed-hash stand-in for unit tests. Public and secret key are the same
// bytes; a signature is SHA-256(key || message). Not secure, but fully
// deterministic and dependency-light.
class ToyScheme final : public SignatureScheme {
public:
    std::string name() const override { return "toy"; }

    KeyPair generate(const std::string& seed_material) const override {
        const Bytes key = from_hex(sha256_hex("toy-key:" + seed_material));
        return KeyPair{key, key};
    }

    Bytes sign(const std::string& message, const Bytes& secret_key) const override {
        return from_hex(sha256_hex(to_hex(secret_key) + "|" + message));
    }

    bool verify(const std::string& message, const Bytes& signature,
                const Bytes& public_key) const override {
        return signature == sign(message, public_key);
    }
};

inline const SignatureScheme& default_scheme() {
    static const Ed25519Scheme scheme;
    return scheme;
}

}  // namespace trustplane
