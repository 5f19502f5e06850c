#include "decdm/hashing.hpp"

#include <memory>

#include <openssl/evp.h>

#include "decdm/error.hpp"

namespace decdm {

namespace {

std::string digest_hex(const EVP_MD* md, std::span<const unsigned char> prefix, std::span<const unsigned char> bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), prefix.data(), prefix.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out, &len) != 1)
        throw Error(ExitCode::numeric, "digest computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[out[i] >> 4];
        hex += kHex[out[i] & 0xF];
    }
    return hex;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) { return digest_hex(EVP_sha256(), {}, bytes); }

std::string git_blob_hex(std::span<const unsigned char> bytes) {
    const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
    return digest_hex(EVP_sha1(),
                      std::span(reinterpret_cast<const unsigned char*>(header.data()), header.size()), bytes);
}

}  // namespace decdm
