#include "cgvm/sha256.hpp"

#include <fstream>

#include <openssl/evp.h>

#include "cgvm/errors.hpp"

namespace cgvm {

namespace {

std::string digest_hex(const void* data, size_t len) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (!EVP_Digest(data, len, md, &md_len, EVP_sha256(), nullptr)) {
        throw Error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

}  // namespace

std::string sha256_hex(const std::vector<uint8_t>& bytes) {
    return digest_hex(bytes.data(), bytes.size());
}

std::string sha256_hex(const std::string& bytes) {
    return digest_hex(bytes.data(), bytes.size());
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path);
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

}  // namespace cgvm
