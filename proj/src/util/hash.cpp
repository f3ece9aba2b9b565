#include "spreadcast/util/hash.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include "spreadcast/errors.hpp"

namespace spreadcast::util {

namespace {
EVP_MD_CTX* ctx(void* p) { return static_cast<EVP_MD_CTX*>(p); }
}  // namespace

Hasher::Hasher() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx(ctx_), EVP_sha256(), nullptr); }

Hasher::~Hasher() { EVP_MD_CTX_free(ctx(ctx_)); }

Hasher& Hasher::add(std::string_view bytes) {
    // length prefix keeps ("ab", "c") and ("a", "bc") apart
    const std::string len = std::to_string(bytes.size()) + ":";
    EVP_DigestUpdate(ctx(ctx_), len.data(), len.size());
    EVP_DigestUpdate(ctx(ctx_), bytes.data(), bytes.size());
    return *this;
}

Hasher& Hasher::add_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw MissingArchive(file.string() + " cannot be read");
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return add(data);
}

std::string Hasher::hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int n = 0;
    EVP_DigestFinal_ex(ctx(ctx_), md.data(), &n);
    std::string out(2 * n, '0');
    for (unsigned int i = 0; i < n; ++i) std::snprintf(&out[2 * i], 3, "%02x", md[i]);
    return out;
}

}  // namespace spreadcast::util
