#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace spreadcast::util {

/// Incremental SHA-256, hex digest.
class Hasher {
public:
    Hasher();
    ~Hasher();
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;

    Hasher& add(std::string_view bytes);
    /// Adds the file's name-independent contents; MissingArchive when absent.
    Hasher& add_file(const std::filesystem::path& file);
    std::string hex();

private:
    void* ctx_;
};

}  // namespace spreadcast::util
