#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace revinv {

enum class SourceLanguage { Solidity, Vyper };

/// Verified source for one deployed contract.
struct SourceBundle {
    std::string contract_address;  // 0x-prefixed, lowercase
    SourceLanguage language = SourceLanguage::Solidity;
    std::map<std::string, std::string> files;  // relative path -> source text

    /// Throws ArgumentError if the file is not part of the bundle.
    const std::string& file(const std::string& path) const;
};

/// Bundles keyed by lowercase contract address.
class SourceCatalog {
public:
    SourceCatalog() = default;

    /// Reads `<root>/<address>/meta.json` plus the files it lists.
    /// A missing root directory yields an empty catalog.
    static SourceCatalog load(const std::filesystem::path& root);

    void add(SourceBundle bundle);
    const SourceBundle* find(const std::string& address) const;
    bool contains(const std::string& address) const { return find(address) != nullptr; }
    std::size_t size() const { return bundles_.size(); }

private:
    std::map<std::string, SourceBundle> bundles_;
};

std::string to_lower(std::string text);

}  // namespace revinv
