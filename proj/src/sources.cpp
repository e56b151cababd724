#include "revinv/sources.hpp"

#include "revinv/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace revinv {

namespace fs = std::filesystem;

std::string to_lower(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    return text;
}

const std::string& SourceBundle::file(const std::string& path) const {
    auto it = files.find(path);
    if (it == files.end()) {
        throw ArgumentError("extract", "file '" + path + "' not in source bundle " + contract_address);
    }
    return it->second;
}

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("extract", "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

SourceLanguage parse_language(const std::string& name, const fs::path& meta) {
    const std::string lower = to_lower(name);
    if (lower == "solidity") return SourceLanguage::Solidity;
    if (lower == "vyper") return SourceLanguage::Vyper;
    throw FormatError("extract", meta.string() + ": unknown language '" + name + "'");
}

}  // namespace

SourceCatalog SourceCatalog::load(const fs::path& root) {
    SourceCatalog catalog;
    if (!fs::is_directory(root)) return catalog;

    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());

    for (const auto& dir : dirs) {
        const fs::path meta_path = dir / "meta.json";
        if (!fs::exists(meta_path)) continue;

        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(read_text(meta_path));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("extract", meta_path.string() + ": " + e.what());
        }

        SourceBundle bundle;
        bundle.contract_address = to_lower(dir.filename().string());
        bundle.language = parse_language(meta.value("language", std::string{"solidity"}), meta_path);
        if (!meta.contains("files") || !meta["files"].is_array()) {
            throw FormatError("extract", meta_path.string() + ": missing 'files' array");
        }
        for (const auto& name : meta["files"]) {
            const auto rel = name.get<std::string>();
            bundle.files.emplace(rel, read_text(dir / rel));
        }
        catalog.add(std::move(bundle));
    }
    return catalog;
}

void SourceCatalog::add(SourceBundle bundle) {
    bundle.contract_address = to_lower(bundle.contract_address);
    auto key = bundle.contract_address;
    bundles_.insert_or_assign(std::move(key), std::move(bundle));
}

const SourceBundle* SourceCatalog::find(const std::string& address) const {
    auto it = bundles_.find(to_lower(address));
    return it == bundles_.end() ? nullptr : &it->second;
}

}  // namespace revinv
