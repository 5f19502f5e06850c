#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace decdm::io {

/// One audited file access.
struct AccessRecord {
    enum class Kind { read, write };
    Kind kind;
    std::filesystem::path path;
};

/// Collects every file the library opens while the scope is alive on the
/// current thread. Scopes nest; every enclosing scope receives each record.
class AuditScope {
public:
    AuditScope();
    ~AuditScope();
    AuditScope(const AuditScope&) = delete;
    AuditScope& operator=(const AuditScope&) = delete;

    const std::vector<AccessRecord>& records() const { return records_; }
    std::vector<std::filesystem::path> reads() const;
    std::vector<std::filesystem::path> writes() const;

    /// JSON array of {"kind": "read"|"write", "path": ...}.
    std::string to_json() const;

    static void record(AccessRecord::Kind kind, const std::filesystem::path& path);

private:
    std::vector<AccessRecord> records_;
    AuditScope* parent_;
};

// All library file traffic goes through these so the audit sees it.
std::vector<unsigned char> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Reads the first n bytes (fewer if the file is shorter). Audited as a read.
std::vector<unsigned char> peek_bytes(const std::filesystem::path& path, std::size_t n);

}  // namespace decdm::io
