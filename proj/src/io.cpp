#include "decdm/io.hpp"

#include <fstream>
#include <iterator>

#include "decdm/error.hpp"
#include "json.hpp"

namespace decdm::io {

namespace {

thread_local AuditScope* current_scope = nullptr;

std::filesystem::path normalized(const std::filesystem::path& p) {
    std::error_code ec;
    auto abs = std::filesystem::absolute(p, ec);
    return ec ? p.lexically_normal() : abs.lexically_normal();
}

}  // namespace

AuditScope::AuditScope() : parent_(current_scope) { current_scope = this; }

AuditScope::~AuditScope() { current_scope = parent_; }

void AuditScope::record(AccessRecord::Kind kind, const std::filesystem::path& path) {
    for (AuditScope* s = current_scope; s != nullptr; s = s->parent_) s->records_.push_back({kind, normalized(path)});
}

std::vector<std::filesystem::path> AuditScope::reads() const {
    std::vector<std::filesystem::path> out;
    for (const auto& r : records_)
        if (r.kind == AccessRecord::Kind::read) out.push_back(r.path);
    return out;
}

std::vector<std::filesystem::path> AuditScope::writes() const {
    std::vector<std::filesystem::path> out;
    for (const auto& r : records_)
        if (r.kind == AccessRecord::Kind::write) out.push_back(r.path);
    return out;
}

std::string AuditScope::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records_)
        arr.push_back({{"kind", r.kind == AccessRecord::Kind::read ? "read" : "write"},
                       {"path", r.path.string()}});
    return arr.dump(2) + "\n";
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
    AuditScope::record(AccessRecord::Kind::read, path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& path) {
    auto bytes = read_bytes(path);
    return {bytes.begin(), bytes.end()};
}

std::vector<unsigned char> peek_bytes(const std::filesystem::path& path, std::size_t n) {
    AuditScope::record(AccessRecord::Kind::read, path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    buf.resize(static_cast<std::size_t>(in.gcount()));
    return buf;
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    AuditScope::record(AccessRecord::Kind::write, path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    write_bytes(path, std::vector<unsigned char>(text.begin(), text.end()));
}

}  // namespace decdm::io
