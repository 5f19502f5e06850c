#include "decdm/samples.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "decdm/error.hpp"
#include "decdm/io.hpp"

namespace decdm {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t row) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ProtocolError(path.string() + ": bad number '" + s + "' on data row " + std::to_string(row));
    return v;
}

}  // namespace

void write_sample_csv(const std::filesystem::path& path, const SampleTable& table) {
    const auto dim = table.values.rows();
    const bool labelled = !table.labels.empty();
    if (labelled && static_cast<Eigen::Index>(table.labels.size()) != table.values.cols())
        throw ConfigError("label count does not match sample count");
    std::string out;
    for (Eigen::Index d = 0; d < dim; ++d) {
        if (d) out += ',';
        if (dim == 2) out += d == 0 ? "x" : "y";
        else out += "v" + std::to_string(d);
    }
    if (labelled) out += dim ? ",label" : "label";
    out += '\n';
    char buf[32];
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
        for (Eigen::Index d = 0; d < dim; ++d) {
            if (d) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", table.values(d, j));
            out += buf;
        }
        if (labelled) out += (dim ? "," : "") + std::to_string(table.labels[static_cast<std::size_t>(j)]);
        out += '\n';
    }
    io::write_text(path, out);
}

SampleTable read_sample_csv(const std::filesystem::path& path) {
    std::istringstream in(io::read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw ProtocolError(path.string() + ": empty sample file");
    const auto header = split(line);
    std::size_t dim = header.size();
    const bool labelled = !header.empty() && header.back() == "label";
    if (labelled) --dim;

    std::vector<double> flat;
    std::vector<int> labels;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw ProtocolError(path.string() + ": row " + std::to_string(rows) + " has " +
                                std::to_string(cells.size()) + " columns, header has " +
                                std::to_string(header.size()));
        for (std::size_t d = 0; d < dim; ++d) flat.push_back(parse_double(cells[d], path, rows));
        if (labelled) labels.push_back(static_cast<int>(parse_double(cells.back(), path, rows)));
        ++rows;
    }
    SampleTable table;
    table.values = Eigen::Map<Eigen::MatrixXd>(flat.data(), static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(rows));
    table.labels = std::move(labels);
    return table;
}

}  // namespace decdm
