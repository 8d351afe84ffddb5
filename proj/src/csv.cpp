#include "genmotif/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

namespace genmotif {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return cells;
}

std::optional<double> parse_cell(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

}  // namespace

TimeSeries parse_csv(const std::string& text) {
    std::vector<double> values;
    std::size_t dims = 0;
    std::size_t line_no = 0;
    bool first_content_row = true;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        const auto cells = split_cells(line);

        std::vector<double> row;
        row.reserve(cells.size());
        std::optional<std::size_t> bad_cell;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto v = parse_cell(cells[i]);
            if (!v) {
                bad_cell = i;
                break;
            }
            row.push_back(*v);
        }

        if (first_content_row) {
            first_content_row = false;
            if (bad_cell) {
                // header row
                dims = cells.size();
                continue;
            }
        }
        if (bad_cell) {
            throw CsvError(line_no, "cannot parse cell " + std::to_string(*bad_cell + 1) + " ('" +
                                        std::string(cells[*bad_cell]) + "') as a number");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!std::isfinite(row[i]))
                throw CsvError(line_no, "cell " + std::to_string(i + 1) + " is not finite");
        }
        if (dims == 0) dims = row.size();
        if (row.size() != dims) {
            throw CsvError(line_no, "expected " + std::to_string(dims) + " columns, found " +
                                        std::to_string(row.size()));
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    if (values.empty()) throw CsvError(line_no, "no numeric rows found");
    return TimeSeries(std::move(values), dims);
}

TimeSeries read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void write_csv(const TimeSeries& z, const std::string& path, const std::vector<std::string>& header) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        if (!header.empty()) {
            for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
            out << '\n';
        }
        char buf[32];
        for (std::size_t t = 1; t <= z.length(); ++t) {
            for (std::size_t k = 0; k < z.dims(); ++k) {
                if (k) out << ',';
                const auto res = std::to_chars(buf, buf + sizeof buf, z.at(static_cast<std::int64_t>(t), k));
                out.write(buf, res.ptr - buf);
            }
            out << '\n';
        }
        if (!out) throw std::runtime_error("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace genmotif
