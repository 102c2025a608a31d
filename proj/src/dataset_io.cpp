#include "spar/dataset_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "spar/error.hpp"

namespace spar {

std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_dataset_csv(std::ostream& out, const Dataset& data)
{
    data.validate();
    for (Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.p(); ++j) out << format_double(data.X(i, j)) << ',';
        out << format_double(data.y(i)) << '\n';
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    for (auto& c : cells) {
        while (!c.empty() && (c.front() == ' ' || c.front() == '"')) c.remove_prefix(1);
        while (!c.empty() && (c.back() == ' ' || c.back() == '"' || c.back() == '\r')) c.remove_suffix(1);
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t row)
{
    double value = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw Error(ErrorCode::ParseError, "non-numeric cell '" + std::string(cell) + "' on data row " + std::to_string(row));
    return value;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

RawTable read_table(std::istream& in)
{
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty CSV input");
    for (auto c : split(line)) t.header.emplace_back(c);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                                   " cells, header has " + std::to_string(t.header.size()));
        std::vector<double> values;
        values.reserve(cells.size());
        for (auto c : cells) values.push_back(parse_cell(c, row));
        t.rows.push_back(std::move(values));
    }
    return t;
}

} // namespace

Dataset read_dataset_csv(std::istream& in)
{
    const RawTable t = read_table(in);
    std::size_t y_col = t.header.size();
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == "y") y_col = c;
    if (y_col == t.header.size()) throw Error(ErrorCode::ParseError, "CSV has no 'y' column");
    const auto n = static_cast<Index>(t.rows.size());
    const auto p = static_cast<Index>(t.header.size() - 1);
    Dataset d;
    d.X.resize(n, p);
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        Index j = 0;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c == y_col) d.y(i) = t.rows[static_cast<std::size_t>(i)][c];
            else d.X(i, j++) = t.rows[static_cast<std::size_t>(i)][c];
        }
    }
    return d;
}

Matrix read_predictors_csv(std::istream& in)
{
    const RawTable t = read_table(in);
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] != "y") cols.push_back(c);
    Matrix X(static_cast<Index>(t.rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) X(static_cast<Index>(i), static_cast<Index>(j)) = t.rows[i][cols[j]];
    return X;
}

std::string truth_to_json(const Truth& truth)
{
    nlohmann::json doc;
    doc["beta"] = std::vector<double>(truth.beta.data(), truth.beta.data() + truth.beta.size());
    doc["mu"] = truth.mu;
    doc["sigma2"] = truth.sigma2;
    doc["active_set"] = truth.active_set;
    return doc.dump(2) + "\n";
}

Truth truth_from_json(std::string_view text)
{
    try {
        const auto doc = nlohmann::json::parse(text);
        Truth t;
        const auto beta = doc.at("beta").get<std::vector<double>>();
        t.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
        t.mu = doc.at("mu").get<double>();
        t.sigma2 = doc.at("sigma2").get<double>();
        t.active_set = doc.at("active_set").get<IndexSet>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace spar
