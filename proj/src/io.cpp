#include "socmov/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

namespace socmov {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// Calls `fn(line_number, line)` for every non-empty line, stripping '\r'.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (!line.empty()) fn(line_no, line);
        pos = end + 1;
    }
}

double parse_real(std::string_view field, std::size_t line, const char* what) {
    double v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
    return v;
}

long parse_integer(std::string_view field, std::size_t line, const char* what) {
    long v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
    return v;
}

}  // namespace

std::string trajectory_csv(const MlmdDataset& data) {
    std::string out = "t,label,x,y\n";
    for (int t = 0; t < data.steps(); ++t) {
        const auto& f = data.frames[t];
        for (std::size_t k = 0; k < f.labels.size(); ++k) {
            const auto row = static_cast<Eigen::Index>(k);
            out += std::to_string(t + 1);
            out += ',';
            out += data.label_names[f.labels[k]];
            out += ',';
            out += format_double(f.positions(row, 0));
            out += ',';
            out += format_double(f.positions(row, 1));
            out += '\n';
        }
    }
    return out;
}

MlmdDataset parse_trajectory_csv(std::string_view text) {
    struct Row {
        long t;
        std::string label;
        double x, y;
        std::size_t line;
    };
    std::vector<Row> rows;
    bool header = false;
    for_each_line(text, [&](std::size_t line, std::string_view content) {
        const auto fields = split_fields(content);
        if (!header) {
            if (fields.size() != 4 || fields[0] != "t" || fields[1] != "label" || fields[2] != "x" || fields[3] != "y")
                throw ParseError(line, "expected header 't,label,x,y'");
            header = true;
            return;
        }
        if (fields.size() != 4) throw ParseError(line, "expected 4 fields, found " + std::to_string(fields.size()));
        const long t = parse_integer(fields[0], line, "time index");
        if (t < 1) throw ParseError(line, "time index must be >= 1");
        if (fields[1].empty()) throw ParseError(line, "empty label");
        rows.push_back({t, std::string(fields[1]), parse_real(fields[2], line, "x"),
                        parse_real(fields[3], line, "y"), line});
    });
    if (!header) throw ParseError(1, "missing header");

    long horizon = 0;
    for (const auto& r : rows) horizon = std::max(horizon, r.t);

    // Ids by first appearance time, ties by file order.
    std::map<std::string, std::pair<long, std::size_t>> first_seen;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto [it, inserted] = first_seen.try_emplace(rows[k].label, rows[k].t, k);
        if (!inserted && std::pair{rows[k].t, k} < it->second) it->second = {rows[k].t, k};
    }
    std::vector<std::pair<std::pair<long, std::size_t>, std::string>> order;
    for (const auto& [label, key] : first_seen) order.emplace_back(key, label);
    std::sort(order.begin(), order.end());

    MlmdDataset data;
    std::map<std::string, int> id_of;
    for (const auto& [key, label] : order) {
        id_of.emplace(label, data.label_count());
        data.label_names.push_back(label);
    }

    std::vector<std::map<int, std::pair<double, double>>> by_time(static_cast<std::size_t>(horizon));
    std::vector<std::set<long>> times(data.label_names.size());
    std::vector<std::size_t> last_line(data.label_names.size(), 0);
    for (const auto& r : rows) {
        const int id = id_of.at(r.label);
        if (!by_time[r.t - 1].emplace(id, std::pair{r.x, r.y}).second)
            throw ParseError(r.line, "duplicate row for label '" + r.label + "' at t=" + std::to_string(r.t));
        times[id].insert(r.t);
        last_line[id] = std::max(last_line[id], r.line);
    }
    for (std::size_t id = 0; id < times.size(); ++id) {
        const auto& ts = times[id];
        if (static_cast<long>(ts.size()) != *ts.rbegin() - *ts.begin() + 1)
            throw ParseError(last_line[id], "label '" + data.label_names[id] + "' is not observed on contiguous steps");
    }

    data.frames.resize(static_cast<std::size_t>(horizon));
    for (long t = 0; t < horizon; ++t) {
        auto& f = data.frames[t];
        f.positions.resize(static_cast<Eigen::Index>(by_time[t].size()), 2);
        Eigen::Index k = 0;
        for (const auto& [id, xy] : by_time[t]) {
            f.labels.push_back(id);
            f.positions(k, 0) = xy.first;
            f.positions(k, 1) = xy.second;
            ++k;
        }
    }
    return data;
}

std::string network_csv(const DynamicNetwork& network, const std::vector<std::string>& names) {
    std::string out = "t,label_i,label_j\n";
    for (int t = 0; t < network.steps(); ++t) {
        const auto& w = network.frames[t];
        for (int i = 0; i < w.size(); ++i)
            for (int j = i + 1; j < w.size(); ++j)
                if (w(i, j)) out += std::to_string(t + 1) + ',' + names[i] + ',' + names[j] + '\n';
    }
    return out;
}

std::string label_map_csv(const MlmdDataset& data, const std::vector<std::string>& individual_names) {
    std::string out = "label,individual\n";
    for (int l = 0; l < data.label_count(); ++l) {
        std::string who = "NA";
        if (!data.truth.empty())
            who = individual_names.empty() ? std::to_string(data.truth[l] + 1) : individual_names.at(data.truth[l]);
        out += data.label_names[l] + ',' + who + '\n';
    }
    return out;
}

std::string chain_csv(const PosteriorSamples& samples) {
    std::string out = "iteration";
    for (const auto& n : samples.names) out += ',' + n;
    out += '\n';
    for (Eigen::Index r = 0; r < samples.draws.rows(); ++r) {
        out += std::to_string(samples.iterations[r]);
        for (Eigen::Index c = 0; c < samples.draws.cols(); ++c) out += ',' + format_double(samples.draws(r, c));
        out += '\n';
    }
    return out;
}

ChainTable parse_chain_csv(std::string_view text) {
    ChainTable table;
    std::vector<std::vector<double>> rows;
    for_each_line(text, [&](std::size_t line, std::string_view content) {
        const auto fields = split_fields(content);
        if (table.names.empty()) {
            if (fields.size() < 2 || fields[0] != "iteration")
                throw ParseError(line, "expected header starting with 'iteration'");
            for (std::size_t k = 1; k < fields.size(); ++k) table.names.emplace_back(fields[k]);
            return;
        }
        if (fields.size() != table.names.size() + 1)
            throw ParseError(line, "expected " + std::to_string(table.names.size() + 1) + " fields");
        table.iterations.push_back(static_cast<int>(parse_integer(fields[0], line, "iteration")));
        std::vector<double> row;
        for (std::size_t k = 1; k < fields.size(); ++k) row.push_back(parse_real(fields[k], line, "draw"));
        rows.push_back(std::move(row));
    });
    if (table.names.empty()) throw ParseError(1, "missing header");
    table.draws.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

std::vector<PositionFrame> frames_of(const MlmdDataset& data) {
    if (!data.uncensored()) throw std::invalid_argument("dataset is censored");
    std::vector<PositionFrame> out;
    for (const auto& f : data.frames) out.push_back(f.positions);
    return out;
}

}  // namespace socmov
