#include "cspc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "cspc/format.hpp"

namespace cspc {

namespace {

std::vector<std::string_view> split_fields(std::string_view row) {
    const char delim = row.find('\t') != std::string_view::npos ? '\t' : ',';
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = row.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.push_back(row.substr(start));
            break;
        }
        fields.push_back(row.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail_line(std::string_view source, std::size_t lineno, const char* what) {
    throw std::runtime_error(std::string(source) + ":" + std::to_string(lineno) + ": " + what);
}

double parse_double(std::string_view field, std::string_view source, std::size_t lineno) {
    field = trim(field);
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        fail_line(source, lineno, "cannot parse number");
    if (!std::isfinite(value))
        fail_line(source, lineno, "non-finite value");
    return value;
}

bool is_x_header(const std::vector<std::string_view>& names) {
    // x,y / x1,...,xd,y
    if (names.size() < 2 || names.back() != "y")
        return false;
    for (std::size_t i = 0; i + 1 < names.size(); ++i) {
        if (names[i] == "x" && names.size() == 2)
            continue;
        if (names[i] != "x" + std::to_string(i + 1))
            return false;
    }
    return true;
}

bool is_vector_header(const std::vector<std::string_view>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] != "v" + std::to_string(i + 1))
            return false;
    return !names.empty();
}

} // namespace

std::size_t dataset::size() const {
    switch (kind) {
    case dataset_kind::individuals: return individuals.size();
    case dataset_kind::subgroups: return subgroups.size();
    case dataset_kind::labeled: return labeled.size();
    case dataset_kind::vectors: return vectors.size();
    }
    return 0;
}

dataset parse_dataset(std::string_view text, std::string_view source_name) {
    std::vector<std::string_view> rows;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            rows.push_back(text.substr(start));
            break;
        }
        rows.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    while (!rows.empty() && trim(rows.back()).empty())
        rows.pop_back();
    if (rows.empty())
        fail_line(source_name, 1, "missing header row");

    auto header = split_fields(rows[0]);
    for (auto& h : header)
        h = trim(h);

    dataset ds;
    if (header.size() == 1 && header[0] == "value") {
        ds.kind = dataset_kind::individuals;
    } else if (header.size() == 2 && header[0] == "subgroup" && header[1] == "value") {
        ds.kind = dataset_kind::subgroups;
    } else if (is_x_header(header)) {
        ds.kind = dataset_kind::labeled;
    } else if (is_vector_header(header)) {
        ds.kind = dataset_kind::vectors;
    } else {
        fail_line(source_name, 1, "unrecognized header");
    }

    std::int64_t next_index = 0;
    std::string current_group;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t lineno = r + 1;
        if (trim(rows[r]).empty())
            continue;
        auto fields = split_fields(rows[r]);
        if (fields.size() != header.size())
            fail_line(source_name, lineno, "wrong field count");

        switch (ds.kind) {
        case dataset_kind::individuals:
            ds.individuals.push_back({next_index++, parse_double(fields[0], source_name, lineno)});
            break;
        case dataset_kind::subgroups: {
            const std::string id(trim(fields[0]));
            if (id.empty())
                fail_line(source_name, lineno, "empty subgroup id");
            if (ds.subgroups.empty() || id != current_group) {
                ds.subgroups.push_back({next_index++, {}});
                current_group = id;
            }
            ds.subgroups.back().values.push_back(parse_double(fields[1], source_name, lineno));
            break;
        }
        case dataset_kind::labeled: {
            labeled_point p;
            p.x.reserve(fields.size() - 1);
            for (std::size_t i = 0; i + 1 < fields.size(); ++i)
                p.x.push_back(parse_double(fields[i], source_name, lineno));
            p.y = parse_double(fields.back(), source_name, lineno);
            ds.labeled.push_back(std::move(p));
            break;
        }
        case dataset_kind::vectors: {
            process_vector v;
            v.index = next_index++;
            v.components.reserve(fields.size());
            for (const auto& f : fields)
                v.components.push_back(parse_double(f, source_name, lineno));
            ds.vectors.push_back(std::move(v));
            break;
        }
        }
    }
    if (ds.size() == 0)
        fail_line(source_name, rows.size(), "no data rows");
    return ds;
}

dataset read_dataset(const std::filesystem::path& path) {
    return parse_dataset(read_file(path), path.string());
}

std::string format_chart_series(const chart_series& series) {
    std::string out = "# kind=" + std::string(to_string(series.kind));
    if (series.alpha)
        out += " alpha=" + fmt_shortest(*series.alpha);
    if (series.limit)
        out += " q=" + fmt_shortest(*series.limit);
    if (series.width_limit)
        out += " width_limit=" + fmt_shortest(*series.width_limit);
    if (series.shewhart)
        out += " center=" + fmt_shortest(series.shewhart->center) +
               " ucl=" + fmt_shortest(series.shewhart->ucl) +
               " lcl=" + fmt_shortest(series.shewhart->lcl);
    out += "\nindex\tvalue\tlower\tupper\tlimit_exceeded\tuncertainty_spike\n";
    for (const auto& p : series.points) {
        out += std::to_string(p.index);
        out += '\t';
        out += fmt_shortest(p.value);
        out += '\t';
        out += p.lower ? fmt_shortest(*p.lower) : "";
        out += '\t';
        out += p.upper ? fmt_shortest(*p.upper) : "";
        out += '\t';
        out += p.limit_exceeded ? '1' : '0';
        out += '\t';
        out += p.uncertainty_spike ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string digest_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hexdigits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hexdigits[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

std::string file_digest(const std::filesystem::path& path) {
    return digest_hex(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

} // namespace cspc
