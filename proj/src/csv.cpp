#include "aspp/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "aspp/errors.hpp"

namespace aspp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return cells;
}

bool is_null_token(std::string_view cell) {
    if (cell.empty()) return true;
    if (cell.size() != 4) return false;
    const char lower[5] = {static_cast<char>(std::tolower(cell[0])),
                           static_cast<char>(std::tolower(cell[1])),
                           static_cast<char>(std::tolower(cell[2])),
                           static_cast<char>(std::tolower(cell[3])), '\0'};
    return std::string_view(lower, 4) == "null";
}

}  // namespace

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc{} || result.ptr != last) {
        throw Error("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::string iso_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

std::chrono::sys_days parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw Error("expected YYYY-MM-DD");
    }
    auto parse_int = [](std::string_view s) {
        int value = 0;
        const auto result = std::from_chars(s.data(), s.data() + s.size(), value);
        if (result.ec != std::errc{} || result.ptr != s.data() + s.size()) {
            throw Error("expected YYYY-MM-DD");
        }
        return value;
    };
    const int y = parse_int(text.substr(0, 4));
    const int m = parse_int(text.substr(5, 2));
    const int d = parse_int(text.substr(8, 2));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw Error("no such calendar date");
    return std::chrono::sys_days{ymd};
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

PriceCsvResult load_price_csv(const std::filesystem::path& path, std::string_view date_column,
                              std::string_view close_column, std::size_t min_rows) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::size_t line_no = 0;
    std::size_t cursor = 0;
    auto next_line = [&](std::string_view& out) {
        if (cursor >= content.size()) return false;
        const std::size_t end = content.find('\n', cursor);
        out = std::string_view(content).substr(
            cursor, end == std::string::npos ? content.size() - cursor : end - cursor);
        cursor = end == std::string::npos ? content.size() : end + 1;
        ++line_no;
        return true;
    };

    std::string_view header;
    if (!next_line(header)) throw CsvError("'" + path.string() + "' is empty");
    const auto header_cells = split_csv_line(header);
    std::size_t date_idx = header_cells.size();
    std::size_t close_idx = header_cells.size();
    for (std::size_t i = 0; i < header_cells.size(); ++i) {
        if (header_cells[i] == date_column) date_idx = i;
        if (header_cells[i] == close_column) close_idx = i;
    }
    if (date_idx == header_cells.size()) throw MissingColumnError(std::string(date_column));
    if (close_idx == header_cells.size()) throw MissingColumnError(std::string(close_column));

    struct Row {
        std::chrono::sys_days date;
        double close;
    };
    std::vector<Row> rows;
    std::size_t skipped = 0;
    std::string_view line;
    while (next_line(line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        const std::string_view close_cell = close_idx < cells.size() ? cells[close_idx] : "";
        if (is_null_token(close_cell)) {
            ++skipped;
            continue;
        }
        const std::string_view date_cell = date_idx < cells.size() ? cells[date_idx] : "";
        std::chrono::sys_days date;
        try {
            date = parse_iso_date(date_cell);
        } catch (const Error&) {
            throw UnparsableDateError(line_no, std::string(date_cell));
        }
        double close = 0.0;
        try {
            close = parse_double(close_cell);
        } catch (const Error&) {
            throw CsvError("line " + std::to_string(line_no) + ": unparsable close '" +
                           std::string(close_cell) + "'");
        }
        if (!(close > 0.0)) throw NonPositivePriceError(line_no, std::string(close_cell));
        rows.push_back({date, close});
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw CsvError("duplicate date " + iso_date(rows[i].date));
        }
    }
    if (rows.size() < min_rows) throw TooFewRowsError(rows.size(), min_rows);

    PriceCsvResult result;
    result.skipped_rows = skipped;
    result.series.dates.reserve(rows.size());
    result.series.closes.reserve(rows.size());
    for (const Row& row : rows) {
        result.series.dates.push_back(row.date);
        result.series.closes.push_back(row.close);
    }
    return result;
}

}  // namespace aspp
