#include "ssgk/text_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "ssgk/error.hpp"

namespace ssgk::text {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
    return buf;
}

std::optional<std::string> LineReader::next() {
    std::string line;
    while (std::getline(is_, line)) {
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_comments_) {
            const std::string_view t = trim(line);
            if (t.empty() || t.front() == '#') continue;
        }
        return line;
    }
    return std::nullopt;
}

void LineReader::fail(const std::string& msg) const { fail_at(line_, msg); }

void LineReader::fail_at(std::size_t line, const std::string& msg) const {
    fail_data(source_ + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<double> parse_double(std::string_view tok) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view tok) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) return std::nullopt;
    return v;
}

std::vector<double> parse_row(const LineReader& r, std::string_view line, std::size_t count) {
    const auto toks = split_ws(line);
    if (toks.size() != count)
        r.fail("expected " + std::to_string(count) + " values, found " +
               std::to_string(toks.size()));
    std::vector<double> row;
    row.reserve(count);
    for (auto t : toks) {
        const auto v = parse_double(t);
        if (!v) r.fail("non-numeric token '" + std::string(t) + "'");
        if (!std::isfinite(*v)) r.fail("non-finite value '" + std::string(t) + "'");
        row.push_back(*v);
    }
    return row;
}

}  // namespace ssgk::text
