#pragma once

// Line-oriented parsing helpers shared by the text file formats. Every
// failure names the source and the 1-based line number.

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ssgk::text {

// 17 significant digits; round-trips every finite double.
[[nodiscard]] std::string format_double(double v);

class LineReader {
public:
    // When skip_comments is set, blank lines and lines whose first
    // non-blank character is '#' are skipped.
    LineReader(std::istream& is, std::string source, bool skip_comments = true)
        : is_(is), source_(std::move(source)), skip_comments_(skip_comments) {}

    // Next significant line, or nullopt at end of input.
    std::optional<std::string> next();

    [[nodiscard]] std::size_t line_number() const noexcept { return line_; }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }

    // "source:line: msg" as a data Error.
    [[noreturn]] void fail(const std::string& msg) const;
    [[noreturn]] void fail_at(std::size_t line, const std::string& msg) const;

private:
    std::istream& is_;
    std::string source_;
    bool skip_comments_;
    std::size_t line_ = 0;
};

[[nodiscard]] std::vector<std::string_view> split_ws(std::string_view line);
[[nodiscard]] std::string_view trim(std::string_view s);

[[nodiscard]] std::optional<double> parse_double(std::string_view tok);
[[nodiscard]] std::optional<long long> parse_int(std::string_view tok);

// Parse exactly `count` doubles from a line or fail with the reader's position.
[[nodiscard]] std::vector<double> parse_row(const LineReader& r, std::string_view line,
                                            std::size_t count);

}  // namespace ssgk::text
