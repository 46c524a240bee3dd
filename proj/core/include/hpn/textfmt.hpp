#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hpn {

struct parse_error : std::runtime_error {
    int line;
    parse_error(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no)
    {
    }
};

namespace textfmt {

std::string_view trim(std::string_view s);

/// Splits on whitespace runs.
std::vector<std::string> tokens(std::string_view s);

/// Identifier per the file formats: [A-Za-z0-9_.]+
bool valid_name(std::string_view s);

/// Splits a qualified name at its last dot: "a1.c.p_in" -> ("a1.c", "p_in").
/// Throws parse_error when there is no dot or either side is empty.
std::pair<std::string, std::string> split_qualified(std::string_view s, int line_no);

struct Line {
    int number;
    std::string text; // trimmed, comments stripped, non-empty
};

/// All meaningful lines of a document: '#' starts a comment, blank lines are
/// skipped. The first meaningful line must equal the given header.
std::vector<Line> read_lines(std::string_view content, const std::string& expected_header);

} // namespace textfmt
} // namespace hpn
