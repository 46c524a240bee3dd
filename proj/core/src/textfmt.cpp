#include "hpn/textfmt.hpp"

#include <cctype>

namespace hpn::textfmt {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> tokens(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        if (i > start)
            out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

bool valid_name(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
            return false;
    return true;
}

std::pair<std::string, std::string> split_qualified(std::string_view s, int line_no)
{
    if (!valid_name(s))
        throw parse_error(line_no, "invalid name '" + std::string(s) + "'");
    std::size_t dot = s.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == s.size())
        throw parse_error(line_no, "expected <net>.<element>, got '" + std::string(s) + "'");
    return {std::string(s.substr(0, dot)), std::string(s.substr(dot + 1))};
}

std::vector<Line> read_lines(std::string_view content, const std::string& expected_header)
{
    std::vector<Line> out;
    int line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= content.size()) {
        std::size_t end = content.find('\n', pos);
        std::string_view raw = content.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                                 : end - pos);
        ++line_no;
        pos = end == std::string_view::npos ? content.size() + 1 : end + 1;

        std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        std::string_view text = trim(raw);
        if (text.empty())
            continue;
        if (!header_seen) {
            if (std::string(text) != expected_header)
                throw parse_error(line_no, "expected header '" + expected_header + "', got '" +
                                               std::string(text) + "'");
            header_seen = true;
            continue;
        }
        out.push_back(Line{line_no, std::string(text)});
    }
    if (!header_seen)
        throw parse_error(line_no, "missing header '" + expected_header + "'");
    return out;
}

} // namespace hpn::textfmt
