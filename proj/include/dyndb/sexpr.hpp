#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dyndb {

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {}
    int line;
    int col;
};

struct SExpr {
    bool atom = false;
    std::string text;  // atom only
    std::vector<SExpr> items;
    int line = 1;
    int col = 1;

    bool is_list() const { return !atom; }
    bool head_is(const char* name) const { return !atom && !items.empty() && items[0].atom && items[0].text == name; }
};

// Parses a sequence of s-expressions. ';' starts a line comment.
std::vector<SExpr> parse_sexprs(const std::string& text);

[[noreturn]] void fail_at(const SExpr& e, const std::string& msg);
long long atom_int(const SExpr& e);
const std::string& atom_text(const SExpr& e);

}  // namespace dyndb
