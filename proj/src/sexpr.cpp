#include "dyndb/sexpr.hpp"

#include <cctype>

namespace dyndb {

namespace {

class Reader {
  public:
    explicit Reader(const std::string& s) : s_(s) {}

    std::vector<SExpr> all() {
        std::vector<SExpr> out;
        skip();
        while (pos_ < s_.size()) {
            out.push_back(read());
            skip();
        }
        return out;
    }

  private:
    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == ';') {
                while (pos_ < s_.size() && s_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr e;
        e.line = line_;
        e.col = col_;
        char c = s_[pos_];
        if (c == ')') throw ParseError("unexpected ')'", line_, col_);
        if (c == '(') {
            advance();
            skip();
            while (true) {
                if (pos_ >= s_.size()) throw ParseError("unterminated list", e.line, e.col);
                if (s_[pos_] == ')') {
                    advance();
                    break;
                }
                e.items.push_back(read());
                skip();
            }
            return e;
        }
        e.atom = true;
        while (pos_ < s_.size()) {
            char x = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(x)) || x == '(' || x == ')' || x == ';') break;
            e.text.push_back(x);
            advance();
        }
        return e;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<SExpr> parse_sexprs(const std::string& text) { return Reader(text).all(); }

void fail_at(const SExpr& e, const std::string& msg) { throw ParseError(msg, e.line, e.col); }

const std::string& atom_text(const SExpr& e) {
    if (!e.atom) fail_at(e, "expected a symbol");
    return e.text;
}

long long atom_int(const SExpr& e) {
    const std::string& t = atom_text(e);
    if (t.empty()) fail_at(e, "expected an integer");
    std::size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) fail_at(e, "expected an integer");
    for (; i < t.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) fail_at(e, "expected an integer, got '" + t + "'");
    }
    try {
        return std::stoll(t);
    } catch (const std::out_of_range&) {
        fail_at(e, "integer out of range");
    }
}

}  // namespace dyndb
