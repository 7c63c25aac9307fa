#include "lexer.hpp"

#include <cctype>

namespace asmprop::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

Result<std::vector<Token>> tokenize(std::string_view text, std::string_view keep_comment_prefix) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            auto nl = text.find('\n', i);
            std::size_t stop = nl == std::string_view::npos ? text.size() : nl;
            auto comment = text.substr(i, stop - i);
            if (!keep_comment_prefix.empty() && comment.substr(0, keep_comment_prefix.size()) ==
                                                    keep_comment_prefix) {
                Token t{TokenKind::Symbol, std::string(comment), {line, col}, i, stop};
                while (!t.text.empty() && (t.text.back() == '\r' || t.text.back() == ' '))
                    t.text.pop_back();
                tokens.push_back(std::move(t));
            }
            advance(stop - i);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            auto close = text.find("*/", i + 2);
            if (close == std::string_view::npos) {
                Diagnostics d;
                d.error("lexical-error", "unterminated block comment", {line, col});
                return d;
            }
            advance(close + 2 - i);
            continue;
        }

        Token tok;
        tok.pos = {line, col};
        tok.offset = i;
        if (ident_start(c) || (c == '$' && i + 1 < text.size() && ident_start(text[i + 1]))) {
            std::size_t j = i + 1;
            while (j < text.size() && ident_char(text[j])) ++j;
            tok.kind = TokenKind::Identifier;
            tok.text = std::string(text.substr(i, j - i));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && ident_start(text[j])) {
                Diagnostics d;
                d.error("lexical-error", "malformed number '" +
                                             std::string(text.substr(i, j - i + 1)) + "'",
                        {line, col});
                return d;
            }
            tok.kind = TokenKind::Integer;
            tok.text = std::string(text.substr(i, j - i));
            if (tok.text.size() > 18) {
                Diagnostics d;
                d.error("lexical-error", "integer literal too large", {line, col});
                return d;
            }
        } else {
            static constexpr std::string_view two_char[] = {":=", "!=", "<=", ">=", "->", "<->"};
            static constexpr std::string_view one_char = "()[]{}:,;=<>+-|*.!&/";
            tok.kind = TokenKind::Symbol;
            if (text.substr(i, 3) == "<->") {
                tok.text = "<->";
            } else {
                for (auto op : two_char) {
                    if (op.size() == 2 && text.substr(i, 2) == op) {
                        tok.text = std::string(op);
                        break;
                    }
                }
            }
            if (tok.text.empty()) {
                if (one_char.find(c) == std::string_view::npos) {
                    Diagnostics d;
                    std::string shown = static_cast<unsigned char>(c) < 0x80
                                            ? std::string("'") + c + "'"
                                            : std::string("non-ASCII byte");
                    d.error("lexical-error", "unexpected character " + shown, {line, col});
                    return d;
                }
                tok.text = std::string(1, c);
            }
        }
        advance(tok.text.size());
        tok.end = i;
        tokens.push_back(std::move(tok));
    }
    Token end;
    end.kind = TokenKind::End;
    end.pos = {line, col};
    end.offset = end.end = text.size();
    tokens.push_back(end);
    return tokens;
}

}  // namespace asmprop::detail
