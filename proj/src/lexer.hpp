#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "asmprop/ast.hpp"
#include "asmprop/diagnostics.hpp"

namespace asmprop::detail {

enum class TokenKind { Identifier, Integer, Symbol, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourcePos pos;
    std::size_t offset = 0;  // byte offsets into the source
    std::size_t end = 0;

    bool is(std::string_view s) const {
        return (kind == TokenKind::Symbol || kind == TokenKind::Identifier) && text == s;
    }
};

/// Splits text into tokens. `//` and `/* */` comments are dropped unless the
/// line comment starts with `keep_comment_prefix`, in which case it is kept as
/// a single Symbol token holding the whole comment text.
Result<std::vector<Token>> tokenize(std::string_view text,
                                    std::string_view keep_comment_prefix = {});

}  // namespace asmprop::detail
