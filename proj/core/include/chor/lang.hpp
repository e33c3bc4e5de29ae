#pragma once

// Concrete syntax: parser, pretty-printer and well-formedness checks.
// The grammar is documented in docs/grammar.md.

#include "chor/ast.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace chor {

struct ParseResult {
    std::optional<Program> program;
    Diagnostics diagnostics;

    bool ok() const { return program.has_value(); }
};

// Single-file layout: component blocks followed by one choreography.
ParseResult parse(std::string_view source);

// Split layout: a configuration holding only component blocks, and a
// choreography file holding only the choreography definition.
ParseResult parse_split(std::string_view config, std::string_view choreography);

std::string pretty(const SystemDecl& decl);
std::string pretty(const Chor& ch);
std::string pretty(const Program& p);

Diagnostics check_well_formed(const SystemDecl& decl, const Chor& ch);

} // namespace chor
