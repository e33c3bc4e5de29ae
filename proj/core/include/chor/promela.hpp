#pragma once

// Promela translation of a composite system and a syntactic validator for
// the emitted subset.

#include "chor/cbs.hpp"
#include "chor/diagnostic.hpp"

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chor {

class PromelaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PromelaOptions {
    std::size_t max_len = 8;
    // Acks travel back on the data channel and receive sites use synchRecv.
    bool paper_ack_encoding = false;
    // Reject string data instead of interning it.
    bool strict = false;
    // Contents of a property file to append as ltl blocks.
    std::string inline_ltl;
};

// Identifier made of [A-Za-z0-9_] only.
std::string promela_ident(std::string_view s);
std::string currport_var(std::string_view component);
// P_<Comp>_<name>; port copies share the symbol of their base port.
std::string port_symbol(std::string_view port_id);
std::string location_symbol(std::string_view component, std::string_view location);
std::string channel_name(std::string_view recv_port_id);
std::string ack_channel_name(std::string_view recv_port_id);

// Numeric code of every port symbol, 0 being reserved for "no port yet".
std::map<std::string, int> port_symbol_codes(const CompositeSystem& sys);

// `name : formula` lines to `ltl name { formula }` blocks.
std::string ltl_blocks(std::string_view ltl_file);

std::string emit_channels(const CompositeSystem& sys, std::size_t max_len);
std::string emit_process(const CompositeSystem& sys, const std::string& component, const PromelaOptions& opts = {});
std::string emit_model(const CompositeSystem& sys, const PromelaOptions& opts = {});

// Preprocesses (#define expansion) and parses the emitted Promela subset,
// including ltl blocks; identifiers must be declared before use.
Diagnostics validate_promela(std::string_view text);

} // namespace chor
