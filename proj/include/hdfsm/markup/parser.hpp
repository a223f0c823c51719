#pragma once

#include <string_view>

#include "hdfsm/markup/document.hpp"

namespace hdfsm::markup {

// Strict parse of an .hdfsm document. Succeeds only when every dialogue is a
// valid FSM; otherwise `errors` lists every problem found (the parser keeps
// going after recoverable errors) and `value` holds the best-effort document.
// Option ids are assigned positionally.
ParseResult<MarkupDocument> parse(std::string_view text);

}  // namespace hdfsm::markup
