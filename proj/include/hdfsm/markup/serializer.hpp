#pragma once

#include <string>
#include <string_view>

#include "hdfsm/markup/document.hpp"

namespace hdfsm::markup {

// Double-quoted form with \" \\ \n \t \r escapes.
std::string quote(std::string_view s);

// Canonical text: LF endings, two-space indentation, a blank line before
// each DIALOGUE, no tabs, exactly one trailing newline. Throws
// hdfsm::Error(invalid_fsm) if any dialogue fails validation or carries an
// id the grammar cannot express.
std::string serialize(const MarkupDocument& doc);

}  // namespace hdfsm::markup
