#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <string_view>

namespace hdfsm::prompts {

inline constexpr int kTemplateVersion = 1;

// Raw template text by asset name ("planner.system", "repair.user", ...).
// Throws hdfsm::Error(not_found) for unknown names.
std::string_view asset(std::string_view name);

// Replaces every "{{key}}" with its value. Unknown placeholders stay as they
// are; values are inserted verbatim and never rescanned.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

// Body of the first fenced block tagged with one of `preferred`, else of the
// first fenced block of any kind, else the whole text.
std::string extract_fenced(std::string_view text, std::initializer_list<std::string_view> preferred);

}  // namespace hdfsm::prompts
