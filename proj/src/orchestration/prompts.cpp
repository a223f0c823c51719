#include "hdfsm/orchestration/prompts.hpp"

#include <utility>

#include "hdfsm/core/error.hpp"
#include "hdfsm/core/text.hpp"

namespace hdfsm::prompts {

using namespace hdfsm::text;

namespace detail {
extern const std::pair<std::string_view, std::string_view> kAssets[];
extern const unsigned kAssetCount;
}  // namespace detail

std::string_view asset(std::string_view name) {
  for (unsigned i = 0; i < detail::kAssetCount; ++i) {
    if (detail::kAssets[i].first == name) return detail::kAssets[i].second;
  }
  throw Error(ErrorCode::not_found, "no prompt template named " + std::string(name));
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    const auto it = values.find(key);
    if (it != values.end()) {
      out += it->second;
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

namespace {

struct Fence {
  std::string info;
  std::string body;
};

// Fenced blocks opened by a line starting with ``` (after optional blanks).
// An unclosed fence runs to the end of the text.
std::vector<Fence> fences(std::string_view text) {
  std::vector<Fence> out;
  Fence* open = nullptr;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view stripped = trim(line);
    if (stripped.substr(0, 3) == "```") {
      if (open == nullptr) {
        out.push_back({ascii_lower(trim(stripped.substr(3))), {}});
        open = &out.back();
      } else {
        open = nullptr;
      }
    } else if (open != nullptr) {
      open->body.append(line);
      open->body.push_back('\n');
    }
    pos = eol + 1;
  }
  return out;
}

}  // namespace

std::string extract_fenced(std::string_view text,
                           std::initializer_list<std::string_view> preferred) {
  const auto blocks = fences(text);
  for (const auto& b : blocks) {
    for (auto tag : preferred) {
      if (b.info == tag) return b.body;
    }
  }
  if (!blocks.empty()) return blocks.front().body;
  return std::string(text);
}

}  // namespace hdfsm::prompts
