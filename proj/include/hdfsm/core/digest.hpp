#pragma once

#include <string>
#include <string_view>

#include "hdfsm/core/model.hpp"

namespace hdfsm {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Digest of the canonical JSON form of plan + dialogues. Two contents hash
// equal iff they are equal as values.
std::string content_hash(const ProjectContent& content);

}  // namespace hdfsm
